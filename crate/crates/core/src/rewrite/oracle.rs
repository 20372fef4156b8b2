//! Breadth-first enumeration of reachable trees, the brute-force reference
//! for everything the symbolic procedure decides.

use std::collections::{HashSet, VecDeque};

use crate::embed::{equivalence_key, isomorphism_key};
use crate::guard::{eval_all, AssumptionFunction};
use crate::rewrite::{apply_op, op_legal, RewriteSystem};
use crate::tree::{Tree, TreeIndex};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    /// Trees with more nodes are kept but not expanded.
    pub max_nodes: usize,
    pub max_trees: usize,
    /// Bound on rule applications.
    pub max_steps: usize,
    /// Restricts the step relation to trees of at most this height.
    pub max_height: Option<usize>,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_nodes: 12,
            max_trees: 20_000,
            max_steps: 500_000,
            max_height: None,
        }
    }
}

impl Caps {
    pub fn with_height(self, k: usize) -> Self {
        Caps {
            max_height: Some(k),
            ..self
        }
    }
}

#[derive(Clone, Debug)]
pub struct PostStar {
    /// One representative per equivalence class, in discovery order.
    pub trees: Vec<Tree>,
    /// True when the closure finished without hitting any cap.
    pub exhausted: bool,
}

/// Reachable trees from `system.initial`.
///
/// For positive systems trees are identified up to mutual embedding, which
/// preserves every positive guard; otherwise up to isomorphism.
pub fn enumerate_post_star(system: &RewriteSystem, caps: Caps) -> PostStar {
    enumerate(system, caps, None)
}

/// As [`enumerate_post_star`], reading `(up X)` at the root through `f`.
/// Intended for simple systems.
pub fn enumerate_post_star_assume(
    system: &RewriteSystem,
    caps: Caps,
    f: &AssumptionFunction,
) -> PostStar {
    enumerate(system, caps, Some(f))
}

fn enumerate(system: &RewriteSystem, caps: Caps, assume: Option<&AssumptionFunction>) -> PostStar {
    let positive = system.is_positive();
    let key = |t: &Tree| {
        if positive {
            equivalence_key(t)
        } else {
            isomorphism_key(t)
        }
    };
    let mut seen = HashSet::new();
    let mut trees = Vec::new();
    let mut queue = VecDeque::new();
    let mut exhausted = true;
    let mut steps = 0usize;

    if caps.max_height.is_some_and(|k| system.initial.height() > k) {
        // The initial tree is outside the height-bounded regime; nothing fires.
        return PostStar {
            trees: vec![system.initial.clone()],
            exhausted: true,
        };
    }
    seen.insert(key(&system.initial));
    trees.push(system.initial.clone());
    queue.push_back(0usize);

    'outer: while let Some(ti) = queue.pop_front() {
        let t = trees[ti].clone();
        if t.len() > caps.max_nodes {
            exhausted = false;
            continue;
        }
        let ix = TreeIndex::new(&t);
        for rule in &system.rules {
            let holds = eval_all(&ix, &rule.guard, assume);
            for (i, &h) in holds.iter().enumerate() {
                if !h || !op_legal(ix.paths[i], &rule.op) {
                    continue;
                }
                steps += 1;
                if steps > caps.max_steps {
                    exhausted = false;
                    break 'outer;
                }
                let Ok(next) = apply_op(&t, ix.paths[i], &rule.op) else {
                    continue;
                };
                if caps.max_height.is_some_and(|k| next.height() > k) {
                    continue;
                }
                if seen.insert(key(&next)) {
                    if trees.len() >= caps.max_trees {
                        exhausted = false;
                        break 'outer;
                    }
                    trees.push(next);
                    queue.push_back(trees.len() - 1);
                }
            }
        }
    }
    PostStar { trees, exhausted }
}
