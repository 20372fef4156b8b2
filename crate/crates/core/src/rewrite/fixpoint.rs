//! The saturating tree for height-bounded reachability.
//!
//! Every tree reachable within height `k` embeds into the result, and the
//! result is itself reachable. AddChild fires only when no existing child
//! already carries the new label, so the tree stays polynomial.

use std::collections::{HashSet, VecDeque};

use crate::guard::eval_all;
use crate::rewrite::{RewriteOp, RewriteSystem};
use crate::tree::{NodePath, Tree, TreeIndex};
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WorklistOrder {
    Fifo,
    Lifo,
}

pub fn fixpoint_tree_k(system: &RewriteSystem, k: usize) -> Result<Tree, Error> {
    fixpoint_tree_k_ordered(system, k, WorklistOrder::Fifo)
}

pub fn fixpoint_tree_k_ordered(
    system: &RewriteSystem,
    k: usize,
    order: WorklistOrder,
) -> Result<Tree, Error> {
    for r in &system.rules {
        if !r.guard.is_positive() {
            return Err(Error::Unsupported(format!(
                "rule {} has a non-positive guard",
                r.name
            )));
        }
        if !matches!(r.op, RewriteOp::AddChild(_) | RewriteOp::AddClass(_)) {
            return Err(Error::Unsupported(format!(
                "rule {} is not AddChild/AddClass",
                r.name
            )));
        }
    }
    let mut tree = system.initial.clone();
    if tree.height() > k {
        return Ok(tree);
    }
    let mut work: VecDeque<(NodePath, usize)> = VecDeque::new();
    let mut queued: HashSet<(NodePath, usize)> = HashSet::new();
    let mut marked: HashSet<(NodePath, usize)> = HashSet::new();

    let rescan = |tree: &Tree,
                  work: &mut VecDeque<(NodePath, usize)>,
                  queued: &mut HashSet<(NodePath, usize)>,
                  marked: &HashSet<(NodePath, usize)>| {
        let ix = TreeIndex::new(tree);
        for (ri, rule) in system.rules.iter().enumerate() {
            let holds = eval_all(&ix, &rule.guard, None);
            for (i, h) in holds.into_iter().enumerate() {
                if !h {
                    continue;
                }
                let pair = (ix.paths[i].clone(), ri);
                if !marked.contains(&pair) && queued.insert(pair.clone()) {
                    work.push_back(pair);
                }
            }
        }
    };
    rescan(&tree, &mut work, &mut queued, &marked);

    loop {
        let next = match order {
            WorklistOrder::Fifo => work.pop_front(),
            WorklistOrder::Lifo => work.pop_back(),
        };
        let Some((v, ri)) = next else { break };
        queued.remove(&(v.clone(), ri));
        marked.insert((v.clone(), ri));
        let rule = &system.rules[ri];
        let changed = match &rule.op {
            RewriteOp::AddClass(x) => tree.add_classes(&v, x)?,
            RewriteOp::AddChild(x) => {
                let covered = tree
                    .children(&v)
                    .iter()
                    .any(|c| x.is_subset(tree.label(c).unwrap()));
                if v.depth() < k && !covered {
                    tree.add_child(&v, x.clone())?;
                    true
                } else {
                    false
                }
            }
            _ => unreachable!("checked above"),
        };
        if changed {
            rescan(&tree, &mut work, &mut queued, &marked);
        }
    }
    Ok(tree)
}
