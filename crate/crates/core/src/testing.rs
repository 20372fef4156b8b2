//! Random instances and brute-force reference checks shared by the test
//! suites. Everything here is deliberately naive.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::class::{ClassId, Classes, Label};
use crate::guard::{match_guard_assume, AssumptionFunction, Dir, Guard};
use crate::rewrite::{
    enumerate_post_star_assume, Caps, Query, RewriteOp, RewriteRule, RewriteSystem,
};
use crate::saturation::reach_for;
use crate::simplify::{Origin, SimpleGuard, SimpleOp, SimpleQuery, SimpleRule, SimpleSystem};
use crate::spds::{pds_to_tree_witness, Config, Mode};
use crate::tree::{NodePath, Tree};

/// Classes `c0 … c{n-1}`.
pub fn universe(n: usize) -> Classes {
    let names: Vec<String> = (0..n).map(|i| format!("c{i}")).collect();
    Classes::from_names(names.iter().map(String::as_str))
}

pub fn random_label<R: Rng>(rng: &mut R, n: usize, min: usize, max: usize) -> Label {
    let size = rng.gen_range(min..=max.min(n));
    let mut ids: Vec<u32> = (0..n as u32).collect();
    ids.shuffle(rng);
    ids.into_iter().take(size).map(ClassId).collect()
}

pub fn random_tree<R: Rng>(rng: &mut R, n: usize, max_nodes: usize, max_depth: usize) -> Tree {
    let mut t = Tree::single(random_label(rng, n, 0, 2));
    let size = rng.gen_range(1..=max_nodes.max(1));
    for _ in 1..size {
        let open: Vec<NodePath> = t
            .paths()
            .filter(|p| p.depth() < max_depth)
            .cloned()
            .collect();
        let Some(p) = open.choose(rng) else { break };
        let label = random_label(rng, n, 0, 2);
        t.add_child(p, label).expect("node exists");
    }
    t
}

/// A tree into which `t` embeds by the identity: extra classes and extra
/// children, some of them copies of existing subtrees.
pub fn extend_tree<R: Rng>(rng: &mut R, t: &Tree, n: usize, extra: usize) -> Tree {
    let mut out = t.clone();
    for _ in 0..extra {
        let paths: Vec<NodePath> = out.paths().cloned().collect();
        let p = paths.choose(rng).unwrap().clone();
        match rng.gen_range(0..3) {
            0 => {
                let l = random_label(rng, n, 1, 2);
                out.add_classes(&p, &l).unwrap();
            }
            1 => {
                let l = random_label(rng, n, 0, 2);
                out.add_child(&p, l).unwrap();
            }
            _ => {
                // Duplicate a subtree next to itself.
                if let Some(parent) = p.parent() {
                    let sub = out.subtree(&p).unwrap();
                    graft(&mut out, &parent, &sub);
                }
            }
        }
    }
    out
}

fn graft(t: &mut Tree, at: &NodePath, sub: &Tree) {
    fn go(t: &mut Tree, at: &NodePath, sub: &Tree, node: &NodePath) {
        let new = t.add_child(at, sub.label(node).unwrap().clone()).unwrap();
        for c in sub.children(node) {
            go(t, &new, sub, &c);
        }
    }
    go(t, at, sub, &NodePath::root());
}

#[derive(Clone, Copy, Debug)]
pub struct GuardShape {
    pub negation: bool,
    pub siblings: bool,
}

pub fn random_guard<R: Rng>(rng: &mut R, n: usize, depth: usize, shape: GuardShape) -> Guard {
    let atom = |rng: &mut R| {
        if rng.gen_bool(0.08) {
            Guard::True
        } else {
            Guard::Atom(ClassId(rng.gen_range(0..n as u32)))
        }
    };
    if depth <= 1 || rng.gen_bool(0.3) {
        return atom(rng);
    }
    let sub = |rng: &mut R| random_guard(rng, n, depth - 1, shape);
    match rng.gen_range(0..6) {
        0 => Guard::and(sub(rng), sub(rng)),
        1 => Guard::or(sub(rng), sub(rng)),
        2 if shape.negation => Guard::not(sub(rng)),
        _ => {
            let mut dirs = vec![Dir::Up, Dir::UpStar, Dir::Down, Dir::DownStar];
            if shape.siblings {
                dirs.extend([Dir::Left, Dir::Right]);
            }
            Guard::modal(*dirs.choose(rng).unwrap(), sub(rng))
        }
    }
}

pub fn random_op<R: Rng>(rng: &mut R, n: usize, removals: bool) -> RewriteOp {
    let kinds = if removals { 4 } else { 2 };
    match rng.gen_range(0..kinds) {
        0 => RewriteOp::AddChild(random_label(rng, n, 1, 2)),
        1 => RewriteOp::AddClass(random_label(rng, n, 1, 2)),
        2 => RewriteOp::RemoveClass(random_label(rng, n, 1, 1)),
        _ => RewriteOp::RemoveNode,
    }
}

/// A positive system over `n` classes.
pub fn random_system<R: Rng>(
    rng: &mut R,
    n: usize,
    rules: usize,
    guard_depth: usize,
    removals: bool,
    queries: usize,
) -> RewriteSystem {
    let shape = GuardShape {
        negation: false,
        siblings: false,
    };
    let initial = random_tree(rng, n, 2, 1);
    let mut sys = RewriteSystem::new(universe(n), initial);
    for i in 0..rules {
        let guard = random_guard(rng, n, guard_depth, shape);
        sys.rules.push(RewriteRule::new(
            format!("r{i}"),
            guard,
            random_op(rng, n, removals),
        ));
    }
    for i in 0..queries {
        sys.queries.push(Query {
            name: format!("q{i}"),
            guard: random_guard(rng, n, guard_depth, shape),
        });
    }
    sys
}

/// A simple system over `n` classes with the given initial tree. Queries
/// ask for every class.
pub fn random_simple<R: Rng>(rng: &mut R, n: usize, rules: usize, initial: Tree) -> SimpleSystem {
    let mut out = Vec::new();
    for i in 0..rules {
        let add_child = rng.gen_bool(0.35);
        let dir = if add_child {
            None
        } else {
            *[None, None, Some(Dir::Up), Some(Dir::Down)]
                .choose(rng)
                .unwrap()
        };
        let guard = SimpleGuard {
            dir,
            classes: random_label(rng, n, 0, 2),
        };
        let x = random_label(rng, n, 1, 2);
        let op = if add_child {
            SimpleOp::AddChild(x)
        } else {
            SimpleOp::AddClass(x)
        };
        out.push(SimpleRule {
            name: format!("r{i}"),
            guard,
            op,
            origin: Origin::Original(i),
        });
    }
    SimpleSystem {
        classes: universe(n),
        base_classes: n,
        rules: out,
        initial,
        queries: (0..n)
            .map(|i| SimpleQuery {
                name: format!("q{i}"),
                class: Some(ClassId(i as u32)),
            })
            .collect(),
    }
}

pub fn random_assumption<R: Rng>(rng: &mut R, n: usize) -> AssumptionFunction {
    if rng.gen_bool(0.4) {
        AssumptionFunction::root()
    } else {
        AssumptionFunction::below(random_label(rng, n, 0, 3))
    }
}

/// Reference guard evaluation by direct recursion over the node set, with
/// the transitive modalities computed from path prefixes.
pub fn naive_match(tree: &Tree, v: &NodePath, g: &Guard) -> bool {
    let all: Vec<&NodePath> = tree.paths().collect();
    match g {
        Guard::True => true,
        Guard::Atom(c) => tree.label(v).is_some_and(|l| l.contains(c)),
        Guard::And(a, b) => naive_match(tree, v, a) && naive_match(tree, v, b),
        Guard::Or(a, b) => naive_match(tree, v, a) || naive_match(tree, v, b),
        Guard::Not(a) => !naive_match(tree, v, a),
        Guard::Modal(Dir::Up, a) => v.parent().is_some_and(|p| naive_match(tree, &p, a)),
        Guard::Modal(Dir::Down, a) => all
            .iter()
            .any(|u| u.parent().as_ref() == Some(v) && naive_match(tree, u, a)),
        Guard::Modal(Dir::UpStar, a) => all
            .iter()
            .any(|u| u.is_prefix_of(v) && naive_match(tree, u, a)),
        Guard::Modal(Dir::DownStar, a) => all
            .iter()
            .any(|u| v.is_prefix_of(u) && naive_match(tree, u, a)),
        Guard::Modal(Dir::Left | Dir::Right, a) => match v.parent() {
            None => false,
            Some(p) => all
                .iter()
                .any(|u| u.parent().as_ref() == Some(&p) && naive_match(tree, u, a)),
        },
    }
}

/// Classes that some tree of height at most `k`, grown from a single node
/// labelled `x` under `f`, carries at its root. The flag tells whether the
/// enumeration finished.
pub fn bounded_root_classes(
    simple: &SimpleSystem,
    x: &Label,
    f: &AssumptionFunction,
    k: usize,
    caps: Caps,
) -> (Label, bool) {
    let mut sys = simple.to_rewrite_system();
    sys.initial = Tree::single(x.clone());
    let post = enumerate_post_star_assume(&sys, caps.with_height(k), f);
    let mut out = Label::new();
    for t in &post.trees {
        out.extend(t.root_label().iter().copied());
    }
    (out, post.exhausted)
}

/// Replays simple-rule steps from a single node labelled `x`, reading `up`
/// at the root through `f`.
pub fn replay_simple(
    simple: &SimpleSystem,
    x: &Label,
    f: &AssumptionFunction,
    steps: &[(NodePath, usize)],
) -> Result<Tree, String> {
    let sys = simple.to_rewrite_system();
    let mut t = Tree::single(x.clone());
    for (i, (node, ri)) in steps.iter().enumerate() {
        let rule = &sys.rules[*ri];
        let ok =
            match_guard_assume(&t, node, &rule.guard, f).map_err(|e| format!("step {i}: {e}"))?;
        if !ok {
            return Err(format!("step {i}: guard of {} fails at {node}", rule.name));
        }
        match &rule.op {
            RewriteOp::AddChild(l) => {
                t.add_child(node, l.clone()).map_err(|e| e.to_string())?;
            }
            RewriteOp::AddClass(l) => {
                t.add_classes(node, l).map_err(|e| e.to_string())?;
            }
            _ => return Err("non-simple op".into()),
        }
    }
    Ok(t)
}

/// Outcome of comparing the symbolic class-adding decision with brute force
/// on one (system, label, assumption, bound) instance.
#[derive(Debug, Default, Clone)]
pub struct AddableCheck {
    /// Classes brute force adds but the symbolic path misses.
    pub misses: Vec<ClassId>,
    /// Classes reported addable whose witness does not replay.
    pub bad_witnesses: Vec<(ClassId, String)>,
    pub exhausted: bool,
    pub reported: usize,
}

pub fn check_addable(
    simple: &SimpleSystem,
    x: &Label,
    f: &AssumptionFunction,
    k: usize,
    caps: Caps,
) -> AddableCheck {
    let (brute, exhausted) = bounded_root_classes(simple, x, f, k, caps);
    let mut out = AddableCheck {
        exhausted,
        ..AddableCheck::default()
    };
    for c in simple.classes.ids() {
        let mut reach = match reach_for(simple, c, Mode::Exact, Some(k)) {
            Ok(r) => r,
            Err(e) => {
                out.bad_witnesses.push((c, e.to_string()));
                continue;
            }
        };
        let says = x.contains(&c) || reach.accepts_node(x, f, k + 1);
        if brute.contains(&c) && !says {
            out.misses.push(c);
        }
        if !says {
            continue;
        }
        out.reported += 1;
        let l = reach.layout().clone();
        let config = Config {
            control: l.zero_control(),
            stack: vec![l.initial_letter(x, f)],
        };
        let verdict = (|| -> Result<(), String> {
            let run = reach.extract_witness(&config).map_err(|e| e.to_string())?;
            run.replay(&reach.spds).map_err(|e| e.to_string())?;
            let mut tree = Tree::single(x.clone());
            let steps =
                pds_to_tree_witness(simple, &reach.spds, &run, &NodePath::root(), &mut tree)
                    .map_err(|e| e.to_string())?;
            let t = replay_simple(simple, x, f, &steps)?;
            if t != tree {
                return Err("translated tree differs from the replay".into());
            }
            if t.height() > k {
                return Err(format!("witness tree has height {} above {k}", t.height()));
            }
            if !t.root_label().contains(&c) {
                return Err("witness does not add the class at the root".into());
            }
            Ok(())
        })();
        if let Err(e) = verdict {
            out.bad_witnesses.push((c, e));
        }
    }
    out
}

/// Classes appearing on some node of some tree.
pub fn classes_on(trees: &[Tree]) -> BTreeSet<ClassId> {
    trees
        .iter()
        .flat_map(|t| {
            t.nodes()
                .flat_map(|(_, l)| l.iter().copied())
                .collect::<Vec<_>>()
        })
        .collect()
}
