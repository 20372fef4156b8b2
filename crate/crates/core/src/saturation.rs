//! The redundancy decision procedure.
//!
//! Labels of the initial tree are saturated with every class that can be
//! added at each node, either by a direct AddClass rule or through a
//! class-adding oracle that explores the subtrees a node may grow. A query
//! is reachable iff its class ends up in some label, or some node can grow
//! a descendant carrying it.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::class::{ClassId, Label};
use crate::guard::{AssumptionFunction, Dir, Guard};
use crate::rewrite::{apply_rule, RewriteSystem};
use crate::simplify::{
    approximate_siblings, positivize, strip_removals, to_simple, Origin, SimpleOp, SimpleSystem,
};
use crate::spds::{
    build_spds, pds_to_tree_witness, pre_star, restrict_rule_ids, Config, Mode, ReachSet,
};
use crate::tree::{NodePath, Tree, TreeIndex};
use crate::{matched_anywhere, Error};

/// Decides whether a class can be added at a node whose subtree is still
/// empty: the node is labelled `x`, sits at `depth`, and sees `f` above.
pub trait ClassOracle {
    /// Classes worth asking about.
    fn candidates(&self) -> Vec<ClassId>;
    fn addable(&self, c: ClassId, x: &Label, f: &AssumptionFunction, depth: usize) -> bool;
}

/// Oracle backed by one exact-target reach set per class.
pub struct SpdsOracle {
    pub reach: BTreeMap<ClassId, ReachSet>,
    /// Height bound; `None` for unbounded reachability.
    pub k: Option<usize>,
}

impl SpdsOracle {
    /// Builds reach sets for `classes`, in parallel on the ambient rayon pool.
    pub fn build(
        system: &SimpleSystem,
        classes: &[ClassId],
        mode: Mode,
        k: Option<usize>,
    ) -> Result<Self, Error> {
        let built: Result<Vec<(ClassId, ReachSet)>, Error> = classes
            .par_iter()
            .map(|&c| Ok((c, reach_for(system, c, mode, k)?)))
            .collect();
        Ok(SpdsOracle {
            reach: built?.into_iter().collect(),
            k,
        })
    }

    pub fn headroom(&self, depth: usize) -> usize {
        match self.k {
            Some(k) if depth > k => 0,
            Some(k) => k - depth + 1,
            None => 1,
        }
    }
}

impl ClassOracle for SpdsOracle {
    fn candidates(&self) -> Vec<ClassId> {
        self.reach.keys().copied().collect()
    }

    fn addable(&self, c: ClassId, x: &Label, f: &AssumptionFunction, depth: usize) -> bool {
        if x.contains(&c) {
            return true;
        }
        let h = self.headroom(depth);
        h > 0 && self.reach.get(&c).is_some_and(|r| r.accepts_node(x, f, h))
    }
}

/// Saturated reach set for adding `c` (at the node itself in exact mode, at
/// any descendant in anywhere mode).
pub fn reach_for(
    system: &SimpleSystem,
    c: ClassId,
    mode: Mode,
    k: Option<usize>,
) -> Result<ReachSet, Error> {
    let ids = restrict_rule_ids(system, c);
    let mut spds = build_spds(system, &ids, &[c])?;
    let i = spds
        .layout
        .position(c)
        .expect("target class is in the layout");
    let v = spds.layout.y(i, crate::spds::Stk::Cur);
    let target = spds.mgr.var(v)?;
    // Under a bound the run may use k + 1 stack letters: the root and k levels.
    let cap = k.map(|k| k + 1);
    pre_star(spds, target, mode, cap)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EventKind {
    /// A direct AddClass rule, by index into the simple system.
    Direct(usize),
    /// The oracle reported `class` addable; `label` and `assume` are the
    /// node's label and context at that time.
    ClassAdding {
        class: ClassId,
        label: Label,
        assume: AssumptionFunction,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SaturationEvent {
    pub node: NodePath,
    pub kind: EventKind,
}

/// How a class got into a saturated label.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Initial,
    Event(usize),
}

#[derive(Clone, Debug)]
pub struct SaturatedTree {
    pub tree: Tree,
    pub events: Vec<SaturationEvent>,
    pub provenance: BTreeMap<(NodePath, ClassId), Provenance>,
}

pub fn saturate(system: &SimpleSystem, oracle: &dyn ClassOracle) -> SaturatedTree {
    let n = system.initial.len();
    saturate_ordered(system, oracle, &(0..n).collect::<Vec<_>>())
}

/// Saturation with the worklist seeded in `order` (preorder positions).
pub fn saturate_ordered(
    system: &SimpleSystem,
    oracle: &dyn ClassOracle,
    order: &[usize],
) -> SaturatedTree {
    let t0 = &system.initial;
    let ix = TreeIndex::new(t0);
    let n = ix.len();
    let paths: Vec<NodePath> = ix.paths.iter().map(|p| (*p).clone()).collect();
    let mut labels: Vec<Label> = ix.labels.iter().map(|l| (*l).clone()).collect();
    let mut provenance = BTreeMap::new();
    for (i, l) in labels.iter().enumerate() {
        for &c in l {
            provenance.insert((paths[i].clone(), c), Provenance::Initial);
        }
    }
    let mut events = Vec::new();
    let add_class_rules: Vec<usize> = system
        .rules
        .iter()
        .enumerate()
        .filter(|(_, r)| matches!(r.op, SimpleOp::AddClass(_)))
        .map(|(i, _)| i)
        .collect();
    let candidates = if system.add_child_rules().next().is_some() {
        oracle.candidates()
    } else {
        Vec::new()
    };

    let mut queue: VecDeque<usize> = order.iter().copied().collect();
    let mut queued = vec![false; n];
    for &i in order {
        queued[i] = true;
    }
    while let Some(v) = queue.pop_front() {
        queued[v] = false;
        let mut changed = false;
        loop {
            let mut fired = false;
            for &ri in &add_class_rules {
                let r = &system.rules[ri];
                let add = r.op.classes();
                if add.is_subset(&labels[v]) {
                    continue;
                }
                let holds = match r.guard.dir {
                    None => r.guard.classes.is_subset(&labels[v]),
                    Some(Dir::Up) => {
                        ix.parent[v].is_some_and(|p| r.guard.classes.is_subset(&labels[p]))
                    }
                    Some(Dir::Down) => ix.children[v]
                        .iter()
                        .any(|&c| r.guard.classes.is_subset(&labels[c])),
                    Some(_) => false,
                };
                if holds {
                    for &c in add {
                        if labels[v].insert(c) {
                            provenance
                                .insert((paths[v].clone(), c), Provenance::Event(events.len()));
                        }
                    }
                    events.push(SaturationEvent {
                        node: paths[v].clone(),
                        kind: EventKind::Direct(ri),
                    });
                    fired = true;
                }
            }
            let f = match ix.parent[v] {
                None => AssumptionFunction::root(),
                Some(p) => AssumptionFunction::below(labels[p].clone()),
            };
            for &c in &candidates {
                if !labels[v].contains(&c) && oracle.addable(c, &labels[v], &f, paths[v].depth()) {
                    events.push(SaturationEvent {
                        node: paths[v].clone(),
                        kind: EventKind::ClassAdding {
                            class: c,
                            label: labels[v].clone(),
                            assume: f.clone(),
                        },
                    });
                    provenance.insert((paths[v].clone(), c), Provenance::Event(events.len() - 1));
                    labels[v].insert(c);
                    fired = true;
                }
            }
            if !fired {
                break;
            }
            changed = true;
        }
        if changed {
            let mut wake: Vec<usize> = ix.children[v].clone();
            wake.extend(ix.parent[v]);
            for u in wake {
                if !queued[u] {
                    queued[u] = true;
                    queue.push_back(u);
                }
            }
        }
    }
    let tree =
        Tree::from_nodes(paths.into_iter().zip(labels)).expect("same domain as the initial tree");
    SaturatedTree {
        tree,
        events,
        provenance,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Redundant,
    Reachable,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub node: NodePath,
    pub rule: String,
    /// Applies a rule introduced by simplification; it only adds classes
    /// that the original system does not know about.
    pub synthetic: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WitnessTrace {
    pub steps: Vec<TraceStep>,
}

impl WitnessTrace {
    /// Trees after each non-synthetic step, replayed from `system.initial`.
    pub fn snapshots(&self, system: &RewriteSystem) -> Result<Vec<Tree>, Error> {
        let mut t = system.initial.clone();
        let mut out = Vec::new();
        for s in self.steps.iter().filter(|s| !s.synthetic) {
            let rule = system
                .rule(&s.rule)
                .ok_or_else(|| Error::Internal(format!("unknown rule {}", s.rule)))?;
            t = apply_rule(&t, &s.node, rule)?;
            out.push(t.clone());
        }
        Ok(out)
    }
}

/// Replays `trace` from the initial tree of `system`. Synthetic steps are
/// skipped. Returns a diagnostic on the first failure.
pub fn validate_witness(
    system: &RewriteSystem,
    trace: &WitnessTrace,
    guard: &Guard,
) -> Result<(), String> {
    let t = replay(system, &system.initial, &trace.steps)?;
    if matched_anywhere(&t, guard) {
        Ok(())
    } else {
        Err("the final tree does not match the guard".into())
    }
}

fn replay(system: &RewriteSystem, from: &Tree, steps: &[TraceStep]) -> Result<Tree, String> {
    let mut t = from.clone();
    for (i, s) in steps.iter().enumerate() {
        if s.synthetic {
            continue;
        }
        let rule = system
            .rule(&s.rule)
            .ok_or_else(|| format!("step {i}: unknown rule {}", s.rule))?;
        t = apply_rule(&t, &s.node, rule).map_err(|e| format!("step {i}: {e}"))?;
    }
    Ok(t)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub query: String,
    pub guard: String,
    pub status: Status,
    pub witness: Option<WitnessTrace>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, Default)]
pub struct CheckOptions {
    /// Restrict to trees of height at most `k`.
    pub k: Option<usize>,
}

#[derive(Clone, Debug, Default)]
pub struct Stats {
    pub simple_rules: usize,
    pub synthetic_classes: usize,
    pub reach_sets: usize,
    pub saturation_events: usize,
    pub timings: Vec<(String, Duration)>,
}

#[derive(Clone, Debug)]
pub struct Analysis {
    pub verdicts: Vec<Verdict>,
    /// Approximation notes not tied to a single query.
    pub warnings: Vec<String>,
    /// The positive, removal-free system that witnesses replay against.
    pub positive: RewriteSystem,
    pub simple: SimpleSystem,
    pub saturated: SaturatedTree,
    pub stats: Stats,
}

/// Runs the whole pipeline on `system` and decides every query.
pub fn check_redundancy(system: &RewriteSystem, opts: &CheckOptions) -> Result<Analysis, Error> {
    let mut stats = Stats::default();
    let mut clock = Instant::now();
    let mut lap = |stats: &mut Stats, name: &str| {
        let now = Instant::now();
        stats.timings.push((name.to_string(), now - clock));
        clock = now;
    };

    let approx = approximate_siblings(system);
    let (pos, notes) = positivize(&approx);
    let positive = strip_removals(&pos);
    let (simple, _) = to_simple(&positive, &positive.queries)?;
    stats.simple_rules = simple.rules.len();
    stats.synthetic_classes = simple.classes.len() - simple.base_classes;
    lap(&mut stats, "simplify");

    let mut warnings: Vec<String> = notes
        .iter()
        .filter(|w| !w.starts_with("query "))
        .cloned()
        .collect();
    let out_of_regime = opts.k.is_some_and(|k| simple.initial.height() > k);
    if out_of_regime {
        warnings.push(format!(
            "the initial tree has height {} above the bound {}; no rule can fire",
            simple.initial.height(),
            opts.k.unwrap()
        ));
    }

    let has_children = simple.add_child_rules().next().is_some();
    let relevant: BTreeSet<ClassId> = simple
        .rules
        .iter()
        .flat_map(|r| r.guard.classes.iter().copied())
        .chain(simple.query_classes())
        .collect();
    let candidates: Vec<ClassId> = if has_children && !out_of_regime {
        let added: BTreeSet<ClassId> = simple
            .rules
            .iter()
            .filter(|r| matches!(r.op, SimpleOp::AddClass(_)))
            .flat_map(|r| r.op.classes().iter().copied())
            .collect();
        added.intersection(&relevant).copied().collect()
    } else {
        Vec::new()
    };
    let mut exact = SpdsOracle::build(&simple, &candidates, Mode::Exact, opts.k)?;
    lap(&mut stats, "reach");

    let saturated = if out_of_regime {
        SaturatedTree {
            tree: simple.initial.clone(),
            events: Vec::new(),
            provenance: initial_provenance(&simple.initial),
        }
    } else {
        saturate(&simple, &exact)
    };
    stats.saturation_events = saturated.events.len();
    lap(&mut stats, "saturate");

    // Queries whose class is in no saturated label may still appear below.
    let found: BTreeSet<ClassId> = saturated
        .tree
        .nodes()
        .flat_map(|(_, l)| l.iter().copied())
        .collect();
    let missing: Vec<ClassId> = if has_children && !out_of_regime {
        simple
            .query_classes()
            .into_iter()
            .filter(|c| !found.contains(c))
            .collect()
    } else {
        Vec::new()
    };
    let mut anywhere = SpdsOracle::build(&simple, &missing, Mode::Anywhere, opts.k)?;
    stats.reach_sets = exact.reach.len() + anywhere.reach.len();
    lap(&mut stats, "anywhere");

    let mut builder = TraceBuilder::new(&simple);
    let ix = TreeIndex::new(&saturated.tree);
    let mut verdicts = Vec::new();
    for (qi, q) in simple.queries.iter().enumerate() {
        let guard = &positive.queries[qi].guard;
        let own: Vec<String> = notes
            .iter()
            .filter(|w| w.starts_with(&format!("query {}:", q.name)))
            .cloned()
            .collect();
        let mut verdict = Verdict {
            query: q.name.clone(),
            guard: system.queries[qi].guard.display(&system.classes),
            status: Status::Redundant,
            witness: None,
            warnings: own,
        };
        let Some(c) = q.class else {
            verdict.status = Status::Reachable;
            verdict.witness = Some(WitnessTrace::default());
            verdicts.push(verdict);
            continue;
        };
        let first = saturated
            .provenance
            .iter()
            .filter(|((_, k), _)| *k == c)
            .map(|(_, p)| match p {
                Provenance::Initial => 0,
                Provenance::Event(e) => e + 1,
            })
            .min();
        let steps = if let Some(upto) = first {
            Some(builder.prefix(&saturated, &mut exact, upto)?)
        } else if let Some(r) = anywhere.reach.get_mut(&c) {
            // Pick the accepting node that needs the shortest event prefix:
            // only classes the reach set can see matter.
            let mut hit: Option<(usize, usize, AssumptionFunction)> = None;
            for i in 0..ix.len() {
                let f = match ix.parent[i] {
                    None => AssumptionFunction::root(),
                    Some(p) => AssumptionFunction::below(ix.labels[p].clone()),
                };
                let h = anywhere_headroom(opts.k, ix.paths[i].depth());
                if h == 0 || !r.accepts_node(ix.labels[i], &f, h) {
                    continue;
                }
                let visible = r.layout().classes();
                let mut need = 0;
                for (node, label) in std::iter::once(i)
                    .chain(ix.parent[i])
                    .map(|j| (ix.paths[j], ix.labels[j]))
                {
                    for c in label.iter().filter(|c| visible.binary_search(c).is_ok()) {
                        if let Some(Provenance::Event(e)) =
                            saturated.provenance.get(&(node.clone(), *c))
                        {
                            need = need.max(e + 1);
                        }
                    }
                }
                if hit.as_ref().is_none_or(|(_, best, _)| need < *best) {
                    hit = Some((i, need, f));
                }
            }
            match hit {
                None => None,
                Some((i, need, f)) => {
                    let mut steps = builder.prefix(&saturated, &mut exact, need)?;
                    let mut tree = builder.tree_after(steps.len());
                    let config = Config {
                        control: r.layout().zero_control(),
                        stack: vec![r.layout().initial_letter(ix.labels[i], &f)],
                    };
                    let run = r.extract_witness(&config)?;
                    run.replay(&r.spds)?;
                    let more = pds_to_tree_witness(&simple, &r.spds, &run, ix.paths[i], &mut tree)?;
                    steps.extend(more);
                    Some(steps)
                }
            }
        } else {
            None
        };
        if let Some(steps) = steps {
            let trace = project(&simple, &steps);
            validate_witness(&positive, &trace, guard).map_err(|e| {
                Error::Internal(format!("witness for query {} does not replay: {e}", q.name))
            })?;
            verdict.status = Status::Reachable;
            verdict.witness = Some(trace);
        }
        verdicts.push(verdict);
    }
    lap(&mut stats, "witness");
    Ok(Analysis {
        verdicts,
        warnings,
        positive,
        simple,
        saturated,
        stats,
    })
}

fn anywhere_headroom(k: Option<usize>, depth: usize) -> usize {
    match k {
        Some(k) if depth > k => 0,
        Some(k) => k - depth + 1,
        None => 1,
    }
}

fn initial_provenance(t: &Tree) -> BTreeMap<(NodePath, ClassId), Provenance> {
    t.nodes()
        .flat_map(|(p, l)| {
            l.iter()
                .map(move |&c| ((p.clone(), c), Provenance::Initial))
        })
        .collect()
}

/// Translates saturation events into simple-rule applications, lazily and
/// once: later prefixes extend earlier ones.
struct TraceBuilder<'a> {
    simple: &'a SimpleSystem,
    tree: Tree,
    steps: Vec<(NodePath, usize)>,
    /// `ends[e]` is the number of steps after event `e`.
    ends: Vec<usize>,
}

impl<'a> TraceBuilder<'a> {
    fn new(simple: &'a SimpleSystem) -> Self {
        TraceBuilder {
            simple,
            tree: simple.initial.clone(),
            steps: Vec::new(),
            ends: Vec::new(),
        }
    }

    /// Steps that realize the first `events` events.
    fn prefix(
        &mut self,
        sat: &SaturatedTree,
        oracle: &mut SpdsOracle,
        events: usize,
    ) -> Result<Vec<(NodePath, usize)>, Error> {
        while self.ends.len() < events {
            let ev = &sat.events[self.ends.len()];
            match &ev.kind {
                EventKind::Direct(ri) => {
                    self.tree
                        .add_classes(&ev.node, self.simple.rules[*ri].op.classes())?;
                    self.steps.push((ev.node.clone(), *ri));
                }
                EventKind::ClassAdding {
                    class,
                    label,
                    assume,
                } => {
                    let r = oracle.reach.get_mut(class).ok_or_else(|| {
                        Error::Internal("class-adding event without a reach set".into())
                    })?;
                    let config = Config {
                        control: r.layout().zero_control(),
                        stack: vec![r.layout().initial_letter(label, assume)],
                    };
                    let run = r.extract_witness(&config)?;
                    run.replay(&r.spds)?;
                    let more =
                        pds_to_tree_witness(self.simple, &r.spds, &run, &ev.node, &mut self.tree)?;
                    self.steps.extend(more);
                }
            }
            self.ends.push(self.steps.len());
        }
        let n = if events == 0 {
            0
        } else {
            self.ends[events - 1]
        };
        Ok(self.steps[..n].to_vec())
    }

    /// The tree after the first `n` steps, rebuilt by replay.
    fn tree_after(&self, n: usize) -> Tree {
        if n == self.steps.len() {
            return self.tree.clone();
        }
        let mut t = self.simple.initial.clone();
        for (node, ri) in &self.steps[..n] {
            match &self.simple.rules[*ri].op {
                SimpleOp::AddClass(x) => {
                    t.add_classes(node, x).expect("replayed node exists");
                }
                SimpleOp::AddChild(x) => {
                    t.add_child(node, x.clone()).expect("replayed node exists");
                }
            }
        }
        t
    }
}

/// Names steps by their original rules and flags the synthetic ones.
pub fn project(simple: &SimpleSystem, steps: &[(NodePath, usize)]) -> WitnessTrace {
    WitnessTrace {
        steps: steps
            .iter()
            .map(|(node, ri)| {
                let r = &simple.rules[*ri];
                TraceStep {
                    node: node.clone(),
                    rule: r.name.clone(),
                    synthetic: r.origin.is_synthetic(),
                }
            })
            .collect(),
    }
}

impl Origin {
    pub fn label(self) -> &'static str {
        match self {
            Origin::Original(_) => "original",
            Origin::Conjunction => "conjunction",
            Origin::Disjunction => "disjunction",
            Origin::Modal => "modal",
            Origin::ClosureBase => "closure-base",
            Origin::ClosureStep => "closure-step",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewrite::parse_system;

    const TENNIS: &str = "\
init (root)
rule add_team root => addchild {team}
rule add_p1 team => addchild {P1}
rule add_p2 team => addchild {P2}
rule succ (and (down P1) (down P2)) => addchild {success}
query q_success (down* success)
query q_plain success
";

    #[test]
    fn tennis_reachable_with_witness() {
        let sys = parse_system(TENNIS).unwrap();
        let a = check_redundancy(&sys, &CheckOptions::default()).unwrap();
        for v in &a.verdicts {
            assert_eq!(v.status, Status::Reachable, "{}", v.query);
            let w = v.witness.as_ref().unwrap();
            let real: Vec<&str> = w
                .steps
                .iter()
                .filter(|s| !s.synthetic)
                .map(|s| s.rule.as_str())
                .collect();
            assert_eq!(real.len(), 4, "{real:?}");
        }
    }

    #[test]
    fn tennis_bounded() {
        let sys = parse_system(TENNIS).unwrap();
        let a = check_redundancy(&sys, &CheckOptions { k: Some(1) }).unwrap();
        assert!(a.verdicts.iter().all(|v| v.status == Status::Redundant));
        let a = check_redundancy(&sys, &CheckOptions { k: Some(2) }).unwrap();
        assert!(a.verdicts.iter().all(|v| v.status == Status::Reachable));
    }

    const FIG1: &str = "\
init (html (body ({div,.input_wrap}) ({div,#limit})))
rule r1 #limit => addclass {.warn}
rule r2 .warn => removeclass {.warn}
rule r3a .input_wrap => addchild {div,tmp}
rule r3b tmp => addchild {input}
rule r3c tmp => addchild {a,.delete}
rule r4 (and div (down (and .delete (up+ .input_wrap)))) => removenode
query warn .warn
query del (and a .delete)
query never .nothere
";

    #[test]
    fn figure_one() {
        let sys = parse_system(FIG1).unwrap();
        let a = check_redundancy(&sys, &CheckOptions::default()).unwrap();
        let st: Vec<Status> = a.verdicts.iter().map(|v| v.status).collect();
        assert_eq!(
            st,
            [Status::Reachable, Status::Reachable, Status::Redundant]
        );
        let mut up = sys.clone();
        up.rules.retain(|r| r.name != "r1");
        let a = check_redundancy(&up, &CheckOptions::default()).unwrap();
        assert_eq!(a.verdicts[0].status, Status::Redundant);
    }

    #[test]
    fn no_rules_keeps_initial() {
        let sys = parse_system("init (a (b))\nquery q b\nquery r c\n").unwrap();
        let a = check_redundancy(&sys, &CheckOptions::default()).unwrap();
        assert_eq!(a.saturated.tree, sys.initial);
        assert_eq!(a.verdicts[0].status, Status::Reachable);
        assert_eq!(a.verdicts[0].witness.as_ref().unwrap().steps.len(), 0);
        assert_eq!(a.verdicts[1].status, Status::Redundant);
    }

    #[test]
    fn corrupted_witnesses_fail() {
        let sys = parse_system(TENNIS).unwrap();
        let a = check_redundancy(&sys, &CheckOptions::default()).unwrap();
        let g = &a.positive.queries[1].guard;
        let mut w = a.verdicts[1].witness.clone().unwrap();
        assert!(validate_witness(&a.positive, &w, g).is_ok());
        let last = w.steps.iter().rposition(|s| !s.synthetic).unwrap();
        let mut truncated = w.clone();
        truncated.steps.truncate(last);
        assert!(validate_witness(&a.positive, &truncated, g).is_err());
        let i = w
            .steps
            .iter()
            .position(|s| !s.synthetic && s.rule == "succ")
            .unwrap();
        w.steps[i].node = NodePath::root();
        assert!(validate_witness(&a.positive, &w, g).is_err());
    }
}
