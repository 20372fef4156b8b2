//! Normalization into simple rewrite systems.
//!
//! The pipeline approximates sibling operators, makes guards positive,
//! drops removals, and finally introduces one fresh class per non-atomic
//! subformula so that every guard becomes a conjunction of classes, possibly
//! under a single `up` or `down`.

use std::collections::{BTreeMap, BTreeSet};

use crate::class::{ClassId, Classes, Label};
use crate::guard::{Dir, Guard};
use crate::rewrite::{Query, RewriteOp, RewriteRule, RewriteSystem};
use crate::tree::Tree;
use crate::Error;

/// Rewrites sibling modalities and sibling insertions into parent/child
/// form: `(left g)` becomes `(up (down g))`, and `(g, before X)` becomes
/// `((down g), addchild X)` applied at the parent.
pub fn approximate_siblings(system: &RewriteSystem) -> RewriteSystem {
    let mut out = system.clone();
    for r in &mut out.rules {
        r.guard = approx_guard(&r.guard);
        if let RewriteOp::AddSibling(_, x) = &r.op {
            r.op = RewriteOp::AddChild(x.clone());
            r.guard = Guard::down(r.guard.clone());
        }
    }
    for q in &mut out.queries {
        q.guard = approx_guard(&q.guard);
    }
    out
}

pub fn approx_guard(g: &Guard) -> Guard {
    match g {
        Guard::True | Guard::Atom(_) => g.clone(),
        Guard::And(a, b) => Guard::and(approx_guard(a), approx_guard(b)),
        Guard::Or(a, b) => Guard::or(approx_guard(a), approx_guard(b)),
        Guard::Not(a) => Guard::not(approx_guard(a)),
        Guard::Modal(Dir::Left | Dir::Right, a) => Guard::up(Guard::down(approx_guard(a))),
        Guard::Modal(d, a) => Guard::modal(*d, approx_guard(a)),
    }
}

/// Pushes negations inward and replaces what remains by positive
/// over-approximations. Rules and queries are both rewritten.
pub fn positivize(system: &RewriteSystem) -> (RewriteSystem, Vec<String>) {
    let mut out = system.clone();
    let mut warnings = Vec::new();
    for r in &mut out.rules {
        if !r.guard.is_positive() {
            let ctx = format!("rule {}", r.name);
            r.guard = positive_guard(
                &r.guard,
                false,
                &system.tags,
                &system.classes,
                &ctx,
                &mut warnings,
            );
        }
    }
    for q in &mut out.queries {
        if !q.guard.is_positive() {
            let ctx = format!("query {}", q.name);
            q.guard = positive_guard(
                &q.guard,
                false,
                &system.tags,
                &system.classes,
                &ctx,
                &mut warnings,
            );
        }
    }
    (out, warnings)
}

/// Positive form of `g` (or of its negation when `negated`).
pub fn positive_guard(
    g: &Guard,
    negated: bool,
    tags: &BTreeSet<ClassId>,
    classes: &Classes,
    ctx: &str,
    warnings: &mut Vec<String>,
) -> Guard {
    let rec = |h: &Guard, n: bool, w: &mut Vec<String>| positive_guard(h, n, tags, classes, ctx, w);
    match (g, negated) {
        (Guard::True, false) | (Guard::Atom(_), false) => g.clone(),
        (Guard::True, true) => {
            warnings.push(format!("{ctx}: negated true approximated by true"));
            Guard::True
        }
        (Guard::Atom(c), true) => {
            if tags.contains(c) {
                let others: Vec<Guard> = tags
                    .iter()
                    .filter(|t| *t != c)
                    .map(|&t| Guard::Atom(t))
                    .collect();
                if let Some(first) = others.first().cloned() {
                    return others.into_iter().skip(1).fold(first, Guard::or);
                }
            }
            warnings.push(format!(
                "{ctx}: (not {}) approximated by true",
                classes.token(*c)
            ));
            Guard::True
        }
        (Guard::And(a, b), false) => Guard::and(rec(a, false, warnings), rec(b, false, warnings)),
        (Guard::And(a, b), true) => Guard::or(rec(a, true, warnings), rec(b, true, warnings)),
        (Guard::Or(a, b), false) => Guard::or(rec(a, false, warnings), rec(b, false, warnings)),
        (Guard::Or(a, b), true) => Guard::and(rec(a, true, warnings), rec(b, true, warnings)),
        (Guard::Not(a), n) => rec(a, !n, warnings),
        (Guard::Modal(d, a), false) => Guard::modal(*d, rec(a, false, warnings)),
        (Guard::Modal(..), true) => {
            warnings.push(format!(
                "{ctx}: (not {}) approximated by true",
                g.display(classes)
            ));
            Guard::True
        }
    }
}

/// Drops every RemoveNode and RemoveClass rule.
pub fn strip_removals(system: &RewriteSystem) -> RewriteSystem {
    let mut out = system.clone();
    out.rules.retain(|r| !r.op.is_removal());
    out
}

/// Wraps each query in `(down* …)` so that matching anywhere becomes
/// matching at the root.
pub fn lift_guards_to_root(queries: &[Query]) -> Vec<Query> {
    queries
        .iter()
        .map(|q| Query {
            name: q.name.clone(),
            guard: Guard::modal(Dir::DownStar, q.guard.clone()),
        })
        .collect()
}

/// Guard of a simple rule: classes `X`, optionally under one `up`/`down`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SimpleGuard {
    pub dir: Option<Dir>,
    pub classes: Label,
}

impl SimpleGuard {
    pub fn plain(classes: Label) -> Self {
        SimpleGuard { dir: None, classes }
    }

    pub fn to_guard(&self) -> Guard {
        let inner = Guard::of_label(&self.classes);
        match self.dir {
            None => inner,
            Some(d) => Guard::modal(d, inner),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SimpleOp {
    AddChild(Label),
    AddClass(Label),
}

impl SimpleOp {
    pub fn classes(&self) -> &Label {
        match self {
            SimpleOp::AddChild(x) | SimpleOp::AddClass(x) => x,
        }
    }

    pub fn to_op(&self) -> RewriteOp {
        match self {
            SimpleOp::AddChild(x) => RewriteOp::AddChild(x.clone()),
            SimpleOp::AddClass(x) => RewriteOp::AddClass(x.clone()),
        }
    }
}

/// Where a simple rule comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Origin {
    /// Copy of the rule with this index in the source system.
    Original(usize),
    Conjunction,
    Disjunction,
    Modal,
    ClosureBase,
    ClosureStep,
}

impl Origin {
    pub fn is_synthetic(self) -> bool {
        !matches!(self, Origin::Original(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleRule {
    pub name: String,
    pub guard: SimpleGuard,
    pub op: SimpleOp,
    pub origin: Origin,
}

impl SimpleRule {
    fn check(&self) -> Result<(), Error> {
        match (self.guard.dir, &self.op) {
            (None, _) | (Some(Dir::Up | Dir::Down), SimpleOp::AddClass(_)) => Ok(()),
            _ => Err(Error::NotSimple(format!(
                "rule {} has a modal guard with a non-AddClass op",
                self.name
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleQuery {
    pub name: String,
    /// `None` for the query `true`, which needs no class.
    pub class: Option<ClassId>,
}

#[derive(Clone, Debug)]
pub struct SimpleSystem {
    pub classes: Classes,
    /// Classes with smaller ids come from the source system; the rest are
    /// synthesized.
    pub base_classes: usize,
    pub rules: Vec<SimpleRule>,
    pub initial: Tree,
    pub queries: Vec<SimpleQuery>,
}

impl SimpleSystem {
    pub fn is_base(&self, c: ClassId) -> bool {
        c.index() < self.base_classes
    }

    pub fn query_classes(&self) -> BTreeSet<ClassId> {
        self.queries.iter().filter_map(|q| q.class).collect()
    }

    pub fn add_child_rules(&self) -> impl Iterator<Item = (usize, &SimpleRule)> {
        self.rules
            .iter()
            .enumerate()
            .filter(|(_, r)| matches!(r.op, SimpleOp::AddChild(_)))
    }

    pub fn to_rewrite_system(&self) -> RewriteSystem {
        let mut sys = RewriteSystem::new(self.classes.clone(), self.initial.clone());
        sys.rules = self
            .rules
            .iter()
            .map(|r| RewriteRule::new(r.name.clone(), r.guard.to_guard(), r.op.to_op()))
            .collect();
        sys.queries = self
            .queries
            .iter()
            .map(|q| Query {
                name: q.name.clone(),
                guard: q.class.map_or(Guard::True, Guard::Atom),
            })
            .collect();
        sys
    }

    /// Reads a system that is already simple, keeping its classes.
    pub fn from_rewrite_system(sys: &RewriteSystem) -> Result<SimpleSystem, Error> {
        let mut rules = Vec::new();
        for (i, r) in sys.rules.iter().enumerate() {
            let (dir, classes) = r
                .guard
                .simple_shape()
                .ok_or_else(|| Error::NotSimple(format!("rule {}", r.name)))?;
            let op = match &r.op {
                RewriteOp::AddChild(x) => SimpleOp::AddChild(x.clone()),
                RewriteOp::AddClass(x) => SimpleOp::AddClass(x.clone()),
                _ => {
                    return Err(Error::NotSimple(format!(
                        "rule {} uses a removal or sibling op",
                        r.name
                    )))
                }
            };
            let rule = SimpleRule {
                name: r.name.clone(),
                guard: SimpleGuard { dir, classes },
                op,
                origin: Origin::Original(i),
            };
            rule.check()?;
            rules.push(rule);
        }
        let mut queries = Vec::new();
        for q in &sys.queries {
            let class = match &q.guard {
                Guard::True => None,
                Guard::Atom(c) => Some(*c),
                _ => return Err(Error::NotSimple(format!("query {} is not atomic", q.name))),
            };
            queries.push(SimpleQuery {
                name: q.name.clone(),
                class,
            });
        }
        Ok(SimpleSystem {
            classes: sys.classes.clone(),
            base_classes: sys.classes.len(),
            rules,
            initial: sys.initial.clone(),
            queries,
        })
    }
}

/// The bijection between non-atomic subformulas and their classes.
#[derive(Clone, Debug, Default)]
pub struct GuardClassMap {
    map: BTreeMap<Guard, ClassId>,
    order: Vec<Guard>,
}

impl GuardClassMap {
    pub fn class_of(&self, g: &Guard) -> Option<ClassId> {
        match g {
            Guard::Atom(c) => Some(*c),
            _ => self.map.get(g).copied(),
        }
    }

    /// The classes standing for `g`: empty for `true`.
    pub fn classes_of(&self, g: &Guard) -> Label {
        match g {
            Guard::True => Label::new(),
            _ => Label::from([self.class_of(g).expect("subformula registered")]),
        }
    }

    pub fn subformulas(&self) -> &[Guard] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    fn register(&mut self, g: &Guard, classes: &mut Classes) -> Result<(), Error> {
        match g {
            Guard::True | Guard::Atom(_) => return Ok(()),
            Guard::And(a, b) | Guard::Or(a, b) => {
                self.register(a, classes)?;
                self.register(b, classes)?;
            }
            Guard::Modal(Dir::Up | Dir::UpStar | Dir::Down | Dir::DownStar, a) => {
                self.register(a, classes)?
            }
            Guard::Not(_) => {
                return Err(Error::Unsupported(
                    "negation must be removed before simplification".into(),
                ))
            }
            Guard::Modal(..) => {
                return Err(Error::Unsupported(
                    "sibling modalities must be approximated before simplification".into(),
                ))
            }
        }
        if !self.map.contains_key(g) {
            let id = classes.intern(&format!("~{}", g.display(classes)));
            self.map.insert(g.clone(), id);
            self.order.push(g.clone());
        }
        Ok(())
    }
}

/// Builds the simple system: the original rules with their guards replaced
/// by the guards' classes, plus the rules that add each subformula class
/// wherever the subformula holds.
pub fn to_simple(
    system: &RewriteSystem,
    queries: &[Query],
) -> Result<(SimpleSystem, GuardClassMap), Error> {
    let mut classes = system.classes.clone();
    classes.open();
    let base_classes = classes.len();
    let mut gmap = GuardClassMap::default();
    for r in &system.rules {
        if r.op.is_removal() || matches!(r.op, RewriteOp::AddSibling(..)) {
            return Err(Error::Unsupported(format!(
                "rule {} must be removed or approximated first",
                r.name
            )));
        }
        gmap.register(&r.guard, &mut classes)?;
    }
    for q in queries {
        gmap.register(&q.guard, &mut classes)?;
    }

    let mut rules = Vec::new();
    let mut seen = BTreeSet::new();
    let mut push =
        |rules: &mut Vec<SimpleRule>, guard: SimpleGuard, op: SimpleOp, origin: Origin| {
            if seen.insert((guard.clone(), op.clone())) {
                let tag = match origin {
                    Origin::Conjunction => "conj",
                    Origin::Disjunction => "disj",
                    Origin::Modal => "modal",
                    Origin::ClosureBase => "star_base",
                    Origin::ClosureStep => "star_step",
                    Origin::Original(_) => unreachable!(),
                };
                let name = format!("s{}_{}", rules.len(), tag);
                rules.push(SimpleRule {
                    name,
                    guard,
                    op,
                    origin,
                });
            }
        };
    for g in gmap.subformulas().to_vec() {
        let me = Label::from([gmap.class_of(&g).unwrap()]);
        let add = SimpleOp::AddClass(me.clone());
        match &g {
            Guard::And(a, b) => {
                let mut x = gmap.classes_of(a);
                x.extend(gmap.classes_of(b));
                push(&mut rules, SimpleGuard::plain(x), add, Origin::Conjunction);
            }
            Guard::Or(a, b) => {
                push(
                    &mut rules,
                    SimpleGuard::plain(gmap.classes_of(a)),
                    add.clone(),
                    Origin::Disjunction,
                );
                push(
                    &mut rules,
                    SimpleGuard::plain(gmap.classes_of(b)),
                    add,
                    Origin::Disjunction,
                );
            }
            Guard::Modal(d @ (Dir::Up | Dir::Down), a) => {
                let guard = SimpleGuard {
                    dir: Some(*d),
                    classes: gmap.classes_of(a),
                };
                push(&mut rules, guard, add, Origin::Modal);
            }
            Guard::Modal(d @ (Dir::UpStar | Dir::DownStar), a) => {
                let step = if *d == Dir::UpStar {
                    Dir::Up
                } else {
                    Dir::Down
                };
                push(
                    &mut rules,
                    SimpleGuard::plain(gmap.classes_of(a)),
                    add.clone(),
                    Origin::ClosureBase,
                );
                push(
                    &mut rules,
                    SimpleGuard {
                        dir: Some(step),
                        classes: me,
                    },
                    add,
                    Origin::ClosureStep,
                );
            }
            _ => unreachable!("only non-atomic positive subformulas are registered"),
        }
    }
    for (i, r) in system.rules.iter().enumerate() {
        let op = match &r.op {
            RewriteOp::AddChild(x) => SimpleOp::AddChild(x.clone()),
            RewriteOp::AddClass(x) => SimpleOp::AddClass(x.clone()),
            _ => unreachable!("checked above"),
        };
        rules.push(SimpleRule {
            name: r.name.clone(),
            guard: SimpleGuard::plain(gmap.classes_of(&r.guard)),
            op,
            origin: Origin::Original(i),
        });
    }
    for r in &rules {
        r.check()?;
    }
    let simple_queries = queries
        .iter()
        .map(|q| SimpleQuery {
            name: q.name.clone(),
            class: match q.guard {
                Guard::True => None,
                ref g => gmap.class_of(g),
            },
        })
        .collect();
    Ok((
        SimpleSystem {
            classes,
            base_classes,
            rules,
            initial: system.initial.clone(),
            queries: simple_queries,
        },
        gmap,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::guard::parse_guard;
    use crate::rewrite::parse_system;

    #[test]
    fn negation_examples() {
        let mut c = Classes::new();
        let tags: BTreeSet<ClassId> = ["div", "img", "a"].iter().map(|t| c.intern(t)).collect();
        let mut w = Vec::new();
        let g = parse_guard("(not warn)", &mut c).unwrap();
        assert_eq!(
            positive_guard(&g, false, &tags, &c, "q", &mut w),
            Guard::True
        );
        assert_eq!(w.len(), 1);
        let g = parse_guard("(not div)", &mut c).unwrap();
        let expect = parse_guard("(or img a)", &mut c).unwrap();
        assert_eq!(positive_guard(&g, false, &tags, &c, "q", &mut w), expect);
        let g = parse_guard("(and a b)", &mut c).unwrap();
        let mut w2 = Vec::new();
        assert_eq!(positive_guard(&g, false, &tags, &c, "q", &mut w2), g);
        assert!(w2.is_empty());
        let g = parse_guard("(not (or x (up y)))", &mut c).unwrap();
        let p = positive_guard(&g, false, &tags, &c, "q", &mut w2);
        assert!(p.is_positive());
        assert_eq!(p, Guard::and(Guard::True, Guard::True));
    }

    #[test]
    fn strip_figure_one() {
        let sys = parse_system(
            "init (html)\nrule r1 #limit => addclass {.warn}\nrule r2 .warn => removeclass {.warn}\n\
             rule r3a .input_wrap => addchild {div,tmp}\nrule r3b tmp => addchild {input}\n\
             rule r3c tmp => addchild {a,.delete}\nrule r4 (and div (down (and .delete (up+ .input_wrap)))) => removenode\n",
        )
        .unwrap();
        let names: Vec<String> = strip_removals(&sys)
            .rules
            .into_iter()
            .map(|r| r.name)
            .collect();
        assert_eq!(names, ["r1", "r3a", "r3b", "r3c"]);
    }

    #[test]
    fn lift() {
        let mut c = Classes::new();
        let q = Query {
            name: "q".into(),
            guard: parse_guard("success", &mut c).unwrap(),
        };
        let lifted = lift_guards_to_root(&[q]);
        assert_eq!(lifted[0].guard.display(&c), "(down* success)");
        let t = Query {
            name: "t".into(),
            guard: Guard::True,
        };
        assert_eq!(
            lift_guards_to_root(&[t])[0].guard.display(&c),
            "(down* true)"
        );
    }

    #[test]
    fn siblings() {
        let mut c = Classes::new();
        let g = parse_guard("(left a)", &mut c).unwrap();
        assert_eq!(approx_guard(&g).display(&c), "(up (down a))");
        let sys = parse_system("init (r (a))\nrule s a => before {b}\n").unwrap();
        let out = approximate_siblings(&sys);
        assert_eq!(out.rules[0].guard.display(&out.classes), "(down a)");
        assert!(matches!(out.rules[0].op, RewriteOp::AddChild(_)));
    }

    #[test]
    fn atomic_guards_only_copy() {
        let sys = parse_system("init (a)\nrule r a => addchild {b}\nquery q b\n").unwrap();
        let (simple, gmap) = to_simple(&sys, &sys.queries).unwrap();
        assert!(gmap.is_empty());
        assert_eq!(simple.rules.len(), 1);
        assert_eq!(simple.queries[0].class, sys.classes.get("b"));
    }

    #[test]
    fn up_star_closure_rules() {
        let sys = parse_system("init (a)\nrule r (up* a) => addclass {b}\n").unwrap();
        let (simple, _) = to_simple(&sys, &[]).unwrap();
        let star = simple.classes.get("~(up* a)").unwrap();
        let closure: Vec<&SimpleRule> = simple
            .rules
            .iter()
            .filter(|r| r.op == SimpleOp::AddClass(Label::from([star])))
            .collect();
        assert_eq!(closure.len(), 2);
        assert!(closure.iter().any(|r| r.guard.dir == Some(Dir::Up)));
    }

    #[test]
    fn rejects_negation() {
        let sys = parse_system("init (a)\nrule r (not a) => addclass {b}\n").unwrap();
        assert!(to_simple(&sys, &[]).is_err());
    }
}
