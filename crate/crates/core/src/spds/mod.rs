//! Symbolic pushdown systems for the class-adding problem.
//!
//! A run of the pushdown system walks over a tree that grows below a single
//! node: pushing creates a child, popping returns to the parent with the
//! child's classes in the control state. The stack letter of a node records
//! its classes (`y`), its parent's classes when it was created (`z`) and
//! whether it is the global root. The control records whether the last move
//! was a pop (`pop`) and the classes of the child just left (`x`).

mod reach;
mod witness;

pub use reach::{pre_star, Mode, ReachSet};
pub use witness::{pds_to_tree_witness, PdsRun, PdsStep};

use std::collections::BTreeSet;
use std::fmt::Write as _;

use treeprune_bdd::{Assignment, Bdd, BddManager, Var, VarOrder};

use crate::class::{ClassId, Label};
use crate::guard::{AssumptionFunction, Dir};
use crate::simplify::{SimpleOp, SimpleSystem};
use crate::Error;

/// Copies of the control variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ctl {
    Cur,
    Next,
    Mid,
    Tgt,
}

/// Copies of the stack-letter variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stk {
    Cur,
    One,
    Two,
}

const GLOBALS: u32 = 7;
const PER_CLASS: u32 = 10;

/// Variable numbering. Each class owns an interleaved block so that frame
/// conditions relate neighbouring variables and relations stay linear.
#[derive(Clone, Debug)]
pub struct Layout {
    classes: Vec<ClassId>,
}

impl Layout {
    pub fn new(classes: impl IntoIterator<Item = ClassId>) -> Self {
        let set: BTreeSet<ClassId> = classes.into_iter().collect();
        Layout {
            classes: set.into_iter().collect(),
        }
    }

    pub fn classes(&self) -> &[ClassId] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn position(&self, c: ClassId) -> Option<usize> {
        self.classes.binary_search(&c).ok()
    }

    pub fn num_vars(&self) -> usize {
        (GLOBALS + PER_CLASS * self.classes.len() as u32) as usize
    }

    fn ctl_offset(c: Ctl) -> u32 {
        match c {
            Ctl::Cur => 0,
            Ctl::Next => 1,
            Ctl::Mid => 2,
            Ctl::Tgt => 3,
        }
    }

    fn stk_offset(s: Stk) -> u32 {
        match s {
            Stk::Cur => 0,
            Stk::One => 1,
            Stk::Two => 2,
        }
    }

    pub fn pop(&self, c: Ctl) -> Var {
        Var(Self::ctl_offset(c))
    }

    pub fn root(&self, s: Stk) -> Var {
        Var(4 + Self::stk_offset(s))
    }

    pub fn x(&self, i: usize, c: Ctl) -> Var {
        Var(GLOBALS + PER_CLASS * i as u32 + Self::ctl_offset(c))
    }

    pub fn y(&self, i: usize, s: Stk) -> Var {
        Var(GLOBALS + PER_CLASS * i as u32 + 4 + Self::stk_offset(s))
    }

    pub fn z(&self, i: usize, s: Stk) -> Var {
        Var(GLOBALS + PER_CLASS * i as u32 + 7 + Self::stk_offset(s))
    }

    pub fn ctl_vars(&self, c: Ctl) -> Vec<Var> {
        let mut v = vec![self.pop(c)];
        v.extend((0..self.len()).map(|i| self.x(i, c)));
        v
    }

    pub fn stk_vars(&self, s: Stk) -> Vec<Var> {
        let mut v = vec![self.root(s)];
        for i in 0..self.len() {
            v.push(self.y(i, s));
            v.push(self.z(i, s));
        }
        v
    }

    /// Rename pairs moving control copy `a` to `b`.
    fn ctl_pairs(&self, a: Ctl, b: Ctl) -> Vec<(Var, Var)> {
        self.ctl_vars(a).into_iter().zip(self.ctl_vars(b)).collect()
    }

    fn stk_pairs(&self, a: Stk, b: Stk) -> Vec<(Var, Var)> {
        self.stk_vars(a).into_iter().zip(self.stk_vars(b)).collect()
    }

    pub fn var_order(&self, names: &dyn Fn(ClassId) -> String) -> VarOrder {
        let mut out = vec![String::new(); self.num_vars()];
        for (c, s) in [
            (Ctl::Cur, ""),
            (Ctl::Next, "'"),
            (Ctl::Mid, "_m"),
            (Ctl::Tgt, "^"),
        ] {
            out[self.pop(c).0 as usize] = format!("pop{s}");
            for (i, &k) in self.classes.iter().enumerate() {
                out[self.x(i, c).0 as usize] = format!("x[{}]{s}", names(k));
            }
        }
        for (st, s) in [(Stk::Cur, ""), (Stk::One, "1"), (Stk::Two, "2")] {
            out[self.root(st).0 as usize] = format!("root{s}");
            for (i, &k) in self.classes.iter().enumerate() {
                out[self.y(i, st).0 as usize] = format!("y[{}]{s}", names(k));
                out[self.z(i, st).0 as usize] = format!("z[{}]{s}", names(k));
            }
        }
        VarOrder::new(out)
    }

    /// The stack letter of a node labelled `x` under assumption `f`.
    pub fn initial_letter(&self, x: &Label, f: &AssumptionFunction) -> Letter {
        Letter {
            root: f.is_root,
            y: self.classes.iter().map(|c| x.contains(c)).collect(),
            z: self
                .classes
                .iter()
                .map(|c| !f.is_root && f.parent_classes.contains(c))
                .collect(),
        }
    }

    pub fn zero_control(&self) -> Control {
        Control {
            pop: false,
            x: vec![false; self.len()],
        }
    }

    pub fn control_lits(&self, c: &Control, copy: Ctl) -> Vec<(Var, bool)> {
        let mut v = vec![(self.pop(copy), c.pop)];
        v.extend(c.x.iter().enumerate().map(|(i, &b)| (self.x(i, copy), b)));
        v
    }

    pub fn letter_lits(&self, l: &Letter, copy: Stk) -> Vec<(Var, bool)> {
        let mut v = vec![(self.root(copy), l.root)];
        for i in 0..self.len() {
            v.push((self.y(i, copy), l.y[i]));
            v.push((self.z(i, copy), l.z[i]));
        }
        v
    }

    pub fn read_control(&self, a: &Assignment, copy: Ctl) -> Control {
        Control {
            pop: a.value(self.pop(copy)),
            x: (0..self.len()).map(|i| a.value(self.x(i, copy))).collect(),
        }
    }

    pub fn read_letter(&self, a: &Assignment, copy: Stk) -> Letter {
        Letter {
            root: a.value(self.root(copy)),
            y: (0..self.len()).map(|i| a.value(self.y(i, copy))).collect(),
            z: (0..self.len()).map(|i| a.value(self.z(i, copy))).collect(),
        }
    }

    /// Classes set in a letter.
    pub fn letter_classes(&self, l: &Letter) -> Label {
        self.classes
            .iter()
            .zip(&l.y)
            .filter(|(_, b)| **b)
            .map(|(c, _)| *c)
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Control {
    pub pop: bool,
    pub x: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Letter {
    pub root: bool,
    pub y: Vec<bool>,
    pub z: Vec<bool>,
}

/// A pushdown configuration; the top of the stack is the last letter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Config {
    pub control: Control,
    pub stack: Vec<Letter>,
}

#[derive(Clone, Debug)]
pub struct SymRule {
    pub arity: u8,
    pub relation: Bdd,
    /// Index of the originating rule in the simple system; `None` for pop.
    pub origin: Option<usize>,
    /// The relation in functional form; `None` for pop.
    pub update: Option<Update>,
}

/// An internal rule is `guard` on the current copies with the letter bits in
/// `set` overwritten and every other variable copied. A push is `guard` with
/// the pushed control and letter read off `set` (on the current copies) and
/// the pushed letter's `z` taken from the current `y`.
#[derive(Clone, Debug)]
pub struct Update {
    pub guard: Bdd,
    pub set: Vec<(Var, bool)>,
}

/// A symbolic pushdown system with its own BDD manager.
#[derive(Clone, Debug)]
pub struct Spds {
    pub layout: Layout,
    pub mgr: BddManager,
    pub rules: Vec<SymRule>,
}

/// Rules relevant to adding `c`: every AddChild rule, the AddClass rules
/// adding `c`, and transitively the AddClass rules adding a class that some
/// included guard mentions. Indices into `system.rules`, in order.
pub fn restrict_rule_ids(system: &SimpleSystem, c: ClassId) -> Vec<usize> {
    let mut included = vec![false; system.rules.len()];
    let mut needed: BTreeSet<ClassId> = BTreeSet::from([c]);
    for (i, r) in system.rules.iter().enumerate() {
        if matches!(r.op, SimpleOp::AddChild(_)) {
            included[i] = true;
            needed.extend(r.guard.classes.iter().copied());
        }
    }
    loop {
        let mut changed = false;
        for (i, r) in system.rules.iter().enumerate() {
            if !included[i] && r.op.classes().iter().any(|k| needed.contains(k)) {
                included[i] = true;
                needed.extend(r.guard.classes.iter().copied());
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    (0..system.rules.len()).filter(|&i| included[i]).collect()
}

pub fn restrict_rules(system: &SimpleSystem, c: ClassId) -> SimpleSystem {
    let keep = restrict_rule_ids(system, c);
    let mut out = system.clone();
    out.rules = keep.into_iter().map(|i| system.rules[i].clone()).collect();
    out
}

/// Builds the sPDS over the given rules of `system`. The variable universe
/// covers the classes these rules mention plus `extra`.
pub fn build_spds(
    system: &SimpleSystem,
    rule_ids: &[usize],
    extra: &[ClassId],
) -> Result<Spds, Error> {
    let mut classes: BTreeSet<ClassId> = extra.iter().copied().collect();
    for &i in rule_ids {
        let r = &system.rules[i];
        classes.extend(r.guard.classes.iter().copied());
        classes.extend(r.op.classes().iter().copied());
    }
    let layout = Layout::new(classes);
    let order = layout.var_order(&|c| system.classes.token(c));
    let mut b = Builder {
        layout: &layout,
        mgr: BddManager::new(order),
    };
    let mut rules = Vec::new();
    for &i in rule_ids {
        let r = &system.rules[i];
        let a: Vec<usize> = r
            .guard
            .classes
            .iter()
            .map(|c| layout.position(*c).unwrap())
            .collect();
        let bset: BTreeSet<usize> =
            r.op.classes()
                .iter()
                .map(|c| layout.position(*c).unwrap())
                .collect();
        let (arity, relation, update) = match (&r.op, r.guard.dir) {
            (SimpleOp::AddClass(_), dir) => {
                let (relation, update) = b.add_class(&a, &bset, dir)?;
                (1, relation, Some(update))
            }
            (SimpleOp::AddChild(_), None) => {
                let (relation, update) = b.add_child(&a, &bset)?;
                (2, relation, Some(update))
            }
            (SimpleOp::AddChild(_), Some(_)) => {
                return Err(Error::NotSimple(format!(
                    "rule {} adds a child under a modal guard",
                    r.name
                )))
            }
        };
        rules.push(SymRule {
            arity,
            relation,
            origin: Some(i),
            update,
        });
    }
    let relation = b.pop_rule()?;
    rules.push(SymRule {
        arity: 0,
        relation,
        origin: None,
        update: None,
    });
    let Builder { mgr, .. } = b;
    Ok(Spds { layout, mgr, rules })
}

struct Builder<'a> {
    layout: &'a Layout,
    mgr: BddManager,
}

impl Builder<'_> {
    /// Conjoins small constraints bottom-up so intermediate results stay
    /// linear in the number of variables.
    fn conjoin(&mut self, mut parts: Vec<Bdd>) -> Bdd {
        parts.sort_by_key(|&p| std::cmp::Reverse(self.mgr.top_var(p).map_or(u32::MAX, |v| v.0)));
        let mut acc = Bdd::TRUE;
        for p in parts {
            acc = self.mgr.and(acc, p);
        }
        acc
    }

    fn lit(&mut self, v: Var, b: bool) -> Result<Bdd, Error> {
        Ok(self.mgr.literal(v, b)?)
    }

    fn same(&mut self, a: Var, b: Var) -> Result<Bdd, Error> {
        let (x, y) = (self.mgr.var(a)?, self.mgr.var(b)?);
        Ok(self.mgr.iff(x, y))
    }

    /// `z ↔ z¹` and `root ↔ root¹`: the node's context is unchanged.
    fn keep_context(&mut self, parts: &mut Vec<Bdd>) -> Result<(), Error> {
        let l = self.layout;
        parts.push(self.same(l.root(Stk::Cur), l.root(Stk::One))?);
        for i in 0..l.len() {
            parts.push(self.same(l.z(i, Stk::Cur), l.z(i, Stk::One))?);
        }
        Ok(())
    }

    fn add_class(
        &mut self,
        a: &[usize],
        b: &BTreeSet<usize>,
        dir: Option<Dir>,
    ) -> Result<(Bdd, Update), Error> {
        let l = self.layout;
        let mut parts = Vec::new();
        match dir {
            None => {
                for &i in a {
                    parts.push(self.lit(l.y(i, Stk::Cur), true)?);
                }
            }
            Some(Dir::Up) => {
                // The parent must exist: the global root has none.
                parts.push(self.lit(l.root(Stk::Cur), false)?);
                for &i in a {
                    parts.push(self.lit(l.z(i, Stk::Cur), true)?);
                }
            }
            Some(Dir::Down) => {
                parts.push(self.lit(l.pop(Ctl::Cur), true)?);
                for &i in a {
                    parts.push(self.lit(l.x(i, Ctl::Cur), true)?);
                }
            }
            Some(d) => {
                return Err(Error::NotSimple(format!(
                    "modality {} in a simple guard",
                    d.keyword()
                )))
            }
        }
        let guard = self.conjoin(parts.clone());
        let set = b.iter().map(|&i| (l.y(i, Stk::Cur), true)).collect();
        for i in 0..l.len() {
            if b.contains(&i) {
                parts.push(self.lit(l.y(i, Stk::One), true)?);
            } else {
                parts.push(self.same(l.y(i, Stk::Cur), l.y(i, Stk::One))?);
            }
            parts.push(self.same(l.x(i, Ctl::Cur), l.x(i, Ctl::Next))?);
        }
        parts.push(self.same(l.pop(Ctl::Cur), l.pop(Ctl::Next))?);
        self.keep_context(&mut parts)?;
        Ok((self.conjoin(parts), Update { guard, set }))
    }

    fn add_child(&mut self, a: &[usize], b: &BTreeSet<usize>) -> Result<(Bdd, Update), Error> {
        let l = self.layout;
        let mut parts = Vec::new();
        for &i in a {
            parts.push(self.lit(l.y(i, Stk::Cur), true)?);
        }
        let guard = self.conjoin(parts.clone());
        let mut set: Vec<(Var, bool)> = l
            .ctl_vars(Ctl::Cur)
            .into_iter()
            .map(|v| (v, false))
            .collect();
        set.push((l.root(Stk::Cur), false));
        set.extend((0..l.len()).map(|i| (l.y(i, Stk::Cur), b.contains(&i))));
        for i in 0..l.len() {
            parts.push(self.lit(l.y(i, Stk::Two), b.contains(&i))?);
            parts.push(self.same(l.y(i, Stk::Cur), l.z(i, Stk::Two))?);
            parts.push(self.same(l.y(i, Stk::Cur), l.y(i, Stk::One))?);
            parts.push(self.lit(l.x(i, Ctl::Next), false)?);
        }
        parts.push(self.lit(l.root(Stk::Two), false)?);
        parts.push(self.lit(l.pop(Ctl::Next), false)?);
        self.keep_context(&mut parts)?;
        Ok((self.conjoin(parts), Update { guard, set }))
    }

    fn pop_rule(&mut self) -> Result<Bdd, Error> {
        let l = self.layout;
        let mut parts = vec![
            self.lit(l.root(Stk::Cur), false)?,
            self.lit(l.pop(Ctl::Next), true)?,
        ];
        for i in 0..l.len() {
            parts.push(self.same(l.y(i, Stk::Cur), l.x(i, Ctl::Next))?);
        }
        Ok(self.conjoin(parts))
    }
}

impl Spds {
    /// Whether `step` is allowed by its rule's relation.
    pub fn step_holds(&self, step: &PdsStep) -> Result<bool, Error> {
        let l = &self.layout;
        let rule = &self.rules[step.rule];
        if step.pushed.len() != rule.arity as usize {
            return Ok(false);
        }
        let mut a = Assignment::new(l.num_vars());
        for (v, b) in l.control_lits(&step.control, Ctl::Cur) {
            a.set(v, b);
        }
        for (v, b) in l.control_lits(&step.next, Ctl::Next) {
            a.set(v, b);
        }
        for (v, b) in l.letter_lits(&step.top, Stk::Cur) {
            a.set(v, b);
        }
        // Push order: the first letter replaces the top, the second lands above it.
        for (letter, copy) in step.pushed.iter().zip([Stk::One, Stk::Two]) {
            for (v, b) in l.letter_lits(letter, copy) {
                a.set(v, b);
            }
        }
        for v in 0..l.num_vars() as u32 {
            if a.get(Var(v)).is_none() {
                a.set(Var(v), false);
            }
        }
        Ok(self.mgr.evaluate(rule.relation, &a)?)
    }

    /// Rule list with provenance and BDD sizes.
    pub fn dump(&self, system: &SimpleSystem) -> String {
        let mut out = String::new();
        let names: Vec<String> = self
            .layout
            .classes
            .iter()
            .map(|&c| system.classes.token(c))
            .collect();
        let _ = writeln!(out, "classes {}", names.join(" "));
        let _ = writeln!(out, "variables {}", self.layout.num_vars());
        for (i, r) in self.rules.iter().enumerate() {
            let origin = match r.origin {
                Some(o) => system.rules[o].name.clone(),
                None => "pop".to_string(),
            };
            let _ = writeln!(
                out,
                "  [{i}] arity {} from {origin}: {} nodes",
                r.arity,
                self.mgr.node_count(r.relation)
            );
        }
        out
    }
}
