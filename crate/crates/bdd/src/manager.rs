use std::fmt::Write as _;

use rustc_hash::FxHashMap;
use thiserror::Error;

/// Variable index; the index is also the variable's level in the order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(pub u32);

/// Handle to a node of one manager.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bdd(u32);

impl Bdd {
    pub const FALSE: Bdd = Bdd(0);
    pub const TRUE: Bdd = Bdd(1);

    pub fn is_const(self) -> bool {
        self.0 < 2
    }

    pub fn index(self) -> u32 {
        self.0
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BddError {
    #[error("variable {0} is not in the order")]
    UnknownVar(u32),
    #[error("rename of variable {from} to {to} breaks the variable order")]
    OrderIncompatible { from: u32, to: u32 },
    #[error("assignment leaves variable {0} undefined")]
    PartialAssignment(u32),
}

/// Names of the variables, listed in order.
#[derive(Clone, Debug, Default)]
pub struct VarOrder {
    names: Vec<String>,
}

impl VarOrder {
    pub fn new(names: Vec<String>) -> Self {
        VarOrder { names }
    }

    pub fn anonymous(n: usize) -> Self {
        VarOrder {
            names: (0..n).map(|i| format!("v{i}")).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, v: Var) -> &str {
        &self.names[v.0 as usize]
    }
}

/// A (possibly partial) truth assignment indexed by variable.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Assignment {
    values: Vec<Option<bool>>,
}

impl Assignment {
    pub fn new(n: usize) -> Self {
        Assignment {
            values: vec![None; n],
        }
    }

    pub fn from_pairs(n: usize, pairs: &[(Var, bool)]) -> Self {
        let mut a = Assignment::new(n);
        for &(v, b) in pairs {
            a.set(v, b);
        }
        a
    }

    pub fn set(&mut self, v: Var, b: bool) {
        let i = v.0 as usize;
        if i >= self.values.len() {
            self.values.resize(i + 1, None);
        }
        self.values[i] = Some(b);
    }

    pub fn get(&self, v: Var) -> Option<bool> {
        self.values.get(v.0 as usize).copied().flatten()
    }

    /// Value of `v`, with unassigned variables read as false.
    pub fn value(&self, v: Var) -> bool {
        self.get(v).unwrap_or(false)
    }

    pub fn assigned(&self) -> impl Iterator<Item = (Var, bool)> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(i, b)| b.map(|b| (Var(i as u32), b)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Op {
    And,
    Or,
    Iff,
}

#[derive(Clone, Copy, Debug)]
struct Node {
    var: u32,
    lo: Bdd,
    hi: Bdd,
}

const TERMINAL_LEVEL: u32 = u32::MAX;

#[derive(Clone)]
pub struct BddManager {
    order: VarOrder,
    nodes: Vec<Node>,
    unique: FxHashMap<(u32, Bdd, Bdd), Bdd>,
    cache: Cache,
}

/// Lossy direct-mapped table of operation results. A collision overwrites
/// the older entry; the table grows with the node count up to a fixed cap.
#[derive(Clone)]
struct Cache {
    entries: Vec<Entry>,
}

#[derive(Clone, Copy)]
struct Entry {
    key: [u32; 4],
    value: Bdd,
}

const EMPTY: Entry = Entry {
    key: [u32::MAX; 4],
    value: Bdd::FALSE,
};
const CACHE_MIN: usize = 1 << 12;
const CACHE_MAX: usize = 1 << 20;

// Operation tags for cache keys.
const TAG_NOT: u32 = 3;
const TAG_EXISTS: u32 = 4;
const TAG_RELPROD: u32 = 5;

impl Cache {
    fn new() -> Self {
        Cache {
            entries: vec![EMPTY; CACHE_MIN],
        }
    }

    fn slot(&self, key: &[u32; 4]) -> usize {
        let mut h: u64 = 0;
        for &k in key {
            h = (h.rotate_left(5) ^ k as u64).wrapping_mul(0x51_7c_c1_b7_27_22_0a_95);
        }
        (h >> 32) as usize & (self.entries.len() - 1)
    }

    fn get(&self, key: [u32; 4]) -> Option<Bdd> {
        let e = &self.entries[self.slot(&key)];
        (e.key == key).then_some(e.value)
    }

    fn put(&mut self, key: [u32; 4], value: Bdd) {
        let i = self.slot(&key);
        self.entries[i] = Entry { key, value };
    }

    fn grow_for(&mut self, nodes: usize) {
        if nodes > self.entries.len() && self.entries.len() < CACHE_MAX {
            self.entries = vec![EMPTY; (self.entries.len() * 4).min(CACHE_MAX)];
        }
    }

    fn clear(&mut self) {
        self.entries.fill(EMPTY);
    }
}

impl std::fmt::Debug for BddManager {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BddManager")
            .field("vars", &self.order.len())
            .field("nodes", &self.nodes.len())
            .finish()
    }
}

impl BddManager {
    pub fn new(order: VarOrder) -> Self {
        let terminal = |_| Node {
            var: TERMINAL_LEVEL,
            lo: Bdd::FALSE,
            hi: Bdd::FALSE,
        };
        BddManager {
            order,
            nodes: vec![terminal(0), terminal(1)],
            unique: FxHashMap::default(),
            cache: Cache::new(),
        }
    }

    pub fn order(&self) -> &VarOrder {
        &self.order
    }

    pub fn num_vars(&self) -> usize {
        self.order.len()
    }

    /// Total nodes allocated, terminals included.
    pub fn allocated(&self) -> usize {
        self.nodes.len()
    }

    pub fn clear_caches(&mut self) {
        self.cache.clear();
    }

    fn level(&self, f: Bdd) -> u32 {
        self.nodes[f.0 as usize].var
    }

    fn node(&self, f: Bdd) -> Node {
        self.nodes[f.0 as usize]
    }

    /// Top variable of a non-terminal node.
    pub fn top_var(&self, f: Bdd) -> Option<Var> {
        (!f.is_const()).then(|| Var(self.level(f)))
    }

    /// Low and high children of a non-terminal node.
    pub fn children(&self, f: Bdd) -> Option<(Bdd, Bdd)> {
        (!f.is_const()).then(|| {
            let n = self.node(f);
            (n.lo, n.hi)
        })
    }

    fn mk(&mut self, var: u32, lo: Bdd, hi: Bdd) -> Bdd {
        if lo == hi {
            return lo;
        }
        if let Some(&b) = self.unique.get(&(var, lo, hi)) {
            return b;
        }
        let b = Bdd(self.nodes.len() as u32);
        self.nodes.push(Node { var, lo, hi });
        self.unique.insert((var, lo, hi), b);
        if self.nodes.len().is_power_of_two() {
            self.cache.grow_for(self.nodes.len());
        }
        b
    }

    pub fn constant(&self, b: bool) -> Bdd {
        if b {
            Bdd::TRUE
        } else {
            Bdd::FALSE
        }
    }

    fn check_var(&self, v: Var) -> Result<(), BddError> {
        if (v.0 as usize) < self.order.len() {
            Ok(())
        } else {
            Err(BddError::UnknownVar(v.0))
        }
    }

    pub fn var(&mut self, v: Var) -> Result<Bdd, BddError> {
        self.check_var(v)?;
        Ok(self.mk(v.0, Bdd::FALSE, Bdd::TRUE))
    }

    pub fn literal(&mut self, v: Var, positive: bool) -> Result<Bdd, BddError> {
        self.check_var(v)?;
        Ok(if positive {
            self.mk(v.0, Bdd::FALSE, Bdd::TRUE)
        } else {
            self.mk(v.0, Bdd::TRUE, Bdd::FALSE)
        })
    }

    /// Conjunction of literals.
    pub fn cube(&mut self, lits: &[(Var, bool)]) -> Result<Bdd, BddError> {
        let mut sorted = lits.to_vec();
        sorted.sort_by_key(|&(v, _)| std::cmp::Reverse(v));
        let mut acc = Bdd::TRUE;
        for (v, b) in sorted {
            let lit = self.literal(v, b)?;
            acc = self.and(lit, acc);
        }
        Ok(acc)
    }

    /// Positive cube used to name a set of variables for quantification.
    pub fn var_set(&mut self, vars: &[Var]) -> Result<Bdd, BddError> {
        let lits: Vec<(Var, bool)> = vars.iter().map(|&v| (v, true)).collect();
        self.cube(&lits)
    }

    pub fn not(&mut self, f: Bdd) -> Bdd {
        if f == Bdd::FALSE {
            return Bdd::TRUE;
        }
        if f == Bdd::TRUE {
            return Bdd::FALSE;
        }
        if let Some(r) = self.cache.get([TAG_NOT, f.0, 0, 0]) {
            return r;
        }
        let n = self.node(f);
        let lo = self.not(n.lo);
        let hi = self.not(n.hi);
        let r = self.mk(n.var, lo, hi);
        self.cache.put([TAG_NOT, f.0, 0, 0], r);
        r
    }

    pub fn and(&mut self, f: Bdd, g: Bdd) -> Bdd {
        self.apply(Op::And, f, g)
    }

    pub fn or(&mut self, f: Bdd, g: Bdd) -> Bdd {
        self.apply(Op::Or, f, g)
    }

    pub fn iff(&mut self, f: Bdd, g: Bdd) -> Bdd {
        self.apply(Op::Iff, f, g)
    }

    pub fn implies(&mut self, f: Bdd, g: Bdd) -> Bdd {
        let nf = self.not(f);
        self.or(nf, g)
    }

    fn apply(&mut self, op: Op, f: Bdd, g: Bdd) -> Bdd {
        match op {
            Op::And => {
                if f == Bdd::FALSE || g == Bdd::FALSE {
                    return Bdd::FALSE;
                }
                if f == Bdd::TRUE {
                    return g;
                }
                if g == Bdd::TRUE || f == g {
                    return f;
                }
            }
            Op::Or => {
                if f == Bdd::TRUE || g == Bdd::TRUE {
                    return Bdd::TRUE;
                }
                if f == Bdd::FALSE {
                    return g;
                }
                if g == Bdd::FALSE || f == g {
                    return f;
                }
            }
            Op::Iff => {
                if f == g {
                    return Bdd::TRUE;
                }
                if f.is_const() && g.is_const() {
                    return Bdd::FALSE;
                }
                if f == Bdd::TRUE {
                    return g;
                }
                if g == Bdd::TRUE {
                    return f;
                }
            }
        }
        // All three operators are commutative.
        let (a, b) = if f <= g { (f, g) } else { (g, f) };
        let key = [op as u32, a.0, b.0, 0];
        if let Some(r) = self.cache.get(key) {
            return r;
        }
        let (lf, lg) = (self.level(f), self.level(g));
        let top = lf.min(lg);
        let (f0, f1) = self.cofactors(f, top);
        let (g0, g1) = self.cofactors(g, top);
        let lo = self.apply(op, f0, g0);
        let hi = self.apply(op, f1, g1);
        let r = self.mk(top, lo, hi);
        self.cache.put(key, r);
        r
    }

    fn cofactors(&self, f: Bdd, level: u32) -> (Bdd, Bdd) {
        let n = self.node(f);
        if n.var == level {
            (n.lo, n.hi)
        } else {
            (f, f)
        }
    }

    /// Existential quantification over the variables of the positive cube `set`.
    pub fn exists(&mut self, f: Bdd, set: Bdd) -> Bdd {
        if f.is_const() || set == Bdd::TRUE {
            return f;
        }
        let mut set = set;
        let lf = self.level(f);
        while !set.is_const() && self.level(set) < lf {
            set = self.node(set).hi;
        }
        if set == Bdd::TRUE {
            return f;
        }
        if let Some(r) = self.cache.get([TAG_EXISTS, f.0, set.0, 0]) {
            return r;
        }
        let n = self.node(f);
        let r = if self.level(set) == n.var {
            let rest = self.node(set).hi;
            let lo = self.exists(n.lo, rest);
            if lo == Bdd::TRUE {
                Bdd::TRUE
            } else {
                let hi = self.exists(n.hi, rest);
                self.or(lo, hi)
            }
        } else {
            let lo = self.exists(n.lo, set);
            let hi = self.exists(n.hi, set);
            self.mk(n.var, lo, hi)
        };
        self.cache.put([TAG_EXISTS, f.0, set.0, 0], r);
        r
    }

    /// `exists set. f ∧ g`, without building the conjunction.
    pub fn and_exists(&mut self, f: Bdd, g: Bdd, set: Bdd) -> Bdd {
        if f == Bdd::FALSE || g == Bdd::FALSE {
            return Bdd::FALSE;
        }
        if f == Bdd::TRUE && g == Bdd::TRUE {
            return Bdd::TRUE;
        }
        if f == Bdd::TRUE {
            return self.exists(g, set);
        }
        if g == Bdd::TRUE || f == g {
            return self.exists(f, set);
        }
        let (f, g) = if f <= g { (f, g) } else { (g, f) };
        let top = self.level(f).min(self.level(g));
        let mut set = set;
        while !set.is_const() && self.level(set) < top {
            set = self.node(set).hi;
        }
        if set == Bdd::TRUE {
            return self.and(f, g);
        }
        if let Some(r) = self.cache.get([TAG_RELPROD, f.0, g.0, set.0]) {
            return r;
        }
        let (f0, f1) = self.cofactors(f, top);
        let (g0, g1) = self.cofactors(g, top);
        let r = if self.level(set) == top {
            let rest = self.node(set).hi;
            let lo = self.and_exists(f0, g0, rest);
            if lo == Bdd::TRUE {
                Bdd::TRUE
            } else {
                let hi = self.and_exists(f1, g1, rest);
                self.or(lo, hi)
            }
        } else {
            let lo = self.and_exists(f0, g0, set);
            let hi = self.and_exists(f1, g1, set);
            self.mk(top, lo, hi)
        };
        self.cache.put([TAG_RELPROD, f.0, g.0, set.0], r);
        r
    }

    /// The cofactor of `f` fixing each variable of `lits` to its value.
    pub fn restrict(&mut self, f: Bdd, lits: &[(Var, bool)]) -> Result<Bdd, BddError> {
        let mut fixed = vec![None; self.order.len()];
        let mut last = 0;
        for &(v, b) in lits {
            self.check_var(v)?;
            fixed[v.0 as usize] = Some(b);
            last = last.max(v.0);
        }
        let mut memo = FxHashMap::default();
        Ok(self.restrict_rec(f, &fixed, last, &mut memo))
    }

    fn restrict_rec(
        &mut self,
        f: Bdd,
        fixed: &[Option<bool>],
        last: u32,
        memo: &mut FxHashMap<Bdd, Bdd>,
    ) -> Bdd {
        if f.is_const() || self.level(f) > last {
            return f;
        }
        if let Some(&r) = memo.get(&f) {
            return r;
        }
        let n = self.node(f);
        let r = match fixed[n.var as usize] {
            Some(false) => self.restrict_rec(n.lo, fixed, last, memo),
            Some(true) => self.restrict_rec(n.hi, fixed, last, memo),
            None => {
                let lo = self.restrict_rec(n.lo, fixed, last, memo);
                let hi = self.restrict_rec(n.hi, fixed, last, memo);
                self.mk(n.var, lo, hi)
            }
        };
        memo.insert(f, r);
        r
    }

    /// Substitutes variables according to `map` (indexed by source variable).
    /// The substitution must keep the relative order of every variable in the
    /// support of `f`; otherwise the result would not be ordered and an error
    /// is returned.
    pub fn rename(&mut self, f: Bdd, map: &[Option<Var>]) -> Result<Bdd, BddError> {
        let mut memo = FxHashMap::default();
        self.rename_rec(f, map, &mut memo)
    }

    fn rename_rec(
        &mut self,
        f: Bdd,
        map: &[Option<Var>],
        memo: &mut FxHashMap<Bdd, Bdd>,
    ) -> Result<Bdd, BddError> {
        if f.is_const() {
            return Ok(f);
        }
        if let Some(&r) = memo.get(&f) {
            return Ok(r);
        }
        let n = self.node(f);
        let lo = self.rename_rec(n.lo, map, memo)?;
        let hi = self.rename_rec(n.hi, map, memo)?;
        let to = map
            .get(n.var as usize)
            .copied()
            .flatten()
            .map_or(n.var, |v| v.0);
        self.check_var(Var(to))?;
        if to >= self.level(lo) || to >= self.level(hi) {
            return Err(BddError::OrderIncompatible { from: n.var, to });
        }
        let r = self.mk(to, lo, hi);
        memo.insert(f, r);
        Ok(r)
    }

    /// Builds a rename map from `(from, to)` pairs.
    pub fn rename_map(&self, pairs: &[(Var, Var)]) -> Vec<Option<Var>> {
        let mut map = vec![None; self.order.len()];
        for &(a, b) in pairs {
            map[a.0 as usize] = Some(b);
        }
        map
    }

    pub fn evaluate(&self, f: Bdd, assignment: &Assignment) -> Result<bool, BddError> {
        let mut cur = f;
        while !cur.is_const() {
            let n = self.node(cur);
            match assignment.get(Var(n.var)) {
                Some(true) => cur = n.hi,
                Some(false) => cur = n.lo,
                None => return Err(BddError::PartialAssignment(n.var)),
            }
        }
        Ok(cur == Bdd::TRUE)
    }

    /// Some satisfying assignment, defined on the variables of one path.
    /// Low branches are preferred, so the result is deterministic.
    pub fn pick_model(&self, f: Bdd) -> Option<Assignment> {
        if f == Bdd::FALSE {
            return None;
        }
        let mut a = Assignment::new(self.order.len());
        let mut cur = f;
        while !cur.is_const() {
            let n = self.node(cur);
            if n.lo != Bdd::FALSE {
                a.set(Var(n.var), false);
                cur = n.lo;
            } else {
                a.set(Var(n.var), true);
                cur = n.hi;
            }
        }
        Some(a)
    }

    /// Number of internal nodes reachable from `f`.
    pub fn node_count(&self, f: Bdd) -> usize {
        self.reachable(f).len()
    }

    fn reachable(&self, f: Bdd) -> Vec<Bdd> {
        let mut seen = rustc_hash::FxHashSet::default();
        let mut stack = vec![f];
        let mut out = Vec::new();
        while let Some(g) = stack.pop() {
            if g.is_const() || !seen.insert(g) {
                continue;
            }
            out.push(g);
            let n = self.node(g);
            stack.push(n.hi);
            stack.push(n.lo);
        }
        out
    }

    /// Variables that `f` depends on, ascending.
    pub fn support(&self, f: Bdd) -> Vec<Var> {
        let mut vars: Vec<u32> = self
            .reachable(f)
            .into_iter()
            .map(|g| self.level(g))
            .collect();
        vars.sort_unstable();
        vars.dedup();
        vars.into_iter().map(Var).collect()
    }

    /// Number of satisfying assignments over the first `n` variables.
    pub fn sat_count(&self, f: Bdd, n: usize) -> u128 {
        let mut memo = FxHashMap::default();
        self.sat_count_rec(f, 0, n as u32, &mut memo)
    }

    fn sat_count_rec(
        &self,
        f: Bdd,
        from: u32,
        n: u32,
        memo: &mut FxHashMap<(Bdd, u32), u128>,
    ) -> u128 {
        if f == Bdd::FALSE {
            return 0;
        }
        let level = if f.is_const() { n } else { self.level(f) };
        let skipped = 1u128 << (level - from);
        if f == Bdd::TRUE {
            return skipped;
        }
        if let Some(&c) = memo.get(&(f, from)) {
            return c;
        }
        let node = self.node(f);
        let c = (self.sat_count_rec(node.lo, level + 1, n, memo)
            + self.sat_count_rec(node.hi, level + 1, n, memo))
            * (skipped);
        memo.insert((f, from), c);
        c
    }

    /// Graphviz rendering for debugging.
    pub fn to_dot(&self, f: Bdd) -> String {
        let mut out = String::from(
            "digraph bdd {\n  t0 [shape=box,label=\"0\"];\n  t1 [shape=box,label=\"1\"];\n",
        );
        let name = |g: Bdd| {
            if g.is_const() {
                format!("t{}", g.0)
            } else {
                format!("n{}", g.0)
            }
        };
        let mut nodes = self.reachable(f);
        nodes.sort();
        for g in nodes {
            let n = self.node(g);
            let _ = writeln!(
                out,
                "  n{} [label=\"{}\"];",
                g.0,
                self.order.name(Var(n.var))
            );
            let _ = writeln!(out, "  n{} -> {} [style=dashed];", g.0, name(n.lo));
            let _ = writeln!(out, "  n{} -> {};", g.0, name(n.hi));
        }
        if f.is_const() {
            let _ = writeln!(out, "  root -> {};", name(f));
        }
        out.push_str("}\n");
        out
    }
}
