//! Backward reachability by P-automaton saturation.
//!
//! The automaton has the control states of the sPDS plus one final state.
//! `T_P(V, W, V^)` holds the edges `p --γ--> q` between control states, that
//! is the pairs with `⟨p, γ⟩ →* ⟨q, ε⟩`; `T_F(V, W)` holds the edges into the
//! final state. With a stack cap `h` the automaton is layered by headroom:
//! layer `d` only describes runs that push at most `d - 1` letters above the
//! letter being read.

use treeprune_bdd::{Assignment, Bdd, Var};

use super::{Config, Control, Ctl, Layout, Letter, PdsRun, PdsStep, Spds, Stk};
use crate::class::Label;
use crate::guard::AssumptionFunction;
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// The target must hold at the bottom of the stack, i.e. at the node the
    /// run started from.
    Exact,
    /// The target may hold at any stack position, i.e. at any descendant.
    Anywhere,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(super) struct Layer {
    pub p: Bdd,
    pub f: Bdd,
}

pub(super) struct Maps {
    /// `V → V'`, `W → W¹`.
    pub one: Vec<Option<Var>>,
    /// `V → V'`, `W → W²`, `V^ → M`.
    pub first: Vec<Option<Var>>,
    /// `V → M`, `W → W¹`.
    pub second: Vec<Option<Var>>,
    /// `V^ → V`.
    pub back: Vec<Option<Var>>,
    /// `V → M`.
    pub to_mid: Vec<Option<Var>>,
    /// `z → y`, `V^ → M`: a pushed letter's context read as its parent.
    pub push: Vec<Option<Var>>,
    pub q_mid: Bdd,
    pub q_one: Bdd,
    pub q_first: Bdd,
    pub q_second: Bdd,
    pub q_any: Bdd,
    pub q_cur: Bdd,
}

/// The saturated automaton for one sPDS and one target.
pub struct ReachSet {
    pub spds: Spds,
    pub mode: Mode,
    pub cap: Option<usize>,
    /// The saturated layers.
    fixed: Vec<Layer>,
    /// Layer values after each Jacobi round, ending at the fixpoint. Only
    /// witnesses need them, so they are computed on first use.
    pub(super) history: Vec<Vec<Layer>>,
    pub(super) maps: Maps,
    /// Pop relations with `V'` renamed to `V^`.
    pops: Vec<(usize, Bdd)>,
}

/// Saturates the automaton accepting every configuration from which a
/// configuration whose control and top letter satisfy `target` is reachable.
/// `target` may only mention the current control and stack copies.
pub fn pre_star(
    mut spds: Spds,
    target: Bdd,
    mode: Mode,
    cap: Option<usize>,
) -> Result<ReachSet, Error> {
    let l = spds.layout.clone();
    let mgr = &mut spds.mgr;
    let pairs = |a: &[(Var, Var)], b: &[(Var, Var)], c: &[(Var, Var)]| {
        let mut all = a.to_vec();
        all.extend_from_slice(b);
        all.extend_from_slice(c);
        all
    };
    let one = mgr.rename_map(&pairs(
        &l.ctl_pairs(Ctl::Cur, Ctl::Next),
        &l.stk_pairs(Stk::Cur, Stk::One),
        &[],
    ));
    let first = mgr.rename_map(&pairs(
        &l.ctl_pairs(Ctl::Cur, Ctl::Next),
        &l.stk_pairs(Stk::Cur, Stk::Two),
        &l.ctl_pairs(Ctl::Tgt, Ctl::Mid),
    ));
    let second = mgr.rename_map(&pairs(
        &l.ctl_pairs(Ctl::Cur, Ctl::Mid),
        &l.stk_pairs(Stk::Cur, Stk::One),
        &[],
    ));
    let back = mgr.rename_map(&l.ctl_pairs(Ctl::Tgt, Ctl::Cur));
    let to_mid = mgr.rename_map(&l.ctl_pairs(Ctl::Cur, Ctl::Mid));
    let z_to_y: Vec<(Var, Var)> = (0..l.len())
        .map(|i| (l.z(i, Stk::Cur), l.y(i, Stk::Cur)))
        .collect();
    let push = mgr.rename_map(&pairs(&z_to_y, &l.ctl_pairs(Ctl::Tgt, Ctl::Mid), &[]));
    let set = |mgr: &mut treeprune_bdd::BddManager, vars: Vec<Var>| mgr.var_set(&vars);
    let q_one = set(mgr, [l.ctl_vars(Ctl::Next), l.stk_vars(Stk::One)].concat())?;
    let q_first = set(mgr, [l.ctl_vars(Ctl::Next), l.stk_vars(Stk::Two)].concat())?;
    let q_second = set(mgr, [l.ctl_vars(Ctl::Mid), l.stk_vars(Stk::One)].concat())?;
    let q_any = set(
        mgr,
        [
            l.ctl_vars(Ctl::Next),
            l.stk_vars(Stk::One),
            l.stk_vars(Stk::Two),
        ]
        .concat(),
    )?;
    let q_cur = set(mgr, [l.ctl_vars(Ctl::Cur), l.stk_vars(Stk::Cur)].concat())?;
    let q_mid = set(mgr, l.ctl_vars(Ctl::Mid))?;
    let next_to_tgt = mgr.rename_map(&l.ctl_pairs(Ctl::Next, Ctl::Tgt));
    let mut pops = Vec::new();
    for (i, r) in spds.rules.iter().enumerate() {
        if r.arity == 0 {
            pops.push((i, spds.mgr.rename(r.relation, &next_to_tgt)?));
        }
    }
    let maps = Maps {
        one,
        first,
        second,
        back,
        to_mid,
        push,
        q_mid,
        q_one,
        q_first,
        q_second,
        q_any,
        q_cur,
    };

    let layers = cap.unwrap_or(1);
    let init = vec![
        Layer {
            p: Bdd::FALSE,
            f: target
        };
        layers
    ];
    let mut rs = ReachSet {
        spds,
        mode,
        cap,
        fixed: init.clone(),
        history: vec![init],
        maps,
        pops,
    };
    rs.saturate()?;
    Ok(rs)
}

impl ReachSet {
    /// The layer consulted by pushes from layer `d`, if any.
    pub(super) fn prev(&self, d: usize) -> Option<usize> {
        match self.cap {
            Some(_) => d.checked_sub(1),
            None => Some(d),
        }
    }

    /// Chaotic iteration to the fixpoint: every rule reads the newest
    /// layer values, which converges in far fewer passes than Jacobi rounds.
    fn saturate(&mut self) -> Result<(), Error> {
        for (_, pop) in &self.pops {
            for l in self.fixed.iter_mut() {
                l.p = self.spds.mgr.or(l.p, *pop);
            }
        }
        loop {
            let start = self.fixed.clone();
            for d in 0..self.fixed.len() {
                let mut cur = std::mem::take(&mut self.fixed);
                let l = self.apply_rules(&cur, d, true)?;
                cur[d] = l;
                self.fixed = cur;
            }
            if self.fixed == start {
                return Ok(());
            }
        }
    }

    /// Fills in the Jacobi rounds leading to the fixpoint.
    pub(super) fn ensure_history(&mut self) -> Result<(), Error> {
        while self.history.last() != Some(&self.fixed) {
            let next = self.round()?;
            if &next == self.history.last().unwrap() {
                return Err(Error::Internal(
                    "Jacobi rounds stopped short of the fixpoint".into(),
                ));
            }
            self.history.push(next);
        }
        Ok(())
    }

    fn round(&mut self) -> Result<Vec<Layer>, Error> {
        let old = self.history.last().unwrap().clone();
        self.jacobi(&old)
    }

    /// One Jacobi round from `old`.
    fn jacobi(&mut self, old: &[Layer]) -> Result<Vec<Layer>, Error> {
        let mut new = Vec::with_capacity(old.len());
        for d in 0..old.len() {
            let mut l = self.apply_rules(old, d, false)?;
            for (_, pop) in &self.pops {
                l.p = self.spds.mgr.or(l.p, *pop);
            }
            new.push(l);
        }
        Ok(new)
    }

    /// Layer `d` extended by one application of every rule to `layers`.
    /// With `chain` each rule sees the effect of the rules before it.
    fn apply_rules(&mut self, layers: &[Layer], d: usize, chain: bool) -> Result<Layer, Error> {
        let prev = self.prev(d);
        let m = &self.maps;
        let mgr = &mut self.spds.mgr;
        let (mut p, mut f) = (layers[d].p, layers[d].f);
        for r in &self.spds.rules {
            let Some(u) = &r.update else { continue };
            let (rp, rf) = if chain {
                (p, f)
            } else {
                (layers[d].p, layers[d].f)
            };
            match r.arity {
                1 => {
                    let a = mgr.restrict(rp, &u.set)?;
                    let a = mgr.and(u.guard, a);
                    p = mgr.or(p, a);
                    let b = mgr.restrict(rf, &u.set)?;
                    let b = mgr.and(u.guard, b);
                    f = mgr.or(f, b);
                }
                2 => {
                    let Some(e) = prev else { continue };
                    let (cp, cf) = if chain && e == d {
                        (p, f)
                    } else {
                        (layers[e].p, layers[e].f)
                    };
                    // The child's summary read at the pushed letter, as a
                    // function of the parent's classes and the middle state.
                    let g = mgr.restrict(cp, &u.set)?;
                    let g = mgr.rename(g, &m.push)?;
                    let g = mgr.and(u.guard, g);
                    let pm = mgr.rename(rp, &m.to_mid)?;
                    let fm = mgr.rename(rf, &m.to_mid)?;
                    let a = mgr.and_exists(g, pm, m.q_mid);
                    p = mgr.or(p, a);
                    let b = mgr.and_exists(g, fm, m.q_mid);
                    f = mgr.or(f, b);
                    if self.mode == Mode::Anywhere {
                        let c = mgr.restrict(cf, &u.set)?;
                        let c = mgr.rename(c, &m.push)?;
                        let c = mgr.and(u.guard, c);
                        f = mgr.or(f, c);
                    }
                }
                _ => {}
            }
        }
        Ok(Layer { p, f })
    }

    /// New value of layer `d` computed through the full relations.
    fn step_layer_generic(&mut self, old: &[Layer], d: usize) -> Result<Layer, Error> {
        let prev = self.prev(d);
        let m = &self.maps;
        let mgr = &mut self.spds.mgr;
        let (mut p, mut f) = (old[d].p, old[d].f);
        for (_, pop) in &self.pops {
            p = mgr.or(p, *pop);
        }
        let p1 = mgr.rename(old[d].p, &m.one)?;
        let f1 = mgr.rename(old[d].f, &m.one)?;
        let p2 = mgr.rename(old[d].p, &m.second)?;
        let f2 = mgr.rename(old[d].f, &m.second)?;
        let first_p = prev.map(|e| mgr.rename(old[e].p, &m.first)).transpose()?;
        let first_f = match (prev, self.mode) {
            (Some(e), Mode::Anywhere) => Some(mgr.rename(old[e].f, &m.first)?),
            _ => None,
        };
        for r in &self.spds.rules {
            match r.arity {
                1 => {
                    let a = mgr.and_exists(r.relation, p1, m.q_one);
                    p = mgr.or(p, a);
                    let b = mgr.and_exists(r.relation, f1, m.q_one);
                    f = mgr.or(f, b);
                }
                2 => {
                    if let Some(fp) = first_p {
                        let inner = mgr.and_exists(r.relation, fp, m.q_first);
                        let a = mgr.and_exists(inner, p2, m.q_second);
                        p = mgr.or(p, a);
                        let b = mgr.and_exists(inner, f2, m.q_second);
                        f = mgr.or(f, b);
                    }
                    if let Some(ff) = first_f {
                        let c = mgr.and_exists(r.relation, ff, m.q_any);
                        f = mgr.or(f, c);
                    }
                }
                _ => {}
            }
        }
        Ok(Layer { p, f })
    }

    /// Recomputes every round of the history through the full relations and
    /// compares with the stored layers. Used to test the fast path.
    #[doc(hidden)]
    pub fn check_against_relations(&mut self) -> Result<bool, Error> {
        self.ensure_history()?;
        for r in 0..self.history.len() {
            let old = self.history[r].clone();
            let next = self.history.get(r + 1).unwrap_or(&old).clone();
            for (d, want) in next.iter().enumerate().take(old.len()) {
                if self.step_layer_generic(&old, d)? != *want {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Whether one more saturation round would change nothing.
    pub fn is_fixpoint(&mut self) -> Result<bool, Error> {
        let fixed = self.fixed.clone();
        Ok(self.jacobi(&fixed)? == fixed)
    }

    /// Number of Jacobi rounds to the fixpoint.
    pub fn rounds(&mut self) -> Result<usize, Error> {
        self.ensure_history()?;
        Ok(self.history.len() - 1)
    }

    pub fn layout(&self) -> &Layout {
        &self.spds.layout
    }

    fn layers(&self) -> &[Layer] {
        &self.fixed
    }

    /// Layer index for a letter at 1-based stack position `pos`.
    pub(super) fn layer_at(&self, pos: usize) -> Option<usize> {
        match self.cap {
            Some(h) if pos == 0 || pos > h => None,
            Some(h) => Some(h - pos),
            None => Some(0),
        }
    }

    /// Membership of the one-letter configuration for a node labelled `x`
    /// under assumption `f`, with the control all zero. `headroom` is the
    /// number of stack letters allowed, counting the node's own; it only
    /// matters under a cap.
    pub fn accepts_node(&self, x: &Label, f: &AssumptionFunction, headroom: usize) -> bool {
        let l = self.layout();
        let letter = l.initial_letter(x, f);
        let layer = match self.cap {
            Some(_) if headroom == 0 => return false,
            Some(h) => headroom.min(h) - 1,
            None => 0,
        };
        let mut a = Assignment::new(l.num_vars());
        for (v, b) in l.control_lits(&l.zero_control(), Ctl::Cur) {
            a.set(v, b);
        }
        for (v, b) in l.letter_lits(&letter, Stk::Cur) {
            a.set(v, b);
        }
        self.spds
            .mgr
            .evaluate(self.layers()[layer].f, &a)
            .expect("edges only mention V and W")
    }

    /// Control states reachable by reading the letters from the top of
    /// `config` down to (excluding) the one at index `until`, plus at every
    /// position whether the final state is reachable there.
    fn scan(&mut self, config: &Config) -> Result<(Vec<Bdd>, Vec<bool>), Error> {
        let l = self.spds.layout.clone();
        let n = config.stack.len();
        let start = self
            .spds
            .mgr
            .cube(&l.control_lits(&config.control, Ctl::Cur))?;
        let mut states = vec![start];
        let mut finals = Vec::with_capacity(n);
        for j in (0..n).rev() {
            let s = *states.last().unwrap();
            let Some(layer) = self.layer_at(j + 1) else {
                finals.push(false);
                states.push(Bdd::FALSE);
                continue;
            };
            let Layer { p, f } = self.layers()[layer];
            let letter = self
                .spds
                .mgr
                .cube(&l.letter_lits(&config.stack[j], Stk::Cur))?;
            let sl = self.spds.mgr.and(s, letter);
            let hit = self.spds.mgr.and_exists(sl, f, self.maps.q_cur);
            finals.push(hit == Bdd::TRUE);
            let img = self.spds.mgr.and_exists(sl, p, self.maps.q_cur);
            let img = self.spds.mgr.rename(img, &self.maps.back)?;
            states.push(img);
        }
        Ok((states, finals))
    }

    /// Whether `config` is in the saturated set.
    pub fn accepts(&mut self, config: &Config) -> Result<bool, Error> {
        if config.stack.is_empty() {
            return Ok(false);
        }
        let (_, finals) = self.scan(config)?;
        Ok(match self.mode {
            Mode::Exact => *finals.last().unwrap(),
            Mode::Anywhere => finals.iter().any(|&b| b),
        })
    }

    /// One edge lookup in round `r`.
    fn edge_p(&self, r: usize, d: usize, p: &Control, a: &Letter, q: &Control) -> bool {
        let l = self.layout();
        let mut asg = Assignment::new(l.num_vars());
        for (v, b) in l
            .control_lits(p, Ctl::Cur)
            .into_iter()
            .chain(l.control_lits(q, Ctl::Tgt))
        {
            asg.set(v, b);
        }
        for (v, b) in l.letter_lits(a, Stk::Cur) {
            asg.set(v, b);
        }
        self.spds
            .mgr
            .evaluate(self.history[r][d].p, &asg)
            .expect("total on V, W, V^")
    }

    fn edge_f(&self, r: usize, d: usize, p: &Control, a: &Letter) -> bool {
        let l = self.layout();
        let mut asg = Assignment::new(l.num_vars());
        for (v, b) in l.control_lits(p, Ctl::Cur) {
            asg.set(v, b);
        }
        for (v, b) in l.letter_lits(a, Stk::Cur) {
            asg.set(v, b);
        }
        self.spds
            .mgr
            .evaluate(self.history[r][d].f, &asg)
            .expect("total on V, W")
    }

    /// A concrete run from `config` to a target configuration.
    pub fn extract_witness(&mut self, config: &Config) -> Result<PdsRun, Error> {
        self.ensure_history()?;
        let l = self.spds.layout.clone();
        let n = config.stack.len();
        if n == 0 {
            return Err(Error::Internal("empty configuration".into()));
        }
        let (states, finals) = self.scan(config)?;
        // Letter read at scan step `s` is stack index n - 1 - s.
        let hit = match self.mode {
            Mode::Exact => finals[n - 1].then_some(n - 1),
            Mode::Anywhere => finals.iter().position(|&b| b),
        };
        let Some(hit) = hit else {
            return Err(Error::Internal(
                "configuration is not in the reach set".into(),
            ));
        };
        // Walk back from the accepting edge, choosing concrete states.
        let mut chosen: Vec<Control> = vec![
            Control {
                pop: false,
                x: vec![]
            };
            hit + 1
        ];
        {
            let j = n - 1 - hit;
            let layer = self.layer_at(j + 1).unwrap();
            let letter = self
                .spds
                .mgr
                .cube(&l.letter_lits(&config.stack[j], Stk::Cur))?;
            let s = self.spds.mgr.and(states[hit], letter);
            let f = self.layers()[layer].f;
            let both = self.spds.mgr.and(s, f);
            let model = self
                .spds
                .mgr
                .pick_model(both)
                .ok_or_else(|| Error::Internal("no accepting state".into()))?;
            chosen[hit] = l.read_control(&model, Ctl::Cur);
        }
        for s in (0..hit).rev() {
            let j = n - 1 - s;
            let layer = self.layer_at(j + 1).unwrap();
            let letter = self
                .spds
                .mgr
                .cube(&l.letter_lits(&config.stack[j], Stk::Cur))?;
            let q = self
                .spds
                .mgr
                .cube(&l.control_lits(&chosen[s + 1], Ctl::Tgt))?;
            let p = self.layers()[layer].p;
            let mut g = self.spds.mgr.and(states[s], letter);
            g = self.spds.mgr.and(g, q);
            g = self.spds.mgr.and(g, p);
            let model = self
                .spds
                .mgr
                .pick_model(g)
                .ok_or_else(|| Error::Internal("broken automaton path".into()))?;
            chosen[s] = l.read_control(&model, Ctl::Cur);
        }
        if chosen[0] != config.control {
            return Err(Error::Internal(
                "witness path does not start at the configuration's control".into(),
            ));
        }
        let last = self.history.len() - 1;
        let mut steps = Vec::new();
        for s in 0..hit {
            let j = n - 1 - s;
            let layer = self.layer_at(j + 1).unwrap();
            self.explain_p(
                last,
                layer,
                &chosen[s],
                &config.stack[j],
                &chosen[s + 1],
                &mut steps,
            )?;
        }
        let j = n - 1 - hit;
        let layer = self.layer_at(j + 1).unwrap();
        self.explain_f(last, layer, &chosen[hit], &config.stack[j], &mut steps)?;
        Ok(PdsRun {
            start: config.clone(),
            steps,
        })
    }

    fn explain_p(
        &mut self,
        upto: usize,
        d: usize,
        p: &Control,
        a: &Letter,
        q: &Control,
        out: &mut Vec<PdsStep>,
    ) -> Result<(), Error> {
        let r = (0..=upto)
            .find(|&r| self.edge_p(r, d, p, a, q))
            .ok_or_else(|| Error::Internal("edge missing from the automaton".into()))?;
        if r == 0 {
            return Err(Error::Internal(
                "control edges never belong to the initial automaton".into(),
            ));
        }
        let l = self.spds.layout.clone();
        let src = [l.control_lits(p, Ctl::Cur), l.letter_lits(a, Stk::Cur)].concat();
        for (i, _) in self.pops.clone() {
            let lits = [src.clone(), l.control_lits(q, Ctl::Next)].concat();
            let c = self.spds.mgr.cube(&lits)?;
            let rel = self.spds.rules[i].relation;
            if self.spds.mgr.and(rel, c) != Bdd::FALSE {
                out.push(PdsStep {
                    rule: i,
                    control: p.clone(),
                    top: a.clone(),
                    next: q.clone(),
                    pushed: vec![],
                });
                return Ok(());
            }
        }
        let old = self.history[r - 1].clone();
        let prev = self.prev(d);
        let src_cube = self.spds.mgr.cube(&src)?;
        let q_cube = self.spds.mgr.cube(&l.control_lits(q, Ctl::Tgt))?;
        for i in 0..self.spds.rules.len() {
            let rule = self.spds.rules[i].clone();
            let mgr = &mut self.spds.mgr;
            match rule.arity {
                1 => {
                    let t = mgr.rename(old[d].p, &self.maps.one)?;
                    let g = conj(mgr, &[rule.relation, src_cube, t, q_cube]);
                    if let Some(m) = mgr.pick_model(g) {
                        let (p2, w1) = (l.read_control(&m, Ctl::Next), l.read_letter(&m, Stk::One));
                        out.push(PdsStep {
                            rule: i,
                            control: p.clone(),
                            top: a.clone(),
                            next: p2.clone(),
                            pushed: vec![w1.clone()],
                        });
                        return self.explain_p(r - 1, d, &p2, &w1, q, out);
                    }
                }
                2 => {
                    let Some(e) = prev else { continue };
                    let t1 = mgr.rename(old[e].p, &self.maps.first)?;
                    let t2 = mgr.rename(old[d].p, &self.maps.second)?;
                    let g = conj(mgr, &[rule.relation, src_cube, t1, t2, q_cube]);
                    if let Some(m) = mgr.pick_model(g) {
                        let p2 = l.read_control(&m, Ctl::Next);
                        let mid = l.read_control(&m, Ctl::Mid);
                        let (w1, w2) = (l.read_letter(&m, Stk::One), l.read_letter(&m, Stk::Two));
                        out.push(PdsStep {
                            rule: i,
                            control: p.clone(),
                            top: a.clone(),
                            next: p2.clone(),
                            pushed: vec![w1.clone(), w2.clone()],
                        });
                        self.explain_p(r - 1, e, &p2, &w2, &mid, out)?;
                        return self.explain_p(r - 1, d, &mid, &w1, q, out);
                    }
                }
                _ => {}
            }
        }
        Err(Error::Internal("no rule explains an automaton edge".into()))
    }

    fn explain_f(
        &mut self,
        upto: usize,
        d: usize,
        p: &Control,
        a: &Letter,
        out: &mut Vec<PdsStep>,
    ) -> Result<(), Error> {
        let r = (0..=upto)
            .find(|&r| self.edge_f(r, d, p, a))
            .ok_or_else(|| Error::Internal("final edge missing from the automaton".into()))?;
        if r == 0 {
            return Ok(());
        }
        let l = self.spds.layout.clone();
        let old = self.history[r - 1].clone();
        let prev = self.prev(d);
        let src = [l.control_lits(p, Ctl::Cur), l.letter_lits(a, Stk::Cur)].concat();
        let src_cube = self.spds.mgr.cube(&src)?;
        for i in 0..self.spds.rules.len() {
            let rule = self.spds.rules[i].clone();
            let mgr = &mut self.spds.mgr;
            match rule.arity {
                1 => {
                    let t = mgr.rename(old[d].f, &self.maps.one)?;
                    let g = conj(mgr, &[rule.relation, src_cube, t]);
                    if let Some(m) = mgr.pick_model(g) {
                        let (p2, w1) = (l.read_control(&m, Ctl::Next), l.read_letter(&m, Stk::One));
                        out.push(PdsStep {
                            rule: i,
                            control: p.clone(),
                            top: a.clone(),
                            next: p2.clone(),
                            pushed: vec![w1.clone()],
                        });
                        return self.explain_f(r - 1, d, &p2, &w1, out);
                    }
                }
                2 => {
                    let Some(e) = prev else { continue };
                    let t1 = mgr.rename(old[e].p, &self.maps.first)?;
                    let t2 = mgr.rename(old[d].f, &self.maps.second)?;
                    let g = conj(mgr, &[rule.relation, src_cube, t1, t2]);
                    if let Some(m) = mgr.pick_model(g) {
                        let p2 = l.read_control(&m, Ctl::Next);
                        let mid = l.read_control(&m, Ctl::Mid);
                        let (w1, w2) = (l.read_letter(&m, Stk::One), l.read_letter(&m, Stk::Two));
                        out.push(PdsStep {
                            rule: i,
                            control: p.clone(),
                            top: a.clone(),
                            next: p2.clone(),
                            pushed: vec![w1.clone(), w2.clone()],
                        });
                        self.explain_p(r - 1, e, &p2, &w2, &mid, out)?;
                        return self.explain_f(r - 1, d, &mid, &w1, out);
                    }
                    if self.mode == Mode::Anywhere {
                        let t = mgr.rename(old[e].f, &self.maps.first)?;
                        let g = conj(mgr, &[rule.relation, src_cube, t]);
                        if let Some(m) = mgr.pick_model(g) {
                            let p2 = l.read_control(&m, Ctl::Next);
                            let (w1, w2) =
                                (l.read_letter(&m, Stk::One), l.read_letter(&m, Stk::Two));
                            out.push(PdsStep {
                                rule: i,
                                control: p.clone(),
                                top: a.clone(),
                                next: p2.clone(),
                                pushed: vec![w1, w2.clone()],
                            });
                            return self.explain_f(r - 1, e, &p2, &w2, out);
                        }
                    }
                }
                _ => {}
            }
        }
        Err(Error::Internal("no rule explains a final edge".into()))
    }

    /// Whether the target predicate holds at the top of `config`.
    pub fn target_holds(&self, config: &Config) -> bool {
        let l = self.layout();
        let Some(top) = config.stack.last() else {
            return false;
        };
        let mut a = Assignment::new(l.num_vars());
        for (v, b) in l
            .control_lits(&config.control, Ctl::Cur)
            .into_iter()
            .chain(l.letter_lits(top, Stk::Cur))
        {
            a.set(v, b);
        }
        self.spds
            .mgr
            .evaluate(self.history[0][0].f, &a)
            .expect("target mentions only V and W")
    }
}

fn conj(mgr: &mut treeprune_bdd::BddManager, parts: &[Bdd]) -> Bdd {
    let mut acc = Bdd::TRUE;
    for &p in parts {
        acc = mgr.and(acc, p);
        if acc == Bdd::FALSE {
            break;
        }
    }
    acc
}
