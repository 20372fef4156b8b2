use crate::manager::{Bdd, BddError, BddManager, Var};

/// Boolean formula over manager variables, the input of [`BddManager::build`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoolExpr {
    Const(bool),
    Var(Var),
    Not(Box<BoolExpr>),
    And(Vec<BoolExpr>),
    Or(Vec<BoolExpr>),
    Iff(Box<BoolExpr>, Box<BoolExpr>),
}

impl BoolExpr {
    pub fn var(v: Var) -> Self {
        BoolExpr::Var(v)
    }

    pub fn not(e: BoolExpr) -> Self {
        BoolExpr::Not(Box::new(e))
    }

    pub fn iff(a: BoolExpr, b: BoolExpr) -> Self {
        BoolExpr::Iff(Box::new(a), Box::new(b))
    }

    /// Evaluates directly, without building a diagram.
    pub fn eval(&self, value: &dyn Fn(Var) -> bool) -> bool {
        match self {
            BoolExpr::Const(b) => *b,
            BoolExpr::Var(v) => value(*v),
            BoolExpr::Not(e) => !e.eval(value),
            BoolExpr::And(es) => es.iter().all(|e| e.eval(value)),
            BoolExpr::Or(es) => es.iter().any(|e| e.eval(value)),
            BoolExpr::Iff(a, b) => a.eval(value) == b.eval(value),
        }
    }
}

impl BddManager {
    /// Builds the canonical diagram of `expr`.
    pub fn build(&mut self, expr: &BoolExpr) -> Result<Bdd, BddError> {
        Ok(match expr {
            BoolExpr::Const(b) => self.constant(*b),
            BoolExpr::Var(v) => self.var(*v)?,
            BoolExpr::Not(e) => {
                let f = self.build(e)?;
                self.not(f)
            }
            BoolExpr::And(es) => {
                // Conjoin from the last conjunct so that chains over ascending
                // variables are glued bottom-up.
                let mut acc = Bdd::TRUE;
                for e in es.iter().rev() {
                    let f = self.build(e)?;
                    acc = self.and(f, acc);
                }
                acc
            }
            BoolExpr::Or(es) => {
                let mut acc = Bdd::FALSE;
                for e in es.iter().rev() {
                    let f = self.build(e)?;
                    acc = self.or(f, acc);
                }
                acc
            }
            BoolExpr::Iff(a, b) => {
                let fa = self.build(a)?;
                let fb = self.build(b)?;
                self.iff(fa, fb)
            }
        })
    }
}
