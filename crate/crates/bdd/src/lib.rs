//! Reduced ordered binary decision diagrams.
//!
//! A [`BddManager`] owns a node store with a unique table, so two handles are
//! equal exactly when they denote the same boolean function. Variables are
//! ordered by index; there is no dynamic reordering and no complement edges.

mod formula;
mod manager;

pub use formula::BoolExpr;
pub use manager::{Assignment, Bdd, BddError, BddManager, Var, VarOrder};
