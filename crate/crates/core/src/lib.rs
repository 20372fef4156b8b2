//! Redundancy analysis for monotonic tree rewriting systems.
//!
//! Trees are unordered and node labels are sets of classes. A rewrite system
//! fires guarded rules that add children, add classes, remove classes or
//! remove subtrees. A guard is redundant when no reachable tree matches it.
//! The decision procedure drops removals, normalizes the system into simple
//! rules, and saturates the initial tree with classes that a symbolic
//! pushdown system shows can be added below each node.

pub mod class;
pub mod embed;
pub mod guard;
mod lex;
pub mod rewrite;
pub mod saturation;
pub mod simplify;
pub mod spds;
#[cfg(feature = "testing")]
pub mod testing;
pub mod tree;

pub use class::{ClassId, Classes, Label};
pub use guard::{
    match_guard, match_guard_assume, matched_anywhere, matched_set, parse_guard,
    AssumptionFunction, Dir, Guard,
};
pub use rewrite::{apply_rule, RewriteOp, RewriteRule, RewriteSystem};
pub use tree::{NodePath, Tree};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error at {line}:{col}: {msg}")]
    Parse {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("unknown class {0:?} in a closed class universe")]
    UnknownClass(String),
    #[error("node {0} is not in the tree domain")]
    NodeNotInDomain(String),
    #[error("invalid node path {0:?}")]
    InvalidPath(String),
    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("cannot remove the root node")]
    RemoveRoot,
    #[error("guard of rule {0} is not matched at node {1}")]
    GuardNotMatched(String, String),
    #[error("guard is not simple: {0}")]
    NotSimple(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("duplicate rule name {0}")]
    DuplicateRule(String),
    #[error("bdd: {0}")]
    Bdd(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

impl From<treeprune_bdd::BddError> for Error {
    fn from(e: treeprune_bdd::BddError) -> Self {
        Error::Bdd(e.to_string())
    }
}
