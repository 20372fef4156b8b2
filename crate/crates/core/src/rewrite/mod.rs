//! Rewrite rules, one-step semantics and the reference reachability oracles.

mod fixpoint;
mod oracle;
mod text;

pub use fixpoint::{fixpoint_tree_k, fixpoint_tree_k_ordered, WorklistOrder};
pub use oracle::{enumerate_post_star, enumerate_post_star_assume, Caps, PostStar};
pub use text::{parse_system, print_system};

use std::collections::BTreeSet;

use crate::class::{ClassId, Classes, Label};
use crate::guard::{eval_all, Guard};
use crate::tree::{NodePath, Tree, TreeIndex};
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Before,
    After,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RewriteOp {
    AddChild(Label),
    AddClass(Label),
    RemoveClass(Label),
    RemoveNode,
    /// Inserts a sibling next to the node. Sibling order is not modeled, so
    /// this adds a child of the parent; simplification rewrites it away.
    AddSibling(Side, Label),
}

impl RewriteOp {
    pub fn is_removal(&self) -> bool {
        matches!(self, RewriteOp::RemoveClass(_) | RewriteOp::RemoveNode)
    }

    pub fn classes(&self) -> Option<&Label> {
        match self {
            RewriteOp::AddChild(x)
            | RewriteOp::AddClass(x)
            | RewriteOp::RemoveClass(x)
            | RewriteOp::AddSibling(_, x) => Some(x),
            RewriteOp::RemoveNode => None,
        }
    }

    pub fn display(&self, classes: &Classes) -> String {
        match self {
            RewriteOp::AddChild(x) => format!("addchild {}", classes.label_string(x)),
            RewriteOp::AddClass(x) => format!("addclass {}", classes.label_string(x)),
            RewriteOp::RemoveClass(x) => format!("removeclass {}", classes.label_string(x)),
            RewriteOp::RemoveNode => "removenode".to_string(),
            RewriteOp::AddSibling(Side::Before, x) => format!("before {}", classes.label_string(x)),
            RewriteOp::AddSibling(Side::After, x) => format!("after {}", classes.label_string(x)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RewriteRule {
    pub name: String,
    pub guard: Guard,
    pub op: RewriteOp,
}

impl RewriteRule {
    pub fn new(name: impl Into<String>, guard: Guard, op: RewriteOp) -> Self {
        RewriteRule {
            name: name.into(),
            guard,
            op,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Query {
    pub name: String,
    pub guard: Guard,
}

#[derive(Clone, Debug)]
pub struct RewriteSystem {
    pub classes: Classes,
    /// Classes declared as element tag names; used to refine negated tags.
    pub tags: BTreeSet<ClassId>,
    pub rules: Vec<RewriteRule>,
    pub initial: Tree,
    pub queries: Vec<Query>,
}

impl RewriteSystem {
    pub fn new(classes: Classes, initial: Tree) -> Self {
        RewriteSystem {
            classes,
            tags: BTreeSet::new(),
            rules: Vec::new(),
            initial,
            queries: Vec::new(),
        }
    }

    pub fn rule(&self, name: &str) -> Option<&RewriteRule> {
        self.rules.iter().find(|r| r.name == name)
    }

    pub fn is_positive(&self) -> bool {
        self.rules.iter().all(|r| r.guard.is_positive())
    }

    pub fn has_removals(&self) -> bool {
        self.rules.iter().any(|r| r.op.is_removal())
    }

    pub fn query_guards(&self) -> Vec<Guard> {
        self.queries.iter().map(|q| q.guard.clone()).collect()
    }

    pub fn check_unique_names(&self) -> Result<(), Error> {
        let mut seen = BTreeSet::new();
        for r in &self.rules {
            if !seen.insert(r.name.as_str()) {
                return Err(Error::DuplicateRule(r.name.clone()));
            }
        }
        Ok(())
    }
}

/// Applies `rule` at `node`, returning the new tree.
pub fn apply_rule(tree: &Tree, node: &NodePath, rule: &RewriteRule) -> Result<Tree, Error> {
    let ix = TreeIndex::new(tree);
    let i = ix
        .position(node)
        .ok_or_else(|| Error::NodeNotInDomain(node.to_string()))?;
    if !eval_all(&ix, &rule.guard, None)[i] {
        return Err(Error::GuardNotMatched(rule.name.clone(), node.to_string()));
    }
    apply_op(tree, node, &rule.op)
}

/// Applies an operation without checking any guard.
pub(crate) fn apply_op(tree: &Tree, node: &NodePath, op: &RewriteOp) -> Result<Tree, Error> {
    let mut t = tree.clone();
    match op {
        RewriteOp::AddChild(x) => {
            t.add_child(node, x.clone())?;
        }
        RewriteOp::AddClass(x) => {
            t.add_classes(node, x)?;
        }
        RewriteOp::RemoveClass(x) => t.remove_classes(node, x)?,
        RewriteOp::RemoveNode => t.remove_subtree(node)?,
        RewriteOp::AddSibling(_, x) => {
            let parent = node.parent().ok_or_else(|| {
                Error::Unsupported("a sibling cannot be added next to the root".into())
            })?;
            t.add_child(&parent, x.clone())?;
        }
    }
    Ok(t)
}

/// Whether the operation can be executed at `node` (guards aside).
pub(crate) fn op_legal(node: &NodePath, op: &RewriteOp) -> bool {
    !(node.is_root() && matches!(op, RewriteOp::RemoveNode | RewriteOp::AddSibling(..)))
}
