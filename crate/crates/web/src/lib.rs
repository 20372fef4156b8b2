//! From HTML pages to rewrite systems.
//!
//! The element tree of a page becomes the initial tree, each stylesheet
//! selector becomes a query, and jQuery calls in the page's scripts become
//! rewrite rules. Element names are bare classes, ids carry a `#` prefix
//! and CSS classes a `.` prefix, so `warn`, `#warn` and `.warn` never clash.

pub mod css;
pub mod html;
pub mod jquery;
pub mod js;
pub mod page;

use std::collections::{BTreeSet, HashSet};

use thiserror::Error;
use treeprune_core::{ClassId, Classes, Guard, Label, RewriteOp, RewriteRule};

pub use css::{parse_selector, parse_stylesheet, SelectorEntry};
pub use html::{DomDocument, Element};
pub use jquery::{extract_rules_from_scripts, fragment_to_rules, JQueryStack, ScriptSource};
pub use page::{build_page_system, html_to_tree, load_page, Page, PageSystem};

#[derive(Debug, Error)]
pub enum WebError {
    #[error("html: {0}")]
    Html(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// Prefix of marker classes introduced by the translation. No element,
/// id or CSS class name can start with it.
pub const MARKER: &str = "@";

/// Collects rules with fresh names, dropping exact duplicates.
#[derive(Clone, Debug, Default)]
pub struct RuleSink {
    pub classes: Classes,
    pub tags: BTreeSet<ClassId>,
    pub rules: Vec<RewriteRule>,
    seen: HashSet<(Guard, RewriteOp)>,
    tmps: usize,
    any: Option<ClassId>,
    /// Catch-all rules were needed somewhere.
    pub coarse: bool,
}

impl RuleSink {
    pub fn new(classes: Classes) -> Self {
        RuleSink {
            classes,
            ..RuleSink::default()
        }
    }

    pub fn push(&mut self, guard: Guard, op: RewriteOp) -> bool {
        if !self.seen.insert((guard.clone(), op.clone())) {
            return false;
        }
        let name = format!("js{}", self.rules.len() + 1);
        self.rules.push(RewriteRule::new(name, guard, op));
        true
    }

    pub fn fresh_tmp(&mut self) -> ClassId {
        self.tmps += 1;
        self.classes.intern(&format!("{MARKER}tmp{}", self.tmps))
    }

    /// The marker of arbitrary subtrees built for unparseable markup.
    pub fn any_marker(&mut self) -> ClassId {
        *self
            .any
            .get_or_insert_with(|| self.classes.intern(&format!("{MARKER}any")))
    }

    fn names(&self) -> impl Iterator<Item = (ClassId, &str)> {
        self.classes.ids().map(|c| (c, self.classes.name(c)))
    }

    /// Every `.class` known so far.
    pub fn css_classes(&self) -> Label {
        self.names()
            .filter(|(_, n)| n.starts_with('.'))
            .map(|(c, _)| c)
            .collect()
    }

    /// Every element, id and class name known so far.
    pub fn observed_classes(&self) -> Label {
        self.names()
            .filter(|(_, n)| !n.starts_with(MARKER))
            .map(|(c, _)| c)
            .collect()
    }
}
