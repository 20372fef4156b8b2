//! Unordered, unranked labeled trees over a prefix-closed domain of paths.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Bound;
use std::str::FromStr;

use crate::class::{ClassId, Classes, Label};
use crate::lex::{tokenize, Cursor, Tok};
use crate::Error;

/// A node address; the empty path is the root.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodePath(pub Vec<u32>);

impl NodePath {
    pub fn root() -> Self {
        NodePath(Vec::new())
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn child(&self, i: u32) -> Self {
        let mut p = self.0.clone();
        p.push(i);
        NodePath(p)
    }

    pub fn parent(&self) -> Option<Self> {
        if self.0.is_empty() {
            None
        } else {
            Some(NodePath(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    pub fn is_prefix_of(&self, other: &NodePath) -> bool {
        other.0.starts_with(&self.0)
    }
}

impl fmt::Display for NodePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        f.write_str(&parts.join("."))
    }
}

impl FromStr for NodePath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        if s.is_empty() || s == "ε" || s == "e" {
            return Ok(NodePath::root());
        }
        s.split('.')
            .map(|p| {
                p.parse::<u32>()
                    .map_err(|_| Error::InvalidPath(s.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(NodePath)
    }
}

/// A tree: nonempty prefix-closed domain with a label per node.
///
/// Paths are kept in lexicographic order, which is a preorder: a node comes
/// before all of its descendants and a subtree occupies a contiguous range.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tree {
    nodes: BTreeMap<NodePath, Label>,
}

impl Tree {
    pub fn single(label: Label) -> Self {
        let mut nodes = BTreeMap::new();
        nodes.insert(NodePath::root(), label);
        Tree { nodes }
    }

    /// Builds a tree from explicit nodes, checking the domain invariants.
    pub fn from_nodes(nodes: impl IntoIterator<Item = (NodePath, Label)>) -> Result<Self, Error> {
        let nodes: BTreeMap<NodePath, Label> = nodes.into_iter().collect();
        if !nodes.contains_key(&NodePath::root()) {
            return Err(Error::InvalidTree("domain has no root".into()));
        }
        for p in nodes.keys() {
            if let Some(parent) = p.parent() {
                if !nodes.contains_key(&parent) {
                    return Err(Error::InvalidTree(format!(
                        "domain is not prefix-closed at {p}"
                    )));
                }
            }
        }
        Ok(Tree { nodes })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn height(&self) -> usize {
        self.nodes.keys().map(NodePath::depth).max().unwrap_or(0)
    }

    pub fn contains(&self, p: &NodePath) -> bool {
        self.nodes.contains_key(p)
    }

    pub fn label(&self, p: &NodePath) -> Option<&Label> {
        self.nodes.get(p)
    }

    pub fn root_label(&self) -> &Label {
        &self.nodes[&NodePath::root()]
    }

    /// Nodes in preorder.
    pub fn nodes(&self) -> impl Iterator<Item = (&NodePath, &Label)> {
        self.nodes.iter()
    }

    pub fn paths(&self) -> impl Iterator<Item = &NodePath> {
        self.nodes.keys()
    }

    /// The subtree rooted at `p` in preorder, `p` first.
    fn subtree_range<'a>(
        &'a self,
        p: &'a NodePath,
    ) -> impl Iterator<Item = (&'a NodePath, &'a Label)> + 'a {
        self.nodes
            .range((Bound::Included(p.clone()), Bound::Unbounded))
            .take_while(move |(q, _)| p.is_prefix_of(q))
    }

    /// Children of `p`, ordered by index.
    pub fn children(&self, p: &NodePath) -> Vec<NodePath> {
        let d = p.depth() + 1;
        self.subtree_range(p)
            .filter(|(q, _)| q.depth() == d)
            .map(|(q, _)| q.clone())
            .collect()
    }

    fn fresh_child(&self, p: &NodePath) -> NodePath {
        let used: Vec<u32> = self
            .children(p)
            .iter()
            .map(|c| c.0[c.0.len() - 1])
            .collect();
        let mut i = 0;
        while used.contains(&i) {
            i += 1;
        }
        p.child(i)
    }

    /// Adds a child at the smallest unused index and returns its path.
    pub fn add_child(&mut self, p: &NodePath, label: Label) -> Result<NodePath, Error> {
        if !self.contains(p) {
            return Err(Error::NodeNotInDomain(p.to_string()));
        }
        let c = self.fresh_child(p);
        self.nodes.insert(c.clone(), label);
        Ok(c)
    }

    pub fn add_classes(&mut self, p: &NodePath, classes: &Label) -> Result<bool, Error> {
        let label = self
            .nodes
            .get_mut(p)
            .ok_or_else(|| Error::NodeNotInDomain(p.to_string()))?;
        let before = label.len();
        label.extend(classes.iter().copied());
        Ok(label.len() != before)
    }

    pub fn remove_classes(&mut self, p: &NodePath, classes: &Label) -> Result<(), Error> {
        let label = self
            .nodes
            .get_mut(p)
            .ok_or_else(|| Error::NodeNotInDomain(p.to_string()))?;
        label.retain(|c| !classes.contains(c));
        Ok(())
    }

    pub fn remove_subtree(&mut self, p: &NodePath) -> Result<(), Error> {
        if p.is_root() {
            return Err(Error::RemoveRoot);
        }
        if !self.contains(p) {
            return Err(Error::NodeNotInDomain(p.to_string()));
        }
        let doomed: Vec<NodePath> = self.subtree_range(p).map(|(q, _)| q.clone()).collect();
        for q in doomed {
            self.nodes.remove(&q);
        }
        Ok(())
    }

    /// Copy of the tree with every label restricted to classes passing `keep`.
    pub fn project(&self, keep: impl Fn(ClassId) -> bool) -> Tree {
        Tree {
            nodes: self
                .nodes
                .iter()
                .map(|(p, l)| (p.clone(), l.iter().copied().filter(|&c| keep(c)).collect()))
                .collect(),
        }
    }

    /// The subtree rooted at `p`, re-rooted at ε.
    pub fn subtree(&self, p: &NodePath) -> Option<Tree> {
        if !self.contains(p) {
            return None;
        }
        let n = p.depth();
        Some(Tree {
            nodes: self
                .subtree_range(p)
                .map(|(q, l)| (NodePath(q.0[n..].to_vec()), l.clone()))
                .collect(),
        })
    }

    /// S-expression rendering: `(label child …)`.
    pub fn to_sexpr(&self, classes: &Classes) -> String {
        let mut out = String::new();
        self.write_sexpr(&NodePath::root(), classes, &mut out);
        out
    }

    fn write_sexpr(&self, p: &NodePath, classes: &Classes, out: &mut String) {
        out.push('(');
        let label = &self.nodes[p];
        if label.len() == 1 {
            out.push_str(&classes.token(*label.iter().next().unwrap()));
        } else {
            out.push_str(&classes.label_string(label));
        }
        for c in self.children(p) {
            out.push(' ');
            self.write_sexpr(&c, classes, out);
        }
        out.push(')');
    }

    pub fn parse(text: &str, classes: &mut Classes) -> Result<Tree, Error> {
        let mut cur = Cursor::new(tokenize(text)?);
        let t = parse_tree(&mut cur, classes)?;
        if !cur.at_end() {
            return Err(cur.error("trailing input after tree"));
        }
        Ok(t)
    }
}

pub(crate) fn parse_label(cur: &mut Cursor, classes: &mut Classes) -> Result<Label, Error> {
    match cur.next() {
        Some(Tok::LBrace) => {
            let mut label = Label::new();
            loop {
                match cur.next() {
                    Some(Tok::RBrace) => return Ok(label),
                    Some(Tok::Comma) => {}
                    Some(Tok::Word(w)) => {
                        label.insert(classes.resolve(&w)?);
                    }
                    Some(Tok::Quoted(w)) => {
                        label.insert(classes.resolve(&w)?);
                    }
                    _ => return Err(cur.error("malformed label")),
                }
            }
        }
        Some(Tok::Word(w)) => Ok(Label::from([classes.resolve(&w)?])),
        Some(Tok::Quoted(w)) => Ok(Label::from([classes.resolve(&w)?])),
        _ => Err(cur.error("expected a label")),
    }
}

pub(crate) fn parse_tree(cur: &mut Cursor, classes: &mut Classes) -> Result<Tree, Error> {
    let mut nodes = BTreeMap::new();
    parse_node(cur, classes, NodePath::root(), &mut nodes)?;
    Ok(Tree { nodes })
}

fn parse_node(
    cur: &mut Cursor,
    classes: &mut Classes,
    at: NodePath,
    nodes: &mut BTreeMap<NodePath, Label>,
) -> Result<(), Error> {
    cur.expect(Tok::LParen)?;
    let label = parse_label(cur, classes)?;
    nodes.insert(at.clone(), label);
    let mut i = 0;
    loop {
        match cur.peek() {
            Some(Tok::RParen) => {
                cur.next();
                return Ok(());
            }
            Some(Tok::LParen) => {
                parse_node(cur, classes, at.child(i), nodes)?;
                i += 1;
            }
            _ => return Err(cur.error("expected a child tree or ')'")),
        }
    }
}

/// Array view of a tree used by the evaluators: nodes in preorder with
/// parent and child links.
pub struct TreeIndex<'a> {
    pub paths: Vec<&'a NodePath>,
    pub labels: Vec<&'a Label>,
    pub parent: Vec<Option<usize>>,
    pub children: Vec<Vec<usize>>,
}

impl<'a> TreeIndex<'a> {
    pub fn new(tree: &'a Tree) -> Self {
        let n = tree.len();
        let mut paths = Vec::with_capacity(n);
        let mut labels = Vec::with_capacity(n);
        let mut parent = Vec::with_capacity(n);
        let mut children = vec![Vec::new(); n];
        // Stack of (depth-indexed) open ancestors along the current preorder path.
        let mut open: Vec<usize> = Vec::new();
        for (i, (p, l)) in tree.nodes().enumerate() {
            open.truncate(p.depth());
            let par = open.last().copied();
            if let Some(q) = par {
                children[q].push(i);
            }
            parent.push(par);
            paths.push(p);
            labels.push(l);
            open.push(i);
        }
        TreeIndex {
            paths,
            labels,
            parent,
            children,
        }
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn position(&self, p: &NodePath) -> Option<usize> {
        self.paths.binary_search(&p).ok()
    }
}
