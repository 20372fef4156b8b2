//! The embedding preorder and canonical forms derived from it.
//!
//! An embedding maps the root to the root, each node to one whose label is a
//! superset, and children to children. It need not be injective, so `t1 ⪯ t2`
//! is decided bottom-up without any matching: a node embeds into a node when
//! its label is included and every child embeds into some child.

use std::collections::BTreeMap;

use rustc_hash::FxHashMap;

use crate::tree::{NodePath, Tree, TreeIndex};

struct Embedder<'a> {
    a: TreeIndex<'a>,
    b: TreeIndex<'a>,
    memo: FxHashMap<(usize, usize), bool>,
}

impl Embedder<'_> {
    fn embeds(&mut self, i: usize, j: usize) -> bool {
        if let Some(&r) = self.memo.get(&(i, j)) {
            return r;
        }
        let mut r = self.a.labels[i].is_subset(self.b.labels[j]);
        if r {
            let kids_a = self.a.children[i].clone();
            let kids_b = self.b.children[j].clone();
            r = kids_a
                .iter()
                .all(|&ci| kids_b.iter().any(|&cj| self.embeds(ci, cj)));
        }
        self.memo.insert((i, j), r);
        r
    }

    fn build(&mut self, i: usize, j: usize, out: &mut BTreeMap<NodePath, NodePath>) {
        out.insert(self.a.paths[i].clone(), self.b.paths[j].clone());
        let kids_a = self.a.children[i].clone();
        let kids_b = self.b.children[j].clone();
        for ci in kids_a {
            let cj = *kids_b
                .iter()
                .find(|&&cj| self.embeds(ci, cj))
                .expect("checked by embeds");
            self.build(ci, cj, out);
        }
    }
}

/// A witness for `t1 ⪯ t2`, if one exists.
pub fn find_embedding(t1: &Tree, t2: &Tree) -> Option<BTreeMap<NodePath, NodePath>> {
    let mut e = Embedder {
        a: TreeIndex::new(t1),
        b: TreeIndex::new(t2),
        memo: FxHashMap::default(),
    };
    if !e.embeds(0, 0) {
        return None;
    }
    let mut out = BTreeMap::new();
    e.build(0, 0, &mut out);
    Some(out)
}

pub fn embeds(t1: &Tree, t2: &Tree) -> bool {
    let mut e = Embedder {
        a: TreeIndex::new(t1),
        b: TreeIndex::new(t2),
        memo: FxHashMap::default(),
    };
    e.embeds(0, 0)
}

/// Checks that `f` satisfies the three embedding conditions.
pub fn is_embedding(t1: &Tree, t2: &Tree, f: &BTreeMap<NodePath, NodePath>) -> bool {
    if f.get(&NodePath::root()) != Some(&NodePath::root()) {
        return false;
    }
    for (v, l) in t1.nodes() {
        let Some(w) = f.get(v) else { return false };
        let Some(l2) = t2.label(w) else { return false };
        if !l.is_subset(l2) {
            return false;
        }
        if let Some(p) = v.parent() {
            match (f.get(&p), w.parent()) {
                (Some(fp), Some(wp)) if *fp == wp => {}
                _ => return false,
            }
        }
    }
    true
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Shape {
    label: Vec<u32>,
    children: Vec<Shape>,
}

impl Shape {
    fn embeds(&self, other: &Shape) -> bool {
        self.label
            .iter()
            .all(|c| other.label.binary_search(c).is_ok())
            && self
                .children
                .iter()
                .all(|c| other.children.iter().any(|d| c.embeds(d)))
    }

    fn write(&self, out: &mut String) {
        out.push('(');
        for (k, c) in self.label.iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            out.push_str(&c.to_string());
        }
        for c in &self.children {
            c.write(out);
        }
        out.push(')');
    }
}

fn shape(ix: &TreeIndex, i: usize, reduce: bool) -> Shape {
    let label = ix.labels[i].iter().map(|c| c.0).collect();
    let mut children: Vec<Shape> = ix.children[i]
        .iter()
        .map(|&c| shape(ix, c, reduce))
        .collect();
    children.sort();
    children.dedup();
    if reduce {
        // Drop a child that embeds into a sibling; children are already
        // reduced and deduplicated, so equivalent siblings are equal shapes.
        let keep: Vec<bool> = (0..children.len())
            .map(|k| !(0..children.len()).any(|m| m != k && children[k].embeds(&children[m])))
            .collect();
        children = children
            .into_iter()
            .zip(keep)
            .filter(|(_, k)| *k)
            .map(|(c, _)| c)
            .collect();
    }
    Shape { label, children }
}

/// A string equal for two trees iff they embed into each other.
///
/// Computed from the core of the tree: siblings that embed into another
/// sibling are removed bottom-up, which leaves a tree whose only
/// self-embedding is the identity. Equivalent cores are isomorphic.
pub fn equivalence_key(t: &Tree) -> String {
    let ix = TreeIndex::new(t);
    let mut out = String::new();
    shape(&ix, 0, true).write(&mut out);
    out
}

/// A string equal for two trees iff they are isomorphic as unordered trees.
pub fn isomorphism_key(t: &Tree) -> String {
    fn sorted(ix: &TreeIndex, i: usize) -> Shape {
        let mut children: Vec<Shape> = ix.children[i].iter().map(|&c| sorted(ix, c)).collect();
        children.sort();
        Shape {
            label: ix.labels[i].iter().map(|c| c.0).collect(),
            children,
        }
    }
    let ix = TreeIndex::new(t);
    let mut out = String::new();
    sorted(&ix, 0).write(&mut out);
    out
}
