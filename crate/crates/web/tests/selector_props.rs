//! Selector translation against a direct DOM query, on static documents.

use proptest::prelude::*;
use proptest::test_runner::Config;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use treeprune_core::{match_guard, Classes, Guard, NodePath};
use treeprune_web::css::{parse_selector, parse_stylesheet};
use treeprune_web::jquery::{extract_rules_from_scripts, ScriptSource};
use treeprune_web::{html_to_tree, DomDocument, Element, RuleSink};

const TAGS: &[&str] = &["div", "p", "span"];
const IDS: &[&str] = &["a", "b"];
const CLASSES: &[&str] = &["x", "y", "z"];

fn random_element(rng: &mut ChaCha8Rng, depth: usize) -> Element {
    let mut el = Element::new(TAGS.choose(rng).unwrap());
    if rng.gen_bool(0.3) {
        el.id = Some(IDS.choose(rng).unwrap().to_string());
    }
    for c in CLASSES {
        if rng.gen_bool(0.35) {
            el.classes.push(c.to_string());
        }
    }
    if depth > 0 {
        for _ in 0..rng.gen_range(0..=3) {
            el.children.push(random_element(rng, depth - 1));
        }
    }
    el
}

#[derive(Clone, Debug)]
struct Simple {
    tag: Option<&'static str>,
    id: Option<&'static str>,
    classes: Vec<&'static str>,
}

impl Simple {
    fn text(&self) -> String {
        let mut s = self.tag.unwrap_or("").to_string();
        if let Some(id) = self.id {
            s += &format!("#{id}");
        }
        for c in &self.classes {
            s += &format!(".{c}");
        }
        if s.is_empty() {
            s.push('*');
        }
        s
    }

    fn matches(&self, el: &Element) -> bool {
        self.tag.is_none_or(|t| el.tag == t)
            && self.id.is_none_or(|i| el.id.as_deref() == Some(i))
            && self
                .classes
                .iter()
                .all(|c| el.classes.iter().any(|d| d == c))
    }
}

fn random_simple(rng: &mut ChaCha8Rng) -> Simple {
    Simple {
        tag: rng.gen_bool(0.5).then(|| *TAGS.choose(rng).unwrap()),
        id: rng.gen_bool(0.2).then(|| *IDS.choose(rng).unwrap()),
        classes: CLASSES
            .iter()
            .copied()
            .filter(|_| rng.gen_bool(0.3))
            .collect(),
    }
}

/// Compounds left to right; `true` before a compound means `>`.
fn random_selector(rng: &mut ChaCha8Rng) -> Vec<(bool, Simple)> {
    (0..rng.gen_range(1..=3))
        .map(|_| (rng.gen_bool(0.4), random_simple(rng)))
        .collect()
}

fn selector_text(sel: &[(bool, Simple)]) -> String {
    let mut s = String::new();
    for (i, (child, c)) in sel.iter().enumerate() {
        if i > 0 {
            s += if *child { " > " } else { " " };
        }
        s += &c.text();
    }
    s
}

/// Elements in preorder with their paths and parent positions.
fn flatten<'a>(
    el: &'a Element,
    path: NodePath,
    parent: Option<usize>,
    out: &mut Vec<(&'a Element, NodePath, Option<usize>)>,
) {
    let me = out.len();
    out.push((el, path.clone(), parent));
    for (i, c) in el.children.iter().enumerate() {
        flatten(c, path.child(i as u32), Some(me), out);
    }
}

/// Right-to-left matching with backtracking over ancestors.
fn reference(
    nodes: &[(&Element, NodePath, Option<usize>)],
    at: usize,
    sel: &[(bool, Simple)],
) -> bool {
    let (last, rest) = sel.split_last().unwrap();
    if !last.1.matches(nodes[at].0) {
        return false;
    }
    if rest.is_empty() {
        return true;
    }
    let mut up = nodes[at].2;
    while let Some(p) = up {
        if reference(nodes, p, rest) {
            return true;
        }
        if last.0 {
            return false;
        }
        up = nodes[p].2;
    }
    false
}

proptest! {
    #![proptest_config(Config { cases: 1000, ..Config::default() })]

    #[test]
    fn translation_agrees_with_dom_query(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let root = random_element(&mut rng, 3);
        let doc = DomDocument::parse(&root.to_string()).unwrap();
        prop_assert_eq!(&doc.root, &root);
        let mut classes = Classes::new();
        let tree = html_to_tree(&doc.root, &mut classes);
        let mut nodes = Vec::new();
        flatten(&root, NodePath::root(), None, &mut nodes);
        prop_assert_eq!(tree.len(), nodes.len());
        for _ in 0..4 {
            let sel = random_selector(&mut rng);
            let text = selector_text(&sel);
            let g = parse_selector(&text).unwrap().to_guard(&mut classes);
            for (i, (_, path, _)) in nodes.iter().enumerate() {
                let want = reference(&nodes, i, &sel);
                prop_assert_eq!(match_guard(&tree, path, &g).unwrap(), want, "{} at {}", text, path);
            }
        }
    }

    /// Every selector of every rule yields exactly one entry.
    #[test]
    fn stylesheet_translation_is_total(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pool = [
            ".a", "div > p", "a:hover", "ul li:nth-child(2n+1)", "a[href]", "input[type=\"text\"]", "h1 + p",
            "*", "#x .y", "::selection", "p ~ span", "a > > b", ".", "div.c#d",
        ];
        let mut css = String::new();
        let mut total = 0;
        let mut expected_unsupported = 0;
        for _ in 0..rng.gen_range(1..=6) {
            let n = rng.gen_range(1..=4);
            let picks: Vec<&str> = (0..n).map(|_| *pool.choose(&mut rng).unwrap()).collect();
            total += n;
            expected_unsupported += picks.iter().filter(|p| p.contains('[') || **p == "a > > b" || **p == ".").count();
            if rng.gen_bool(0.3) {
                css += "@media print {\n";
                css += &format!("{} {{ color: red }}\n}}\n", picks.join(",\n  "));
            } else {
                css += &format!("/* c */ {} {{ a: b; }}\n", picks.join(", "));
            }
        }
        let entries = parse_stylesheet("t.css", &css, 1);
        prop_assert_eq!(entries.len(), total, "{}", css);
        let unsupported = entries.iter().filter(|e| !e.is_supported()).count();
        prop_assert_eq!(unsupported, expected_unsupported);
        let mut classes = Classes::new();
        for e in entries.iter().filter(|e| e.is_supported()) {
            let g = e.parsed.as_ref().unwrap().to_guard(&mut classes);
            prop_assert!(g.is_positive() && !g.has_sibling_modality());
        }
    }

    /// Extracted guards stay in the core grammar without sibling modalities.
    #[test]
    fn extracted_guards_are_positive(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let steps = [
            "find('.b')", "parent()", "parents('div')", "children('p')", "closest('.c')", "next()", "prevAll('.d')",
            "has('span')", "end()", "addBack()", "eq(1)", "not('.e')", "filter(':visible')", "fadeIn()",
        ];
        let sinks = ["addClass('k')", "append('<p class=\"q\"><b></b></p>')", "html('<i/>')", "prepend('<u></u>')"];
        let mut js = String::new();
        for _ in 0..rng.gen_range(1..=5) {
            js += "$('.a')";
            for _ in 0..rng.gen_range(0..=4) {
                js += ".";
                js += steps.choose(&mut rng).unwrap();
            }
            js += ".";
            js += sinks.choose(&mut rng).unwrap();
            js += ";\n";
        }
        let mut sink = RuleSink::new(Classes::new());
        let root = Guard::Atom(sink.classes.intern("html"));
        extract_rules_from_scripts(&[ScriptSource { name: "t.js".into(), text: js.clone(), first_line: 1 }], &mut sink, &root);
        for r in &sink.rules {
            prop_assert!(r.guard.is_positive() && !r.guard.has_sibling_modality(), "{}", js);
        }
    }
}
