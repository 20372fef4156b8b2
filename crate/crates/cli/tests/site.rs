//! The mini-site fixture. Expected verdicts were established with the
//! brute-force oracles below and then written down.

use std::path::{Path, PathBuf};

use treeprune_cli::{analyze_page, cmd_analyze, AnalyzeArgs, AnalyzeOutput, Status};
use treeprune_core::matched_anywhere;
use treeprune_core::rewrite::{enumerate_post_star, fixpoint_tree_k, Caps};
use treeprune_web::{build_page_system, load_page};

fn site(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures/site")
        .join(name)
}

const R: Status = Status::Reachable;
const X: Status = Status::Redundant;
const U: Status = Status::Unsupported;

const INDEX: &[(&str, Status)] = &[
    ("body", R),
    (".nav li", R),
    (".nav li a:hover", R),
    (".nav > .dropdown-open", X),
    ("#search .touched", R),
    ("input[type=\"text\"]", U),
    ("#main .post h2 + .meta", R),
    (".post .alert .close", R),
    (".comment.highlight", X),
    (".sidebar .ad", X),
    ("table.legacy td", X),
    ("#main ul.old-list li", X),
    (".footer p", R),
    (".hero h1", R),
    (".hero .tagline.faded", X),
];

const ABOUT: &[(&str, Status)] = &[
    ("body", R),
    (".nav li", R),
    (".nav li a:hover", R),
    (".nav > .dropdown-open", X),
    ("#search .touched", X),
    ("input[type=\"text\"]", U),
    ("#main .post h2 + .meta", R),
    (".post .alert .close", R),
    (".comment.highlight", R),
    (".sidebar .ad", X),
    ("table.legacy td", X),
    ("#main ul.old-list li", X),
    (".footer p", R),
];

/// Verdicts by brute force: a selector is reachable when some explored
/// tree matches it, and redundant when no fixpoint tree up to a few levels
/// above the page matches it.
fn oracle_verdicts(page: &str) -> Vec<(String, Status)> {
    let page = load_page(&site(page), &[]).unwrap();
    let ps = build_page_system(&page);
    assert!(ps.system.is_positive() && !ps.system.has_removals());
    let caps = Caps {
        max_nodes: 40,
        max_trees: 3000,
        max_steps: 100_000,
        max_height: None,
    };
    let post = enumerate_post_star(&ps.system, caps);
    let h = ps.system.initial.height();
    let fixpoints: Vec<_> = (h..=h + 3)
        .map(|k| fixpoint_tree_k(&ps.system, k).unwrap())
        .collect();
    ps.selectors
        .iter()
        .zip(&ps.query_of)
        .map(|(e, q)| {
            let status = match q {
                None => Status::Unsupported,
                Some(qi) => {
                    let g = &ps.system.queries[*qi].guard;
                    let seen = post.trees.iter().any(|t| matched_anywhere(t, g));
                    let bounded = fixpoints.iter().any(|t| matched_anywhere(t, g));
                    assert_eq!(seen, bounded, "{} disagrees between oracles", e.text);
                    if seen {
                        Status::Reachable
                    } else {
                        Status::Redundant
                    }
                }
            };
            (e.text.clone(), status)
        })
        .collect()
}

fn owned(v: &[(&str, Status)]) -> Vec<(String, Status)> {
    v.iter().map(|(s, st)| (s.to_string(), *st)).collect()
}

#[test]
fn oracle_agrees_with_the_frozen_verdicts() {
    assert_eq!(oracle_verdicts("index.html"), owned(INDEX));
    assert_eq!(oracle_verdicts("about.html"), owned(ABOUT));
}

#[test]
fn pages_match_the_frozen_verdicts() {
    for (page, want) in [("index.html", INDEX), ("about.html", ABOUT)] {
        let r = analyze_page(&site(page), &AnalyzeArgs::default()).unwrap();
        let got: Vec<(String, Status)> = r
            .selectors
            .iter()
            .map(|v| (v.selector.clone(), v.status))
            .collect();
        assert_eq!(got, owned(want), "{page}");
    }
}

#[test]
fn site_counts_use_intersection() {
    let out = cmd_analyze(
        &[site("index.html"), site("about.html")],
        &AnalyzeArgs::default(),
    )
    .unwrap();
    let AnalyzeOutput::Site(s) = out else {
        panic!("two pages make a site")
    };
    assert_eq!(
        (
            s.stats.selectors,
            s.stats.redundant,
            s.stats.reachable,
            s.stats.unsupported
        ),
        (15, 5, 9, 1)
    );
    let status = |sel: &str| {
        s.selectors
            .iter()
            .find(|v| v.selector == sel)
            .unwrap()
            .status
    };
    // Reachable on one page only.
    assert_eq!(status("#search .touched"), Status::Reachable);
    assert_eq!(status(".comment.highlight"), Status::Reachable);
    assert_eq!(status(".nav > .dropdown-open"), Status::Redundant);
    assert_eq!(status("input[type=\"text\"]"), Status::Unsupported);
    // Site redundancy implies redundancy on every page that loads it.
    for v in s.selectors.iter().filter(|v| v.status == Status::Redundant) {
        for p in &s.pages {
            if let Some(pv) = p
                .selectors
                .iter()
                .find(|x| x.selector == v.selector && x.line == Some(v.line))
            {
                assert_eq!(
                    pv.status,
                    Status::Redundant,
                    "{} on {}",
                    v.selector,
                    p.inputs[0]
                );
            }
        }
    }
}

#[test]
fn touched_needs_the_script() {
    let r = analyze_page(
        &site("index.html"),
        &AnalyzeArgs {
            witness: true,
            ..AnalyzeArgs::default()
        },
    )
    .unwrap();
    let v = r
        .selectors
        .iter()
        .find(|v| v.selector == "#search .touched")
        .unwrap();
    let w = v.witness.as_ref().unwrap();
    assert!(
        !w.is_empty(),
        "no .touched in the static page, so the witness needs a step"
    );
}
