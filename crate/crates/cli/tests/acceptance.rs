//! Acceptance run: one PASS or FAIL line per criterion, then a non-zero exit
//! if anything failed that is not listed in `TOLERATED`.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use treeprune_bdd::{BddManager, BoolExpr, Var, VarOrder};
use treeprune_cli::report::SiteReport;
use treeprune_cli::{check_text, CheckArgs, Report, Status};
use treeprune_core::embed::{embeds, find_embedding, is_embedding};
use treeprune_core::guard::{match_guard, matched_anywhere, matched_set, AssumptionFunction};
use treeprune_core::rewrite::{
    apply_rule, enumerate_post_star, fixpoint_tree_k, parse_system, print_system, Caps, RewriteRule,
};
use treeprune_core::saturation::{
    check_redundancy, saturate, saturate_ordered, validate_witness, CheckOptions, SpdsOracle,
    TraceStep, WitnessTrace,
};
use treeprune_core::simplify::{strip_removals, to_simple};
use treeprune_core::spds::Mode;
use treeprune_core::testing::{
    check_addable, classes_on, extend_tree, random_guard, random_label, random_op, random_simple,
    random_system, random_tree, GuardShape,
};
use treeprune_core::{parse_guard, ClassId, NodePath, Tree};
use treeprune_web::html::DomDocument;
use treeprune_web::{build_page_system, load_page};

const TENNIS_LIMIT: Duration = Duration::from_secs(1);
const PAGE_LIMIT: Duration = Duration::from_secs(2);
const SWEEP_LIMIT: Duration = Duration::from_secs(60);
const SWEEP_SYSTEMS: usize = 200;
const SWEEP_MAX_K: usize = 4;
const PROPERTY_CASES: usize = 1000;
const SIMPLIFY_CASES: usize = 100;
const DETERMINISM_RUNS: usize = 3;
const DETERMINISM_THREADS: [&str; 2] = ["1", "4"];

/// Rule count stated for the simplified tennis system. The rules the
/// paper lists are reproduced exactly, but there are 9 distinct ones.
const TENNIS_RULE_COUNT: usize = 12;

/// Criteria allowed to fail, with the reason printed next to them.
const TOLERATED: &[(usize, &str)] =
    &[(1, "the listed simplified rules are 9 distinct rules; a count of 12 cannot be met without inventing rules")];

const POSITIVE: GuardShape = GuardShape {
    negation: false,
    siblings: false,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn treeprune(args: &[&str], threads: &str) -> (String, Duration, bool) {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_treeprune"))
        .args(args)
        .current_dir(root())
        .env("TREEPRUNE_THREADS", threads)
        .output()
        .expect("binary runs");
    (
        String::from_utf8_lossy(&out.stdout).into_owned(),
        start.elapsed(),
        out.status.success(),
    )
}

fn report_of(args: &[&str]) -> Result<(Report, Duration), String> {
    let (out, t, ok) = treeprune(args, "0");
    if !ok {
        return Err(format!("treeprune {} failed", args.join(" ")));
    }
    serde_json::from_str(&out)
        .map(|r| (r, t))
        .map_err(|e| e.to_string())
}

/// The simplified rules of the tennis example as the paper lists them,
/// both stages, in this crate's notation.
const TENNIS_SIMPLIFIED: &[&str] = &[
    "success => addclass {|~(down* success)|}",
    "(and |~(down P1)| |~(down P2)|) => addclass {|~(and (down P1) (down P2))|}",
    "(down P1) => addclass {|~(down P1)|}",
    "(down P2) => addclass {|~(down P2)|}",
    "root => addchild {team}",
    "team => addchild {P1}",
    "team => addchild {P2}",
    "|~(and (down P1) (down P2))| => addchild {success}",
    "success => addclass {|~(down* success)|}",
    "(down |~(down* success)|) => addclass {|~(down* success)|}",
];

fn criterion_1() -> Outcome {
    let (r, took) = match report_of(&[
        "check",
        "fixtures/tennis.trs",
        "--witness",
        "--format",
        "json",
    ]) {
        Ok(x) => x,
        Err(e) => return outcome(false, e),
    };
    let text = std::fs::read_to_string(root().join("fixtures/tennis.trs")).unwrap();
    let mut sys = parse_system(&text).unwrap();
    let goal = parse_guard("(down* success)", &mut sys.classes).unwrap();
    let v = &r.selectors[0];
    let reachable =
        r.selectors.len() == 1 && v.name == "q_success" && v.status == Status::Reachable;
    let trace = WitnessTrace {
        steps: v
            .witness
            .iter()
            .flatten()
            .map(|s| TraceStep {
                node: NodePath::from_str(&s.node).unwrap(),
                rule: s.rule.clone(),
                synthetic: s.synthetic,
            })
            .collect(),
    };
    let replays = validate_witness(&sys, &trace, &goal).is_ok();
    let final_tree = trace.snapshots(&sys).ok().and_then(|s| s.last().cloned());
    let final_matches =
        final_tree.is_some_and(|t| match_guard(&t, &NodePath::root(), &goal).unwrap());

    let simple = check_redundancy(&sys, &CheckOptions::default())
        .unwrap()
        .simple
        .to_rewrite_system();
    let mut ours: Vec<String> = simple
        .rules
        .iter()
        .map(|r| {
            format!(
                "{} => {}",
                r.guard.display(&simple.classes),
                r.op.display(&simple.classes)
            )
        })
        .collect();
    let mut listed: Vec<String> = TENNIS_SIMPLIFIED.iter().map(|s| s.to_string()).collect();
    ours.sort();
    listed.sort();
    listed.dedup();
    let inventory = ours == listed;
    let count = ours.len() == TENNIS_RULE_COUNT;
    let fast = took < TENNIS_LIMIT;
    outcome(
        reachable && replays && final_matches && inventory && count && fast,
        format!(
            "reachable {reachable}, witness {} steps replays {replays}, final tree matches {final_matches}, \
             rules equal the listed inventory {inventory}, {} rules vs {TENNIS_RULE_COUNT} expected, {:.3}s",
            trace.steps.len(),
            ours.len(),
            took.as_secs_f64()
        ),
    )
}

fn criterion_2() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (page, want) in [
        ("fixtures/example.html", (1, 0)),
        ("fixtures/example-up.html", (1, 1)),
    ] {
        match report_of(&["analyze", page, "--format", "json"]) {
            Ok((r, t)) => {
                let got = (r.stats.selectors, r.stats.redundant);
                pass &= got == want && t < PAGE_LIMIT;
                parts.push(format!(
                    "{page} {} ({}) in {:.3}s",
                    got.0,
                    got.1,
                    t.as_secs_f64()
                ));
            }
            Err(e) => {
                pass = false;
                parts.push(e);
            }
        }
    }
    outcome(pass, parts.join(", "))
}

/// Brute-force verdicts for one page: reachable if an explored tree
/// matches, redundant if no fixpoint tree a few levels deep matches.
fn site_oracle(page: &str) -> Vec<(String, Option<bool>)> {
    let ps = build_page_system(&load_page(&root().join(page), &[]).unwrap());
    let caps = Caps {
        max_nodes: 40,
        max_trees: 3000,
        max_steps: 100_000,
        max_height: None,
    };
    let post = enumerate_post_star(&ps.system, caps);
    let h = ps.system.initial.height();
    let fixpoints: Vec<Tree> = (h..=h + 3)
        .map(|k| fixpoint_tree_k(&ps.system, k).unwrap())
        .collect();
    ps.selectors
        .iter()
        .zip(&ps.query_of)
        .map(|(e, q)| {
            let seen = q.map(|qi| {
                let g = &ps.system.queries[qi].guard;
                post.trees.iter().any(|t| matched_anywhere(t, g))
                    || fixpoints.iter().any(|t| matched_anywhere(t, g))
            });
            (e.text.clone(), seen)
        })
        .collect()
}

fn criterion_3() -> Outcome {
    let pages = ["fixtures/site/index.html", "fixtures/site/about.html"];
    let (out, _, ok) = treeprune(
        &[
            "analyze",
            pages[0],
            pages[1],
            "--witness",
            "--format",
            "json",
        ],
        "0",
    );
    let site: SiteReport = match serde_json::from_str(&out) {
        Ok(s) if ok => s,
        _ => return outcome(false, "site analysis failed"),
    };
    let s = &site.stats;
    let counts = (s.selectors, s.redundant, s.reachable, s.unsupported) == (15, 5, 9, 1);
    let shape = s.selectors >= 10 && s.redundant >= 3;

    let static_page =
        DomDocument::parse(&std::fs::read_to_string(root().join(pages[0])).unwrap()).unwrap();
    let mut stack = vec![&static_page.root];
    let mut static_touched = false;
    while let Some(el) = stack.pop() {
        static_touched |= el.classes.iter().any(|c| c == "touched");
        stack.extend(el.children.iter());
    }
    let touched_site = site
        .selectors
        .iter()
        .find(|v| v.selector == "#search .touched")
        .map(|v| v.status);
    let touched_witness = site.pages[0]
        .selectors
        .iter()
        .find(|v| v.selector == "#search .touched")
        .and_then(|v| v.witness.as_ref())
        .is_some_and(|w| w.iter().any(|st| st.rule.starts_with("js")));
    let dynamic = !static_touched && touched_site == Some(Status::Reachable) && touched_witness;

    let mut disagreements = 0;
    for (i, page) in pages.iter().enumerate() {
        for ((text, seen), v) in site_oracle(page).iter().zip(&site.pages[i].selectors) {
            let expect = match seen {
                None => Status::Unsupported,
                Some(true) => Status::Reachable,
                Some(false) => Status::Redundant,
            };
            disagreements += usize::from(*text != v.selector || expect != v.status);
        }
    }
    outcome(
        counts && shape && dynamic && disagreements == 0,
        format!(
            "{} selectors, {} redundant, {} reachable, {} unsupported; dynamic-only selector {dynamic}; \
             {disagreements} disagreements with the oracle",
            s.selectors, s.redundant, s.reachable, s.unsupported
        ),
    )
}

struct Sweep {
    instances: usize,
    misses: usize,
    bad_witnesses: usize,
    reported: usize,
    exhausted: usize,
    runs: usize,
    took: Duration,
    bounded_mismatches: usize,
    bounded_checks: usize,
}

/// Random positive simple systems grown from a single root node, in a
/// fixed order so every criterion sees the same instances.
fn sweep_instances() -> Vec<(
    treeprune_core::simplify::SimpleSystem,
    treeprune_core::Label,
)> {
    let mut rng = ChaCha8Rng::seed_from_u64(2015);
    (0..SWEEP_SYSTEMS)
        .map(|_| {
            let n = rng.gen_range(2..=6);
            let rules = rng.gen_range(1..=10);
            let x = random_label(&mut rng, n, 0, 2);
            (
                random_simple(&mut rng, n, rules, Tree::single(x.clone())),
                x,
            )
        })
        .collect()
}

fn run_sweep() -> Sweep {
    let caps = Caps {
        max_nodes: 10,
        max_trees: 4000,
        max_steps: 200_000,
        max_height: None,
    };
    let instances = sweep_instances();
    let mut s = Sweep {
        instances: instances.len(),
        misses: 0,
        bad_witnesses: 0,
        reported: 0,
        exhausted: 0,
        runs: 0,
        took: Duration::ZERO,
        bounded_mismatches: 0,
        bounded_checks: 0,
    };
    let start = Instant::now();
    let f = AssumptionFunction::root();
    for (simple, x) in &instances {
        for k in 0..=SWEEP_MAX_K {
            let r = check_addable(simple, x, &f, k, caps);
            s.misses += r.misses.len();
            s.bad_witnesses += r.bad_witnesses.len();
            s.reported += r.reported;
            s.exhausted += usize::from(r.exhausted);
            s.runs += 1;
        }
    }
    s.took = start.elapsed();
    // Bounded mode through the command path.
    for (simple, _) in &instances {
        let sys = simple.to_rewrite_system();
        let text = print_system(&sys);
        for k in 0..=SWEEP_MAX_K {
            let tf = fixpoint_tree_k(&sys, k).unwrap();
            let report = check_text(
                "sweep",
                &text,
                &CheckArgs {
                    k: Some(k),
                    ..CheckArgs::default()
                },
            );
            let Ok(report) = report else {
                s.bounded_mismatches += 1;
                continue;
            };
            for (q, v) in sys.queries.iter().zip(&report.selectors) {
                let want = if matched_anywhere(&tf, &q.guard) {
                    Status::Reachable
                } else {
                    Status::Redundant
                };
                s.bounded_checks += 1;
                s.bounded_mismatches += usize::from(v.status != want);
            }
        }
    }
    s
}

fn criterion_4(s: &Sweep) -> Outcome {
    outcome(
        s.misses == 0 && s.took < SWEEP_LIMIT && s.instances >= 200,
        format!(
            "{} systems, k 0..={SWEEP_MAX_K}, {} runs ({} exhausted), {} misses, {:.1}s",
            s.instances,
            s.runs,
            s.exhausted,
            s.misses,
            s.took.as_secs_f64()
        ),
    )
}

fn criterion_5(s: &Sweep) -> Outcome {
    outcome(
        s.bad_witnesses == 0 && s.reported > 0,
        format!(
            "{} addable classes reported, {} witnesses failed to replay",
            s.reported, s.bad_witnesses
        ),
    )
}

fn criterion_8(s: &Sweep) -> Outcome {
    outcome(
        s.bounded_mismatches == 0 && s.bounded_checks > 0,
        format!(
            "{} bounded verdicts against the fixpoint tree, {} disagreements",
            s.bounded_checks, s.bounded_mismatches
        ),
    )
}

/// Runs `case` until `want` cases were evaluated; `Ok(false)` means the
/// case was skipped, as for an exploration that hit its caps.
fn suite(
    seed: u64,
    want: usize,
    mut case: impl FnMut(&mut ChaCha8Rng) -> Result<bool, String>,
) -> (usize, Vec<String>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut done = 0;
    let mut failures = Vec::new();
    for _ in 0..want * 50 {
        if done == want {
            break;
        }
        match case(&mut rng) {
            Ok(true) => done += 1,
            Ok(false) => {}
            Err(e) => {
                done += 1;
                failures.push(e);
            }
        }
    }
    (done, failures)
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn embedding_laws(rng: &mut ChaCha8Rng) -> Result<bool, String> {
    let t1 = random_tree(rng, 3, 5, 3);
    check(embeds(&t1, &t1), || "not reflexive".into())?;
    let e1 = rng.gen_range(0..4);
    let t2 = extend_tree(rng, &t1, 3, e1);
    let e2 = rng.gen_range(0..4);
    let t3 = extend_tree(rng, &t2, 3, e2);
    check(
        embeds(&t1, &t2) && embeds(&t2, &t3) && embeds(&t1, &t3),
        || "extension chain does not embed".into(),
    )?;
    let (a, b, c) = (
        random_tree(rng, 2, 3, 2),
        random_tree(rng, 2, 4, 2),
        random_tree(rng, 2, 5, 3),
    );
    check(
        !(embeds(&a, &b) && embeds(&b, &c)) || embeds(&a, &c),
        || "not transitive".into(),
    )?;
    let h = find_embedding(&t1, &t3).ok_or("no embedding found")?;
    check(is_embedding(&t1, &t3, &h), || {
        "found map is not an embedding".into()
    })?;
    Ok(true)
}

fn guard_preservation(rng: &mut ChaCha8Rng) -> Result<bool, String> {
    let t1 = random_tree(rng, 3, 5, 3);
    let extra = rng.gen_range(0..5);
    let t2 = extend_tree(rng, &t1, 3, extra);
    let h = find_embedding(&t1, &t2).ok_or("extension does not embed")?;
    let depth = rng.gen_range(1..=4);
    let g = random_guard(
        rng,
        3,
        depth,
        GuardShape {
            negation: false,
            siblings: true,
        },
    );
    for v in t1.paths() {
        if match_guard(&t1, v, &g).unwrap() {
            check(match_guard(&t2, &h[v], &g).unwrap(), || {
                format!("{g:?} lost at {v}")
            })?;
        }
    }
    Ok(true)
}

fn monotonicity(rng: &mut ChaCha8Rng) -> Result<bool, String> {
    let t1 = random_tree(rng, 3, 5, 3);
    let extra = rng.gen_range(0..4);
    let t2 = extend_tree(rng, &t1, 3, extra);
    let h = find_embedding(&t1, &t2).ok_or("extension does not embed")?;
    let depth = rng.gen_range(1..=3);
    let rule = RewriteRule::new(
        "s",
        random_guard(rng, 3, depth, POSITIVE),
        random_op(rng, 3, true),
    );
    for v in t1.paths() {
        let Ok(t1b) = apply_rule(&t1, v, &rule) else {
            continue;
        };
        if embeds(&t1b, &t2) {
            continue;
        }
        check(!rule.op.is_removal(), || "a removal grew the tree".into())?;
        let t2b = apply_rule(&t2, &h[v], &rule).map_err(|e| format!("step not simulated: {e}"))?;
        check(embeds(&t1b, &t2b), || {
            "simulated step does not embed".into()
        })?;
    }
    Ok(true)
}

fn removal_elimination(rng: &mut ChaCha8Rng) -> Result<bool, String> {
    let rules = rng.gen_range(1..=4);
    let sys = random_system(rng, 3, rules, 2, true, 4);
    let caps = Caps {
        max_nodes: 8,
        max_trees: 1500,
        max_steps: 60_000,
        max_height: Some(2),
    };
    let with = enumerate_post_star(&sys, caps);
    let without = enumerate_post_star(&strip_removals(&sys), caps);
    if !with.exhausted || !without.exhausted {
        return Ok(false);
    }
    let guards = sys.query_guards();
    let collect = |trees: &[Tree]| {
        let mut v: Vec<_> = trees.iter().flat_map(|t| matched_set(t, &guards)).collect();
        v.sort();
        v.dedup();
        v
    };
    check(collect(&with.trees) == collect(&without.trees), || {
        "matched guards differ".into()
    })?;
    Ok(true)
}

fn order_independence(rng: &mut ChaCha8Rng) -> Result<bool, String> {
    let n = rng.gen_range(2..=5);
    let rules = rng.gen_range(1..=8);
    let initial = random_tree(rng, n, 5, 2);
    let simple = random_simple(rng, n, rules, initial);
    let k = if rng.gen_bool(0.5) {
        None
    } else {
        Some(rng.gen_range(simple.initial.height()..=3))
    };
    let classes: Vec<ClassId> = simple.classes.ids().collect();
    let oracle = SpdsOracle::build(&simple, &classes, Mode::Exact, k).map_err(|e| e.to_string())?;
    let base = saturate(&simple, &oracle);
    let mut order: Vec<usize> = (0..simple.initial.len()).collect();
    order.shuffle(rng);
    check(
        base.tree == saturate_ordered(&simple, &oracle, &order).tree,
        || "saturated trees differ".into(),
    )?;
    Ok(true)
}

const NVARS: u32 = 8;

fn random_expr(rng: &mut ChaCha8Rng, depth: usize) -> BoolExpr {
    if depth == 0 || rng.gen_bool(0.25) {
        return if rng.gen_bool(0.1) {
            BoolExpr::Const(rng.gen())
        } else {
            BoolExpr::Var(Var(rng.gen_range(0..NVARS)))
        };
    }
    match rng.gen_range(0..4) {
        0 => BoolExpr::not(random_expr(rng, depth - 1)),
        1 => BoolExpr::And(
            (0..rng.gen_range(0..4))
                .map(|_| random_expr(rng, depth - 1))
                .collect(),
        ),
        2 => BoolExpr::Or(
            (0..rng.gen_range(0..4))
                .map(|_| random_expr(rng, depth - 1))
                .collect(),
        ),
        _ => BoolExpr::iff(random_expr(rng, depth - 1), random_expr(rng, depth - 1)),
    }
}

/// An equivalent formula of a different shape.
fn de_morgan(e: &BoolExpr) -> BoolExpr {
    match e {
        BoolExpr::Const(_) | BoolExpr::Var(_) => BoolExpr::not(BoolExpr::not(e.clone())),
        BoolExpr::Not(a) => BoolExpr::not(de_morgan(a)),
        BoolExpr::And(xs) => BoolExpr::not(BoolExpr::Or(
            xs.iter().map(|x| BoolExpr::not(de_morgan(x))).collect(),
        )),
        BoolExpr::Or(xs) => BoolExpr::not(BoolExpr::And(
            xs.iter().map(|x| BoolExpr::not(de_morgan(x))).collect(),
        )),
        BoolExpr::Iff(a, b) => {
            BoolExpr::iff(BoolExpr::not(de_morgan(a)), BoolExpr::not(de_morgan(b)))
        }
    }
}

fn bdd_canonicity(rng: &mut ChaCha8Rng) -> Result<bool, String> {
    let table = |e: &BoolExpr| -> Vec<bool> {
        (0u32..1 << NVARS)
            .map(|b| e.eval(&|v: Var| b >> v.0 & 1 == 1))
            .collect()
    };
    let f = random_expr(rng, 5);
    let g = if rng.gen_bool(0.3) {
        de_morgan(&f)
    } else {
        random_expr(rng, 5)
    };
    let mut m = BddManager::new(VarOrder::anonymous(NVARS as usize));
    let bf = m.build(&f).map_err(|e| e.to_string())?;
    let bg = m.build(&g).map_err(|e| e.to_string())?;
    check((table(&f) == table(&g)) == (bf == bg), || {
        format!("{f:?} vs {g:?}")
    })?;
    Ok(true)
}

fn criterion_6() -> Outcome {
    type Case = fn(&mut ChaCha8Rng) -> Result<bool, String>;
    let suites: [(&str, Case); 6] = [
        ("embedding preorder", embedding_laws),
        ("guard preservation", guard_preservation),
        ("monotonicity", monotonicity),
        ("removal elimination", removal_elimination),
        ("saturation order", order_independence),
        ("bdd canonicity", bdd_canonicity),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, (name, case)) in suites.iter().enumerate() {
        let (done, failures) = suite(100 + i as u64, PROPERTY_CASES, case);
        pass &= done >= PROPERTY_CASES && failures.is_empty();
        parts.push(format!("{name} {done}/{}", failures.len()));
        if let Some(f) = failures.first() {
            parts.push(format!("first failure: {f}"));
        }
    }
    outcome(pass, format!("cases/failures: {}", parts.join(", ")))
}

fn simplification_case(rng: &mut ChaCha8Rng) -> Result<bool, String> {
    let n = rng.gen_range(2..=4);
    let rules = rng.gen_range(1..=6);
    let sys = random_system(rng, n, rules, 3, false, 3);
    let k = rng.gen_range(0..=3);
    if sys.initial.height() > k {
        return Ok(false);
    }
    let caps = Caps {
        max_nodes: 9,
        max_trees: 3000,
        max_steps: 150_000,
        max_height: Some(k),
    };
    let post = enumerate_post_star(&sys, caps);
    if !post.exhausted {
        return Ok(false);
    }
    let (simple, _) = to_simple(&sys, &sys.queries).map_err(|e| e.to_string())?;
    let post2 = enumerate_post_star(&simple.to_rewrite_system(), caps);
    if !post2.exhausted {
        return Ok(false);
    }
    let present = classes_on(&post2.trees);
    for (q, sq) in sys.queries.iter().zip(&simple.queries) {
        let lhs = post.trees.iter().any(|t| matched_anywhere(t, &q.guard));
        let rhs = sq.class.is_none_or(|c| present.contains(&c));
        check(lhs == rhs, || format!("query {:?} at k={k}", q.guard))?;
    }
    Ok(true)
}

fn criterion_7() -> Outcome {
    let (done, failures) = suite(7, SIMPLIFY_CASES * 3, simplification_case);
    outcome(
        done >= SIMPLIFY_CASES && failures.is_empty(),
        format!(
            "{done} systems with exhausted enumeration at k <= 3, {} failures",
            failures.len()
        ),
    )
}

fn criterion_9() -> Outcome {
    let commands: [&[&str]; 4] = [
        &["check", "fixtures/tennis.trs", "--witness"],
        &[
            "check",
            "fixtures/tennis.trs",
            "--witness",
            "--format",
            "json",
        ],
        &["analyze", "fixtures/example.html"],
        &["analyze", "fixtures/example-up.html", "--format", "json"],
    ];
    let mut differing = Vec::new();
    for args in commands {
        let mut outputs = Vec::new();
        for threads in DETERMINISM_THREADS {
            for _ in 0..DETERMINISM_RUNS {
                outputs.push(treeprune(args, threads).0);
            }
        }
        if outputs.iter().any(|o| *o != outputs[0] || o.is_empty()) {
            differing.push(args.join(" "));
        }
    }
    outcome(
        differing.is_empty(),
        format!(
            "{} commands x {DETERMINISM_RUNS} runs x threads {:?}; differing: {:?}",
            commands.len(),
            DETERMINISM_THREADS,
            differing
        ),
    )
}

fn main() {
    let sweep = run_sweep();
    let results = [
        (1, "tennis example", criterion_1()),
        (2, "figure 1 pages", criterion_2()),
        (3, "mini-site", criterion_3()),
        (4, "oracle completeness sweep", criterion_4(&sweep)),
        (5, "oracle soundness sweep", criterion_5(&sweep)),
        (6, "property suites", criterion_6()),
        (7, "simplification equivalence", criterion_7()),
        (8, "bounded mode", criterion_8(&sweep)),
        (9, "determinism", criterion_9()),
    ];
    let mut unexpected = 0;
    for (n, title, o) in &results {
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {n} {verdict}: {title}: {}", o.detail);
        if !o.pass {
            match TOLERATED.iter().find(|(m, _)| m == n) {
                Some((_, why)) => println!("    known shortfall: {why}"),
                None => unexpected += 1,
            }
        }
    }
    if unexpected > 0 {
        println!("{unexpected} criteria failed");
        std::process::exit(1);
    }
}
