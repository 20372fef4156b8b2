//! The `treeprune` commands as library functions, so tests can call them
//! without spawning the binary.

pub mod report;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use thiserror::Error;
use treeprune_core::rewrite::{
    enumerate_post_star, fixpoint_tree_k, parse_system, print_system, Caps,
};
use treeprune_core::saturation::{self, check_redundancy, Analysis, CheckOptions, WitnessTrace};
use treeprune_core::spds::build_spds;
use treeprune_core::{matched_anywhere, RewriteSystem};
use treeprune_web::{build_page_system, load_page};

use report::{OracleSummary, SelectorVerdict, Step, Timing, SCHEMA};
pub use report::{Report, SiteReport, Status};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

fn core_error(context: &str, e: treeprune_core::Error) -> CliError {
    use treeprune_core::Error as E;
    match e {
        E::Internal(_)
        | E::Bdd(_)
        | E::NotSimple(_)
        | E::GuardNotMatched(..)
        | E::NodeNotInDomain(_) => CliError::Internal(format!("{context}: {e}")),
        _ => CliError::Input(format!("{context}: {e}")),
    }
}

/// Worker count from `TREEPRUNE_THREADS`; unset or 0 leaves the choice to
/// rayon.
pub fn thread_count() -> Result<usize, CliError> {
    match std::env::var("TREEPRUNE_THREADS") {
        Err(_) => Ok(0),
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Input(format!("TREEPRUNE_THREADS={v:?} is not a number"))),
    }
}

/// Runs `f` on a pool sized by `TREEPRUNE_THREADS`.
pub fn with_pool<T: Send>(f: impl FnOnce() -> Result<T, CliError> + Send) -> Result<T, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count()?)
        .build()
        .map_err(|e| CliError::Internal(format!("thread pool: {e}")))?;
    pool.install(f)
}

#[derive(Clone, Debug, Default)]
pub struct CheckArgs {
    pub k: Option<usize>,
    pub oracle: bool,
    pub witness: bool,
    pub dump_simple: bool,
    pub dump_spds: bool,
    pub timings: bool,
}

pub fn cmd_check(path: &Path, args: &CheckArgs) -> Result<Report, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    check_text(&path.display().to_string(), &text, args)
}

pub fn check_text(name: &str, text: &str, args: &CheckArgs) -> Result<Report, CliError> {
    let start = Instant::now();
    let sys = parse_system(text).map_err(|e| core_error(name, e))?;
    let analysis =
        check_redundancy(&sys, &CheckOptions { k: args.k }).map_err(|e| core_error(name, e))?;
    let selectors = sys
        .queries
        .iter()
        .zip(&analysis.verdicts)
        .map(|(q, v)| SelectorVerdict {
            name: q.name.clone(),
            selector: v.guard.clone(),
            source: None,
            line: None,
            status: status(v.status),
            notes: v.warnings.clone(),
            witness: if args.witness {
                v.witness.as_ref().map(steps)
            } else {
                None
            },
        })
        .collect();
    let mut report = Report {
        schema: SCHEMA,
        tool: report::tool_version(),
        command: "check".into(),
        inputs: vec![name.to_string()],
        bound: args.k,
        selectors,
        stats: stats(&sys, &analysis, sys.initial.len()),
        warnings: analysis.warnings.clone(),
        oracle: None,
        timings: None,
        dumps: BTreeMap::new(),
    };
    report.tally();
    if args.oracle {
        report.oracle = Some(cross_check(&sys, &analysis, args.k)?);
    }
    if args.dump_simple {
        report.dumps.insert(
            "simplified system".into(),
            print_system(&analysis.simple.to_rewrite_system()),
        );
    }
    if args.dump_spds {
        let all: Vec<usize> = (0..analysis.simple.rules.len()).collect();
        let spds = build_spds(&analysis.simple, &all, &[]).map_err(|e| core_error(name, e))?;
        report
            .dumps
            .insert("spds".into(), spds.dump(&analysis.simple));
    }
    if args.timings {
        report.timings = Some(timings(&analysis.stats.timings, start.elapsed()));
    }
    Ok(report)
}

fn status(s: saturation::Status) -> Status {
    match s {
        saturation::Status::Redundant => Status::Redundant,
        saturation::Status::Reachable => Status::Reachable,
    }
}

fn steps(w: &WitnessTrace) -> Vec<Step> {
    w.steps
        .iter()
        .map(|s| Step {
            node: s.node.to_string(),
            rule: s.rule.clone(),
            synthetic: s.synthetic,
        })
        .collect()
}

fn stats(sys: &RewriteSystem, analysis: &Analysis, nodes: usize) -> report::Stats {
    report::Stats {
        nodes,
        rules: sys.rules.len(),
        simple_rules: analysis.stats.simple_rules,
        synthetic_classes: analysis.stats.synthetic_classes,
        ..report::Stats::default()
    }
}

fn timings(phases: &[(String, Duration)], total: Duration) -> Vec<Timing> {
    let micros = |d: Duration| d.as_micros() as u64;
    let mut out: Vec<Timing> = phases
        .iter()
        .map(|(p, d)| Timing {
            phase: p.clone(),
            micros: micros(*d),
        })
        .collect();
    out.push(Timing {
        phase: "total".into(),
        micros: micros(total),
    });
    out
}

/// Compares the verdicts with brute force. With a bound the fixpoint tree
/// of the positive system decides every query exactly. Without one,
/// explored trees can only refute redundancy, unless the exploration of the
/// positive system finishes, in which case it decides everything.
fn cross_check(
    sys: &RewriteSystem,
    analysis: &Analysis,
    k: Option<usize>,
) -> Result<OracleSummary, CliError> {
    let pairs = || {
        sys.queries
            .iter()
            .zip(&analysis.positive.queries)
            .zip(&analysis.verdicts)
    };
    let reachable = |v: &saturation::Verdict| v.status == saturation::Status::Reachable;
    if let Some(k) = k {
        let tf = fixpoint_tree_k(&analysis.positive, k).map_err(|e| core_error("oracle", e))?;
        for ((_, pq), v) in pairs() {
            if matched_anywhere(&tf, &pq.guard) != reachable(v) {
                return Err(CliError::Internal(format!(
                    "query {} is {} but the fixpoint tree of height {k} says otherwise",
                    v.query,
                    status(v.status).as_str()
                )));
            }
        }
        return Ok(OracleSummary {
            method: "fixpoint".into(),
            trees: 1,
            exhausted: true,
            confirmed: sys.queries.len(),
        });
    }
    let post = enumerate_post_star(sys, Caps::default());
    let mut confirmed = 0;
    for ((q, _), v) in pairs() {
        if post.trees.iter().any(|t| matched_anywhere(t, &q.guard)) {
            if !reachable(v) {
                return Err(CliError::Internal(format!(
                    "query {} is redundant but matches a reachable tree",
                    v.query
                )));
            }
            confirmed += 1;
        }
    }
    let pos = enumerate_post_star(&analysis.positive, Caps::default());
    let mut trees = post.trees.len();
    if pos.exhausted {
        confirmed = 0;
        trees = pos.trees.len();
        for ((_, pq), v) in pairs() {
            if pos.trees.iter().any(|t| matched_anywhere(t, &pq.guard)) != reachable(v) {
                return Err(CliError::Internal(format!(
                    "query {} disagrees with the exhausted enumeration",
                    v.query
                )));
            }
            confirmed += 1;
        }
    }
    Ok(OracleSummary {
        method: "enumeration".into(),
        trees,
        exhausted: pos.exhausted,
        confirmed,
    })
}

#[derive(Clone, Debug, Default)]
pub struct AnalyzeArgs {
    pub css: Vec<PathBuf>,
    pub witness: bool,
    pub dump_system: bool,
    pub timings: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnalyzeOutput {
    Page(Report),
    Site(SiteReport),
}

impl AnalyzeOutput {
    pub fn to_text(&self) -> String {
        match self {
            AnalyzeOutput::Page(r) => r.to_text(),
            AnalyzeOutput::Site(s) => s.to_text(),
        }
    }

    pub fn to_json(&self) -> String {
        match self {
            AnalyzeOutput::Page(r) => serde_json::to_string_pretty(r),
            AnalyzeOutput::Site(s) => serde_json::to_string_pretty(s),
        }
        .expect("reports serialize")
    }
}

/// Pages are analysed independently and in parallel; several pages are
/// collated into a site report.
pub fn cmd_analyze(pages: &[PathBuf], args: &AnalyzeArgs) -> Result<AnalyzeOutput, CliError> {
    let mut reports: Vec<Report> = pages
        .par_iter()
        .map(|p| analyze_page(p, args))
        .collect::<Result<_, _>>()?;
    if reports.len() == 1 {
        return Ok(AnalyzeOutput::Page(reports.pop().expect("one report")));
    }
    Ok(AnalyzeOutput::Site(SiteReport::collate(reports)))
}

pub fn analyze_page(path: &Path, args: &AnalyzeArgs) -> Result<Report, CliError> {
    let start = Instant::now();
    let name = path.display().to_string();
    let page = load_page(path, &args.css).map_err(|e| CliError::Input(e.to_string()))?;
    let ps = build_page_system(&page);
    let frontend = start.elapsed();
    let analysis =
        check_redundancy(&ps.system, &CheckOptions::default()).map_err(|e| core_error(&name, e))?;

    let mut selectors = Vec::new();
    for (i, (e, q)) in ps.selectors.iter().zip(&ps.query_of).enumerate() {
        let mut notes = Vec::new();
        if e.pseudo_stripped() {
            notes.push("pseudo-classes ignored".to_string());
        }
        let (status, witness) = match q {
            None => {
                if let Err(why) = &e.parsed {
                    notes.push(format!("unsupported: {why}"));
                }
                (Status::Unsupported, None)
            }
            Some(qi) => {
                let v = &analysis.verdicts[*qi];
                notes.extend(v.warnings.iter().cloned());
                let w = if args.witness {
                    v.witness.as_ref().map(steps)
                } else {
                    None
                };
                (status(v.status), w)
            }
        };
        selectors.push(SelectorVerdict {
            name: format!("s{}", i + 1),
            selector: e.text.clone(),
            source: Some(e.source.clone()),
            line: Some(e.line),
            status,
            notes,
            witness,
        });
    }
    let mut warnings = ps.warnings.clone();
    warnings.extend(analysis.warnings.iter().cloned());
    let mut report = Report {
        schema: SCHEMA,
        tool: report::tool_version(),
        command: "analyze".into(),
        inputs: vec![name],
        bound: None,
        selectors,
        stats: stats(&ps.system, &analysis, ps.node_count),
        warnings,
        oracle: None,
        timings: None,
        dumps: BTreeMap::new(),
    };
    report.tally();
    if args.dump_system {
        report
            .dumps
            .insert("system".into(), print_system(&ps.system));
    }
    if args.timings {
        let mut phases = vec![("frontend".to_string(), frontend)];
        phases.extend(analysis.stats.timings.iter().cloned());
        report.timings = Some(timings(&phases, start.elapsed()));
    }
    Ok(report)
}
