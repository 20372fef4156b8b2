//! Report types shared by both commands, with their text rendering.
//!
//! The JSON form is the serde encoding of these types. `SCHEMA` changes
//! whenever a field changes meaning or disappears.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

pub const SCHEMA: u32 = 1;

pub fn tool_version() -> String {
    format!("treeprune {}", env!("CARGO_PKG_VERSION"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Redundant,
    Reachable,
    /// The selector could not be translated; it is neither counted as
    /// redundant nor as reachable.
    Unsupported,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Redundant => "redundant",
            Status::Reachable => "reachable",
            Status::Unsupported => "unsupported",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub node: String,
    pub rule: String,
    #[serde(default, skip_serializing_if = "is_false")]
    pub synthetic: bool,
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectorVerdict {
    /// Query name in the analysed system.
    pub name: String,
    /// Selector text, or the guard for rewrite-system input.
    pub selector: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<Step>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stats {
    /// Nodes of the initial tree.
    pub nodes: usize,
    pub selectors: usize,
    pub redundant: usize,
    pub reachable: usize,
    pub unsupported: usize,
    /// Rules of the input system.
    pub rules: usize,
    /// Rules after simplification.
    pub simple_rules: usize,
    pub synthetic_classes: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timing {
    pub phase: String,
    pub micros: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleSummary {
    pub method: String,
    pub trees: usize,
    pub exhausted: bool,
    /// Queries whose verdict the oracle could confirm.
    pub confirmed: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub tool: String,
    pub command: String,
    pub inputs: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<usize>,
    pub selectors: Vec<SelectorVerdict>,
    pub stats: Stats,
    pub warnings: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSummary>,
    /// Wall-clock time per phase; only on request since it varies between
    /// runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<Vec<Timing>>,
    /// Requested textual dumps by kind.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub dumps: BTreeMap<String, String>,
}

impl Report {
    /// Recounts the verdict columns of `stats`.
    pub fn tally(&mut self) {
        let count = |s| self.selectors.iter().filter(|v| v.status == s).count();
        self.stats.selectors = self.selectors.len();
        self.stats.redundant = count(Status::Redundant);
        self.stats.reachable = count(Status::Reachable);
        self.stats.unsupported = count(Status::Unsupported);
    }

    pub fn redundant(&self) -> impl Iterator<Item = &SelectorVerdict> {
        self.selectors
            .iter()
            .filter(|v| v.status == Status::Redundant)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{}: {} {}",
            self.tool,
            self.command,
            self.inputs.join(" ")
        );
        self.body(&mut out, "");
        for (kind, text) in &self.dumps {
            let _ = writeln!(out, "\n# {kind}");
            out.push_str(text);
        }
        out
    }

    fn body(&self, out: &mut String, indent: &str) {
        let s = &self.stats;
        let bound = self
            .bound
            .map(|k| format!(", height bound {k}"))
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "{indent}{} {}: {} redundant, {} reachable, {} unsupported{bound}",
            s.selectors,
            if self.command == "check" {
                "queries"
            } else {
                "selectors"
            },
            s.redundant,
            s.reachable,
            s.unsupported
        );
        let _ = writeln!(
            out,
            "{indent}{} nodes, {} rules, {} after simplification ({} synthetic classes)",
            s.nodes, s.rules, s.simple_rules, s.synthetic_classes
        );
        for v in &self.selectors {
            let _ = writeln!(
                out,
                "{indent}  {:<11} {}  {}",
                v.status.as_str(),
                location(v),
                v.selector
            );
            for n in &v.notes {
                let _ = writeln!(out, "{indent}      note: {n}");
            }
            if let Some(w) = &v.witness {
                let _ = writeln!(out, "{indent}      witness, {} steps:", w.len());
                for st in w {
                    let tag = if st.synthetic { " (synthetic)" } else { "" };
                    let _ = writeln!(out, "{indent}        {} at {}{tag}", st.rule, st.node);
                }
            }
        }
        if let Some(o) = &self.oracle {
            let ex = if o.exhausted {
                "exhausted"
            } else {
                "within caps"
            };
            let _ = writeln!(
                out,
                "{indent}oracle {}: {} trees, {ex}, {} of {} verdicts confirmed",
                o.method,
                o.trees,
                o.confirmed,
                self.selectors.len()
            );
        }
        if let Some(ts) = &self.timings {
            let parts: Vec<String> = ts
                .iter()
                .map(|t| format!("{} {:.3}s", t.phase, t.micros as f64 / 1e6))
                .collect();
            let _ = writeln!(out, "{indent}time: {}", parts.join(", "));
        }
        if !self.warnings.is_empty() {
            let _ = writeln!(out, "{indent}warnings:");
            for w in &self.warnings {
                let _ = writeln!(out, "{indent}  {w}");
            }
        }
    }
}

fn location(v: &SelectorVerdict) -> String {
    match (&v.source, v.line) {
        (Some(s), Some(l)) => format!("{s}:{l}"),
        _ => v.name.clone(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SiteVerdict {
    pub selector: String,
    pub source: String,
    pub line: usize,
    pub status: Status,
    /// Pages that load the selector.
    pub pages: Vec<String>,
    /// Pages on which it may match.
    pub reachable_on: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SiteStats {
    pub pages: usize,
    pub selectors: usize,
    pub redundant: usize,
    pub reachable: usize,
    pub unsupported: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SiteReport {
    pub schema: u32,
    pub tool: String,
    pub pages: Vec<Report>,
    pub selectors: Vec<SiteVerdict>,
    pub stats: SiteStats,
}

impl SiteReport {
    /// Merges page reports. A selector is identified by where it is
    /// written; it is redundant for the site when it is redundant on every
    /// page that loads it.
    pub fn collate(pages: Vec<Report>) -> SiteReport {
        let mut order: Vec<(String, usize, String)> = Vec::new();
        let mut merged: BTreeMap<(String, usize, String), SiteVerdict> = BTreeMap::new();
        for p in &pages {
            let page = p.inputs.first().cloned().unwrap_or_default();
            for v in &p.selectors {
                let key = (
                    v.source.clone().unwrap_or_default(),
                    v.line.unwrap_or(0),
                    v.selector.clone(),
                );
                let entry = merged.entry(key.clone()).or_insert_with(|| {
                    order.push(key.clone());
                    SiteVerdict {
                        selector: key.2.clone(),
                        source: key.0.clone(),
                        line: key.1,
                        status: Status::Redundant,
                        pages: Vec::new(),
                        reachable_on: Vec::new(),
                    }
                });
                if !entry.pages.contains(&page) {
                    entry.pages.push(page.clone());
                }
                match v.status {
                    Status::Unsupported => entry.status = Status::Unsupported,
                    Status::Reachable => {
                        if !entry.reachable_on.contains(&page) {
                            entry.reachable_on.push(page.clone());
                        }
                        if entry.status != Status::Unsupported {
                            entry.status = Status::Reachable;
                        }
                    }
                    Status::Redundant => {}
                }
            }
        }
        let selectors: Vec<SiteVerdict> = order
            .iter()
            .map(|k| merged.remove(k).expect("every key is merged"))
            .collect();
        let count = |s| selectors.iter().filter(|v| v.status == s).count();
        let stats = SiteStats {
            pages: pages.len(),
            selectors: selectors.len(),
            redundant: count(Status::Redundant),
            reachable: count(Status::Reachable),
            unsupported: count(Status::Unsupported),
        };
        SiteReport {
            schema: SCHEMA,
            tool: tool_version(),
            pages,
            selectors,
            stats,
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let inputs: Vec<&str> = self
            .pages
            .iter()
            .flat_map(|p| p.inputs.first())
            .map(String::as_str)
            .collect();
        let _ = writeln!(out, "{}: analyze {}", self.tool, inputs.join(" "));
        for p in &self.pages {
            let _ = writeln!(out, "\npage {}", p.inputs.join(" "));
            p.body(&mut out, "  ");
        }
        let s = &self.stats;
        let _ = writeln!(
            out,
            "\nsite, {} pages: {} selectors: {} redundant, {} reachable, {} unsupported",
            s.pages, s.selectors, s.redundant, s.reachable, s.unsupported
        );
        for v in &self.selectors {
            let _ = writeln!(
                out,
                "  {:<11} {}:{}  {}",
                v.status.as_str(),
                v.source,
                v.line,
                v.selector
            );
        }
        for p in &self.pages {
            for (kind, text) in &p.dumps {
                let _ = writeln!(out, "\n# {kind} of {}", p.inputs.join(" "));
                out.push_str(text);
            }
        }
        out
    }
}
