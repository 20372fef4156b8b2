//! Assembling one page: markup, stylesheets and scripts into a system.

use std::path::{Component, Path, PathBuf};

use treeprune_core::rewrite::Query;
use treeprune_core::{Classes, Guard, NodePath, RewriteSystem, Tree};

use crate::css::{parse_stylesheet, SelectorEntry};
use crate::html::{DomDocument, Element, Resource};
use crate::jquery::{extract_rules_from_scripts, ScriptSource};
use crate::{RuleSink, WebError};

#[derive(Clone, Debug)]
pub struct Stylesheet {
    pub source: String,
    pub text: String,
    pub first_line: usize,
}

#[derive(Clone, Debug)]
pub struct Page {
    pub name: String,
    pub doc: DomDocument,
    pub stylesheets: Vec<Stylesheet>,
    pub scripts: Vec<ScriptSource>,
    pub warnings: Vec<String>,
}

fn is_remote(href: &str) -> bool {
    href.starts_with("//") || href.contains("://") || href.starts_with("data:")
}

/// Library builds are not application code.
fn is_library(href: &str) -> bool {
    let file = href.rsplit('/').next().unwrap_or(href).to_ascii_lowercase();
    file.starts_with("jquery")
}

/// Joins without touching the file system, folding `.` and `..`.
fn join_clean(dir: &Path, rel: &str) -> PathBuf {
    let mut out = PathBuf::new();
    for c in dir.join(rel).components() {
        match c {
            Component::CurDir => {}
            Component::ParentDir
                if matches!(out.components().next_back(), Some(Component::Normal(_))) =>
            {
                out.pop();
            }
            other => out.push(other),
        }
    }
    out
}

fn read(path: &Path) -> Result<String, WebError> {
    std::fs::read_to_string(path).map_err(|source| WebError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Reads a page and the local stylesheets and scripts it links, plus extra
/// stylesheets. Remote resources are skipped with a warning.
pub fn load_page(path: &Path, extra_css: &[PathBuf]) -> Result<Page, WebError> {
    let text = read(path)?;
    let dir = path.parent().unwrap_or(Path::new("")).to_path_buf();
    let mut page = page_from_text(&path.display().to_string(), &text, |href| {
        let p = join_clean(&dir, href);
        let name = p.display().to_string();
        read(&p).map(|t| (name, t))
    })?;
    for css in extra_css {
        let t = read(css)?;
        page.stylesheets.push(Stylesheet {
            source: css.display().to_string(),
            text: t,
            first_line: 1,
        });
    }
    Ok(page)
}

/// Builds a page from its markup; `fetch` reads a local linked resource and
/// names it.
pub fn page_from_text(
    name: &str,
    text: &str,
    fetch: impl Fn(&str) -> Result<(String, String), WebError>,
) -> Result<Page, WebError> {
    let doc = DomDocument::parse(text)?;
    let mut warnings = Vec::new();
    let mut stylesheets = Vec::new();
    for s in &doc.styles {
        match &s.resource {
            Resource::Inline(t) => stylesheets.push(Stylesheet {
                source: format!("{name}:style@{}", s.line),
                text: t.clone(),
                first_line: s.line,
            }),
            Resource::Link(href) if is_remote(href) => {
                warnings.push(format!(
                    "{name}:{}: remote stylesheet {href} skipped",
                    s.line
                ));
            }
            Resource::Link(href) => match fetch(strip_query(href)) {
                Ok((source, text)) => stylesheets.push(Stylesheet {
                    source,
                    text,
                    first_line: 1,
                }),
                Err(e) => warnings.push(format!("{name}:{}: {e}", s.line)),
            },
        }
    }
    let mut scripts = Vec::new();
    for s in &doc.scripts {
        match &s.resource {
            Resource::Inline(t) => scripts.push(ScriptSource {
                name: name.to_string(),
                text: t.clone(),
                first_line: s.line,
            }),
            Resource::Link(href) if is_library(href) => {}
            Resource::Link(href) if is_remote(href) => {
                warnings.push(format!("{name}:{}: remote script {href} skipped", s.line));
            }
            Resource::Link(href) => match fetch(strip_query(href)) {
                Ok((source, text)) => scripts.push(ScriptSource {
                    name: source,
                    text,
                    first_line: 1,
                }),
                Err(e) => warnings.push(format!("{name}:{}: {e}", s.line)),
            },
        }
    }
    Ok(Page {
        name: name.to_string(),
        doc,
        stylesheets,
        scripts,
        warnings,
    })
}

fn strip_query(href: &str) -> &str {
    href.split(['?', '#']).next().unwrap_or(href)
}

/// One node per element, labeled by its tag, `#id` and `.class` tokens.
/// Children keep document order in their paths.
pub fn html_to_tree(root: &Element, classes: &mut Classes) -> Tree {
    let mut nodes = Vec::new();
    let mut stack = vec![(root, NodePath::root())];
    while let Some((el, path)) = stack.pop() {
        let label = el.label_names().iter().map(|n| classes.intern(n)).collect();
        for (i, c) in el.children.iter().enumerate() {
            stack.push((c, path.child(i as u32)));
        }
        nodes.push((path, label));
    }
    Tree::from_nodes(nodes).expect("element paths form a tree")
}

/// A page translated into a rewrite system with one query per supported
/// selector.
#[derive(Clone, Debug)]
pub struct PageSystem {
    pub page: String,
    pub system: RewriteSystem,
    pub selectors: Vec<SelectorEntry>,
    /// For each selector, the index of its query in `system.queries`.
    pub query_of: Vec<Option<usize>>,
    pub node_count: usize,
    /// Rules extracted from scripts.
    pub script_rules: usize,
    pub coarse: bool,
    pub warnings: Vec<String>,
}

pub fn build_page_system(page: &Page) -> PageSystem {
    let mut classes = Classes::new();
    let initial = html_to_tree(&page.doc.root, &mut classes);
    let mut sink = RuleSink::new(classes);
    collect_tags(&page.doc.root, &mut sink);

    let mut selectors = Vec::new();
    for s in &page.stylesheets {
        selectors.extend(parse_stylesheet(&s.source, &s.text, s.first_line));
    }
    let mut queries = Vec::new();
    let mut query_of = Vec::new();
    let mut warnings = page.warnings.clone();
    for (i, e) in selectors.iter().enumerate() {
        match &e.parsed {
            Ok(sel) => {
                if let Some(tag) = sel
                    .first
                    .names
                    .first()
                    .filter(|n| !n.starts_with(['.', '#']))
                {
                    let t = sink.classes.intern(tag);
                    sink.tags.insert(t);
                }
                let guard = sel.to_guard(&mut sink.classes);
                query_of.push(Some(queries.len()));
                queries.push(Query {
                    name: format!("s{}", i + 1),
                    guard,
                });
            }
            Err(why) => {
                warnings.push(format!(
                    "{}:{}: selector {:?} unsupported: {why}",
                    e.source, e.line, e.text
                ));
                query_of.push(None);
            }
        }
    }

    let root = Guard::Atom(sink.classes.intern(&page.doc.root.tag));
    let extraction = extract_rules_from_scripts(&page.scripts, &mut sink, &root);
    warnings.extend(extraction.warnings);

    let RuleSink {
        classes,
        tags,
        rules,
        coarse,
        ..
    } = sink;
    let system = RewriteSystem {
        classes,
        tags,
        rules,
        initial,
        queries,
    };
    PageSystem {
        page: page.name.clone(),
        node_count: page.doc.node_count(),
        script_rules: system.rules.len(),
        system,
        selectors,
        query_of,
        coarse,
        warnings,
    }
}

fn collect_tags(el: &Element, sink: &mut RuleSink) {
    let t = sink.classes.intern(&el.tag);
    sink.tags.insert(t);
    for c in &el.children {
        collect_tags(c, sink);
    }
}
