//! Stylesheets and the selector subset that translates into guards.
//!
//! A compound selector becomes a conjunction of classes: the tag name bare,
//! ids with `#` and classes with `.`. Descendant and child combinators look
//! upwards from the subject. Sibling combinators are read on unordered trees
//! as "a child of my parent", which over-approximates both `+` and `~`.
//! Pseudo-classes and pseudo-elements are dropped, so `a:hover` is checked as
//! `a`. Attribute selectors are not supported.

use treeprune_core::{Classes, Guard};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Combinator {
    Descendant,
    Child,
    /// `+` or `~`.
    Sibling,
}

/// A compound selector with pseudo parts removed. `*` is the empty list.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Compound {
    /// Class tokens: `div`, `#id`, `.cls`.
    pub names: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Selector {
    pub first: Compound,
    pub rest: Vec<(Combinator, Compound)>,
    pub pseudo_stripped: bool,
}

impl Selector {
    pub fn has_sibling(&self) -> bool {
        self.rest.iter().any(|(c, _)| *c == Combinator::Sibling)
    }

    pub fn to_guard(&self, classes: &mut Classes) -> Guard {
        let mut g = compound_guard(&self.first, classes);
        for (comb, comp) in &self.rest {
            let here = compound_guard(comp, classes);
            let context = match comb {
                Combinator::Descendant => Guard::up_plus(g),
                Combinator::Child => Guard::up(g),
                Combinator::Sibling => Guard::up(Guard::down(g)),
            };
            g = and_nontrivial(here, context);
        }
        g
    }
}

fn compound_guard(c: &Compound, classes: &mut Classes) -> Guard {
    Guard::conj(c.names.iter().map(|n| Guard::Atom(classes.intern(n))))
}

fn and_nontrivial(a: Guard, b: Guard) -> Guard {
    if a == Guard::True {
        b
    } else {
        Guard::and(a, b)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Unsupported {
    Attribute,
    Syntax(String),
}

impl std::fmt::Display for Unsupported {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Unsupported::Attribute => write!(f, "attribute selectors are not supported"),
            Unsupported::Syntax(m) => write!(f, "{m}"),
        }
    }
}

/// Parses one selector (no top-level commas).
pub fn parse_selector(text: &str) -> Result<Selector, Unsupported> {
    let chars: Vec<char> = text.trim().chars().collect();
    if chars.is_empty() {
        return Err(Unsupported::Syntax("empty selector".into()));
    }
    let mut i = 0;
    let mut stripped = false;
    let mut parts: Vec<(Option<Combinator>, Compound)> = Vec::new();
    let mut pending: Option<Combinator> = None;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            if !parts.is_empty() && pending.is_none() {
                pending = Some(Combinator::Descendant);
            }
            continue;
        }
        if matches!(c, '>' | '+' | '~') {
            if parts.is_empty() {
                return Err(Unsupported::Syntax(format!("selector starts with {c:?}")));
            }
            if matches!(pending, Some(Combinator::Child | Combinator::Sibling)) {
                return Err(Unsupported::Syntax("two combinators in a row".into()));
            }
            pending = Some(if c == '>' {
                Combinator::Child
            } else {
                Combinator::Sibling
            });
            i += 1;
            continue;
        }
        if !parts.is_empty() && pending.is_none() {
            return Err(Unsupported::Syntax("missing combinator".into()));
        }
        let (comp, next, pseudo) = parse_compound(&chars, i)?;
        stripped |= pseudo;
        parts.push((pending.take(), comp));
        i = next;
    }
    if matches!(pending, Some(Combinator::Child | Combinator::Sibling)) {
        return Err(Unsupported::Syntax("dangling combinator".into()));
    }
    let mut it = parts.into_iter();
    let (_, first) = it.next().unwrap();
    let rest = it
        .map(|(c, comp)| (c.unwrap_or(Combinator::Descendant), comp))
        .collect();
    Ok(Selector {
        first,
        rest,
        pseudo_stripped: stripped,
    })
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '-' | '_') || !c.is_ascii()
}

fn read_ident(chars: &[char], mut i: usize) -> (String, usize) {
    let mut s = String::new();
    while i < chars.len() {
        if chars[i] == '\\' && i + 1 < chars.len() {
            s.push(chars[i + 1]);
            i += 2;
        } else if is_ident_char(chars[i]) {
            s.push(chars[i]);
            i += 1;
        } else {
            break;
        }
    }
    (s, i)
}

fn parse_compound(chars: &[char], mut i: usize) -> Result<(Compound, usize, bool), Unsupported> {
    let mut comp = Compound::default();
    let mut pseudo = false;
    let push = |comp: &mut Compound, name: String| {
        if !comp.names.contains(&name) {
            comp.names.push(name);
        }
    };
    let start = i;
    while i < chars.len() {
        match chars[i] {
            '*' => i += 1,
            '#' | '.' => {
                let (name, next) = read_ident(chars, i + 1);
                if name.is_empty() {
                    return Err(Unsupported::Syntax(format!(
                        "empty name after {:?}",
                        chars[i]
                    )));
                }
                push(&mut comp, format!("{}{name}", chars[i]));
                i = next;
            }
            '[' => return Err(Unsupported::Attribute),
            ':' => {
                pseudo = true;
                i += 1;
                if chars.get(i) == Some(&':') {
                    i += 1;
                }
                let (name, next) = read_ident(chars, i);
                if name.is_empty() {
                    return Err(Unsupported::Syntax("empty pseudo-class".into()));
                }
                i = next;
                if chars.get(i) == Some(&'(') {
                    let mut depth = 0;
                    while i < chars.len() {
                        match chars[i] {
                            '(' => depth += 1,
                            ')' => {
                                depth -= 1;
                                if depth == 0 {
                                    i += 1;
                                    break;
                                }
                            }
                            _ => {}
                        }
                        i += 1;
                    }
                    if depth != 0 {
                        return Err(Unsupported::Syntax("unbalanced parentheses".into()));
                    }
                }
            }
            c if is_ident_char(c) && i == start => {
                let (name, next) = read_ident(chars, i);
                push(&mut comp, name.to_ascii_lowercase());
                i = next;
            }
            c if c.is_whitespace() || matches!(c, '>' | '+' | '~') => break,
            c => return Err(Unsupported::Syntax(format!("unexpected {c:?}"))),
        }
    }
    Ok((comp, i, pseudo))
}

/// One selector of a stylesheet rule, after splitting selector lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelectorEntry {
    /// Stylesheet name (a file name, or `page.html:style@LINE` for inline blocks).
    pub source: String,
    pub line: usize,
    pub text: String,
    pub parsed: Result<Selector, Unsupported>,
}

impl SelectorEntry {
    pub fn pseudo_stripped(&self) -> bool {
        self.parsed.as_ref().is_ok_and(|s| s.pseudo_stripped)
    }

    pub fn is_supported(&self) -> bool {
        self.parsed.is_ok()
    }
}

/// Splits a stylesheet into selector entries. Comments are skipped and
/// conditional group rules (`@media`, `@supports`, `@document`) are entered;
/// other at-rules are skipped whole.
pub fn parse_stylesheet(source: &str, text: &str, first_line: usize) -> Vec<SelectorEntry> {
    let clean = strip_comments(text);
    let mut out = Vec::new();
    parse_block(source, &clean, 0, clean.len(), first_line, &mut out);
    out
}

fn strip_comments(text: &str) -> String {
    // Keeps newlines so that line numbers survive.
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(p) = rest.find("/*") {
        out.push_str(&rest[..p]);
        let after = &rest[p + 2..];
        let end = after.find("*/").map(|e| e + 2).unwrap_or(after.len());
        out.extend(after[..end].chars().filter(|&c| c == '\n'));
        rest = &after[end.min(after.len())..];
    }
    out.push_str(rest);
    out
}

fn line_at(text: &str, at: usize, first_line: usize) -> usize {
    first_line
        + text.as_bytes()[..at]
            .iter()
            .filter(|&&b| b == b'\n')
            .count()
}

/// Index of the `}` matching the `{` at `open`, skipping strings.
fn matching_brace(b: &[u8], open: usize, end: usize) -> usize {
    let mut depth = 0;
    let mut i = open;
    while i < end {
        match b[i] {
            b'{' => depth += 1,
            b'}' => {
                depth -= 1;
                if depth == 0 {
                    return i;
                }
            }
            q @ (b'"' | b'\'') => {
                i += 1;
                while i < end && b[i] != q {
                    i += if b[i] == b'\\' { 2 } else { 1 };
                }
            }
            _ => {}
        }
        i += 1;
    }
    end
}

fn parse_block(
    source: &str,
    text: &str,
    mut i: usize,
    end: usize,
    first_line: usize,
    out: &mut Vec<SelectorEntry>,
) {
    let b = text.as_bytes();
    while i < end {
        while i < end && (b[i].is_ascii_whitespace() || b[i] == b';' || b[i] == b'}') {
            i += 1;
        }
        if i >= end {
            break;
        }
        let start = i;
        let Some(brace) = b[i..end]
            .iter()
            .position(|&c| c == b'{' || (c == b';' && b[start] == b'@'))
            .map(|p| p + i)
        else {
            break;
        };
        if b[brace] == b';' {
            // `@import ...;` and friends.
            i = brace + 1;
            continue;
        }
        let close = matching_brace(b, brace, end);
        let prelude = text[start..brace].trim();
        if let Some(at) = prelude.strip_prefix('@') {
            let name: String = at
                .chars()
                .take_while(|c| c.is_alphanumeric() || *c == '-')
                .collect();
            if matches!(
                name.as_str(),
                "media" | "supports" | "document" | "-moz-document" | "layer" | "container"
            ) {
                parse_block(source, text, brace + 1, close, first_line, out);
            }
        } else {
            for (piece, offset) in split_list(&text[start..brace]) {
                let piece_trim = piece.trim();
                if piece_trim.is_empty() {
                    continue;
                }
                let lead = piece.len() - piece.trim_start().len();
                out.push(SelectorEntry {
                    source: source.to_string(),
                    line: line_at(text, start + offset + lead, first_line),
                    text: normalize_ws(piece_trim),
                    parsed: parse_selector(piece_trim),
                });
            }
        }
        i = close + 1;
    }
}

/// Splits a selector list at top-level commas, with byte offsets.
fn split_list(text: &str) -> Vec<(&str, usize)> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut last = 0;
    for (i, c) in text.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push((&text[last..i], last));
                last = i + 1;
            }
            _ => {}
        }
    }
    out.push((&text[last..], last));
    out
}

fn normalize_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}
