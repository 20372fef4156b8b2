//! A tolerant HTML reader that keeps only the element structure.
//!
//! Mismatched end tags close back to the nearest open element with the same
//! name, or are ignored when there is none. Void elements never take
//! children. `<script>` and `<style>` bodies are raw text and are collected
//! in document order; script elements do not become tree nodes.

use std::fmt;

use crate::WebError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Element {
    /// Lower-cased tag name.
    pub tag: String,
    pub id: Option<String>,
    pub classes: Vec<String>,
    pub children: Vec<Element>,
}

impl Element {
    pub fn new(tag: &str) -> Self {
        Element {
            tag: tag.to_ascii_lowercase(),
            id: None,
            classes: Vec::new(),
            children: Vec::new(),
        }
    }

    pub fn count(&self) -> usize {
        1 + self.children.iter().map(Element::count).sum::<usize>()
    }

    /// The label tokens: tag, `#id`, `.class`.
    pub fn label_names(&self) -> Vec<String> {
        let mut out = vec![self.tag.clone()];
        if let Some(id) = &self.id {
            out.push(format!("#{id}"));
        }
        out.extend(self.classes.iter().map(|c| format!(".{c}")));
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Resource {
    /// Source text found inline.
    Inline(String),
    /// A `src` or `href` reference, unresolved.
    Link(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Script {
    pub resource: Resource,
    /// 1-based line of the opening tag.
    pub line: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Style {
    pub resource: Resource,
    pub line: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DomDocument {
    pub root: Element,
    pub scripts: Vec<Script>,
    pub styles: Vec<Style>,
}

impl DomDocument {
    /// Parses a whole page. Several top-level elements are wrapped in a
    /// synthesized `html` element.
    pub fn parse(text: &str) -> Result<DomDocument, WebError> {
        let parsed = parse_raw(text);
        let root = match parsed.roots.len() {
            0 => return Err(WebError::Html("no elements found".into())),
            1 => parsed.roots.into_iter().next().unwrap(),
            _ => {
                let mut html = Element::new("html");
                html.children = parsed.roots;
                html
            }
        };
        Ok(DomDocument {
            root,
            scripts: parsed.scripts,
            styles: parsed.styles,
        })
    }

    pub fn node_count(&self) -> usize {
        self.root.count()
    }
}

/// Parses an HTML fragment into a forest of elements. Text-only input gives
/// an empty forest. A tag that is opened but never finished is an error.
pub fn parse_fragment(text: &str) -> Result<Vec<Element>, WebError> {
    let parsed = parse_raw(text);
    if let Some(at) = parsed.truncated {
        return Err(WebError::Html(format!("unterminated tag at byte {at}")));
    }
    Ok(parsed.roots)
}

const VOID: &[&str] = &[
    "area", "base", "br", "col", "embed", "hr", "img", "input", "keygen", "link", "meta", "param",
    "source", "track", "wbr",
];

const RAW_TEXT: &[&str] = &["script", "style", "textarea", "title"];

struct Parsed {
    roots: Vec<Element>,
    scripts: Vec<Script>,
    styles: Vec<Style>,
    truncated: Option<usize>,
}

struct Tag {
    name: String,
    attrs: Vec<(String, String)>,
    self_closing: bool,
}

impl Tag {
    fn attr(&self, name: &str) -> Option<&str> {
        self.attrs
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| v.as_str())
    }
}

fn parse_raw(text: &str) -> Parsed {
    let bytes = text.as_bytes();
    let mut out = Parsed {
        roots: Vec::new(),
        scripts: Vec::new(),
        styles: Vec::new(),
        truncated: None,
    };
    // Open elements; the bottom of the stack is a pseudo-root collecting the forest.
    let mut stack: Vec<Element> = vec![Element::new("#root")];
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] != b'<' {
            i += 1;
            continue;
        }
        let rest = &text[i..];
        if rest.starts_with("<!--") {
            i = match rest.find("-->") {
                Some(e) => i + e + 3,
                None => bytes.len(),
            };
            continue;
        }
        if rest.starts_with("<!") || rest.starts_with("<?") {
            i = skip_past(bytes, i, b'>');
            continue;
        }
        if rest.starts_with("</") {
            let (name, end) = read_name(bytes, i + 2);
            i = skip_past(bytes, end, b'>');
            if name.is_empty() {
                continue;
            }
            if let Some(pos) = stack.iter().rposition(|e| e.tag == name) {
                if pos > 0 {
                    while stack.len() > pos {
                        close_top(&mut stack);
                    }
                }
            }
            continue;
        }
        let Some(&next) = bytes.get(i + 1) else { break };
        if !next.is_ascii_alphabetic() {
            // A stray `<` in text.
            i += 1;
            continue;
        }
        let start = i;
        let Some((tag, end)) = read_tag(text, i + 1) else {
            out.truncated = Some(start);
            break;
        };
        i = end;
        let line = line_of(text, start);
        if RAW_TEXT.contains(&tag.name.as_str()) && !tag.self_closing {
            let close = format!("</{}", tag.name);
            let body_end = find_ci(text, i, &close).unwrap_or(text.len());
            let body = &text[i..body_end];
            i = if body_end < text.len() {
                skip_past(bytes, body_end, b'>')
            } else {
                body_end
            };
            match tag.name.as_str() {
                "script" => {
                    let resource = match tag.attr("src") {
                        Some(src) => Resource::Link(src.to_string()),
                        None => Resource::Inline(body.to_string()),
                    };
                    if is_javascript(&tag) {
                        out.scripts.push(Script { resource, line });
                    }
                    continue;
                }
                "style" => {
                    out.styles.push(Style {
                        resource: Resource::Inline(body.to_string()),
                        line,
                    });
                }
                _ => {}
            }
            stack.last_mut().unwrap().children.push(element_of(&tag));
            continue;
        }
        if tag.name == "script" {
            if let (Some(src), true) = (tag.attr("src"), is_javascript(&tag)) {
                out.scripts.push(Script {
                    resource: Resource::Link(src.to_string()),
                    line,
                });
            }
            continue;
        }
        if tag.name == "link" {
            let rel = tag.attr("rel").unwrap_or("").to_ascii_lowercase();
            if let (true, Some(href)) = (
                rel.split_whitespace().any(|r| r == "stylesheet"),
                tag.attr("href"),
            ) {
                out.styles.push(Style {
                    resource: Resource::Link(href.to_string()),
                    line,
                });
            }
        }
        let el = element_of(&tag);
        if tag.self_closing || VOID.contains(&tag.name.as_str()) {
            stack.last_mut().unwrap().children.push(el);
        } else {
            stack.push(el);
        }
    }
    while stack.len() > 1 {
        close_top(&mut stack);
    }
    out.roots = stack.pop().unwrap().children;
    out
}

fn is_javascript(tag: &Tag) -> bool {
    match tag.attr("type") {
        None => true,
        Some(t) => {
            let t = t.trim().to_ascii_lowercase();
            t.is_empty() || t.contains("javascript") || t == "module"
        }
    }
}

fn close_top(stack: &mut Vec<Element>) {
    let top = stack.pop().unwrap();
    stack.last_mut().unwrap().children.push(top);
}

fn element_of(tag: &Tag) -> Element {
    let mut el = Element::new(&tag.name);
    el.id = tag
        .attr("id")
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string);
    if let Some(cls) = tag.attr("class") {
        for c in cls.split_ascii_whitespace() {
            if !el.classes.iter().any(|x| x == c) {
                el.classes.push(c.to_string());
            }
        }
    }
    el
}

fn line_of(text: &str, at: usize) -> usize {
    1 + text.as_bytes()[..at]
        .iter()
        .filter(|&&b| b == b'\n')
        .count()
}

fn skip_past(bytes: &[u8], from: usize, b: u8) -> usize {
    match bytes[from.min(bytes.len())..].iter().position(|&x| x == b) {
        Some(p) => from + p + 1,
        None => bytes.len(),
    }
}

fn find_ci(text: &str, from: usize, needle: &str) -> Option<usize> {
    let hay = text.as_bytes();
    let n = needle.as_bytes();
    (from..hay.len().saturating_sub(n.len() - 1))
        .find(|&i| hay[i..i + n.len()].eq_ignore_ascii_case(n))
}

fn read_name(bytes: &[u8], mut i: usize) -> (String, usize) {
    let start = i;
    while i < bytes.len() && !bytes[i].is_ascii_whitespace() && !matches!(bytes[i], b'>' | b'/') {
        i += 1;
    }
    (
        String::from_utf8_lossy(&bytes[start..i]).to_ascii_lowercase(),
        i,
    )
}

/// Reads a start tag whose name begins at `i`. Returns the tag and the index
/// just past `>`, or `None` when the input ends first.
fn read_tag(text: &str, i: usize) -> Option<(Tag, usize)> {
    let bytes = text.as_bytes();
    let (name, mut i) = read_name(bytes, i);
    let mut tag = Tag {
        name,
        attrs: Vec::new(),
        self_closing: false,
    };
    loop {
        while i < bytes.len() && bytes[i].is_ascii_whitespace() {
            i += 1;
        }
        match bytes.get(i)? {
            b'>' => return Some((tag, i + 1)),
            b'/' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    tag.self_closing = true;
                    return Some((tag, i + 2));
                }
                i += 1;
            }
            _ => {
                let start = i;
                while i < bytes.len()
                    && !bytes[i].is_ascii_whitespace()
                    && !matches!(bytes[i], b'>' | b'=' | b'/')
                {
                    i += 1;
                }
                let key = text[start..i].to_ascii_lowercase();
                while i < bytes.len() && bytes[i].is_ascii_whitespace() {
                    i += 1;
                }
                let mut value = String::new();
                if bytes.get(i) == Some(&b'=') {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_whitespace() {
                        i += 1;
                    }
                    match bytes.get(i)? {
                        &q @ (b'"' | b'\'') => {
                            let end = bytes[i + 1..].iter().position(|&b| b == q)? + i + 1;
                            value = decode_entities(&text[i + 1..end]);
                            i = end + 1;
                        }
                        _ => {
                            let s = i;
                            while i < bytes.len()
                                && !bytes[i].is_ascii_whitespace()
                                && bytes[i] != b'>'
                            {
                                i += 1;
                            }
                            value = decode_entities(&text[s..i]);
                        }
                    }
                }
                if !key.is_empty() {
                    tag.attrs.push((key, value));
                }
            }
        }
    }
}

fn decode_entities(s: &str) -> String {
    if !s.contains('&') {
        return s.to_string();
    }
    s.replace("&quot;", "\"")
        .replace("&#39;", "'")
        .replace("&lt;", "<")
        .replace("&gt;", ">")
        .replace("&amp;", "&")
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}", self.tag)?;
        if let Some(id) = &self.id {
            write!(f, " id=\"{id}\"")?;
        }
        if !self.classes.is_empty() {
            write!(f, " class=\"{}\"", self.classes.join(" "))?;
        }
        if self.children.is_empty() {
            return write!(f, "/>");
        }
        write!(f, ">")?;
        for c in &self.children {
            write!(f, "{c}")?;
        }
        write!(f, "</{}>", self.tag)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_and_void_elements() {
        let doc = DomDocument::parse(
            "<div id=\"limit\" class=\"warn  big warn\"><br><img src=x><p>hi</p></div>",
        )
        .unwrap();
        assert_eq!(
            doc.root.label_names(),
            vec!["div", "#limit", ".warn", ".big"]
        );
        assert_eq!(doc.root.children.len(), 3);
        assert_eq!(doc.node_count(), 4);
    }

    #[test]
    fn empty_html() {
        let doc = DomDocument::parse("<html/>").unwrap();
        assert_eq!(doc.node_count(), 1);
        assert_eq!(doc.root.tag, "html");
        assert!(DomDocument::parse("just text").is_err());
    }

    #[test]
    fn tolerant_closing() {
        let doc = DomDocument::parse("<ul><li>a<li>b</span></ul><p>").unwrap();
        // Two roots are wrapped.
        assert_eq!(doc.root.tag, "html");
        let ul = &doc.root.children[0];
        assert_eq!(ul.tag, "ul");
        assert_eq!(ul.count(), 3);
    }

    #[test]
    fn scripts_and_styles_in_order() {
        let text = "<html><head><link rel=stylesheet href=a.css><style>.x{}</style></head>\
                    <body><!-- <div> --><script src=\"j.js\"></script><script>var s = '</div>';\n</script>\
                    <script type=\"text/template\"><b></b></script></body></html>";
        let doc = DomDocument::parse(text).unwrap();
        assert_eq!(doc.styles.len(), 2);
        assert_eq!(doc.styles[0].resource, Resource::Link("a.css".into()));
        assert_eq!(doc.scripts.len(), 2);
        assert_eq!(doc.scripts[0].resource, Resource::Link("j.js".into()));
        // html, head, link, style, body
        assert_eq!(doc.node_count(), 5);
    }

    #[test]
    fn fragments() {
        let f = parse_fragment("<div>  <input type=\"text\" name=\"mytext[]\"/>  <a href=\"#\" class=\"delete\">Remove</a></div>")
            .unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].to_string(), "<div><input/><a class=\"delete\"/></div>");
        assert!(parse_fragment("").unwrap().is_empty());
        assert!(parse_fragment("Limits reached").unwrap().is_empty());
        assert!(parse_fragment("<div class=").is_err());
    }
}
