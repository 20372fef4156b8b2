//! JavaScript tokens. Good enough to find call chains, not a validator.

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Ident(String),
    Str(String),
    /// Template literal text with `${...}` parts dropped, and whether any were.
    Template(String, bool),
    Num(String),
    Regex,
    Punct(&'static str),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    /// A line break precedes this token.
    pub nl_before: bool,
}

const PUNCTS: &[&str] = &[
    ">>>=", "...", "===", "!==", "**=", "<<=", ">>=", ">>>", "&&=", "||=", "??=", "=>", "==", "!=",
    "<=", ">=", "&&", "||", "??", "?.", "++", "--", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=",
    "<<", ">>", "**", "{", "}", "(", ")", "[", "]", ";", ",", "<", ">", "+", "-", "*", "/", "%",
    "&", "|", "^", "!", "~", "?", ":", "=", ".", "@", "#",
];

fn regex_allowed(prev: Option<&Tok>) -> bool {
    match prev {
        None => true,
        Some(Tok::Ident(w)) => matches!(
            w.as_str(),
            "return"
                | "typeof"
                | "instanceof"
                | "in"
                | "of"
                | "new"
                | "delete"
                | "void"
                | "throw"
                | "case"
                | "do"
                | "else"
        ),
        Some(Tok::Punct(p)) => !matches!(*p, ")" | "]" | "}"),
        Some(_) => false,
    }
}

pub fn tokenize(src: &str) -> Vec<Token> {
    let chars: Vec<char> = src.chars().collect();
    let mut out: Vec<Token> = Vec::new();
    let mut i = 0;
    let mut line = 1;
    let mut nl = false;
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            line += 1;
            nl = true;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'*') {
            i += 2;
            while i < chars.len() && !(chars[i] == '*' && chars.get(i + 1) == Some(&'/')) {
                if chars[i] == '\n' {
                    line += 1;
                    nl = true;
                }
                i += 1;
            }
            i += 2;
            continue;
        }
        // An HTML comment opener at the start of inline scripts.
        if c == '<' && chars[i..].starts_with(&['<', '!', '-', '-']) {
            i += 4;
            continue;
        }
        let start_line = line;
        let tok = if c.is_alphabetic() || c == '_' || c == '$' {
            let s = i;
            while i < chars.len()
                && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '$')
            {
                i += 1;
            }
            Tok::Ident(chars[s..i].iter().collect())
        } else if c.is_ascii_digit()
            || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()))
        {
            let s = i;
            while i < chars.len()
                && (chars[i].is_alphanumeric() || chars[i] == '.' || chars[i] == '_')
            {
                i += 1;
            }
            Tok::Num(chars[s..i].iter().collect())
        } else if c == '"' || c == '\'' {
            i += 1;
            let mut s = String::new();
            while i < chars.len() && chars[i] != c && chars[i] != '\n' {
                if chars[i] == '\\' {
                    i += 1;
                    match chars.get(i) {
                        Some('n') => s.push('\n'),
                        Some('t') => s.push('\t'),
                        Some('\n') => line += 1,
                        Some(&e) => s.push(e),
                        None => {}
                    }
                } else {
                    s.push(chars[i]);
                }
                i += 1;
            }
            i += 1;
            Tok::Str(s)
        } else if c == '`' {
            i += 1;
            let mut s = String::new();
            let mut interp = false;
            while i < chars.len() && chars[i] != '`' {
                match chars[i] {
                    '\\' => {
                        i += 1;
                        if let Some(&e) = chars.get(i) {
                            s.push(e);
                        }
                    }
                    '$' if chars.get(i + 1) == Some(&'{') => {
                        interp = true;
                        let mut depth = 0;
                        while i < chars.len() {
                            match chars[i] {
                                '{' => depth += 1,
                                '}' => {
                                    depth -= 1;
                                    if depth == 0 {
                                        break;
                                    }
                                }
                                '\n' => line += 1,
                                _ => {}
                            }
                            i += 1;
                        }
                    }
                    '\n' => {
                        line += 1;
                        s.push('\n');
                    }
                    ch => s.push(ch),
                }
                i += 1;
            }
            i += 1;
            Tok::Template(s, interp)
        } else if c == '/' && regex_allowed(out.last().map(|t| &t.tok)) {
            i += 1;
            let mut in_class = false;
            while i < chars.len() && chars[i] != '\n' {
                match chars[i] {
                    '\\' => i += 1,
                    '[' => in_class = true,
                    ']' => in_class = false,
                    '/' if !in_class => break,
                    _ => {}
                }
                i += 1;
            }
            i += 1;
            while i < chars.len() && chars[i].is_alphabetic() {
                i += 1;
            }
            Tok::Regex
        } else {
            let rest: String = chars[i..chars.len().min(i + 4)].iter().collect();
            match PUNCTS.iter().find(|p| rest.starts_with(**p)) {
                Some(p) => {
                    i += p.chars().count();
                    Tok::Punct(p)
                }
                None => {
                    // Unknown character: skip it.
                    i += 1;
                    continue;
                }
            }
        };
        out.push(Token {
            tok,
            line: start_line,
            nl_before: nl,
        });
        nl = false;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s).into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn strings_regexes_and_division() {
        assert_eq!(
            toks("$('#a').x(\"b\\\"c\")"),
            vec![
                Tok::Ident("$".into()),
                Tok::Punct("("),
                Tok::Str("#a".into()),
                Tok::Punct(")"),
                Tok::Punct("."),
                Tok::Ident("x".into()),
                Tok::Punct("("),
                Tok::Str("b\"c".into()),
                Tok::Punct(")"),
            ]
        );
        assert_eq!(toks("a / b / c").len(), 5);
        assert_eq!(
            toks("x = /a\\/b[/]/g;"),
            vec![
                Tok::Ident("x".into()),
                Tok::Punct("="),
                Tok::Regex,
                Tok::Punct(";")
            ]
        );
        assert_eq!(
            toks("`<p>${a + `x`}</p>`"),
            vec![Tok::Template("<p></p>".into(), true)]
        );
    }

    #[test]
    fn lines() {
        let t = tokenize("a\n/* x\n */ b // c\nc");
        assert_eq!(t.iter().map(|t| t.line).collect::<Vec<_>>(), vec![1, 3, 4]);
        assert!(t[1].nl_before);
    }
}
