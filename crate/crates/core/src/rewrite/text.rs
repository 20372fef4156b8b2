//! The line-oriented text format for rewrite systems.
//!
//! ```text
//! classes root team P1 P2 success
//! init (root)
//! rule add_team root => addchild {team}
//! query q_success (down* success)
//! ```
//!
//! A `classes` line closes the class universe. `tags` declares element tag
//! names. Trees and guards may span lines while parentheses are open.

use std::collections::BTreeSet;

use crate::class::{Classes, Label};
use crate::guard::parse_guard_tokens;
use crate::lex::{tokenize, Cursor, Tok};
use crate::rewrite::{Query, RewriteOp, RewriteRule, RewriteSystem, Side};
use crate::tree::{parse_label, parse_tree, Tree};
use crate::Error;

fn class_name(tok: Tok, cur: &Cursor) -> Result<String, Error> {
    match tok {
        Tok::Word(w) if crate::class::is_plain_class(&w) => Ok(w),
        Tok::Quoted(w) => Ok(w),
        other => Err(cur.error(format!("expected a class name, found {other:?}"))),
    }
}

pub fn parse_system(text: &str) -> Result<RewriteSystem, Error> {
    let toks = tokenize(text)?;
    let mut classes = Classes::new();
    let mut declared = false;

    // Declarations first, so that the universe is closed for everything else.
    {
        let mut cur = Cursor::new(toks.clone());
        let mut at_line_start = true;
        while let Some(t) = cur.next_raw() {
            match t {
                Tok::Newline => at_line_start = true,
                Tok::Word(w) if at_line_start && (w == "classes" || w == "tags") => {
                    declared |= w == "classes";
                    while !matches!(cur.peek_raw(), None | Some(Tok::Newline)) {
                        let t = cur.next_raw().unwrap();
                        let name = class_name(t, &cur)?;
                        classes.intern(&name);
                    }
                }
                _ => at_line_start = false,
            }
        }
    }
    if declared {
        classes.close();
    }

    let mut cur = Cursor::new(toks);
    let mut tags = BTreeSet::new();
    let mut rules = Vec::new();
    let mut queries = Vec::new();
    let mut initial: Option<Tree> = None;
    while let Some(t) = cur.next() {
        let Tok::Word(kw) = t else {
            return Err(cur.error(format!("expected a statement keyword, found {t:?}")));
        };
        match kw.as_str() {
            "classes" | "tags" => {
                while !matches!(cur.peek_raw(), None | Some(Tok::Newline)) {
                    let t = cur.next_raw().unwrap();
                    let name = class_name(t, &cur)?;
                    if kw == "tags" {
                        tags.insert(classes.resolve(&name)?);
                    }
                }
            }
            "init" => {
                if initial.is_some() {
                    return Err(cur.error("duplicate init statement"));
                }
                initial = Some(parse_tree(&mut cur, &mut classes)?);
            }
            "rule" => {
                let name = match cur.next() {
                    Some(Tok::Word(w)) => w,
                    _ => return Err(cur.error("expected a rule name")),
                };
                let guard = parse_guard_tokens(&mut cur, &mut classes)?;
                cur.expect(Tok::Arrow)?;
                let op = parse_op(&mut cur, &mut classes)?;
                rules.push(RewriteRule { name, guard, op });
            }
            "query" => {
                let name = match cur.next() {
                    Some(Tok::Word(w)) => w,
                    _ => return Err(cur.error("expected a query name")),
                };
                let guard = parse_guard_tokens(&mut cur, &mut classes)?;
                queries.push(Query { name, guard });
            }
            other => return Err(cur.error(format!("unknown statement {other:?}"))),
        }
        if !matches!(cur.peek_raw(), None | Some(Tok::Newline)) {
            return Err(cur.error("unexpected trailing tokens"));
        }
    }
    let initial = initial.ok_or_else(|| Error::Parse {
        line: 1,
        col: 1,
        msg: "missing init statement".into(),
    })?;
    let sys = RewriteSystem {
        classes,
        tags,
        rules,
        initial,
        queries,
    };
    sys.check_unique_names()?;
    Ok(sys)
}

fn parse_op(cur: &mut Cursor, classes: &mut Classes) -> Result<RewriteOp, Error> {
    let kw = match cur.next() {
        Some(Tok::Word(w)) => w,
        _ => return Err(cur.error("expected an operation")),
    };
    let mut label = |cur: &mut Cursor| -> Result<Label, Error> { parse_label(cur, classes) };
    Ok(match kw.as_str() {
        "addchild" => RewriteOp::AddChild(label(cur)?),
        "addclass" => RewriteOp::AddClass(label(cur)?),
        "removeclass" => RewriteOp::RemoveClass(label(cur)?),
        "removenode" => RewriteOp::RemoveNode,
        "before" => RewriteOp::AddSibling(Side::Before, label(cur)?),
        "after" => RewriteOp::AddSibling(Side::After, label(cur)?),
        other => return Err(cur.error(format!("unknown operation {other:?}"))),
    })
}

pub fn print_system(sys: &RewriteSystem) -> String {
    let c = &sys.classes;
    let mut out = String::new();
    let names: Vec<String> = c.ids().map(|id| c.token(id)).collect();
    out.push_str("classes");
    for n in &names {
        out.push(' ');
        out.push_str(n);
    }
    out.push('\n');
    if !sys.tags.is_empty() {
        out.push_str("tags");
        for &t in &sys.tags {
            out.push(' ');
            out.push_str(&c.token(t));
        }
        out.push('\n');
    }
    out.push_str("init ");
    out.push_str(&sys.initial.to_sexpr(c));
    out.push('\n');
    for r in &sys.rules {
        out.push_str(&format!(
            "rule {} {} => {}\n",
            r.name,
            r.guard.display(c),
            r.op.display(c)
        ));
    }
    for q in &sys.queries {
        out.push_str(&format!("query {} {}\n", q.name, q.guard.display(c)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const TENNIS: &str = "\
classes root team P1 P2 success
init (root)                         # s-expression tree
rule add_team  root          => addchild {team}
rule add_p1    team          => addchild {P1}
rule add_p2    team          => addchild {P2}
rule succ      (and (down P1) (down P2)) => addchild {success}
query q_success (down* success)
";

    #[test]
    fn parses_tennis() {
        let sys = parse_system(TENNIS).unwrap();
        assert_eq!(sys.rules.len(), 4);
        assert_eq!(sys.queries.len(), 1);
        assert_eq!(sys.classes.len(), 5);
        assert_eq!(sys.initial.len(), 1);
        let again = parse_system(&print_system(&sys)).unwrap();
        assert_eq!(print_system(&again), print_system(&sys));
    }

    #[test]
    fn closed_universe() {
        let err = parse_system("classes a\ninit (a)\nrule r b => addclass {a}\n").unwrap_err();
        assert!(matches!(err, Error::UnknownClass(_)));
        let open = parse_system("init (a)\nrule r b => addclass {a}\n").unwrap();
        assert_eq!(open.classes.len(), 2);
    }

    #[test]
    fn multi_line_tree_and_ops() {
        let sys = parse_system(
            "tags div a\ninit (html\n  (div (a))\n  ({#limit,div}))\nrule r1 #limit => removenode\nrule r2 a => before {a}\n",
        )
        .unwrap();
        assert_eq!(sys.initial.len(), 4);
        assert_eq!(sys.tags.len(), 2);
        assert_eq!(sys.rules[0].op, RewriteOp::RemoveNode);
        assert!(matches!(
            sys.rules[1].op,
            RewriteOp::AddSibling(Side::Before, _)
        ));
    }

    #[test]
    fn errors() {
        assert!(parse_system("rule r a => addclass {a}\n").is_err());
        assert!(parse_system("init (a)\nrule r a => explode\n").is_err());
        assert!(
            parse_system("init (a)\nrule r a => removenode\nrule r a => removenode\n").is_err()
        );
        match parse_system("init (a)\nquery q (and a\n") {
            Err(Error::Parse { .. }) => {}
            other => panic!("{other:?}"),
        }
    }
}
