//! The guard language and its evaluation over trees.

use std::collections::BTreeSet;

use crate::class::{ClassId, Classes, Label};
use crate::lex::{tokenize, Cursor, Tok};
use crate::tree::{NodePath, Tree, TreeIndex};
use crate::Error;

/// Modal directions. `Left` and `Right` are sibling modalities; on unordered
/// trees they are read as "some sibling or the node itself", the same as
/// `Up(Down(g))`, and simplification rewrites them away.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dir {
    Up,
    UpStar,
    Down,
    DownStar,
    Left,
    Right,
}

impl Dir {
    pub fn keyword(self) -> &'static str {
        match self {
            Dir::Up => "up",
            Dir::UpStar => "up*",
            Dir::Down => "down",
            Dir::DownStar => "down*",
            Dir::Left => "left",
            Dir::Right => "right",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Guard {
    True,
    Atom(ClassId),
    And(Box<Guard>, Box<Guard>),
    Or(Box<Guard>, Box<Guard>),
    Not(Box<Guard>),
    Modal(Dir, Box<Guard>),
}

impl Guard {
    pub fn atom(c: ClassId) -> Guard {
        Guard::Atom(c)
    }

    pub fn and(a: Guard, b: Guard) -> Guard {
        Guard::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Guard, b: Guard) -> Guard {
        Guard::Or(Box::new(a), Box::new(b))
    }

    pub fn not(a: Guard) -> Guard {
        Guard::Not(Box::new(a))
    }

    pub fn modal(d: Dir, a: Guard) -> Guard {
        Guard::Modal(d, Box::new(a))
    }

    pub fn up(a: Guard) -> Guard {
        Guard::modal(Dir::Up, a)
    }

    pub fn down(a: Guard) -> Guard {
        Guard::modal(Dir::Down, a)
    }

    /// `(up+ g)`, i.e. `(up* (up g))`.
    pub fn up_plus(a: Guard) -> Guard {
        Guard::modal(Dir::UpStar, Guard::up(a))
    }

    /// `(down+ g)`, i.e. `(down* (down g))`.
    pub fn down_plus(a: Guard) -> Guard {
        Guard::modal(Dir::DownStar, Guard::down(a))
    }

    /// Left-nested conjunction; the empty conjunction is `True`.
    pub fn conj(parts: impl IntoIterator<Item = Guard>) -> Guard {
        let mut it = parts.into_iter();
        match it.next() {
            None => Guard::True,
            Some(first) => it.fold(first, Guard::and),
        }
    }

    /// Conjunction of atoms for a label.
    pub fn of_label(label: &Label) -> Guard {
        Guard::conj(label.iter().map(|&c| Guard::Atom(c)))
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Guard::True | Guard::Atom(_) => true,
            Guard::And(a, b) | Guard::Or(a, b) => a.is_positive() && b.is_positive(),
            Guard::Not(_) => false,
            Guard::Modal(_, g) => g.is_positive(),
        }
    }

    pub fn has_sibling_modality(&self) -> bool {
        match self {
            Guard::True | Guard::Atom(_) => false,
            Guard::And(a, b) | Guard::Or(a, b) => {
                a.has_sibling_modality() || b.has_sibling_modality()
            }
            Guard::Not(g) => g.has_sibling_modality(),
            Guard::Modal(d, g) => matches!(d, Dir::Left | Dir::Right) || g.has_sibling_modality(),
        }
    }

    /// The classes of a conjunction of atoms (`True` is the empty one).
    pub fn conj_classes(&self) -> Option<Label> {
        fn go(g: &Guard, out: &mut Label) -> bool {
            match g {
                Guard::True => true,
                Guard::Atom(c) => {
                    out.insert(*c);
                    true
                }
                Guard::And(a, b) => go(a, out) && go(b, out),
                _ => false,
            }
        }
        let mut out = Label::new();
        go(self, &mut out).then_some(out)
    }

    /// Simple shape: a conjunction of atoms, or one `up`/`down` over one.
    pub fn simple_shape(&self) -> Option<(Option<Dir>, Label)> {
        match self {
            Guard::Modal(d @ (Dir::Up | Dir::Down), g) => g.conj_classes().map(|l| (Some(*d), l)),
            g => g.conj_classes().map(|l| (None, l)),
        }
    }

    pub fn is_simple(&self) -> bool {
        self.simple_shape().is_some()
    }

    pub fn classes(&self) -> BTreeSet<ClassId> {
        let mut out = BTreeSet::new();
        self.collect_classes(&mut out);
        out
    }

    fn collect_classes(&self, out: &mut BTreeSet<ClassId>) {
        match self {
            Guard::True => {}
            Guard::Atom(c) => {
                out.insert(*c);
            }
            Guard::And(a, b) | Guard::Or(a, b) => {
                a.collect_classes(out);
                b.collect_classes(out);
            }
            Guard::Not(g) | Guard::Modal(_, g) => g.collect_classes(out),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Guard::True | Guard::Atom(_) => 1,
            Guard::And(a, b) | Guard::Or(a, b) => 1 + a.size() + b.size(),
            Guard::Not(g) | Guard::Modal(_, g) => 1 + g.size(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Guard::True | Guard::Atom(_) => 1,
            Guard::And(a, b) | Guard::Or(a, b) => 1 + a.depth().max(b.depth()),
            Guard::Not(g) | Guard::Modal(_, g) => 1 + g.depth(),
        }
    }

    /// Canonical s-expression. Left-nested chains of one connective print
    /// flat, which the parser reads back to the same tree.
    pub fn display(&self, classes: &Classes) -> String {
        let mut out = String::new();
        self.write(classes, &mut out);
        out
    }

    fn write(&self, classes: &Classes, out: &mut String) {
        match self {
            Guard::True => out.push_str("true"),
            Guard::Atom(c) => out.push_str(&classes.token(*c)),
            Guard::And(..) | Guard::Or(..) => {
                let is_and = matches!(self, Guard::And(..));
                let mut operands = Vec::new();
                let mut cur = self;
                loop {
                    match (cur, is_and) {
                        (Guard::And(a, b), true) | (Guard::Or(a, b), false) => {
                            operands.push(&**b);
                            cur = a;
                        }
                        _ => {
                            operands.push(cur);
                            break;
                        }
                    }
                }
                out.push_str(if is_and { "(and" } else { "(or" });
                for g in operands.iter().rev() {
                    out.push(' ');
                    g.write(classes, out);
                }
                out.push(')');
            }
            Guard::Not(g) => {
                out.push_str("(not ");
                g.write(classes, out);
                out.push(')');
            }
            Guard::Modal(d, g) => {
                out.push('(');
                out.push_str(d.keyword());
                out.push(' ');
                g.write(classes, out);
                out.push(')');
            }
        }
    }
}

/// Parses a guard, registering new classes unless the universe is closed.
pub fn parse_guard(text: &str, classes: &mut Classes) -> Result<Guard, Error> {
    let mut cur = Cursor::new(tokenize(text)?);
    let g = parse_guard_tokens(&mut cur, classes)?;
    if !cur.at_end() {
        return Err(cur.error("trailing input after guard"));
    }
    Ok(g)
}

pub(crate) fn parse_guard_tokens(cur: &mut Cursor, classes: &mut Classes) -> Result<Guard, Error> {
    match cur.next() {
        Some(Tok::Word(w)) if w == "true" => Ok(Guard::True),
        Some(Tok::Word(w)) => {
            if !crate::class::is_plain_class(&w) || crate::lex::is_reserved(&w) {
                return Err(cur.error(format!("invalid class token {w:?}")));
            }
            Ok(Guard::Atom(classes.resolve(&w)?))
        }
        Some(Tok::Quoted(w)) => Ok(Guard::Atom(classes.resolve(&w)?)),
        Some(Tok::LParen) => {
            let head = match cur.next() {
                Some(Tok::Word(w)) => w,
                _ => return Err(cur.error("expected an operator after '('")),
            };
            let mut args = Vec::new();
            loop {
                match cur.peek() {
                    Some(Tok::RParen) => {
                        cur.next();
                        break;
                    }
                    None => return Err(cur.error("unclosed '('")),
                    _ => args.push(parse_guard_tokens(cur, classes)?),
                }
            }
            let unary = |args: Vec<Guard>, cur: &Cursor| -> Result<Guard, Error> {
                let mut args = args;
                if args.len() != 1 {
                    return Err(cur.error(format!("{head} takes exactly one argument")));
                }
                Ok(args.pop().unwrap())
            };
            match head.as_str() {
                "and" => Ok(Guard::conj(args)),
                "or" => {
                    let mut it = args.into_iter();
                    let first = it
                        .next()
                        .ok_or_else(|| cur.error("(or) needs an argument"))?;
                    Ok(it.fold(first, Guard::or))
                }
                "not" => Ok(Guard::not(unary(args, cur)?)),
                "up" => Ok(Guard::up(unary(args, cur)?)),
                "up*" => Ok(Guard::modal(Dir::UpStar, unary(args, cur)?)),
                "up+" => Ok(Guard::up_plus(unary(args, cur)?)),
                "down" => Ok(Guard::down(unary(args, cur)?)),
                "down*" => Ok(Guard::modal(Dir::DownStar, unary(args, cur)?)),
                "down+" => Ok(Guard::down_plus(unary(args, cur)?)),
                "left" => Ok(Guard::modal(Dir::Left, unary(args, cur)?)),
                "right" => Ok(Guard::modal(Dir::Right, unary(args, cur)?)),
                other => Err(cur.error(format!("unknown operator {other:?}"))),
            }
        }
        Some(t) => Err(cur.error(format!("unexpected token {t:?}"))),
        None => Err(cur.error("expected a guard")),
    }
}

/// Context assumed for the root of a tree that is really a subtree:
/// whether it is the global root, and otherwise its parent's classes.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct AssumptionFunction {
    pub is_root: bool,
    pub parent_classes: Label,
}

impl AssumptionFunction {
    pub fn root() -> Self {
        AssumptionFunction {
            is_root: true,
            parent_classes: Label::new(),
        }
    }

    pub fn below(parent_classes: Label) -> Self {
        AssumptionFunction {
            is_root: false,
            parent_classes,
        }
    }
}

/// Evaluates `g` at every node of the index at once. Entry `i` is the truth
/// value at the `i`-th node in preorder.
///
/// With an assumption, `(up X)` at the root is decided by it; this is only
/// meaningful for a conjunction of atoms under `up`.
pub(crate) fn eval_all(
    ix: &TreeIndex,
    g: &Guard,
    assume: Option<&AssumptionFunction>,
) -> Vec<bool> {
    let n = ix.len();
    match g {
        Guard::True => vec![true; n],
        Guard::Atom(c) => ix.labels.iter().map(|l| l.contains(c)).collect(),
        Guard::And(a, b) => {
            let (x, y) = (eval_all(ix, a, assume), eval_all(ix, b, assume));
            x.iter().zip(&y).map(|(p, q)| *p && *q).collect()
        }
        Guard::Or(a, b) => {
            let (x, y) = (eval_all(ix, a, assume), eval_all(ix, b, assume));
            x.iter().zip(&y).map(|(p, q)| *p || *q).collect()
        }
        Guard::Not(a) => eval_all(ix, a, assume).into_iter().map(|b| !b).collect(),
        Guard::Modal(Dir::Up, a) => {
            let s = eval_all(ix, a, assume);
            (0..n)
                .map(|i| match ix.parent[i] {
                    Some(p) => s[p],
                    None => assume.is_some_and(|f| {
                        !f.is_root
                            && a.conj_classes()
                                .is_some_and(|x| x.is_subset(&f.parent_classes))
                    }),
                })
                .collect()
        }
        Guard::Modal(Dir::UpStar, a) => {
            let s = eval_all(ix, a, assume);
            let mut r = vec![false; n];
            // Preorder visits parents first.
            for i in 0..n {
                r[i] = s[i] || ix.parent[i].is_some_and(|p| r[p]);
            }
            r
        }
        Guard::Modal(Dir::Down, a) => {
            let s = eval_all(ix, a, assume);
            (0..n)
                .map(|i| ix.children[i].iter().any(|&c| s[c]))
                .collect()
        }
        Guard::Modal(Dir::DownStar, a) => {
            let s = eval_all(ix, a, assume);
            let mut r = vec![false; n];
            for i in (0..n).rev() {
                r[i] = s[i] || ix.children[i].iter().any(|&c| r[c]);
            }
            r
        }
        Guard::Modal(Dir::Left | Dir::Right, a) => {
            let s = eval_all(ix, a, assume);
            (0..n)
                .map(|i| match ix.parent[i] {
                    Some(p) => ix.children[p].iter().any(|&c| s[c]),
                    None => false,
                })
                .collect()
        }
    }
}

pub fn match_guard(tree: &Tree, node: &NodePath, g: &Guard) -> Result<bool, Error> {
    let ix = TreeIndex::new(tree);
    let i = ix
        .position(node)
        .ok_or_else(|| Error::NodeNotInDomain(node.to_string()))?;
    Ok(eval_all(&ix, g, None)[i])
}

pub fn match_guard_assume(
    tree: &Tree,
    node: &NodePath,
    g: &Guard,
    f: &AssumptionFunction,
) -> Result<bool, Error> {
    if !g.is_simple() {
        return Err(Error::NotSimple(format!("{g:?}")));
    }
    let ix = TreeIndex::new(tree);
    let i = ix
        .position(node)
        .ok_or_else(|| Error::NodeNotInDomain(node.to_string()))?;
    Ok(eval_all(&ix, g, Some(f))[i])
}

/// Whether `g` holds at some node of `tree`.
pub fn matched_anywhere(tree: &Tree, g: &Guard) -> bool {
    let ix = TreeIndex::new(tree);
    eval_all(&ix, g, None).into_iter().any(|b| b)
}

/// The guards matched at some node of `tree`.
pub fn matched_set(tree: &Tree, guards: &[Guard]) -> Vec<Guard> {
    let ix = TreeIndex::new(tree);
    guards
        .iter()
        .filter(|g| eval_all(&ix, g, None).into_iter().any(|b| b))
        .cloned()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(tree: &str) -> (Classes, Tree) {
        let mut c = Classes::new();
        let t = Tree::parse(tree, &mut c).unwrap();
        (c, t)
    }

    #[test]
    fn parse_examples() {
        let mut c = Classes::new();
        let p1 = c.intern("P1");
        let p2 = c.intern("P2");
        assert_eq!(
            parse_guard("(and P1 P2)", &mut c).unwrap(),
            Guard::and(Guard::Atom(p1), Guard::Atom(p2))
        );
        let s = c.intern("success");
        assert_eq!(
            parse_guard("(down* success)", &mut c).unwrap(),
            Guard::modal(Dir::DownStar, Guard::Atom(s))
        );
        let a = c.intern("a");
        assert_eq!(
            parse_guard("(down+ a)", &mut c).unwrap(),
            Guard::modal(Dir::DownStar, Guard::modal(Dir::Down, Guard::Atom(a)))
        );
    }

    #[test]
    fn parse_errors_carry_position() {
        let mut c = Classes::new();
        match parse_guard("(and a\n  (up b)", &mut c) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(parse_guard("(sideways a)", &mut c).is_err());
        assert!(parse_guard("(not a b)", &mut c).is_err());
        c.close();
        assert!(matches!(
            parse_guard("unknown", &mut c),
            Err(Error::UnknownClass(_))
        ));
    }

    #[test]
    fn nary_binarizes_left() {
        let mut c = Classes::new();
        let g = parse_guard("(and a b c)", &mut c).unwrap();
        let (a, b, cc) = (
            c.get("a").unwrap(),
            c.get("b").unwrap(),
            c.get("c").unwrap(),
        );
        assert_eq!(
            g,
            Guard::and(Guard::and(Guard::Atom(a), Guard::Atom(b)), Guard::Atom(cc))
        );
        assert_eq!(g.display(&c), "(and a b c)");
        let h = parse_guard("(and a (and b c))", &mut c).unwrap();
        assert_eq!(h.display(&c), "(and a (and b c))");
        assert_eq!(parse_guard(&h.display(&c), &mut c).unwrap(), h);
    }

    #[test]
    fn matching_basics() {
        let (mut c, t) = setup("(root)");
        assert!(match_guard(&t, &NodePath::root(), &Guard::True).unwrap());
        assert!(!match_guard(&t, &NodePath::root(), &Guard::up(Guard::True)).unwrap());
        let (mut c2, t2) = setup("({} (P1))");
        let g = parse_guard("(down* P1)", &mut c2).unwrap();
        assert!(match_guard(&t2, &NodePath::root(), &g).unwrap());
        let g = parse_guard("(down a)", &mut c).unwrap();
        assert!(matched_set(&t, &[g]).is_empty());
        assert!(match_guard(&t, &NodePath(vec![0]), &Guard::True).is_err());
    }

    #[test]
    fn figure_two_success_leaf() {
        // A tournament with two teams; the first one has both players and success.
        let (mut c, t) = setup("(root (team (P1) (P2) (success)) (team (P1)))");
        let g = parse_guard("(up team)", &mut c).unwrap();
        assert!(match_guard(&t, &NodePath(vec![0, 2]), &g).unwrap());
        let success = parse_guard("success", &mut c).unwrap();
        let warn = parse_guard("warn", &mut c).unwrap();
        assert_eq!(matched_set(&t, &[success.clone(), warn]), vec![success]);
    }

    #[test]
    fn assumption_semantics() {
        let (mut c, t) = setup("(team)");
        let g = parse_guard("(up input_wrap)", &mut c).unwrap();
        let iw = c.get("input_wrap").unwrap();
        let below = AssumptionFunction::below(Label::from([iw]));
        assert!(match_guard_assume(&t, &NodePath::root(), &g, &below).unwrap());
        let at_root = AssumptionFunction {
            is_root: true,
            parent_classes: Label::from([iw]),
        };
        assert!(!match_guard_assume(&t, &NodePath::root(), &g, &at_root).unwrap());
        let team = parse_guard("team", &mut c).unwrap();
        assert!(match_guard_assume(&t, &NodePath::root(), &team, &at_root).unwrap());
        let complex = parse_guard("(up* team)", &mut c).unwrap();
        assert!(match_guard_assume(&t, &NodePath::root(), &complex, &at_root).is_err());
    }

    #[test]
    fn shapes() {
        let mut c = Classes::new();
        assert!(parse_guard("(and a b)", &mut c).unwrap().is_simple());
        assert!(parse_guard("(up (and a b))", &mut c).unwrap().is_simple());
        assert!(parse_guard("true", &mut c).unwrap().is_simple());
        assert!(!parse_guard("(up* a)", &mut c).unwrap().is_simple());
        assert!(!parse_guard("(or a b)", &mut c).unwrap().is_simple());
        assert!(!parse_guard("(not a)", &mut c).unwrap().is_positive());
    }
}
