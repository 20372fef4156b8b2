//! A forgiving parser for the statement and expression forms that carry
//! jQuery calls. Anything it cannot read is skipped to the next statement
//! boundary and recorded as `Stmt::Skipped`.

use std::rc::Rc;

use super::lex::{tokenize, Tok, Token};

#[derive(Debug)]
pub struct Function {
    pub id: usize,
    pub name: Option<String>,
    pub params: Vec<String>,
    pub body: Vec<Stmt>,
    /// Arrow functions keep the enclosing `this`.
    pub arrow: bool,
    pub line: usize,
}

#[derive(Clone, Debug)]
pub enum Expr {
    Ident(String),
    This,
    Str(String),
    /// Template text with interpolations removed.
    Template(String),
    Num,
    Other,
    Array(Vec<Expr>),
    Object(Vec<(String, Expr)>),
    Func(Rc<Function>),
    Member(Box<Expr>, String),
    Index(Box<Expr>, Box<Expr>),
    Call {
        callee: Box<Expr>,
        args: Vec<Expr>,
        line: usize,
    },
    New(Box<Expr>, Vec<Expr>),
    Unary(Box<Expr>),
    /// `++`/`--` and compound assignment targets.
    Update(Box<Expr>),
    Binary(&'static str, Box<Expr>, Box<Expr>),
    Cond(Box<Expr>, Box<Expr>, Box<Expr>),
    Assign(Box<Expr>, Box<Expr>),
    Seq(Vec<Expr>),
}

#[derive(Clone, Debug)]
pub enum Stmt {
    Var(Vec<(String, Option<Expr>)>),
    Expr(Expr),
    If(Expr, Vec<Stmt>, Vec<Stmt>),
    /// Loop header expressions and body.
    Loop(Vec<Expr>, Vec<Stmt>),
    Block(Vec<Stmt>),
    Return(Option<Expr>),
    Func(Rc<Function>),
    /// `try`, `switch` and `catch` bodies: run conditionally.
    Branches(Vec<Expr>, Vec<Vec<Stmt>>),
    Skipped {
        line: usize,
    },
}

#[derive(Debug)]
pub struct Program {
    pub body: Vec<Stmt>,
    pub skipped: Vec<usize>,
}

pub fn parse_program(src: &str, first_id: usize) -> (Program, usize) {
    let mut p = Parser {
        toks: tokenize(src),
        pos: 0,
        next_id: first_id,
        skipped: Vec::new(),
    };
    let mut body = Vec::new();
    while p.pos < p.toks.len() {
        let before = p.pos;
        body.push(p.statement());
        if p.pos == before {
            p.pos += 1;
        }
    }
    let next = p.next_id;
    (
        Program {
            body,
            skipped: p.skipped,
        },
        next,
    )
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    next_id: usize,
    skipped: Vec<usize>,
}

type PResult<T> = Result<T, ()>;

const BINARY: &[(&str, u8)] = &[
    ("??", 1),
    ("||", 2),
    ("&&", 3),
    ("|", 4),
    ("^", 5),
    ("&", 6),
    ("==", 7),
    ("!=", 7),
    ("===", 7),
    ("!==", 7),
    ("<", 8),
    (">", 8),
    ("<=", 8),
    (">=", 8),
    ("instanceof", 8),
    ("in", 8),
    ("<<", 9),
    (">>", 9),
    (">>>", 9),
    ("+", 10),
    ("-", 10),
    ("*", 11),
    ("/", 11),
    ("%", 11),
    ("**", 12),
];

const ASSIGN: &[&str] = &[
    "=", "+=", "-=", "*=", "/=", "%=", "**=", "<<=", ">>=", ">>>=", "&=", "|=", "^=", "&&=", "||=",
    "??=",
];

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|t| &t.tok)
    }

    fn line(&self) -> usize {
        self.toks
            .get(self.pos)
            .or(self.toks.last())
            .map_or(1, |t| t.line)
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Some(Tok::Punct(q)) if *q == p)
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(x)) if x == w)
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_word(&mut self, w: &str) -> bool {
        if self.is_word(w) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, p: &str) -> PResult<()> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            Err(())
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek() {
            Some(Tok::Ident(w)) => {
                let w = w.clone();
                self.pos += 1;
                Ok(w)
            }
            _ => Err(()),
        }
    }

    /// Skips to just past the next `;` at depth zero, or to a line break or
    /// closing brace that ends the statement.
    fn recover(&mut self, start: usize) {
        let mut depth = 0i32;
        if self.pos == start && self.pos < self.toks.len() {
            self.pos += 1;
        }
        while let Some(t) = self.toks.get(self.pos) {
            match &t.tok {
                Tok::Punct("(" | "[" | "{") => depth += 1,
                Tok::Punct(")" | "]" | "}") => {
                    if depth == 0 {
                        return;
                    }
                    depth -= 1;
                }
                Tok::Punct(";") if depth == 0 => {
                    self.pos += 1;
                    return;
                }
                _ if depth == 0 && t.nl_before && self.pos > start + 1 => return,
                _ => {}
            }
            self.pos += 1;
        }
    }

    fn end_statement(&mut self) {
        self.eat_punct(";");
    }

    fn statement(&mut self) -> Stmt {
        let start = self.pos;
        let line = self.line();
        match self.try_statement() {
            Ok(s) => s,
            Err(()) => {
                self.pos = start;
                self.recover(start);
                self.skipped.push(line);
                Stmt::Skipped { line }
            }
        }
    }

    fn block_or_statement(&mut self) -> PResult<Vec<Stmt>> {
        if self.is_punct("{") {
            self.block()
        } else {
            Ok(vec![self.statement()])
        }
    }

    fn block(&mut self) -> PResult<Vec<Stmt>> {
        self.expect("{")?;
        let mut out = Vec::new();
        while !self.is_punct("}") {
            if self.peek().is_none() {
                return Err(());
            }
            let before = self.pos;
            out.push(self.statement());
            if self.pos == before {
                self.pos += 1;
            }
        }
        self.pos += 1;
        Ok(out)
    }

    fn try_statement(&mut self) -> PResult<Stmt> {
        let Some(tok) = self.peek().cloned() else {
            return Err(());
        };
        if let Tok::Punct(p) = tok {
            match p {
                "{" => return Ok(Stmt::Block(self.block()?)),
                ";" => {
                    self.pos += 1;
                    return Ok(Stmt::Block(Vec::new()));
                }
                _ => {}
            }
        }
        if let Tok::Ident(w) = &tok {
            match w.as_str() {
                "var" | "let" | "const"
                    if matches!(self.peek_at(1), Some(Tok::Ident(_) | Tok::Punct("[" | "{"))) =>
                {
                    self.pos += 1;
                    let decls = self.var_decls()?;
                    self.end_statement();
                    return Ok(Stmt::Var(decls));
                }
                "function" if matches!(self.peek_at(1), Some(Tok::Ident(_))) => {
                    let f = self.function(false)?;
                    return Ok(Stmt::Func(f));
                }
                "async" if matches!(self.peek_at(1), Some(Tok::Ident(w)) if w == "function") => {
                    self.pos += 1;
                    return self.try_statement();
                }
                "if" => {
                    self.pos += 1;
                    self.expect("(")?;
                    let c = self.expression()?;
                    self.expect(")")?;
                    let then = self.block_or_statement()?;
                    let els = if self.eat_word("else") {
                        self.block_or_statement()?
                    } else {
                        Vec::new()
                    };
                    return Ok(Stmt::If(c, then, els));
                }
                "for" => {
                    self.pos += 1;
                    self.eat_word("await");
                    self.expect("(")?;
                    let mut header = Vec::new();
                    let mut decls = Vec::new();
                    while !self.is_punct(")") {
                        if self.peek().is_none() {
                            return Err(());
                        }
                        if self.eat_punct(";") {
                            continue;
                        }
                        if matches!(self.peek(), Some(Tok::Ident(w)) if w == "var" || w == "let" || w == "const")
                        {
                            self.pos += 1;
                            decls.extend(self.var_decls_in()?);
                            continue;
                        }
                        if self.eat_word("of") || self.eat_word("in") {
                            continue;
                        }
                        header.push(self.expression_no_in()?);
                    }
                    self.pos += 1;
                    let mut body = self.block_or_statement()?;
                    if !decls.is_empty() {
                        body.insert(0, Stmt::Var(decls));
                    }
                    return Ok(Stmt::Loop(header, body));
                }
                "while" => {
                    self.pos += 1;
                    self.expect("(")?;
                    let c = self.expression()?;
                    self.expect(")")?;
                    let body = self.block_or_statement()?;
                    return Ok(Stmt::Loop(vec![c], body));
                }
                "do" => {
                    self.pos += 1;
                    let body = self.block_or_statement()?;
                    if !self.eat_word("while") {
                        return Err(());
                    }
                    self.expect("(")?;
                    let c = self.expression()?;
                    self.expect(")")?;
                    self.end_statement();
                    return Ok(Stmt::Loop(vec![c], body));
                }
                "return" | "throw" => {
                    self.pos += 1;
                    let value = if self.is_punct(";")
                        || self.is_punct("}")
                        || self.toks.get(self.pos).is_none_or(|t| t.nl_before)
                    {
                        None
                    } else {
                        Some(self.expression()?)
                    };
                    self.end_statement();
                    return Ok(if w == "return" {
                        Stmt::Return(value)
                    } else {
                        Stmt::Expr(value.unwrap_or(Expr::Other))
                    });
                }
                "break" | "continue" => {
                    self.pos += 1;
                    if matches!(self.peek(), Some(Tok::Ident(_))) && !self.toks[self.pos].nl_before
                    {
                        self.pos += 1;
                    }
                    self.end_statement();
                    return Ok(Stmt::Block(Vec::new()));
                }
                "try" => {
                    self.pos += 1;
                    let mut arms = vec![self.block()?];
                    if self.eat_word("catch") {
                        if self.eat_punct("(") {
                            while !self.eat_punct(")") {
                                if self.peek().is_none() {
                                    return Err(());
                                }
                                self.pos += 1;
                            }
                        }
                        arms.push(self.block()?);
                    }
                    if self.eat_word("finally") {
                        arms.push(self.block()?);
                    }
                    return Ok(Stmt::Branches(Vec::new(), arms));
                }
                "switch" => {
                    self.pos += 1;
                    self.expect("(")?;
                    let mut heads = vec![self.expression()?];
                    self.expect(")")?;
                    self.expect("{")?;
                    let mut arms: Vec<Vec<Stmt>> = Vec::new();
                    while !self.eat_punct("}") {
                        if self.eat_word("case") {
                            heads.push(self.expression()?);
                            self.expect(":")?;
                            arms.push(Vec::new());
                        } else if self.eat_word("default") {
                            self.expect(":")?;
                            arms.push(Vec::new());
                        } else if self.peek().is_none() {
                            return Err(());
                        } else {
                            let s = self.statement();
                            match arms.last_mut() {
                                Some(a) => a.push(s),
                                None => return Err(()),
                            }
                        }
                    }
                    return Ok(Stmt::Branches(heads, arms));
                }
                "class" => return Err(()),
                _ => {}
            }
        }
        let e = self.expression()?;
        if !(self.eat_punct(";")
            || self.is_punct("}")
            || self.peek().is_none()
            || self.toks[self.pos].nl_before)
        {
            return Err(());
        }
        Ok(Stmt::Expr(e))
    }

    fn var_decls(&mut self) -> PResult<Vec<(String, Option<Expr>)>> {
        self.var_decls_with(true)
    }

    fn var_decls_in(&mut self) -> PResult<Vec<(String, Option<Expr>)>> {
        self.var_decls_with(false)
    }

    fn var_decls_with(&mut self, allow_in: bool) -> PResult<Vec<(String, Option<Expr>)>> {
        let mut out = Vec::new();
        loop {
            let name = if self.is_punct("[") || self.is_punct("{") {
                // Destructuring: the bound names are not tracked.
                self.skip_balanced()?;
                String::new()
            } else {
                self.ident()?
            };
            let init = if self.eat_punct("=") {
                Some(if allow_in {
                    self.assignment()?
                } else {
                    self.assignment_no_in()?
                })
            } else {
                None
            };
            out.push((name, init));
            if !self.eat_punct(",") {
                break;
            }
        }
        Ok(out)
    }

    fn skip_balanced(&mut self) -> PResult<()> {
        let mut depth = 0;
        loop {
            match self.peek() {
                None => return Err(()),
                Some(Tok::Punct("(" | "[" | "{")) => depth += 1,
                Some(Tok::Punct(")" | "]" | "}")) => {
                    depth -= 1;
                    if depth == 0 {
                        self.pos += 1;
                        return Ok(());
                    }
                }
                _ => {}
            }
            self.pos += 1;
        }
    }

    fn new_function(
        &mut self,
        name: Option<String>,
        params: Vec<String>,
        body: Vec<Stmt>,
        arrow: bool,
        line: usize,
    ) -> Rc<Function> {
        let id = self.next_id;
        self.next_id += 1;
        Rc::new(Function {
            id,
            name,
            params,
            body,
            arrow,
            line,
        })
    }

    /// `function name? (params) { body }`, at the `function` keyword.
    fn function(&mut self, _expr: bool) -> PResult<Rc<Function>> {
        let line = self.line();
        if !self.eat_word("function") {
            return Err(());
        }
        self.eat_punct("*");
        let name = match self.peek() {
            Some(Tok::Ident(_)) => Some(self.ident()?),
            _ => None,
        };
        let params = self.params()?;
        let body = self.block()?;
        Ok(self.new_function(name, params, body, false, line))
    }

    fn params(&mut self) -> PResult<Vec<String>> {
        self.expect("(")?;
        let mut out = Vec::new();
        while !self.eat_punct(")") {
            self.eat_punct("...");
            if self.is_punct("[") || self.is_punct("{") {
                self.skip_balanced()?;
                out.push(String::new());
            } else {
                out.push(self.ident()?);
            }
            if self.eat_punct("=") {
                self.assignment()?;
            }
            if !self.eat_punct(",") && !self.is_punct(")") {
                return Err(());
            }
        }
        Ok(out)
    }

    fn arrow_ahead(&self) -> bool {
        match self.peek() {
            Some(Tok::Ident(_)) => matches!(self.peek_at(1), Some(Tok::Punct("=>"))),
            Some(Tok::Punct("(")) => {
                let mut depth = 0;
                let mut k = self.pos;
                while let Some(t) = self.toks.get(k) {
                    match t.tok {
                        Tok::Punct("(" | "[" | "{") => depth += 1,
                        Tok::Punct(")" | "]" | "}") => {
                            depth -= 1;
                            if depth == 0 {
                                return matches!(
                                    self.toks.get(k + 1).map(|t| &t.tok),
                                    Some(Tok::Punct("=>"))
                                );
                            }
                        }
                        _ => {}
                    }
                    k += 1;
                }
                false
            }
            _ => false,
        }
    }

    fn arrow(&mut self) -> PResult<Expr> {
        let line = self.line();
        let params = if self.is_punct("(") {
            self.params()?
        } else {
            vec![self.ident()?]
        };
        self.expect("=>")?;
        let body = if self.is_punct("{") {
            self.block()?
        } else {
            vec![Stmt::Return(Some(self.assignment()?))]
        };
        Ok(Expr::Func(
            self.new_function(None, params, body, true, line),
        ))
    }

    fn expression(&mut self) -> PResult<Expr> {
        self.expression_with(true)
    }

    fn expression_no_in(&mut self) -> PResult<Expr> {
        self.expression_with(false)
    }

    fn expression_with(&mut self, allow_in: bool) -> PResult<Expr> {
        let first = self.assignment_with(allow_in)?;
        if !self.is_punct(",") {
            return Ok(first);
        }
        let mut all = vec![first];
        while self.eat_punct(",") {
            all.push(self.assignment_with(allow_in)?);
        }
        Ok(Expr::Seq(all))
    }

    fn assignment(&mut self) -> PResult<Expr> {
        self.assignment_with(true)
    }

    fn assignment_no_in(&mut self) -> PResult<Expr> {
        self.assignment_with(false)
    }

    fn assignment_with(&mut self, allow_in: bool) -> PResult<Expr> {
        if self.is_word("async") && matches!(self.peek_at(1), Some(Tok::Ident(_) | Tok::Punct("(")))
        {
            let save = self.pos;
            self.pos += 1;
            if self.arrow_ahead() {
                return self.arrow();
            }
            self.pos = save;
        }
        if self.arrow_ahead() {
            return self.arrow();
        }
        let lhs = self.conditional(allow_in)?;
        if let Some(Tok::Punct(p)) = self.peek() {
            if ASSIGN.contains(p) {
                let plain = *p == "=";
                self.pos += 1;
                let rhs = self.assignment_with(allow_in)?;
                return Ok(if plain {
                    Expr::Assign(Box::new(lhs), Box::new(rhs))
                } else {
                    Expr::Seq(vec![Expr::Update(Box::new(lhs)), rhs])
                });
            }
        }
        Ok(lhs)
    }

    fn conditional(&mut self, allow_in: bool) -> PResult<Expr> {
        let c = self.binary(0, allow_in)?;
        if self.eat_punct("?") {
            let a = self.assignment()?;
            self.expect(":")?;
            let b = self.assignment_with(allow_in)?;
            return Ok(Expr::Cond(Box::new(c), Box::new(a), Box::new(b)));
        }
        Ok(c)
    }

    fn binary_op(&self, allow_in: bool) -> Option<(&'static str, u8)> {
        let name: &str = match self.peek()? {
            Tok::Punct(p) => p,
            Tok::Ident(w) if w == "instanceof" || (w == "in" && allow_in) => w.as_str(),
            _ => return None,
        };
        BINARY.iter().find(|(op, _)| *op == name).copied()
    }

    fn binary(&mut self, min: u8, allow_in: bool) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        while let Some((op, prec)) = self.binary_op(allow_in) {
            if prec < min {
                break;
            }
            self.pos += 1;
            let rhs = self.binary(prec + 1, allow_in)?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        match self.peek() {
            Some(Tok::Punct("!" | "~" | "+" | "-")) => {
                self.pos += 1;
                Ok(Expr::Unary(Box::new(self.unary()?)))
            }
            Some(Tok::Punct("++" | "--")) => {
                self.pos += 1;
                Ok(Expr::Update(Box::new(self.unary()?)))
            }
            Some(Tok::Ident(w)) if matches!(w.as_str(), "typeof" | "void" | "delete" | "await") => {
                self.pos += 1;
                Ok(Expr::Unary(Box::new(self.unary()?)))
            }
            _ => {
                let e = self.postfix()?;
                if matches!(self.peek(), Some(Tok::Punct("++" | "--")))
                    && !self.toks[self.pos].nl_before
                {
                    self.pos += 1;
                    return Ok(Expr::Update(Box::new(e)));
                }
                Ok(e)
            }
        }
    }

    fn arguments(&mut self) -> PResult<Vec<Expr>> {
        self.expect("(")?;
        let mut args = Vec::new();
        while !self.eat_punct(")") {
            self.eat_punct("...");
            args.push(self.assignment()?);
            if !self.eat_punct(",") && !self.is_punct(")") {
                return Err(());
            }
        }
        Ok(args)
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut e = if self.eat_word("new") {
            let callee = self.member_only()?;
            let args = if self.is_punct("(") {
                self.arguments()?
            } else {
                Vec::new()
            };
            Expr::New(Box::new(callee), args)
        } else {
            self.primary()?
        };
        loop {
            if self.eat_punct(".") || self.eat_punct("?.") {
                if self.is_punct("(") {
                    let line = self.line();
                    let args = self.arguments()?;
                    e = Expr::Call {
                        callee: Box::new(e),
                        args,
                        line,
                    };
                    continue;
                }
                if self.is_punct("[") {
                    continue;
                }
                let name = self.ident()?;
                e = Expr::Member(Box::new(e), name);
            } else if self.is_punct("(") {
                let line = self.line();
                let args = self.arguments()?;
                e = Expr::Call {
                    callee: Box::new(e),
                    args,
                    line,
                };
            } else if self.eat_punct("[") {
                let ix = self.expression()?;
                self.expect("]")?;
                e = Expr::Index(Box::new(e), Box::new(ix));
            } else if matches!(self.peek(), Some(Tok::Template(..))) {
                // Tagged template.
                self.pos += 1;
                e = Expr::Other;
            } else {
                return Ok(e);
            }
        }
    }

    /// A callee for `new`: member accesses without calls.
    fn member_only(&mut self) -> PResult<Expr> {
        let mut e = self.primary()?;
        while self.eat_punct(".") {
            e = Expr::Member(Box::new(e), self.ident()?);
        }
        Ok(e)
    }

    fn primary(&mut self) -> PResult<Expr> {
        let Some(tok) = self.peek().cloned() else {
            return Err(());
        };
        self.pos += 1;
        Ok(match tok {
            Tok::Str(s) => Expr::Str(s),
            Tok::Template(s, _) => Expr::Template(s),
            Tok::Num(_) | Tok::Regex => Expr::Num,
            Tok::Ident(w) => match w.as_str() {
                "this" => Expr::This,
                "function" => {
                    self.pos -= 1;
                    Expr::Func(self.function(true)?)
                }
                "true" | "false" | "null" | "undefined" => Expr::Other,
                "class" => return Err(()),
                _ => Expr::Ident(w),
            },
            Tok::Punct("(") => {
                let e = self.expression()?;
                self.expect(")")?;
                e
            }
            Tok::Punct("[") => {
                let mut items = Vec::new();
                while !self.eat_punct("]") {
                    if self.eat_punct(",") {
                        continue;
                    }
                    self.eat_punct("...");
                    items.push(self.assignment()?);
                    if !self.eat_punct(",") && !self.is_punct("]") {
                        return Err(());
                    }
                }
                Expr::Array(items)
            }
            Tok::Punct("{") => {
                let mut props = Vec::new();
                while !self.eat_punct("}") {
                    if self.eat_punct("...") {
                        props.push((String::new(), self.assignment()?));
                    } else {
                        let key = match self.peek().cloned() {
                            Some(Tok::Ident(w)) => w,
                            Some(Tok::Str(s)) => s,
                            Some(Tok::Num(n)) => n,
                            Some(Tok::Punct("[")) => {
                                self.skip_balanced()?;
                                self.pos -= 1;
                                String::new()
                            }
                            _ => return Err(()),
                        };
                        self.pos += 1;
                        if self.eat_punct(":") {
                            props.push((key, self.assignment()?));
                        } else if self.is_punct("(") {
                            // Method shorthand.
                            let line = self.line();
                            let params = self.params()?;
                            let body = self.block()?;
                            let f = self.new_function(Some(key.clone()), params, body, false, line);
                            props.push((key, Expr::Func(f)));
                        } else {
                            props.push((key.clone(), Expr::Ident(key)));
                            if self.eat_punct("=") {
                                self.assignment()?;
                            }
                        }
                    }
                    if !self.eat_punct(",") && !self.is_punct("}") {
                        return Err(());
                    }
                }
                Expr::Object(props)
            }
            _ => return Err(()),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Program {
        parse_program(s, 0).0
    }

    #[test]
    fn figure_one_script_parses() {
        let src = "$(document).ready(function() {\n var x = 1;\n $('.button').click(function(e){\n if(x < 10){ x++;\n\
                   $('.input_wrap').append('<div>' + '<a href=\"#\" class=\"delete\">Remove</a>' + '</div>');\n\
                   $('#counter').html(x); }\n else { $('#limit').addClass('warn'); }\n });\n\
                   $('.input_wrap').on('click', '.delete', function(e){ $(this).parent('div').remove(); x--; })\n });";
        let p = parse(src);
        assert!(p.skipped.is_empty(), "{:?}", p.skipped);
        assert_eq!(p.body.len(), 1);
    }

    #[test]
    fn recovers_from_unknown_syntax() {
        let p = parse("class A { m() {} }\n$('.a').addClass('b');\nlet {x, y} = o;\nconst f = async (a) => { await a };");
        assert_eq!(p.skipped.len(), 1);
        assert_eq!(p.body.len(), 4);
        assert!(matches!(p.body[1], Stmt::Expr(Expr::Call { .. })));
    }

    #[test]
    fn asi_and_arrows() {
        let p = parse("var a = $('.a')\na.addClass('x')\n[1,2].forEach(v => v * 2)\nfor (var i = 0; i < 3; i++) { }\nfor (const k in o) {}");
        assert!(p.skipped.is_empty(), "{:?}", p.skipped);
        assert!(matches!(p.body[0], Stmt::Var(_)));
        assert!(matches!(p.body[3], Stmt::Loop(..)));
    }
}
