//! Rules from jQuery call chains.
//!
//! Each chain `$(s).f(..).g(..)` is evaluated over a stack of guards: the
//! base call pushes the guard of `s`, traversal functions push a guard built
//! from the top, `end()` pops, and DOM updates emit rules guarded by the top.
//! Handler bodies run with `this` bound to the selection they were attached
//! to. Variables assigned exactly once outside loops keep their value;
//! anything unknown degrades to `true` with a warning.

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::rc::Rc;

use treeprune_core::{Guard, RewriteOp};

use crate::css::parse_selector;
use crate::html::{parse_fragment, Element};
use crate::js::parse::{parse_program, Expr, Function, Program, Stmt};
use crate::RuleSink;

/// A script to translate, with a display name for warnings.
#[derive(Clone, Debug)]
pub struct ScriptSource {
    pub name: String,
    pub text: String,
    /// Line of the script's first line within `name`.
    pub first_line: usize,
}

/// A stack of guards; the top is the current selection.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct JQueryStack(pub Vec<Guard>);

impl JQueryStack {
    pub fn single(g: Guard) -> Self {
        JQueryStack(vec![g])
    }

    pub fn top(&self) -> &Guard {
        self.0.last().expect("stacks are never empty")
    }

    fn push(mut self, g: Guard) -> Self {
        self.0.push(g);
        self
    }
}

#[derive(Clone, Debug)]
enum Value {
    Jq(JQueryStack),
    Str(String),
    /// `$('<div/>')`: elements not in the document yet.
    Detached(String),
    Func(Rc<Function>, Rc<Scope>),
    Dollar,
    Document,
    /// The result of a chain whose tail is ignored.
    Aborted,
    Unknown,
}

impl Value {
    fn key(&self) -> String {
        match self {
            Value::Jq(s) => format!("jq{:?}", s.0),
            Value::Str(s) => format!("s{s:?}"),
            Value::Detached(s) => format!("d{s:?}"),
            Value::Func(f, _) => format!("f{}", f.id),
            Value::Dollar => "$".into(),
            Value::Document => "doc".into(),
            Value::Aborted | Value::Unknown => "?".into(),
        }
    }
}

#[derive(Debug)]
struct Scope {
    /// Names declared here, and whether each is assigned exactly once.
    declared: Rc<HashMap<String, bool>>,
    values: RefCell<HashMap<String, Value>>,
    this: Value,
    parent: Option<Rc<Scope>>,
}

impl Scope {
    fn owner(self: &Rc<Self>, name: &str) -> Option<(Rc<Scope>, bool)> {
        let mut cur = Some(self.clone());
        while let Some(s) = cur {
            if let Some(&single) = s.declared.get(name) {
                return Some((s, single));
            }
            cur = s.parent.clone();
        }
        None
    }

    fn lookup(self: &Rc<Self>, name: &str) -> Option<Value> {
        let (s, single) = self.owner(name)?;
        if !single {
            return Some(Value::Unknown);
        }
        let v = s.values.borrow().get(name).cloned();
        Some(v.unwrap_or(Value::Unknown))
    }

    fn assign(self: &Rc<Self>, name: &str, v: Value) {
        if let Some((s, true)) = self.owner(name) {
            s.values.borrow_mut().insert(name.to_string(), v);
        }
    }
}

/// Assignment counts per declaring scope, computed before evaluation.
#[derive(Default)]
struct Declarations {
    /// Function id (or `GLOBAL`) to name to count.
    counts: HashMap<usize, HashMap<String, u32>>,
}

const GLOBAL: usize = usize::MAX;

impl Declarations {
    fn scan_program(&mut self, body: &[Stmt]) {
        let mut chain = vec![GLOBAL];
        self.counts.entry(GLOBAL).or_default();
        self.declare_hoisted(GLOBAL, body);
        self.scan_stmts(body, &mut chain, false);
    }

    fn declare_hoisted(&mut self, id: usize, body: &[Stmt]) {
        fn walk(body: &[Stmt], out: &mut Vec<(String, bool)>) {
            for s in body {
                match s {
                    Stmt::Var(ds) => out.extend(
                        ds.iter()
                            .filter(|(n, _)| !n.is_empty())
                            .map(|(n, _)| (n.clone(), false)),
                    ),
                    Stmt::Func(f) => out.extend(f.name.clone().map(|n| (n, true))),
                    Stmt::If(_, a, b) => {
                        walk(a, out);
                        walk(b, out);
                    }
                    Stmt::Loop(_, b) | Stmt::Block(b) => walk(b, out),
                    Stmt::Branches(_, arms) => arms.iter().for_each(|a| walk(a, out)),
                    _ => {}
                }
            }
        }
        let mut names = Vec::new();
        walk(body, &mut names);
        let m = self.counts.entry(id).or_default();
        for (n, is_fn) in names {
            *m.entry(n).or_insert(0) += is_fn as u32;
        }
    }

    fn bump(&mut self, chain: &[usize], name: &str, by: u32) {
        let owner = chain
            .iter()
            .rev()
            .copied()
            .find(|id| self.counts.get(id).is_some_and(|m| m.contains_key(name)))
            .unwrap_or(GLOBAL);
        *self
            .counts
            .entry(owner)
            .or_default()
            .entry(name.to_string())
            .or_insert(0) += by;
    }

    fn scan_function(&mut self, f: &Function, chain: &mut Vec<usize>) {
        let m = self.counts.entry(f.id).or_default();
        for p in f.params.iter().filter(|p| !p.is_empty()) {
            *m.entry(p.clone()).or_insert(0) += 1;
        }
        self.declare_hoisted(f.id, &f.body);
        chain.push(f.id);
        self.scan_stmts(&f.body, chain, false);
        chain.pop();
    }

    fn scan_stmts(&mut self, body: &[Stmt], chain: &mut Vec<usize>, in_loop: bool) {
        let w = if in_loop { 2 } else { 1 };
        for s in body {
            match s {
                Stmt::Var(ds) => {
                    for (n, init) in ds {
                        if let Some(e) = init {
                            if !n.is_empty() {
                                self.bump(chain, n, w);
                            }
                            self.scan_expr(e, chain, in_loop);
                        }
                    }
                }
                Stmt::Expr(e) => self.scan_expr(e, chain, in_loop),
                Stmt::Return(e) => e.iter().for_each(|e| self.scan_expr(e, chain, in_loop)),
                Stmt::If(c, a, b) => {
                    self.scan_expr(c, chain, in_loop);
                    self.scan_stmts(a, chain, in_loop);
                    self.scan_stmts(b, chain, in_loop);
                }
                Stmt::Loop(h, b) => {
                    h.iter().for_each(|e| self.scan_expr(e, chain, true));
                    self.scan_stmts(b, chain, true);
                }
                Stmt::Block(b) => self.scan_stmts(b, chain, in_loop),
                Stmt::Branches(h, arms) => {
                    h.iter().for_each(|e| self.scan_expr(e, chain, in_loop));
                    arms.iter().for_each(|a| self.scan_stmts(a, chain, in_loop));
                }
                Stmt::Func(f) => self.scan_function(f, chain),
                Stmt::Skipped { .. } => {}
            }
        }
    }

    fn scan_expr(&mut self, e: &Expr, chain: &mut Vec<usize>, in_loop: bool) {
        match e {
            Expr::Assign(t, v) => {
                if let Expr::Ident(n) = &**t {
                    self.bump(chain, n, if in_loop { 2 } else { 1 });
                } else {
                    self.scan_expr(t, chain, in_loop);
                }
                self.scan_expr(v, chain, in_loop);
            }
            Expr::Update(t) => {
                if let Expr::Ident(n) = &**t {
                    self.bump(chain, n, 2);
                } else {
                    self.scan_expr(t, chain, in_loop);
                }
            }
            Expr::Func(f) => self.scan_function(f, chain),
            _ => for_each_child(e, |c| self.scan_expr(c, chain, in_loop)),
        }
    }
}

fn for_each_child(e: &Expr, mut f: impl FnMut(&Expr)) {
    match e {
        Expr::Array(xs) | Expr::Seq(xs) => xs.iter().for_each(f),
        Expr::Object(ps) => ps.iter().for_each(|(_, v)| f(v)),
        Expr::Member(a, _) | Expr::Unary(a) | Expr::Update(a) => f(a),
        Expr::Index(a, b) | Expr::Binary(_, a, b) | Expr::Assign(a, b) => {
            f(a);
            f(b);
        }
        Expr::Call { callee, args, .. } | Expr::New(callee, args) => {
            f(callee);
            args.iter().for_each(f);
        }
        Expr::Cond(a, b, c) => {
            f(a);
            f(b);
            f(c);
        }
        _ => {}
    }
}

/// Functions that return something other than a jQuery object; the chain
/// simply ends.
const IGNORED: &[&str] = &["extend", "hasClass", "height", "is", "width"];

const HANDLERS: &[&str] = &["click", "blur", "focus", "resize", "bind", "ready"];

/// Calls that change the document. On a receiver of unknown origin they are
/// still taken to be jQuery calls, on any node.
const UPDATES: &[&str] = &["addClass", "append", "prepend", "html"];

const SAME: &[&str] = &[
    "animate",
    "data",
    "fadeIn",
    "fadeOut",
    "show",
    "slideUp",
    "slideDown",
    "stop",
    "remove",
    "removeClass",
];

const REPEAT_TOP: &[&str] = &["eq", "filter", "first", "not", "val"];

const MAX_DEPTH: usize = 24;

struct Translator<'a> {
    sink: &'a mut RuleSink,
    root: Guard,
    warnings: Vec<String>,
    script: String,
    line_offset: usize,
    decls: Rc<Declarations>,
    user_fns: HashMap<String, (Rc<Function>, Rc<Scope>)>,
    /// Function values not yet run with a binding, with their closures.
    pending: Vec<(Rc<Function>, Rc<Scope>)>,
    bound: HashSet<usize>,
    done: HashSet<(usize, String)>,
    depth: usize,
}

/// Outcome of translating a page's scripts.
#[derive(Clone, Debug, Default)]
pub struct Extraction {
    pub rules_added: usize,
    pub warnings: Vec<String>,
    /// Some update could not be resolved and was modeled by the catch-all rules.
    pub coarse: bool,
}

/// Translates all scripts of a page, which share one global scope. Rules are
/// added to `sink`; `root` is the guard standing for `document`.
pub fn extract_rules_from_scripts(
    scripts: &[ScriptSource],
    sink: &mut RuleSink,
    root: &Guard,
) -> Extraction {
    let before = sink.rules.len();
    let mut next_id = 0;
    let mut programs: Vec<(Program, &ScriptSource)> = Vec::new();
    for s in scripts {
        let (p, next) = parse_program(&s.text, next_id);
        next_id = next;
        programs.push((p, s));
    }
    let mut decls = Declarations::default();
    for (p, _) in &programs {
        decls.scan_program(&p.body);
    }
    let decls = Rc::new(decls);
    let global = Rc::new(Scope {
        declared: Rc::new(single_names(decls.counts.get(&GLOBAL))),
        values: RefCell::default(),
        this: Value::Unknown,
        parent: None,
    });
    let mut t = Translator {
        sink,
        root: root.clone(),
        warnings: Vec::new(),
        script: String::new(),
        line_offset: 0,
        decls,
        user_fns: HashMap::new(),
        pending: Vec::new(),
        bound: HashSet::new(),
        done: HashSet::new(),
        depth: 0,
    };
    for (p, s) in &programs {
        t.script = s.name.clone();
        t.line_offset = s.first_line.saturating_sub(1);
        for &line in &p.skipped {
            t.warn(line, "statement not understood; skipped");
        }
        t.hoist(&p.body, &global);
        t.exec_block(&p.body, &global);
    }
    // Functions never run with a known binding run with `this` unknown.
    while let Some((f, scope)) = t.pending.pop() {
        if !t.bound.contains(&f.id) {
            let this = if f.arrow {
                scope.this.clone()
            } else {
                Value::Unknown
            };
            t.call_function(&f, &scope, this, &[]);
        }
    }
    let coarse = t.sink.coarse;
    Extraction {
        rules_added: t.sink.rules.len() - before,
        warnings: t.warnings,
        coarse,
    }
}

fn single_names(m: Option<&HashMap<String, u32>>) -> HashMap<String, bool> {
    m.map(|m| m.iter().map(|(k, &n)| (k.clone(), n == 1)).collect())
        .unwrap_or_default()
}

enum Flow {
    Next,
    Return,
}

impl Translator<'_> {
    fn warn(&mut self, line: usize, msg: impl AsRef<str>) {
        let w = format!(
            "{}:{}: {}",
            self.script,
            line + self.line_offset,
            msg.as_ref()
        );
        if !self.warnings.contains(&w) {
            self.warnings.push(w);
        }
    }

    fn hoist(&mut self, body: &[Stmt], scope: &Rc<Scope>) {
        for s in body {
            match s {
                Stmt::Func(f) => {
                    if let Some(n) = &f.name {
                        scope.assign(n, Value::Func(f.clone(), scope.clone()));
                    }
                    self.pending.push((f.clone(), scope.clone()));
                }
                Stmt::If(_, a, b) => {
                    self.hoist(a, scope);
                    self.hoist(b, scope);
                }
                Stmt::Block(b) | Stmt::Loop(_, b) => self.hoist(b, scope),
                Stmt::Branches(_, arms) => arms.iter().for_each(|a| self.hoist(a, scope)),
                _ => {}
            }
        }
    }

    fn exec_block(&mut self, body: &[Stmt], scope: &Rc<Scope>) -> Flow {
        for s in body {
            if let Flow::Return = self.exec(s, scope) {
                return Flow::Return;
            }
        }
        Flow::Next
    }

    fn exec(&mut self, s: &Stmt, scope: &Rc<Scope>) -> Flow {
        match s {
            Stmt::Var(ds) => {
                for (n, init) in ds {
                    if let Some(e) = init {
                        let v = self.eval(e, scope);
                        if !n.is_empty() {
                            scope.assign(n, v);
                        }
                    }
                }
            }
            Stmt::Expr(e) => {
                self.eval(e, scope);
            }
            Stmt::Return(e) => {
                if let Some(e) = e {
                    self.eval(e, scope);
                }
                return Flow::Return;
            }
            Stmt::If(c, a, b) => {
                self.eval(c, scope);
                self.exec_block(a, scope);
                self.exec_block(b, scope);
            }
            Stmt::Loop(h, b) => {
                for e in h {
                    self.eval(e, scope);
                }
                self.exec_block(b, scope);
            }
            Stmt::Block(b) => {
                return self.exec_block(b, scope);
            }
            Stmt::Branches(h, arms) => {
                for e in h {
                    self.eval(e, scope);
                }
                for a in arms {
                    self.exec_block(a, scope);
                }
            }
            Stmt::Func(_) | Stmt::Skipped { .. } => {}
        }
        Flow::Next
    }

    /// Runs `f` with a binding for `this` and the parameters.
    fn call_function(
        &mut self,
        f: &Rc<Function>,
        closure: &Rc<Scope>,
        this: Value,
        args: &[Value],
    ) {
        self.bound.insert(f.id);
        let key = (
            f.id,
            format!(
                "{}|{}",
                this.key(),
                args.iter().map(Value::key).collect::<Vec<_>>().join(",")
            ),
        );
        if self.depth >= MAX_DEPTH || !self.done.insert(key) {
            return;
        }
        let declared = Rc::new(single_names(self.decls.counts.get(&f.id)));
        let scope = Rc::new(Scope {
            declared,
            values: RefCell::default(),
            this: if f.arrow { closure.this.clone() } else { this },
            parent: Some(closure.clone()),
        });
        for (i, p) in f.params.iter().enumerate() {
            if !p.is_empty() {
                scope.assign(p, args.get(i).cloned().unwrap_or(Value::Unknown));
            }
        }
        self.depth += 1;
        self.hoist(&f.body, &scope);
        self.exec_block(&f.body, &scope);
        self.depth -= 1;
    }

    fn eval(&mut self, e: &Expr, scope: &Rc<Scope>) -> Value {
        match e {
            Expr::Ident(n) => match n.as_str() {
                "$" | "jQuery" => Value::Dollar,
                "document" | "window" => Value::Document,
                _ => scope.lookup(n).unwrap_or(Value::Unknown),
            },
            Expr::This => scope.this.clone(),
            Expr::Str(s) | Expr::Template(s) => Value::Str(s.clone()),
            Expr::Func(f) => {
                self.pending.push((f.clone(), scope.clone()));
                Value::Func(f.clone(), scope.clone())
            }
            Expr::Binary("+", a, b) => {
                let (a, b) = (self.eval(a, scope), self.eval(b, scope));
                match (a, b) {
                    // Unknown parts are assumed to carry no markup.
                    (Value::Str(x), Value::Str(y)) => Value::Str(x + &y),
                    (Value::Str(x), _) | (_, Value::Str(x)) => Value::Str(x),
                    _ => Value::Unknown,
                }
            }
            Expr::Assign(t, v) => {
                let val = self.eval(v, scope);
                match &**t {
                    Expr::Ident(n) => scope.assign(n, val.clone()),
                    Expr::Member(obj, name) => {
                        if let Some(fname) = fn_registration(obj, name) {
                            if let Value::Func(f, c) = &val {
                                self.user_fns.insert(fname, (f.clone(), c.clone()));
                            }
                        } else {
                            self.eval(obj, scope);
                        }
                    }
                    other => {
                        self.eval(other, scope);
                    }
                }
                val
            }
            Expr::Cond(c, a, b) => {
                self.eval(c, scope);
                let a = self.eval(a, scope);
                let b = self.eval(b, scope);
                if a.key() == b.key() {
                    a
                } else {
                    Value::Unknown
                }
            }
            Expr::Seq(xs) => {
                let mut last = Value::Unknown;
                for x in xs {
                    last = self.eval(x, scope);
                }
                last
            }
            Expr::Call { callee, args, line } => self.eval_call(callee, args, *line, scope),
            _ => {
                for_each_child_mut(e, |c| {
                    self.eval(c, scope);
                });
                Value::Unknown
            }
        }
    }

    fn eval_call(&mut self, callee: &Expr, args: &[Expr], line: usize, scope: &Rc<Scope>) -> Value {
        if let Expr::Member(obj, name) = callee {
            let target = self.eval(obj, scope);
            let vals: Vec<Value> = args.iter().map(|a| self.eval(a, scope)).collect();
            return match target {
                Value::Jq(stack) => self.method(stack, name, &vals, line),
                Value::Document if name == "ready" => {
                    let this = Value::Jq(JQueryStack::single(self.root.clone()));
                    self.run_handlers(&vals, this, &[]);
                    Value::Unknown
                }
                Value::Detached(html) => {
                    self.warn(
                        line,
                        format!("{name}() on elements not yet in the document is not supported"),
                    );
                    let _ = html;
                    Value::Unknown
                }
                Value::Unknown if UPDATES.contains(&name.as_str()) => {
                    self.warn(
                        line,
                        format!("{name}() on an untracked value; assuming any node"),
                    );
                    self.method(JQueryStack::single(Guard::True), name, &vals, line)
                }
                Value::Func(f, c) if name == "call" || name == "apply" => {
                    let this = vals.first().cloned().unwrap_or(Value::Unknown);
                    let rest: Vec<Value> = if name == "call" {
                        vals.iter().skip(1).cloned().collect()
                    } else {
                        Vec::new()
                    };
                    self.call_function(&f, &c, this, &rest);
                    Value::Unknown
                }
                _ => Value::Unknown,
            };
        }
        let f = self.eval(callee, scope);
        let vals: Vec<Value> = args.iter().map(|a| self.eval(a, scope)).collect();
        match f {
            Value::Dollar => self.dollar(&vals, line),
            Value::Func(f, c) => {
                self.call_function(&f, &c, Value::Unknown, &vals);
                Value::Unknown
            }
            _ => Value::Unknown,
        }
    }

    /// `$(x)` and `$(x, context)`.
    fn dollar(&mut self, args: &[Value], line: usize) -> Value {
        let Some(first) = args.first() else {
            self.warn(line, "$() with no arguments selects nothing");
            return Value::Unknown;
        };
        let base = match first {
            Value::Func(f, c) => {
                let this = Value::Jq(JQueryStack::single(self.root.clone()));
                self.call_function(&f.clone(), &c.clone(), this, &[]);
                return Value::Unknown;
            }
            Value::Str(s) if s.trim_start().starts_with('<') => return Value::Detached(s.clone()),
            Value::Str(s) => self.selector_guard(s, line),
            Value::Jq(st) => st.top().clone(),
            Value::Document => self.root.clone(),
            Value::Detached(s) => return Value::Detached(s.clone()),
            _ => {
                self.warn(line, "selection from an untracked value; assuming any node");
                Guard::True
            }
        };
        let g = match args.get(1) {
            None => base,
            Some(Value::Jq(ctx)) => and_true(base, Guard::up_plus(ctx.top().clone())),
            Some(Value::Document) => base,
            Some(_) => {
                self.warn(line, "untracked selection context; ignoring it");
                base
            }
        };
        Value::Jq(JQueryStack::single(g))
    }

    fn selector_guard(&mut self, s: &str, line: usize) -> Guard {
        let mut parts = Vec::new();
        for piece in s.split(',') {
            match parse_selector(piece) {
                Ok(sel) => parts.push(sel.to_guard(&mut self.sink.classes)),
                Err(e) => {
                    self.warn(
                        line,
                        format!("selector {:?}: {e}; assuming any node", piece.trim()),
                    );
                    return Guard::True;
                }
            }
        }
        parts.into_iter().reduce(Guard::or).unwrap_or(Guard::True)
    }

    /// The guard of an optional selector argument.
    fn arg_selector(&mut self, v: Option<&Value>, line: usize) -> Guard {
        match v {
            None => Guard::True,
            Some(Value::Str(s)) => self.selector_guard(s, line),
            Some(Value::Func(..)) => Guard::True,
            Some(_) => {
                self.warn(line, "non-constant selector argument; assuming any node");
                Guard::True
            }
        }
    }

    fn run_handlers(&mut self, vals: &[Value], this: Value, args: &[Value]) {
        for v in vals {
            if let Value::Func(f, c) = v {
                self.call_function(f, c, this.clone(), args);
            }
        }
    }

    fn method(&mut self, stack: JQueryStack, name: &str, args: &[Value], line: usize) -> Value {
        let g = stack.top().clone();
        let this = Value::Jq(stack.clone());
        match name {
            _ if SAME.contains(&name) => Value::Jq(stack),
            _ if REPEAT_TOP.contains(&name) => Value::Jq(stack.clone().push(g)),
            _ if IGNORED.contains(&name) => Value::Aborted,
            _ if HANDLERS.contains(&name) => {
                self.run_handlers(args, this, &[]);
                Value::Jq(stack)
            }
            "addBack" => {
                let mut s = stack.0;
                let top = s.pop().unwrap();
                match s.pop() {
                    Some(below) => s.push(Guard::or(top, below)),
                    None => s.push(top),
                }
                Value::Jq(JQueryStack(s))
            }
            "addClass" => {
                match args.first() {
                    Some(Value::Str(c)) => {
                        let names: BTreeSet<String> =
                            c.split_whitespace().map(|c| format!(".{c}")).collect();
                        if !names.is_empty() {
                            let label = names.iter().map(|n| self.sink.classes.intern(n)).collect();
                            self.sink.push(g, RewriteOp::AddClass(label));
                        }
                    }
                    _ => {
                        self.warn(
                            line,
                            "addClass with a non-constant argument; adding every known class",
                        );
                        let label = self.sink.css_classes();
                        if !label.is_empty() {
                            self.sink.push(g, RewriteOp::AddClass(label));
                        }
                    }
                }
                Value::Jq(stack)
            }
            "append" | "prepend" | "html" => {
                let Some(arg) = args.first() else {
                    // A getter.
                    return Value::Aborted;
                };
                match arg {
                    Value::Str(s) | Value::Detached(s) => {
                        let out = fragment_to_rules(self.sink, s, &g);
                        if out.coarse {
                            self.warn(
                                line,
                                format!("could not parse markup {s:?}; adding arbitrary subtrees"),
                            );
                        }
                    }
                    Value::Func(..) => self.warn(
                        line,
                        format!("{name}() with a function argument is not supported"),
                    ),
                    Value::Jq(_) => self.warn(
                        line,
                        format!("{name}() moving existing elements is not modeled"),
                    ),
                    _ => {}
                }
                Value::Jq(stack)
            }
            "ajax" => {
                let funcs = collect_funcs(args);
                self.run_handlers(&funcs, this, &[]);
                Value::Jq(stack)
            }
            "children" => {
                let sel = self.arg_selector(args.first(), line);
                rel(&stack, &g, Guard::up, sel)
            }
            "closest" => {
                let sel = self.arg_selector(args.first(), line);
                rel(
                    &stack,
                    &g,
                    |g| Guard::modal(treeprune_core::Dir::DownStar, g),
                    sel,
                )
            }
            "find" => {
                let sel = self.arg_selector(args.first(), line);
                rel(&stack, &g, Guard::up_plus, sel)
            }
            "has" => {
                let sel = self.arg_selector(args.first(), line);
                Value::Jq(
                    stack
                        .clone()
                        .push(and_true(g.clone(), Guard::down_plus(sel))),
                )
            }
            "next" | "nextAll" | "prev" | "prevAll" => {
                let sel = self.arg_selector(args.first(), line);
                rel(&stack, &g, |g| Guard::up(Guard::down(g)), sel)
            }
            "parent" => {
                let sel = self.arg_selector(args.first(), line);
                rel(&stack, &g, Guard::down, sel)
            }
            "parents" => {
                let sel = self.arg_selector(args.first(), line);
                rel(&stack, &g, Guard::down_plus, sel)
            }
            "end" => {
                let mut s = stack.0;
                s.pop();
                if s.is_empty() {
                    self.warn(line, "end() past the start of the chain");
                    return Value::Aborted;
                }
                Value::Jq(JQueryStack(s))
            }
            "each" => {
                self.run_handlers(args, this.clone(), &[Value::Unknown, this.clone()]);
                Value::Jq(stack)
            }
            "hover" => {
                self.run_handlers(args, this.clone(), std::slice::from_ref(&this));
                Value::Jq(stack)
            }
            "on" => {
                let handler_at = args.iter().rposition(|a| matches!(a, Value::Func(..)));
                let target = match (args.get(1), handler_at) {
                    (Some(v), Some(h)) if h > 1 => {
                        let sel = self.arg_selector(Some(v), line);
                        Value::Jq(stack.clone().push(and_true(sel, Guard::up_plus(g.clone()))))
                    }
                    _ => this,
                };
                if let Some(h) = handler_at {
                    self.run_handlers(&args[h..=h], target, &[]);
                }
                Value::Jq(stack)
            }
            _ => {
                if let Some((f, c)) = self.user_fns.get(name).cloned() {
                    self.call_function(&f, &c, this, args);
                    return Value::Jq(stack);
                }
                self.warn(
                    line,
                    format!("unsupported jQuery function {name}(); rest of the chain ignored"),
                );
                // Callbacks still run, just without a binding.
                Value::Aborted
            }
        }
    }
}

/// Pushes `sel ∧ build(top)`.
fn rel(stack: &JQueryStack, g: &Guard, build: impl Fn(Guard) -> Guard, sel: Guard) -> Value {
    Value::Jq(stack.clone().push(and_true(sel, build(g.clone()))))
}

fn for_each_child_mut(e: &Expr, mut f: impl FnMut(&Expr)) {
    for_each_child(e, &mut f);
}

fn collect_funcs(vals: &[Value]) -> Vec<Value> {
    vals.iter()
        .filter(|v| matches!(v, Value::Func(..)))
        .cloned()
        .collect()
}

/// `$.fn.NAME` or `jQuery.fn.NAME`.
fn fn_registration(obj: &Expr, name: &str) -> Option<String> {
    match obj {
        Expr::Member(base, fname) if fname == "fn" => match &**base {
            Expr::Ident(d) if d == "$" || d == "jQuery" => Some(name.to_string()),
            _ => None,
        },
        _ => None,
    }
}

fn and_true(a: Guard, b: Guard) -> Guard {
    match (a, b) {
        (Guard::True, b) => b,
        (a, Guard::True) => a,
        (a, b) => Guard::and(a, b),
    }
}

/// The result of translating one fragment.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FragmentRules {
    pub added: usize,
    /// The markup did not parse; catch-all rules were used instead.
    pub coarse: bool,
}

/// Rules that build the forest of `fragment` below nodes matching `base`.
/// Each inner node carries a fresh marker class that its children's rules
/// are guarded by.
pub fn fragment_to_rules(sink: &mut RuleSink, fragment: &str, base: &Guard) -> FragmentRules {
    let before = sink.rules.len();
    match parse_fragment(fragment) {
        Ok(forest) => {
            for el in &forest {
                build(sink, el, base.clone());
            }
            FragmentRules {
                added: sink.rules.len() - before,
                coarse: false,
            }
        }
        Err(_) => {
            sink.coarse = true;
            let any = sink.any_marker();
            let marker = Guard::Atom(any);
            sink.push(base.clone(), RewriteOp::AddChild([any].into()));
            sink.push(marker.clone(), RewriteOp::AddChild([any].into()));
            let all = sink.observed_classes();
            if !all.is_empty() {
                sink.push(marker, RewriteOp::AddClass(all));
            }
            FragmentRules {
                added: sink.rules.len() - before,
                coarse: true,
            }
        }
    }
}

fn build(sink: &mut RuleSink, el: &Element, guard: Guard) {
    let mut label: treeprune_core::Label = el
        .label_names()
        .iter()
        .map(|n| sink.classes.intern(n))
        .collect();
    sink.tags.insert(sink.classes.intern(&el.tag));
    if el.children.is_empty() {
        sink.push(guard, RewriteOp::AddChild(label));
        return;
    }
    let tmp = sink.fresh_tmp();
    label.insert(tmp);
    sink.push(guard, RewriteOp::AddChild(label));
    for c in &el.children {
        build(sink, c, Guard::Atom(tmp));
    }
}
