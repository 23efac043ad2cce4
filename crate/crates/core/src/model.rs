//! Parsed view of one code fragment: tokens, line counts, exception handlers
//! and the API objects the code works with.
//!
//! Types are resolved syntactically. An object's type comes from its
//! declaration, a `new T(..)` expression or a cast. Calls on receivers that
//! cannot be resolved (chained calls, unknown names) are left out of the
//! object model but stay in the token stream.
//!
//! Object tracking covers the task code only: statements inside `catch` and
//! `finally` bodies feed the handler metrics, not the usage graph.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::lexer::{tokenize, Lexed, Token};
use crate::syntax::{self, Catch, Declarator, Expr, Finally, LambdaBody, Span, Stmt, StmtKind, TypeRef};

/// Member name used for constructor calls in invocation multisets.
pub const CONSTRUCTOR: &str = "<init>";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ParseStatus {
    Full,
    Partial,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiObjectUse {
    /// Empty for anonymous instances and static-use pseudo objects.
    pub variable_name: String,
    pub type_name: String,
    pub fields_accessed: BTreeMap<String, usize>,
    pub methods_invoked: BTreeMap<String, usize>,
    pub constructor_called: bool,
}

impl ApiObjectUse {
    pub fn simple_type(&self) -> &str {
        simple_name(&self.type_name)
    }

    pub fn field_access_count(&self) -> usize {
        self.fields_accessed.values().sum()
    }

    /// Method invocations with a constructor call counted as `<init>`.
    pub fn invocations(&self) -> BTreeMap<String, usize> {
        let mut all = self.methods_invoked.clone();
        if self.constructor_called {
            *all.entry(CONSTRUCTOR.to_string()).or_default() += 1;
        }
        all
    }

    pub fn invocation_count(&self) -> usize {
        self.methods_invoked.values().sum::<usize>() + usize::from(self.constructor_called)
    }
}

pub fn simple_name(type_name: &str) -> &str {
    type_name.rsplit('.').next().unwrap_or(type_name)
}

/// A data dependency between two tracked objects, as indices into
/// [`SourceUnit::objects`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DependencyUse {
    pub consumer: usize,
    pub producer: usize,
    /// Producer-side member the value flows through; empty when the producer
    /// object itself is passed.
    pub access_point: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatementInfo {
    pub text: String,
    pub significant: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatchClause {
    pub exception_types: Vec<String>,
    pub statements: Vec<StatementInfo>,
}

impl CatchClause {
    pub fn significant_count(&self) -> usize {
        self.statements.iter().filter(|s| s.significant).count()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HandlerInfo {
    pub try_blocks: usize,
    pub catch_clauses: Vec<CatchClause>,
    pub finally_blocks: usize,
    pub handler_sloc: usize,
}

impl HandlerInfo {
    pub fn is_empty(&self) -> bool {
        self.try_blocks == 0 && self.catch_clauses.is_empty() && self.finally_blocks == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceUnit {
    pub raw_text: String,
    pub tokens: Vec<Token>,
    pub sloc: usize,
    /// One entry per `try` statement (or orphaned `catch`/`finally`), in
    /// source order.
    pub handlers: Vec<HandlerInfo>,
    pub objects: Vec<ApiObjectUse>,
    pub dependencies: Vec<DependencyUse>,
    pub parse_status: ParseStatus,
    /// Method-call sites attributed to tracked objects.
    pub tracked_call_sites: usize,
    /// Bytes the lexer could not tokenize.
    pub skipped_bytes: usize,
    /// Physical lines of the handler bodies and headers that hold code.
    pub handler_lines: Vec<usize>,
}

impl SourceUnit {
    pub fn physical_lines(&self) -> usize {
        self.raw_text.lines().count()
    }

    /// All handler structures merged into one summary.
    pub fn handler_summary(&self) -> HandlerInfo {
        extract_handlers(self)
    }
}

/// Parse a fragment. Never fails; see [`ParseStatus`].
pub fn parse(raw_text: &str) -> SourceUnit {
    let lexed = tokenize(raw_text);
    let code_lines = code_lines(&lexed);
    let parsed = syntax::parse_tokens(&lexed.tokens);

    let status = if parsed.recoveries == 0 {
        ParseStatus::Full
    } else if parsed.parsed_statements > 0 {
        ParseStatus::Partial
    } else {
        ParseStatus::Failed
    };

    let (handlers, handler_lines, objects, dependencies, tracked_call_sites) =
        if status == ParseStatus::Failed {
            (Vec::new(), Vec::new(), Vec::new(), Vec::new(), 0)
        } else {
            let mut hc = HandlerCollector {
                src: raw_text,
                code_lines: &code_lines,
                out: Vec::new(),
                lines: BTreeSet::new(),
            };
            hc.block(&parsed.stmts);
            let mut analyzer = Analyzer::new(&parsed.imports);
            analyzer.block(&parsed.stmts);
            let (objects, deps, sites) = analyzer.finish();
            (hc.out, hc.lines.into_iter().collect(), objects, deps, sites)
        };

    SourceUnit {
        raw_text: raw_text.to_string(),
        tokens: lexed.tokens.into_iter().map(|t| t.token).collect(),
        sloc: code_lines.len(),
        handlers,
        objects,
        dependencies,
        parse_status: status,
        tracked_call_sites,
        skipped_bytes: lexed.skipped,
        handler_lines,
    }
}

/// Merge the per-`try` handler records of `unit` into one summary.
pub fn extract_handlers(unit: &SourceUnit) -> HandlerInfo {
    let mut info = HandlerInfo::default();
    for h in &unit.handlers {
        info.try_blocks += h.try_blocks;
        info.finally_blocks += h.finally_blocks;
        info.catch_clauses.extend(h.catch_clauses.iter().cloned());
    }
    info.handler_sloc = unit.handler_lines.len();
    info
}

// Lines that hold at least one token.
fn code_lines(lexed: &Lexed) -> BTreeSet<usize> {
    lexed
        .tokens
        .iter()
        .flat_map(|t| t.line..=t.end_line)
        .collect()
}

// ------------------------------------------------------------------ handlers

struct HandlerCollector<'a> {
    src: &'a str,
    code_lines: &'a BTreeSet<usize>,
    out: Vec<HandlerInfo>,
    lines: BTreeSet<usize>,
}

impl HandlerCollector<'_> {
    fn block(&mut self, stmts: &[Stmt]) {
        for s in stmts {
            self.stmt(s);
        }
    }

    fn stmt(&mut self, s: &Stmt) {
        match &s.kind {
            StmtKind::Try {
                resources,
                body,
                catches,
                finally,
            } => {
                let mut info = HandlerInfo {
                    try_blocks: 1,
                    ..Default::default()
                };
                let mut own_lines = BTreeSet::new();
                for c in catches {
                    info.catch_clauses.push(self.catch_clause(c));
                    own_lines.extend(self.span_lines(c.span));
                }
                if let Some(f) = finally {
                    info.finally_blocks = 1;
                    own_lines.extend(self.span_lines(f.span));
                }
                info.handler_sloc = own_lines.len();
                self.lines.extend(own_lines);
                self.out.push(info);
                for r in resources {
                    self.stmt(r);
                }
                self.block(body);
                for c in catches {
                    self.block(&c.body);
                }
                if let Some(f) = finally {
                    self.block(&f.body);
                }
            }
            StmtKind::OrphanCatch(c) => {
                let own: BTreeSet<usize> = self.span_lines(c.span).collect();
                let info = HandlerInfo {
                    try_blocks: 0,
                    catch_clauses: vec![self.catch_clause(c)],
                    finally_blocks: 0,
                    handler_sloc: own.len(),
                };
                self.lines.extend(own);
                self.out.push(info);
                self.block(&c.body);
            }
            StmtKind::OrphanFinally(f) => {
                let own: BTreeSet<usize> = self.span_lines(f.span).collect();
                self.out.push(HandlerInfo {
                    finally_blocks: 1,
                    handler_sloc: own.len(),
                    ..Default::default()
                });
                self.lines.extend(own);
                self.block(&f.body);
            }
            _ => for_each_child_block(s, &mut |b| self.block(b)),
        }
    }

    fn span_lines(&self, span: Span) -> impl Iterator<Item = usize> + '_ {
        self.code_lines
            .range(span.first_line..=span.last_line)
            .copied()
    }

    fn catch_clause(&self, c: &Catch) -> CatchClause {
        let mut statements = Vec::new();
        collect_actions(&c.body, self.src, &mut statements);
        CatchClause {
            exception_types: c.types.iter().map(|t| t.name.clone()).collect(),
            statements,
        }
    }
}

/// Visit the statement lists nested directly inside `s` (not expressions).
fn for_each_child_block(s: &Stmt, f: &mut dyn FnMut(&[Stmt])) {
    match &s.kind {
        StmtKind::Block(b) | StmtKind::Sync { body: b, .. } | StmtKind::Switch { body: b, .. } => f(b),
        StmtKind::TypeDecl { body } => f(body),
        StmtKind::MethodDecl { body: Some(b), .. } => f(b),
        StmtKind::If { then, otherwise, .. } => {
            f(std::slice::from_ref(then));
            if let Some(o) = otherwise {
                f(std::slice::from_ref(o));
            }
        }
        StmtKind::Loop { body, .. } => f(std::slice::from_ref(body)),
        StmtKind::Labeled(inner) => f(std::slice::from_ref(inner)),
        _ => {}
    }
}

// Leaf statements of a handler body. Nested try statements contribute their
// try and finally bodies; their catch clauses are separate clauses.
fn collect_actions(stmts: &[Stmt], src: &str, out: &mut Vec<StatementInfo>) {
    for s in stmts {
        match &s.kind {
            StmtKind::Local { .. }
            | StmtKind::Expr(_)
            | StmtKind::Return(_)
            | StmtKind::Throw(_)
            | StmtKind::Jump
            | StmtKind::Assert(_) => out.push(StatementInfo {
                text: statement_text(src, s.span),
                significant: is_significant(&s.kind),
            }),
            StmtKind::Try { body, finally, .. } => {
                collect_actions(body, src, out);
                if let Some(f) = finally {
                    collect_actions(&f.body, src, out);
                }
            }
            StmtKind::TypeDecl { .. } | StmtKind::MethodDecl { .. } => {}
            _ => for_each_child_block(s, &mut |b| collect_actions(b, src, out)),
        }
    }
}

fn statement_text(src: &str, span: Span) -> String {
    src.get(span.start..span.end)
        .unwrap_or_default()
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
}

/// Stack-trace dumps and console prints are not handling actions.
fn is_significant(kind: &StmtKind) -> bool {
    let StmtKind::Expr(e) = kind else {
        return true;
    };
    if let Expr::Call { name, .. } = e {
        if name == "printStackTrace" {
            return false;
        }
    }
    !receiver_chain_starts_with_console(e)
}

fn receiver_chain_starts_with_console(e: &Expr) -> bool {
    let mut cur = e;
    loop {
        match cur {
            Expr::Call {
                target: Some(t), ..
            } => cur = t,
            Expr::Field { target, name } => {
                if matches!(**target, Expr::Name(ref n) if n == "System")
                    && (name == "out" || name == "err")
                {
                    return true;
                }
                cur = target;
            }
            _ => return false,
        }
    }
}

// ------------------------------------------------------------------ objects

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum ObjRef {
    Var(usize),
    Static(usize),
}

#[derive(Debug, Default)]
struct ObjState {
    variable: String,
    type_name: String,
    order: usize,
    constructed: bool,
    cast: bool,
    fields: BTreeMap<String, usize>,
    methods: BTreeMap<String, usize>,
}

impl ObjState {
    fn active(&self) -> bool {
        self.constructed || self.cast || !self.fields.is_empty() || !self.methods.is_empty()
    }
}

struct Analyzer<'i> {
    imports: &'i BTreeMap<String, String>,
    vars: Vec<ObjState>,
    statics: Vec<ObjState>,
    static_index: HashMap<String, usize>,
    scope: HashMap<String, usize>,
    deps: BTreeSet<(ObjRef, ObjRef, String)>,
    dep_order: Vec<(ObjRef, ObjRef, String)>,
    seq: usize,
    call_sites: usize,
    in_handler: usize,
}

impl<'i> Analyzer<'i> {
    fn new(imports: &'i BTreeMap<String, String>) -> Self {
        Self {
            imports,
            vars: Vec::new(),
            statics: Vec::new(),
            static_index: HashMap::new(),
            scope: HashMap::new(),
            deps: BTreeSet::new(),
            dep_order: Vec::new(),
            seq: 0,
            call_sites: 0,
            in_handler: 0,
        }
    }

    fn next_seq(&mut self) -> usize {
        self.seq += 1;
        self.seq
    }

    fn qualify(&self, ty: &TypeRef) -> String {
        if ty.name.contains('.') {
            return ty.name.clone();
        }
        self.imports
            .get(&ty.name)
            .cloned()
            .unwrap_or_else(|| ty.name.clone())
    }

    fn declare(&mut self, name: &str, ty: &TypeRef) -> Option<usize> {
        if !ty.is_object() || self.in_handler > 0 {
            return None;
        }
        let order = self.next_seq();
        self.vars.push(ObjState {
            variable: name.to_string(),
            type_name: self.qualify(ty),
            order,
            ..Default::default()
        });
        let idx = self.vars.len() - 1;
        self.scope.insert(name.to_string(), idx);
        Some(idx)
    }

    fn anonymous(&mut self, ty: &TypeRef) -> usize {
        let order = self.next_seq();
        self.vars.push(ObjState {
            type_name: self.qualify(ty),
            order,
            constructed: true,
            ..Default::default()
        });
        self.vars.len() - 1
    }

    fn static_ref(&mut self, type_name: &str) -> ObjRef {
        if let Some(&i) = self.static_index.get(type_name) {
            return ObjRef::Static(i);
        }
        let order = self.next_seq();
        let qualified = self
            .imports
            .get(type_name)
            .cloned()
            .unwrap_or_else(|| type_name.to_string());
        self.statics.push(ObjState {
            type_name: qualified,
            order,
            ..Default::default()
        });
        let i = self.statics.len() - 1;
        self.static_index.insert(type_name.to_string(), i);
        ObjRef::Static(i)
    }

    fn state(&mut self, r: ObjRef) -> &mut ObjState {
        match r {
            ObjRef::Var(i) => &mut self.vars[i],
            ObjRef::Static(i) => &mut self.statics[i],
        }
    }

    /// Resolve an expression used as a receiver to a tracked object.
    fn receiver(&mut self, e: &Expr) -> Option<ObjRef> {
        match e {
            Expr::Name(n) => {
                if let Some(&i) = self.scope.get(n) {
                    Some(ObjRef::Var(i))
                } else if looks_like_type(n) {
                    Some(self.static_ref(n))
                } else {
                    None
                }
            }
            Expr::Field { target, name } if matches!(**target, Expr::This) => {
                self.scope.get(name).map(|&i| ObjRef::Var(i))
            }
            _ => None,
        }
    }

    fn add_dep(&mut self, consumer: ObjRef, producer: ObjRef, access: String) {
        if consumer == producer {
            return;
        }
        let key = (consumer, producer, access);
        if self.deps.insert(key.clone()) {
            self.dep_order.push(key);
        }
    }

    // -------------------------------------------------------- statement walk

    fn block(&mut self, stmts: &[Stmt]) {
        for s in stmts {
            self.stmt(s);
        }
    }

    fn stmt(&mut self, s: &Stmt) {
        match &s.kind {
            StmtKind::Local { ty, vars } => {
                for d in vars {
                    self.local(ty, d);
                }
            }
            StmtKind::Expr(e) | StmtKind::Throw(e) => {
                self.expr(e);
            }
            StmtKind::Return(e) => {
                if let Some(e) = e {
                    self.expr(e);
                }
            }
            StmtKind::Assert(es) => {
                for e in es {
                    self.expr(e);
                }
            }
            StmtKind::Block(b) | StmtKind::TypeDecl { body: b } => self.block(b),
            StmtKind::Try {
                resources,
                body,
                catches,
                finally,
            } => {
                self.block(resources);
                self.block(body);
                self.in_handler += 1;
                for c in catches {
                    self.block(&c.body);
                }
                if let Some(Finally { body, .. }) = finally {
                    self.block(body);
                }
                self.in_handler -= 1;
            }
            StmtKind::OrphanCatch(Catch { body, .. }) | StmtKind::OrphanFinally(Finally { body, .. }) => {
                self.in_handler += 1;
                self.block(body);
                self.in_handler -= 1;
            }
            StmtKind::If {
                cond,
                then,
                otherwise,
            } => {
                self.expr(cond);
                self.stmt(then);
                if let Some(o) = otherwise {
                    self.stmt(o);
                }
            }
            StmtKind::Loop { header, body } => {
                self.block(header);
                self.stmt(body);
            }
            StmtKind::Switch { selector, body } => {
                self.expr(selector);
                self.block(body);
            }
            StmtKind::Sync { lock, body } => {
                self.expr(lock);
                self.block(body);
            }
            StmtKind::Labeled(inner) => self.stmt(inner),
            StmtKind::MethodDecl { params, body } => {
                for (ty, name) in params {
                    self.declare(name, ty);
                }
                if let Some(b) = body {
                    self.block(b);
                }
            }
            StmtKind::Empty | StmtKind::Jump => {}
        }
    }

    fn local(&mut self, ty: &TypeRef, d: &Declarator) {
        let mut effective = ty.clone();
        effective.dims += d.dims;
        if effective.name == "var" {
            match &d.init {
                Some(Expr::New { ty, .. }) | Some(Expr::Cast { ty, .. }) => {
                    effective = ty.clone();
                }
                _ => {}
            }
        }
        let declared = self.declare(&d.name, &effective);
        if let Some(init) = &d.init {
            self.bind(declared.map(ObjRef::Var), init);
        }
    }

    /// Handle `init` as the value stored into `target`.
    fn bind(&mut self, target: Option<ObjRef>, init: &Expr) {
        match (target, init) {
            (Some(t), Expr::New { args, body, .. }) => {
                self.state(t).constructed = true;
                self.args_into(t, args);
                self.anonymous_body(body.as_deref());
            }
            (Some(t), Expr::Cast { expr, .. }) => {
                self.state(t).cast = true;
                self.expr(expr);
            }
            _ => {
                self.expr(init);
            }
        }
    }

    fn anonymous_body(&mut self, body: Option<&[Stmt]>) {
        if let Some(b) = body {
            self.block(b);
        }
    }

    /// Walk an expression, recording member accesses. Returns the object the
    /// expression evaluates to, when it is a tracked object.
    fn expr(&mut self, e: &Expr) -> Option<ObjRef> {
        match e {
            Expr::Name(_) => None,
            Expr::This | Expr::Literal => None,
            Expr::Field { target, name } => {
                if let Some(r) = self.receiver(target) {
                    if self.in_handler == 0 {
                        *self.state(r).fields.entry(name.clone()).or_default() += 1;
                    }
                } else {
                    self.expr(target);
                }
                None
            }
            Expr::Call { target, name, args } => {
                match target.as_deref() {
                    Some(t) => {
                        let recv = self.receiver(t);
                        match recv {
                            Some(r) if self.in_handler == 0 => {
                                *self.state(r).methods.entry(name.clone()).or_default() += 1;
                                self.call_sites += 1;
                                self.args_into(r, args);
                            }
                            _ => {
                                if recv.is_none() {
                                    if let Some(created) = self.expr(t) {
                                        // call directly on a fresh `new T(..)`
                                        if self.in_handler == 0 {
                                            *self.state(created).methods.entry(name.clone()).or_default() += 1;
                                            self.call_sites += 1;
                                            self.args_into(created, args);
                                            return None;
                                        }
                                    }
                                }
                                self.plain_args(args);
                            }
                        }
                    }
                    None => self.plain_args(args),
                }
                None
            }
            Expr::New { ty, args, body } => {
                if self.in_handler > 0 || !ty.is_object() {
                    self.plain_args(args);
                    self.anonymous_body(body.as_deref());
                    return None;
                }
                let idx = self.anonymous(ty);
                self.args_into(ObjRef::Var(idx), args);
                self.anonymous_body(body.as_deref());
                Some(ObjRef::Var(idx))
            }
            Expr::NewArray { dims, init } => {
                self.plain_args(dims);
                self.plain_args(init);
                None
            }
            Expr::Cast { expr, .. } => self.expr(expr),
            Expr::Assign { target, value } => {
                let t = match &**target {
                    Expr::Name(n) => self.assign_target(n, value),
                    Expr::Field { target: inner, name } if matches!(**inner, Expr::This) => {
                        self.assign_target(name, value)
                    }
                    other => {
                        self.expr(other);
                        None
                    }
                };
                self.bind(t, value);
                None
            }
            Expr::Op(parts) | Expr::ArrayInit(parts) => {
                self.plain_args(parts);
                None
            }
            Expr::Lambda(body) => {
                match body {
                    LambdaBody::Expr(e) => {
                        self.expr(e);
                    }
                    LambdaBody::Block(b) => self.block(b),
                }
                None
            }
            Expr::MethodRef(inner) => {
                self.expr(inner);
                None
            }
            Expr::Switch { selector, body } => {
                self.expr(selector);
                self.block(body);
                None
            }
        }
    }

    // `x = new T(..)` on an undeclared name introduces the object implicitly.
    fn assign_target(&mut self, name: &str, value: &Expr) -> Option<ObjRef> {
        if let Some(&i) = self.scope.get(name) {
            return Some(ObjRef::Var(i));
        }
        match value {
            Expr::New { ty, .. } | Expr::Cast { ty, .. } => self.declare(name, ty).map(ObjRef::Var),
            _ => None,
        }
    }

    fn plain_args(&mut self, args: &[Expr]) {
        for a in args {
            self.expr(a);
        }
    }

    /// Walk call arguments flowing into `consumer`, recording dependencies.
    fn args_into(&mut self, consumer: ObjRef, args: &[Expr]) {
        for a in args {
            self.flow(consumer, a);
        }
    }

    fn flow(&mut self, consumer: ObjRef, e: &Expr) {
        if self.in_handler > 0 {
            self.expr(e);
            return;
        }
        match e {
            Expr::Name(n) => {
                if let Some(&i) = self.scope.get(n) {
                    self.add_dep(consumer, ObjRef::Var(i), String::new());
                }
            }
            Expr::Field { target, name } => {
                if let Some(r) = self.receiver(target) {
                    *self.state(r).fields.entry(name.clone()).or_default() += 1;
                    self.add_dep(consumer, r, name.clone());
                } else {
                    self.flow(consumer, target);
                }
            }
            Expr::Call {
                target: Some(t),
                name,
                args,
            } => {
                if let Some(r) = self.receiver(t) {
                    *self.state(r).methods.entry(name.clone()).or_default() += 1;
                    self.call_sites += 1;
                    self.args_into(r, args);
                    self.add_dep(consumer, r, name.clone());
                } else {
                    // chained call: the value comes from somewhere inside the chain
                    self.flow(consumer, t);
                    self.plain_args(args);
                }
            }
            Expr::New { .. } => {
                if let Some(created) = self.expr(e) {
                    self.add_dep(consumer, created, String::new());
                }
            }
            Expr::Cast { expr, .. } => self.flow(consumer, expr),
            Expr::Op(parts) => {
                for p in parts {
                    self.flow(consumer, p);
                }
            }
            other => {
                self.expr(other);
            }
        }
    }

    // Static uses of a type that also has instances fold into the first
    // instance; inactive objects not linked by any dependency are dropped.
    fn finish(self) -> (Vec<ApiObjectUse>, Vec<DependencyUse>, usize) {
        let Analyzer {
            vars,
            statics,
            dep_order,
            call_sites,
            ..
        } = self;

        let linked: BTreeSet<ObjRef> = dep_order
            .iter()
            .flat_map(|(c, p, _)| [*c, *p])
            .collect();

        let mut all: Vec<(ObjRef, ObjState)> = vars
            .into_iter()
            .enumerate()
            .map(|(i, s)| (ObjRef::Var(i), s))
            .chain(statics.into_iter().enumerate().map(|(i, s)| (ObjRef::Static(i), s)))
            .collect();

        // first instance per simple type name
        let mut first_instance: HashMap<String, ObjRef> = HashMap::new();
        for (r, s) in all.iter().filter(|(r, _)| matches!(r, ObjRef::Var(_))) {
            if s.active() || linked.contains(r) {
                let key = simple_name(&s.type_name).to_string();
                match first_instance.get(&key) {
                    Some(existing) => {
                        let existing_order = all
                            .iter()
                            .find(|(er, _)| er == existing)
                            .map_or(usize::MAX, |(_, es)| es.order);
                        if s.order < existing_order {
                            first_instance.insert(key, *r);
                        }
                    }
                    None => {
                        first_instance.insert(key, *r);
                    }
                }
            }
        }

        let mut redirect: HashMap<ObjRef, ObjRef> = HashMap::new();
        let mut folded: Vec<(ObjRef, ObjState)> = Vec::new();
        for (r, s) in all.iter_mut() {
            if let ObjRef::Static(_) = r {
                if let Some(target) = first_instance.get(simple_name(&s.type_name)) {
                    redirect.insert(*r, *target);
                    folded.push((*target, std::mem::take(s)));
                }
            }
        }
        for (target, s) in folded {
            if let Some((_, t)) = all.iter_mut().find(|(r, _)| *r == target) {
                for (k, v) in s.fields {
                    *t.fields.entry(k).or_default() += v;
                }
                for (k, v) in s.methods {
                    *t.methods.entry(k).or_default() += v;
                }
            }
        }

        let resolve = |r: ObjRef| redirect.get(&r).copied().unwrap_or(r);
        let linked: BTreeSet<ObjRef> = linked.into_iter().map(resolve).collect();

        let mut kept: Vec<(ObjRef, ObjState)> = all
            .into_iter()
            .filter(|(r, s)| !redirect.contains_key(r) && (s.active() || linked.contains(r)))
            .collect();
        kept.sort_by_key(|(_, s)| s.order);

        let index: HashMap<ObjRef, usize> = kept
            .iter()
            .enumerate()
            .map(|(i, (r, _))| (*r, i))
            .collect();

        let mut deps = Vec::new();
        let mut seen = BTreeSet::new();
        for (c, p, access) in dep_order {
            let (c, p) = (resolve(c), resolve(p));
            if c == p {
                continue;
            }
            if let (Some(&ci), Some(&pi)) = (index.get(&c), index.get(&p)) {
                if seen.insert((ci, pi, access.clone())) {
                    deps.push(DependencyUse {
                        consumer: ci,
                        producer: pi,
                        access_point: access,
                    });
                }
            }
        }

        let objects = kept
            .into_iter()
            .map(|(_, s)| ApiObjectUse {
                variable_name: s.variable,
                type_name: s.type_name,
                fields_accessed: s.fields,
                methods_invoked: s.methods,
                constructor_called: s.constructed,
            })
            .collect::<Vec<_>>();
        let sites = objects
            .iter()
            .map(|o| o.methods_invoked.values().sum::<usize>())
            .sum::<usize>();
        debug_assert_eq!(sites, call_sites);
        (objects, deps, call_sites)
    }
}

fn looks_like_type(name: &str) -> bool {
    name.chars().next().is_some_and(char::is_uppercase)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn object<'a>(u: &'a SourceUnit, ty: &str) -> &'a ApiObjectUse {
        u.objects
            .iter()
            .find(|o| o.simple_type() == ty)
            .unwrap_or_else(|| panic!("no {ty} in {:?}", u.objects))
    }

    #[test]
    fn single_object() {
        let u = parse("URL u = new URL(s);");
        assert_eq!(u.parse_status, ParseStatus::Full);
        assert_eq!(u.objects.len(), 1);
        assert!(u.objects[0].constructor_called);
        assert_eq!(u.objects[0].variable_name, "u");
        assert!(u.dependencies.is_empty());
    }

    #[test]
    fn member_access_dependency() {
        let u = parse("A a = new A(); B b = new B(a.f());");
        assert_eq!(
            u.dependencies,
            vec![DependencyUse {
                consumer: 1,
                producer: 0,
                access_point: "f".into()
            }]
        );
        assert_eq!(object(&u, "A").methods_invoked.get("f"), Some(&1));
    }

    #[test]
    fn degenerate_fragment() {
        let u = parse("x +");
        assert_eq!(u.parse_status, ParseStatus::Failed);
        assert_eq!(lexer_texts(&u), vec!["x", "+"]);
        assert!(u.objects.is_empty() && u.handlers.is_empty());
    }

    fn lexer_texts(u: &SourceUnit) -> Vec<&str> {
        u.tokens.iter().map(|t| t.text.as_str()).collect()
    }

    #[test]
    fn empty_catch_has_no_actions() {
        let u = parse("try { go(); } catch(Exception e){}");
        let h = extract_handlers(&u);
        assert_eq!(h.catch_clauses.len(), 1);
        assert_eq!(h.catch_clauses[0].significant_count(), 0);
    }

    #[test]
    fn stack_trace_and_console_are_insignificant() {
        let u = parse(
            "try { go(); } catch(IOException e){ e.printStackTrace(); System.err.println(\"x\"); System.out.printf(\"%s\", e); Log.warn(\"w\", e); }",
        );
        let h = extract_handlers(&u);
        let flags: Vec<bool> = h.catch_clauses[0].statements.iter().map(|s| s.significant).collect();
        assert_eq!(flags, vec![false, false, false, true]);
        assert_eq!(h.catch_clauses[0].statements[3].text, "Log.warn(\"w\", e);");
    }

    #[test]
    fn no_handlers() {
        let u = parse("int a = 1;\nfoo(a);");
        assert!(extract_handlers(&u).is_empty());
        assert_eq!(u.handler_lines.len(), 0);
    }

    #[test]
    fn handler_lines_cover_headers_and_closing_braces() {
        let src = "try {\n  a();\n} catch (E1 e) {\n  b();\n}\nfinally {\n  c();\n}\nd();\n";
        let u = parse(src);
        assert_eq!(u.sloc, 9);
        assert_eq!(u.handler_lines, vec![3, 4, 5, 6, 7, 8]);
    }

    #[test]
    fn sloc_skips_blank_and_comment_lines() {
        let u = parse("// c\n\nint a;\n/* x\n y */\n  b(); // tail\n");
        assert_eq!(u.sloc, 2);
        assert!(u.physical_lines() >= u.sloc);
    }

    #[test]
    fn static_use_creates_pseudo_object() {
        let u = parse("Thread.sleep(10); Files.readAllLines(p);");
        let t = object(&u, "Thread");
        assert_eq!(t.variable_name, "");
        assert_eq!(t.methods_invoked.get("sleep"), Some(&1));
    }

    #[test]
    fn static_use_folds_into_instance() {
        let u = parse("HttpURLConnection c = (HttpURLConnection) u.openConnection();\nif (c.getResponseCode() == HttpURLConnection.HTTP_OK) {}");
        assert_eq!(u.objects.len(), 1);
        let c = &u.objects[0];
        assert_eq!(c.fields_accessed.get("HTTP_OK"), Some(&1));
        assert_eq!(c.methods_invoked.get("getResponseCode"), Some(&1));
    }

    #[test]
    fn imports_qualify_types() {
        let u = parse("import java.net.URL;\nclass A { void f() { URL u = new URL(s); } }");
        assert_eq!(u.objects[0].type_name, "java.net.URL");
        assert_eq!(u.objects[0].simple_type(), "URL");
    }

    #[test]
    fn inactive_declarations_are_not_objects() {
        let u = parse("String line = null; Foo f; Bar b = new Bar();");
        assert_eq!(u.objects.len(), 1);
        assert_eq!(u.objects[0].type_name, "Bar");
    }

    #[test]
    fn same_type_variables_stay_distinct() {
        let u = parse("File a = new File(x); File b = new File(a, y);");
        assert_eq!(u.objects.len(), 2);
        assert_eq!(u.dependencies.len(), 1);
        assert_eq!(u.dependencies[0].access_point, "");
    }

    #[test]
    fn handler_code_is_not_tracked() {
        let u = parse("try { a.run(); } catch (IOException e) { Log.warn(\"x\", e); Dialog d = new Dialog(); }");
        assert!(u.objects.iter().all(|o| o.simple_type() != "Log" && o.simple_type() != "Dialog"));
    }

    #[test]
    fn call_site_count_matches_multisets() {
        let src = "Socket s = new Socket(h, 80); OutputStream o = s.getOutputStream(); o.write(b); o.flush(); s.close(); Math.max(1, 2);";
        let u = parse(src);
        let sum: usize = u.objects.iter().map(|o| o.methods_invoked.values().sum::<usize>()).sum();
        assert_eq!(sum, u.tracked_call_sites);
        assert_eq!(sum, 5);
    }

    #[test]
    fn orphan_catch_is_partial() {
        let u = parse("go(); } catch (IOException e) { log(e); }");
        assert_eq!(u.parse_status, ParseStatus::Partial);
        let h = extract_handlers(&u);
        assert_eq!(h.try_blocks, 0);
        assert_eq!(h.catch_clauses.len(), 1);
    }

    #[test]
    fn deterministic() {
        let src = "A a = new A(); B b = new B(a.f(), a); a.g(b.h);";
        assert_eq!(parse(src), parse(src));
    }
}
