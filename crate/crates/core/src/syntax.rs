//! Error-tolerant recursive-descent parser for Java statements and
//! expressions.
//!
//! Fragments are accepted as they come: bare statements, method bodies, whole
//! compilation units, or any mix. Unbalanced braces and unparseable statements
//! are skipped and counted as recoveries instead of aborting the parse.

use std::collections::BTreeMap;

use crate::lexer::{SpannedToken, TokenKind};

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct TypeRef {
    /// Dotted name without type arguments, e.g. `java.net.URL` or `Map.Entry`.
    pub name: String,
    pub dims: usize,
    pub primitive: bool,
}

impl TypeRef {
    pub fn simple(&self) -> &str {
        self.name.rsplit('.').next().unwrap_or(&self.name)
    }

    /// True when values of this type can carry API members.
    pub fn is_object(&self) -> bool {
        !self.primitive && self.dims == 0 && self.name != "var"
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Expr {
    Name(String),
    This,
    Literal,
    Field {
        target: Box<Expr>,
        name: String,
    },
    Call {
        target: Option<Box<Expr>>,
        name: String,
        args: Vec<Expr>,
    },
    New {
        ty: TypeRef,
        args: Vec<Expr>,
        body: Option<Vec<Stmt>>,
    },
    NewArray {
        dims: Vec<Expr>,
        init: Vec<Expr>,
    },
    Cast {
        ty: TypeRef,
        expr: Box<Expr>,
    },
    Assign {
        target: Box<Expr>,
        value: Box<Expr>,
    },
    /// Unary, binary, ternary, index and similar operator forms.
    Op(Vec<Expr>),
    Lambda(LambdaBody),
    MethodRef(Box<Expr>),
    ArrayInit(Vec<Expr>),
    Switch {
        selector: Box<Expr>,
        body: Vec<Stmt>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum LambdaBody {
    Expr(Box<Expr>),
    Block(Vec<Stmt>),
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Stmt {
    pub kind: StmtKind,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub(crate) struct Span {
    pub first_line: usize,
    pub last_line: usize,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Declarator {
    pub name: String,
    pub dims: usize,
    pub init: Option<Expr>,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Catch {
    pub types: Vec<TypeRef>,
    pub var: String,
    pub body: Vec<Stmt>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Finally {
    pub body: Vec<Stmt>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum StmtKind {
    Empty,
    Local {
        ty: TypeRef,
        vars: Vec<Declarator>,
    },
    Expr(Expr),
    Block(Vec<Stmt>),
    Try {
        resources: Vec<Stmt>,
        body: Vec<Stmt>,
        catches: Vec<Catch>,
        finally: Option<Finally>,
    },
    /// A `catch` with no preceding `try`, seen in truncated snippets.
    OrphanCatch(Catch),
    OrphanFinally(Finally),
    If {
        cond: Expr,
        then: Box<Stmt>,
        otherwise: Option<Box<Stmt>>,
    },
    Loop {
        header: Vec<Stmt>,
        body: Box<Stmt>,
    },
    Switch {
        selector: Expr,
        body: Vec<Stmt>,
    },
    Sync {
        lock: Expr,
        body: Vec<Stmt>,
    },
    Return(Option<Expr>),
    Throw(Expr),
    Jump,
    Assert(Vec<Expr>),
    Labeled(Box<Stmt>),
    TypeDecl {
        body: Vec<Stmt>,
    },
    MethodDecl {
        params: Vec<(TypeRef, String)>,
        body: Option<Vec<Stmt>>,
    },
}

#[derive(Debug, Clone, Default)]
pub(crate) struct ParsedSource {
    pub stmts: Vec<Stmt>,
    pub recoveries: usize,
    pub parsed_statements: usize,
    /// Simple name to qualified name, from single-type imports.
    pub imports: BTreeMap<String, String>,
}

#[derive(Debug)]
struct Fail;

type PResult<T> = Result<T, Fail>;

const MODIFIERS: &[&str] = &[
    "public",
    "private",
    "protected",
    "static",
    "final",
    "abstract",
    "native",
    "transient",
    "volatile",
    "strictfp",
    "default",
    "synchronized",
];

const PRIMITIVES: &[&str] = &[
    "boolean", "byte", "char", "short", "int", "long", "float", "double", "void",
];

const ASSIGN_OPS: &[&str] = &[
    "=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>=", ">>>=",
];

const BINARY_OPS: &[&str] = &[
    "||", "&&", "|", "^", "&", "==", "!=", "<", ">", "<=", ">=", "<<", ">>", ">>>", "+", "-",
    "*", "/", "%",
];

pub(crate) fn parse_tokens(toks: &[SpannedToken]) -> ParsedSource {
    let mut p = Parser {
        toks,
        pos: 0,
        gt_pending: 0,
        recoveries: 0,
        parsed: 0,
        imports: BTreeMap::new(),
    };
    let stmts = p.block_body(false);
    ParsedSource {
        stmts,
        recoveries: p.recoveries,
        parsed_statements: p.parsed,
        imports: p.imports,
    }
}

struct Parser<'t> {
    toks: &'t [SpannedToken],
    pos: usize,
    // Remaining `>` inside a partially consumed `>>` or `>>>` token.
    gt_pending: usize,
    recoveries: usize,
    parsed: usize,
    imports: BTreeMap<String, String>,
}

impl<'t> Parser<'t> {
    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn text(&self, off: usize) -> Option<&'t str> {
        self.toks.get(self.pos + off).map(|t| t.token.text.as_str())
    }

    fn kind(&self, off: usize) -> Option<TokenKind> {
        self.toks.get(self.pos + off).map(|t| t.token.kind)
    }

    fn is(&self, text: &str) -> bool {
        self.gt_pending == 0 && self.text(0) == Some(text)
    }

    fn is_at(&self, off: usize, text: &str) -> bool {
        self.text(off) == Some(text)
    }

    fn is_ident(&self, off: usize) -> bool {
        self.kind(off) == Some(TokenKind::Identifier)
    }

    fn eat(&mut self, text: &str) -> bool {
        if self.is(text) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, text: &str) -> PResult<()> {
        if self.eat(text) {
            Ok(())
        } else {
            Err(Fail)
        }
    }

    fn ident(&mut self) -> PResult<String> {
        if self.gt_pending == 0 && self.is_ident(0) {
            self.pos += 1;
            Ok(self.toks[self.pos - 1].token.text.clone())
        } else {
            Err(Fail)
        }
    }

    fn save(&self) -> (usize, usize) {
        (self.pos, self.gt_pending)
    }

    fn restore(&mut self, s: (usize, usize)) {
        self.pos = s.0;
        self.gt_pending = s.1;
    }

    fn span_from(&self, start_idx: usize) -> Span {
        let first = &self.toks[start_idx.min(self.toks.len() - 1)];
        let last_idx = self.pos.saturating_sub(1).max(start_idx).min(self.toks.len() - 1);
        let last = &self.toks[last_idx];
        Span {
            first_line: first.line,
            last_line: last.end_line,
            start: first.start,
            end: last.end,
        }
    }

    // ---------------------------------------------------------------- blocks

    fn block_body(&mut self, until_close: bool) -> Vec<Stmt> {
        let mut out = Vec::new();
        loop {
            if self.at_end() {
                if until_close {
                    self.recoveries += 1;
                }
                break;
            }
            if self.is("}") {
                self.pos += 1;
                if until_close {
                    break;
                }
                // stray closing brace
                self.recoveries += 1;
                continue;
            }
            if let Some(s) = self.statement_or_recover() {
                out.push(s);
            }
        }
        out
    }

    fn block(&mut self) -> PResult<Vec<Stmt>> {
        self.expect("{")?;
        Ok(self.block_body(true))
    }

    fn statement_or_recover(&mut self) -> Option<Stmt> {
        let start = self.pos;
        match self.statement() {
            Ok(s) => {
                self.parsed += 1;
                Some(s)
            }
            Err(Fail) => {
                self.gt_pending = 0;
                self.pos = start;
                self.recover();
                None
            }
        }
    }

    // Skip to the end of the current statement: past the next `;` at depth 0,
    // past a balanced `{...}` group, or up to a `}` closing the enclosing block.
    fn recover(&mut self) {
        self.recoveries += 1;
        let mut depth = 0usize;
        let mut advanced = false;
        while let Some(t) = self.text(0) {
            match t {
                "(" | "[" => depth += 1,
                ")" | "]" => depth = depth.saturating_sub(1),
                ";" if depth == 0 => {
                    self.pos += 1;
                    return;
                }
                "{" => {
                    self.skip_balanced("{", "}");
                    if depth == 0 {
                        return;
                    }
                    advanced = true;
                    continue;
                }
                "}" => {
                    if !advanced {
                        self.pos += 1;
                    }
                    return;
                }
                _ => {}
            }
            self.pos += 1;
            advanced = true;
        }
    }

    fn skip_balanced(&mut self, open: &str, close: &str) {
        let mut depth = 0usize;
        while let Some(t) = self.text(0) {
            self.pos += 1;
            if t == open {
                depth += 1;
            } else if t == close {
                depth -= 1;
                if depth == 0 {
                    return;
                }
            }
        }
    }

    // ------------------------------------------------------------ statements

    fn statement(&mut self) -> PResult<Stmt> {
        let start = self.pos;
        let kind = self.statement_kind()?;
        Ok(Stmt {
            kind,
            span: self.span_from(start),
        })
    }

    fn statement_kind(&mut self) -> PResult<StmtKind> {
        let Some(t) = self.text(0) else {
            return Err(Fail);
        };
        let keyword = self.kind(0) == Some(TokenKind::Keyword);
        match t {
            ";" => {
                self.pos += 1;
                Ok(StmtKind::Empty)
            }
            "{" => Ok(StmtKind::Block(self.block()?)),
            "@" if !self.is_at(1, "interface") => {
                self.skip_annotations();
                self.statement_kind()
            }
            "try" if keyword => self.try_statement(),
            "catch" if keyword => {
                let c = self.catch_clause()?;
                Ok(StmtKind::OrphanCatch(c))
            }
            "finally" if keyword => Ok(StmtKind::OrphanFinally(self.finally_clause()?)),
            "if" if keyword => {
                self.pos += 1;
                let cond = self.paren_expr()?;
                let then = Box::new(self.statement()?);
                let otherwise = if self.eat("else") {
                    Some(Box::new(self.statement()?))
                } else {
                    None
                };
                Ok(StmtKind::If {
                    cond,
                    then,
                    otherwise,
                })
            }
            "else" if keyword => {
                // dangling else in a truncated snippet
                self.pos += 1;
                self.recoveries += 1;
                self.statement_kind()
            }
            "while" if keyword => {
                self.pos += 1;
                let cond = self.paren_expr()?;
                let header = vec![self.expr_stmt_from(cond)];
                let body = Box::new(self.statement()?);
                Ok(StmtKind::Loop { header, body })
            }
            "do" if keyword => {
                self.pos += 1;
                let body = Box::new(self.statement()?);
                self.expect("while")?;
                let cond = self.paren_expr()?;
                self.eat(";");
                Ok(StmtKind::Loop {
                    header: vec![self.expr_stmt_from(cond)],
                    body,
                })
            }
            "for" if keyword => self.for_statement(),
            "switch" if keyword => {
                self.pos += 1;
                let selector = self.paren_expr()?;
                let body = self.switch_body()?;
                Ok(StmtKind::Switch { selector, body })
            }
            "synchronized" if keyword && self.is_at(1, "(") => {
                self.pos += 1;
                let lock = self.paren_expr()?;
                let body = self.block()?;
                Ok(StmtKind::Sync { lock, body })
            }
            "return" if keyword => {
                self.pos += 1;
                let value = if self.is(";") { None } else { Some(self.expr()?) };
                self.end_statement()?;
                Ok(StmtKind::Return(value))
            }
            "throw" if keyword => {
                self.pos += 1;
                let value = self.expr()?;
                self.end_statement()?;
                Ok(StmtKind::Throw(value))
            }
            "break" | "continue" if keyword => {
                self.pos += 1;
                if self.is_ident(0) {
                    self.pos += 1;
                }
                self.end_statement()?;
                Ok(StmtKind::Jump)
            }
            "assert" if keyword => {
                self.pos += 1;
                let mut exprs = vec![self.expr()?];
                if self.eat(":") {
                    exprs.push(self.expr()?);
                }
                self.end_statement()?;
                Ok(StmtKind::Assert(exprs))
            }
            "import" | "package" if keyword => self.import_or_package(),
            "case" if keyword => {
                self.switch_label()?;
                Ok(StmtKind::Empty)
            }
            "default" if keyword && (self.is_at(1, ":") || self.is_at(1, "->")) => {
                self.switch_label()?;
                Ok(StmtKind::Empty)
            }
            "yield" if !keyword && !matches!(self.text(1), Some("=" | "(" | "." | "[")) => {
                self.pos += 1;
                let value = self.expr()?;
                self.end_statement()?;
                Ok(StmtKind::Return(Some(value)))
            }
            _ if self.is_ident(0) && self.is_at(1, ":") && !self.is_at(2, ":") => {
                self.pos += 2;
                Ok(StmtKind::Labeled(Box::new(self.statement()?)))
            }
            _ => self.declaration_or_expression(),
        }
    }

    fn end_statement(&mut self) -> PResult<()> {
        // A missing `;` right before a closing brace is tolerated.
        if self.eat(";") {
            Ok(())
        } else if self.is("}") || self.at_end() {
            self.recoveries += 1;
            Ok(())
        } else {
            Err(Fail)
        }
    }

    fn expr_stmt_from(&self, e: Expr) -> Stmt {
        Stmt {
            kind: StmtKind::Expr(e),
            span: Span::default(),
        }
    }

    fn import_or_package(&mut self) -> PResult<StmtKind> {
        let is_import = self.is("import");
        self.pos += 1;
        self.eat("static");
        let mut parts = vec![self.ident()?];
        let mut wildcard = false;
        while self.eat(".") {
            if self.eat("*") {
                wildcard = true;
                break;
            }
            parts.push(self.ident()?);
        }
        self.end_statement()?;
        if is_import && !wildcard && parts.len() > 1 {
            let simple = parts.last().cloned().unwrap_or_default();
            self.imports.insert(simple, parts.join("."));
        }
        Ok(StmtKind::Empty)
    }

    fn switch_label(&mut self) -> PResult<()> {
        // `case A, B:` / `default:` / `case X ->`
        self.pos += 1;
        let mut depth = 0usize;
        while let Some(t) = self.text(0) {
            match t {
                "(" => depth += 1,
                ")" => depth = depth.saturating_sub(1),
                ":" | "->" if depth == 0 => {
                    self.pos += 1;
                    return Ok(());
                }
                ";" | "{" | "}" => return Err(Fail),
                _ => {}
            }
            self.pos += 1;
        }
        Err(Fail)
    }

    fn switch_body(&mut self) -> PResult<Vec<Stmt>> {
        self.block()
    }

    fn paren_expr(&mut self) -> PResult<Expr> {
        self.expect("(")?;
        let e = self.expr()?;
        self.expect(")")?;
        Ok(e)
    }

    fn skip_annotations(&mut self) {
        while self.is("@") && !self.is_at(1, "interface") {
            self.pos += 1;
            let _ = self.ident();
            while self.is(".") && self.is_ident(1) {
                self.pos += 2;
            }
            if self.is("(") {
                self.skip_balanced("(", ")");
            }
        }
    }

    fn skip_modifiers(&mut self) -> bool {
        let mut any = false;
        loop {
            if self.is("@") && !self.is_at(1, "interface") {
                self.skip_annotations();
                any = true;
            } else if self.kind(0) == Some(TokenKind::Keyword)
                && self.text(0).is_some_and(|t| MODIFIERS.contains(&t))
                && !(self.is("synchronized") && self.is_at(1, "("))
            {
                self.pos += 1;
                any = true;
            } else if self.is("sealed") || self.is("non") && self.is_at(1, "-") {
                // sealed / non-sealed
                self.pos += if self.is("non") { 3 } else { 1 };
                any = true;
            } else {
                return any;
            }
        }
    }

    fn try_statement(&mut self) -> PResult<StmtKind> {
        self.expect("try")?;
        let mut resources = Vec::new();
        if self.eat("(") {
            while !self.is(")") {
                let start = self.pos;
                self.skip_modifiers();
                let save = self.save();
                let kind = match self.local_head() {
                    Some(ty) => {
                        let name = self.ident()?;
                        self.expect("=")?;
                        let init = self.expr()?;
                        StmtKind::Local {
                            ty,
                            vars: vec![Declarator {
                                name,
                                dims: 0,
                                init: Some(init),
                            }],
                        }
                    }
                    None => {
                        self.restore(save);
                        StmtKind::Expr(self.expr()?)
                    }
                };
                resources.push(Stmt {
                    kind,
                    span: self.span_from(start),
                });
                if !self.eat(";") {
                    break;
                }
            }
            self.expect(")")?;
        }
        let body = self.block()?;
        let mut catches = Vec::new();
        while self.is("catch") {
            catches.push(self.catch_clause()?);
        }
        let finally = if self.is("finally") {
            Some(self.finally_clause()?)
        } else {
            None
        };
        Ok(StmtKind::Try {
            resources,
            body,
            catches,
            finally,
        })
    }

    fn catch_clause(&mut self) -> PResult<Catch> {
        let start = self.pos;
        self.expect("catch")?;
        self.expect("(")?;
        self.skip_modifiers();
        let mut types = vec![self.type_ref()?];
        while self.eat("|") {
            types.push(self.type_ref()?);
        }
        let var = self.ident()?;
        self.expect(")")?;
        let body = self.block()?;
        Ok(Catch {
            types,
            var,
            body,
            span: self.span_from(start),
        })
    }

    fn finally_clause(&mut self) -> PResult<Finally> {
        let start = self.pos;
        self.expect("finally")?;
        let body = self.block()?;
        Ok(Finally {
            body,
            span: self.span_from(start),
        })
    }

    fn for_statement(&mut self) -> PResult<StmtKind> {
        self.expect("for")?;
        self.expect("(")?;
        let mut header = Vec::new();
        let start = self.pos;
        self.skip_modifiers();
        let save = self.save();
        if let Some(ty) = self.local_head() {
            if self.is_ident(0) && self.is_at(1, ":") {
                // enhanced for
                let name = self.ident()?;
                self.pos += 1;
                let iterable = self.expr()?;
                self.expect(")")?;
                header.push(Stmt {
                    kind: StmtKind::Local {
                        ty,
                        vars: vec![Declarator {
                            name,
                            dims: 0,
                            init: None,
                        }],
                    },
                    span: self.span_from(start),
                });
                header.push(self.expr_stmt_from(iterable));
                let body = Box::new(self.statement()?);
                return Ok(StmtKind::Loop { header, body });
            }
            let vars = self.declarators()?;
            header.push(Stmt {
                kind: StmtKind::Local { ty, vars },
                span: self.span_from(start),
            });
        } else {
            self.restore(save);
            while !self.is(";") {
                let e = self.expr()?;
                header.push(self.expr_stmt_from(e));
                if !self.eat(",") {
                    break;
                }
            }
        }
        self.expect(";")?;
        if !self.is(";") {
            let cond = self.expr()?;
            header.push(self.expr_stmt_from(cond));
        }
        self.expect(";")?;
        while !self.is(")") {
            let e = self.expr()?;
            header.push(self.expr_stmt_from(e));
            if !self.eat(",") {
                break;
            }
        }
        self.expect(")")?;
        let body = Box::new(self.statement()?);
        Ok(StmtKind::Loop { header, body })
    }

    fn declaration_or_expression(&mut self) -> PResult<StmtKind> {
        let save = self.save();
        let had_modifiers = self.skip_modifiers();

        if self.is("class") || self.is("interface") || self.is("enum") || self.is("@")
            || (self.is("record") && self.is_ident(1) && self.is_at(2, "("))
        {
            return self.type_declaration();
        }
        if let Some(kind) = self.method_declaration()? {
            return Ok(kind);
        }
        let after_mods = self.save();
        if let Some(ty) = self.local_head() {
            if self.is_ident(0)
                && matches!(self.text(1), Some("=" | ";" | "," | "[") | None)
            {
                let vars = self.declarators()?;
                self.end_statement()?;
                return Ok(StmtKind::Local { ty, vars });
            }
        }
        if had_modifiers {
            // `static { ... }` initializer
            self.restore(after_mods);
            if self.is("{") {
                return Ok(StmtKind::Block(self.block()?));
            }
        }
        self.restore(save);
        let e = self.expr()?;
        self.end_statement()?;
        Ok(StmtKind::Expr(e))
    }

    fn type_declaration(&mut self) -> PResult<StmtKind> {
        let is_enum = self.is("enum");
        if self.eat("@") {
            self.expect("interface")?;
        } else if self.eat("record") {
            self.ident()?;
            self.skip_balanced("(", ")");
        } else {
            self.pos += 1;
        }
        while !self.is("{") {
            if self.at_end() || self.is(";") || self.is("}") {
                return Err(Fail);
            }
            self.pos += 1;
        }
        let body = self.class_body(is_enum)?;
        Ok(StmtKind::TypeDecl { body })
    }

    // Class bodies; enum constant lists before the first `;` are skipped.
    fn class_body(&mut self, is_enum: bool) -> PResult<Vec<Stmt>> {
        self.expect("{")?;
        if !is_enum {
            return Ok(self.block_body(true));
        }
        let save = self.save();
        let mut constants = false;
        while self.is_ident(0) {
            self.pos += 1;
            if self.is("(") {
                self.skip_balanced("(", ")");
            }
            if self.is("{") {
                self.skip_balanced("{", "}");
            }
            if self.eat(",") {
                constants = true;
                continue;
            }
            if self.is(";") || self.is("}") {
                constants = true;
            }
            break;
        }
        if constants && (self.eat(";") || self.is("}")) {
            return Ok(self.block_body(true));
        }
        self.restore(save);
        Ok(self.block_body(true))
    }

    fn method_declaration(&mut self) -> PResult<Option<StmtKind>> {
        let save = self.save();
        if self.is("<") && self.type_args().is_err() {
            self.restore(save);
            return Ok(None);
        }
        let head_ok = if self.is_ident(0) && self.is_at(1, "(") {
            // constructor
            self.pos += 1;
            true
        } else {
            self.type_ref().is_ok() && self.ident().is_ok() && self.is("(")
        };
        if !head_ok {
            self.restore(save);
            return Ok(None);
        }
        let is_ctor_shape = self.toks[save.0].token.kind == TokenKind::Identifier
            && self.pos == save.0 + 1;
        let Ok(params) = self.formal_params() else {
            self.restore(save);
            return Ok(None);
        };
        while self.is("[") && self.is_at(1, "]") {
            self.pos += 2;
        }
        if self.eat("throws") {
            loop {
                if self.type_ref().is_err() {
                    self.restore(save);
                    return Ok(None);
                }
                if !self.eat(",") {
                    break;
                }
            }
        }
        if self.is("{") {
            let body = self.block()?;
            return Ok(Some(StmtKind::MethodDecl {
                params,
                body: Some(body),
            }));
        }
        if self.is(";") && !is_ctor_shape {
            self.pos += 1;
            return Ok(Some(StmtKind::MethodDecl { params, body: None }));
        }
        self.restore(save);
        Ok(None)
    }

    fn formal_params(&mut self) -> PResult<Vec<(TypeRef, String)>> {
        self.expect("(")?;
        let mut params = Vec::new();
        if self.eat(")") {
            return Ok(params);
        }
        loop {
            self.skip_modifiers();
            let mut ty = self.type_ref()?;
            if self.eat("...") {
                ty.dims += 1;
            }
            let name = if self.is("this") {
                self.pos += 1;
                "this".to_string()
            } else {
                self.ident()?
            };
            while self.is("[") && self.is_at(1, "]") {
                self.pos += 2;
                ty.dims += 1;
            }
            params.push((ty, name));
            if self.eat(")") {
                return Ok(params);
            }
            self.expect(",")?;
        }
    }

    /// Parse a local-variable type when one is present, else leave position
    /// unspecified (callers restore).
    fn local_head(&mut self) -> Option<TypeRef> {
        let ty = self.type_ref().ok()?;
        if self.is_ident(0) {
            Some(ty)
        } else {
            None
        }
    }

    fn declarators(&mut self) -> PResult<Vec<Declarator>> {
        let mut vars = Vec::new();
        loop {
            let name = self.ident()?;
            let mut dims = 0;
            while self.is("[") && self.is_at(1, "]") {
                self.pos += 2;
                dims += 1;
            }
            let init = if self.eat("=") {
                if self.is("{") {
                    Some(self.array_init()?)
                } else {
                    Some(self.expr()?)
                }
            } else {
                None
            };
            vars.push(Declarator { name, dims, init });
            if !self.eat(",") {
                return Ok(vars);
            }
        }
    }

    // ----------------------------------------------------------------- types

    fn type_ref(&mut self) -> PResult<TypeRef> {
        if self.gt_pending > 0 {
            return Err(Fail);
        }
        self.skip_annotations();
        let t = self.text(0).ok_or(Fail)?;
        let (name, primitive) = if self.kind(0) == Some(TokenKind::Keyword) {
            if PRIMITIVES.contains(&t) || t == "var" {
                self.pos += 1;
                (t.to_string(), t != "var")
            } else {
                return Err(Fail);
            }
        } else if self.is_ident(0) {
            let mut parts = vec![self.ident()?];
            loop {
                if self.is("<") {
                    self.type_args()?;
                }
                if self.is(".") && self.is_ident(1) {
                    self.pos += 1;
                    parts.push(self.ident()?);
                } else {
                    break;
                }
            }
            (parts.join("."), false)
        } else {
            return Err(Fail);
        };
        let mut dims = 0;
        while self.is("[") && self.is_at(1, "]") {
            self.pos += 2;
            dims += 1;
        }
        Ok(TypeRef {
            name,
            dims,
            primitive,
        })
    }

    fn type_args(&mut self) -> PResult<()> {
        self.expect("<")?;
        if self.close_angle() {
            return Ok(()); // diamond
        }
        loop {
            self.skip_annotations();
            if self.eat("?") {
                if self.eat("extends") || self.eat("super") {
                    self.type_ref()?;
                }
            } else {
                self.type_ref()?;
                while self.eat("&") {
                    self.type_ref()?;
                }
            }
            if self.close_angle() {
                return Ok(());
            }
            self.expect(",")?;
        }
    }

    fn close_angle(&mut self) -> bool {
        if self.gt_pending > 0 {
            self.gt_pending -= 1;
            if self.gt_pending == 0 {
                self.pos += 1;
            }
            return true;
        }
        match self.text(0) {
            Some(">") => {
                self.pos += 1;
                true
            }
            Some(">>") => {
                self.gt_pending = 1;
                true
            }
            Some(">>>") => {
                self.gt_pending = 2;
                true
            }
            _ => false,
        }
    }

    // ----------------------------------------------------------- expressions

    pub(crate) fn expr(&mut self) -> PResult<Expr> {
        if let Some(l) = self.lambda()? {
            return Ok(l);
        }
        let lhs = self.ternary()?;
        if let Some(op) = self.text(0) {
            if self.kind(0) == Some(TokenKind::Operator) && ASSIGN_OPS.contains(&op) {
                self.pos += 1;
                let value = if self.is("{") {
                    self.array_init()?
                } else {
                    self.expr()?
                };
                return Ok(Expr::Assign {
                    target: Box::new(lhs),
                    value: Box::new(value),
                });
            }
        }
        Ok(lhs)
    }

    fn lambda(&mut self) -> PResult<Option<Expr>> {
        let is_lambda = if self.is_ident(0) && self.is_at(1, "->") {
            self.pos += 2;
            true
        } else if self.is("(") {
            let save = self.save();
            self.skip_balanced("(", ")");
            if self.is("->") {
                self.pos += 1;
                true
            } else {
                self.restore(save);
                false
            }
        } else {
            false
        };
        if !is_lambda {
            return Ok(None);
        }
        let body = if self.is("{") {
            LambdaBody::Block(self.block()?)
        } else {
            LambdaBody::Expr(Box::new(self.expr()?))
        };
        Ok(Some(Expr::Lambda(body)))
    }

    fn ternary(&mut self) -> PResult<Expr> {
        let cond = self.binary()?;
        if self.eat("?") {
            let a = self.expr()?;
            self.expect(":")?;
            let b = if let Some(l) = self.lambda()? {
                l
            } else {
                self.ternary()?
            };
            return Ok(Expr::Op(vec![cond, a, b]));
        }
        Ok(cond)
    }

    fn binary(&mut self) -> PResult<Expr> {
        let first = self.unary()?;
        let mut operands = vec![first];
        loop {
            if self.is("instanceof") {
                self.pos += 1;
                self.eat("final");
                self.type_ref()?;
                if self.is_ident(0) {
                    self.pos += 1; // pattern binding
                }
                continue;
            }
            let is_bin = self.gt_pending == 0
                && self.kind(0) == Some(TokenKind::Operator)
                && self.text(0).is_some_and(|t| BINARY_OPS.contains(&t));
            if !is_bin {
                break;
            }
            self.pos += 1;
            operands.push(self.unary()?);
        }
        if operands.len() == 1 {
            Ok(operands.pop().unwrap_or(Expr::Literal))
        } else {
            Ok(Expr::Op(operands))
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        if self.gt_pending > 0 {
            return Err(Fail);
        }
        if let Some(t) = self.text(0) {
            if self.kind(0) == Some(TokenKind::Operator)
                && matches!(t, "+" | "-" | "!" | "~" | "++" | "--")
            {
                self.pos += 1;
                return Ok(Expr::Op(vec![self.unary()?]));
            }
        }
        if self.is("(") {
            if let Some(cast) = self.cast()? {
                return Ok(cast);
            }
        }
        self.postfix()
    }

    fn cast(&mut self) -> PResult<Option<Expr>> {
        let save = self.save();
        self.pos += 1;
        let ty = match self.type_ref() {
            Ok(ty) => ty,
            Err(_) => {
                self.restore(save);
                return Ok(None);
            }
        };
        while self.eat("&") {
            if self.type_ref().is_err() {
                self.restore(save);
                return Ok(None);
            }
        }
        if !self.eat(")") {
            self.restore(save);
            return Ok(None);
        }
        let follows_operand = match (self.kind(0), self.text(0)) {
            (Some(TokenKind::Identifier | TokenKind::Literal), _) => true,
            (Some(TokenKind::Keyword), Some("this" | "new" | "super" | "switch")) => true,
            (Some(TokenKind::Keyword), Some(p)) => PRIMITIVES.contains(&p),
            (Some(TokenKind::Punctuation), Some("(")) => true,
            (Some(TokenKind::Operator), Some("!" | "~")) => true,
            (Some(TokenKind::Operator), Some("+" | "-")) => ty.primitive,
            _ => false,
        };
        let looks_like_type = ty.primitive
            || ty
                .simple()
                .chars()
                .next()
                .is_some_and(|c| c.is_uppercase());
        if !follows_operand || !looks_like_type {
            self.restore(save);
            return Ok(None);
        }
        let expr = if let Some(l) = self.lambda()? {
            l
        } else {
            self.unary()?
        };
        Ok(Some(Expr::Cast {
            ty,
            expr: Box::new(expr),
        }))
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut e = self.primary()?;
        loop {
            if self.is(".") {
                self.pos += 1;
                if self.is("<") {
                    self.type_args()?;
                }
                if self.eat("new") {
                    // inner class creation: outer.new Inner()
                    let created = self.creator()?;
                    e = Expr::Op(vec![e, created]);
                    continue;
                }
                if self.eat("class") {
                    e = Expr::Literal;
                    continue;
                }
                if self.eat("this") || self.eat("super") {
                    e = Expr::This;
                    continue;
                }
                let name = self.ident()?;
                if self.is("(") {
                    let args = self.arguments()?;
                    e = Expr::Call {
                        target: Some(Box::new(e)),
                        name,
                        args,
                    };
                } else {
                    e = Expr::Field {
                        target: Box::new(e),
                        name,
                    };
                }
            } else if self.is("[") {
                self.pos += 1;
                let idx = self.expr()?;
                self.expect("]")?;
                e = Expr::Op(vec![e, idx]);
            } else if self.is("++") || self.is("--") {
                self.pos += 1;
                e = Expr::Op(vec![e]);
            } else if self.is("::") {
                self.pos += 1;
                if !self.eat("new") {
                    self.ident()?;
                }
                e = Expr::MethodRef(Box::new(e));
            } else {
                return Ok(e);
            }
        }
    }

    fn primary(&mut self) -> PResult<Expr> {
        if self.gt_pending > 0 {
            return Err(Fail);
        }
        let kind = self.kind(0).ok_or(Fail)?;
        let t = self.text(0).ok_or(Fail)?;
        match kind {
            TokenKind::Literal => {
                self.pos += 1;
                Ok(Expr::Literal)
            }
            TokenKind::Identifier => {
                let name = self.ident()?;
                if self.is("(") {
                    let args = self.arguments()?;
                    Ok(Expr::Call {
                        target: None,
                        name,
                        args,
                    })
                } else {
                    Ok(Expr::Name(name))
                }
            }
            TokenKind::Keyword => match t {
                "this" | "super" => {
                    self.pos += 1;
                    if self.is("(") {
                        let args = self.arguments()?;
                        return Ok(Expr::Call {
                            target: None,
                            name: t.to_string(),
                            args,
                        });
                    }
                    Ok(Expr::This)
                }
                "new" => {
                    self.pos += 1;
                    self.creator()
                }
                "switch" => {
                    self.pos += 1;
                    let selector = self.paren_expr()?;
                    let body = self.switch_body()?;
                    Ok(Expr::Switch {
                        selector: Box::new(selector),
                        body,
                    })
                }
                p if PRIMITIVES.contains(&p) => {
                    // int.class, int[].class
                    self.type_ref()?;
                    self.expect(".")?;
                    self.expect("class")?;
                    Ok(Expr::Literal)
                }
                _ => Err(Fail),
            },
            TokenKind::Punctuation if t == "(" => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(")")?;
                Ok(e)
            }
            TokenKind::Punctuation if t == "@" => {
                self.skip_annotations();
                self.primary()
            }
            _ => Err(Fail),
        }
    }

    fn creator(&mut self) -> PResult<Expr> {
        if self.is("<") {
            self.type_args()?;
        }
        self.skip_annotations();
        let save = self.save();
        let mut ty = self.type_ref()?;
        if ty.dims > 0 || self.is("[") {
            // array creation; re-read the dimensions with their sizes
            self.restore(save);
            let mut base = self.type_ref_no_dims()?;
            let mut dims = Vec::new();
            while self.eat("[") {
                if !self.is("]") {
                    dims.push(self.expr()?);
                }
                self.expect("]")?;
                base.dims += 1;
            }
            let init = if self.is("{") {
                match self.array_init()? {
                    Expr::ArrayInit(v) => v,
                    _ => Vec::new(),
                }
            } else {
                Vec::new()
            };
            return Ok(Expr::NewArray { dims, init });
        }
        ty.dims = 0;
        let args = self.arguments()?;
        let body = if self.is("{") {
            Some(self.class_body(false)?)
        } else {
            None
        };
        Ok(Expr::New { ty, args, body })
    }

    fn type_ref_no_dims(&mut self) -> PResult<TypeRef> {
        let t = self.text(0).ok_or(Fail)?;
        if self.kind(0) == Some(TokenKind::Keyword) && PRIMITIVES.contains(&t) {
            self.pos += 1;
            return Ok(TypeRef {
                name: t.to_string(),
                dims: 0,
                primitive: true,
            });
        }
        let mut parts = vec![self.ident()?];
        loop {
            if self.is("<") {
                self.type_args()?;
            }
            if self.is(".") && self.is_ident(1) {
                self.pos += 1;
                parts.push(self.ident()?);
            } else {
                break;
            }
        }
        Ok(TypeRef {
            name: parts.join("."),
            dims: 0,
            primitive: false,
        })
    }

    fn arguments(&mut self) -> PResult<Vec<Expr>> {
        self.expect("(")?;
        let mut args = Vec::new();
        if self.eat(")") {
            return Ok(args);
        }
        loop {
            args.push(self.expr()?);
            if self.eat(")") {
                return Ok(args);
            }
            self.expect(",")?;
        }
    }

    fn array_init(&mut self) -> PResult<Expr> {
        self.expect("{")?;
        let mut items = Vec::new();
        loop {
            if self.eat("}") {
                return Ok(Expr::ArrayInit(items));
            }
            let item = if self.is("{") {
                self.array_init()?
            } else {
                self.expr()?
            };
            items.push(item);
            if !self.eat(",") {
                self.expect("}")?;
                return Ok(Expr::ArrayInit(items));
            }
        }
    }
}
