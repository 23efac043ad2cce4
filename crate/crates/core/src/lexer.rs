//! Java-flavoured lexer for source fragments.
//!
//! The lexer never fails. Comments and whitespace are dropped, string, text
//! block and char literals come out as single `Literal` tokens, and bytes that
//! cannot start any token are skipped and counted.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TokenKind {
    Identifier,
    Keyword,
    Literal,
    Operator,
    Punctuation,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Token {
    pub text: String,
    pub kind: TokenKind,
}

impl Token {
    pub fn new(text: impl Into<String>, kind: TokenKind) -> Self {
        Self {
            text: text.into(),
            kind,
        }
    }

    pub fn is(&self, kind: TokenKind, text: &str) -> bool {
        self.kind == kind && self.text == text
    }
}

/// A token together with its position in the source text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpannedToken {
    pub token: Token,
    /// 1-based physical line of the first byte.
    pub line: usize,
    /// 1-based physical line of the last byte (differs for text blocks).
    pub end_line: usize,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexed {
    pub tokens: Vec<SpannedToken>,
    /// Bytes that could not start any token.
    pub skipped: usize,
    /// Lines that hold at least one comment.
    pub comment_lines: Vec<usize>,
}

const KEYWORDS: &[&str] = &[
    "abstract",
    "assert",
    "boolean",
    "break",
    "byte",
    "case",
    "catch",
    "char",
    "class",
    "const",
    "continue",
    "default",
    "do",
    "double",
    "else",
    "enum",
    "extends",
    "final",
    "finally",
    "float",
    "for",
    "goto",
    "if",
    "implements",
    "import",
    "instanceof",
    "int",
    "interface",
    "long",
    "native",
    "new",
    "package",
    "private",
    "protected",
    "public",
    "return",
    "short",
    "static",
    "strictfp",
    "super",
    "switch",
    "synchronized",
    "this",
    "throw",
    "throws",
    "transient",
    "try",
    "void",
    "volatile",
    "while",
    "var",
];

const LITERAL_WORDS: &[&str] = &["true", "false", "null"];

// Longest first.
const OPERATORS: &[&str] = &[
    ">>>=", "<<=", ">>=", ">>>", "->", "==", "!=", "<=", ">=", "&&", "||", "++", "--", "+=",
    "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<", ">>", "=", "<", ">", "!", "~", "?", ":",
    "+", "-", "*", "/", "&", "|", "^", "%",
];

const PUNCTUATION: &[&str] = &["...", "::", "(", ")", "{", "}", "[", "]", ";", ",", ".", "@"];

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.contains(&word)
}

/// Lex `src` into plain tokens.
pub fn lex(src: &str) -> Vec<Token> {
    tokenize(src).tokens.into_iter().map(|t| t.token).collect()
}

/// Lex `src` keeping spans, skipped-byte count and comment lines.
pub fn tokenize(src: &str) -> Lexed {
    Lexer::new(src).run()
}

struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    line: usize,
    out: Lexed,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Self {
            src,
            bytes: src.as_bytes(),
            pos: 0,
            line: 1,
            out: Lexed::default(),
        }
    }

    fn peek(&self, off: usize) -> Option<u8> {
        self.bytes.get(self.pos + off).copied()
    }

    fn bump_to(&mut self, end: usize) {
        self.line += self.bytes[self.pos..end].iter().filter(|&&b| b == b'\n').count();
        self.pos = end;
    }

    fn mark_comment(&mut self, from_line: usize) {
        for l in from_line..=self.line {
            if self.out.comment_lines.last() != Some(&l) {
                self.out.comment_lines.push(l);
            }
        }
    }

    fn push(&mut self, start: usize, end: usize, kind: TokenKind) {
        let line = self.line;
        self.bump_to(end);
        self.out.tokens.push(SpannedToken {
            token: Token::new(&self.src[start..end], kind),
            line,
            end_line: self.line,
            start,
            end,
        });
    }

    fn run(mut self) -> Lexed {
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
            match b {
                b'\n' => {
                    self.line += 1;
                    self.pos += 1;
                }
                b' ' | b'\t' | b'\r' | 0x0c => self.pos += 1,
                b'/' if self.peek(1) == Some(b'/') => {
                    let start_line = self.line;
                    let end = self.src[self.pos..]
                        .find('\n')
                        .map_or(self.bytes.len(), |i| self.pos + i);
                    self.bump_to(end);
                    self.mark_comment(start_line);
                }
                b'/' if self.peek(1) == Some(b'*') => {
                    let start_line = self.line;
                    let end = self.src[self.pos + 2..]
                        .find("*/")
                        .map_or(self.bytes.len(), |i| self.pos + 2 + i + 2);
                    self.bump_to(end);
                    self.mark_comment(start_line);
                }
                b'"' => {
                    let end = self.string_end();
                    self.push(self.pos, end, TokenKind::Literal);
                }
                b'\'' => {
                    let end = self.quoted_end(b'\'');
                    self.push(self.pos, end, TokenKind::Literal);
                }
                b'0'..=b'9' => {
                    let end = self.number_end();
                    self.push(self.pos, end, TokenKind::Literal);
                }
                b'.' if matches!(self.peek(1), Some(b'0'..=b'9')) => {
                    let end = self.number_end();
                    self.push(self.pos, end, TokenKind::Literal);
                }
                _ if is_ident_start(self.char_at()) => {
                    let end = self.ident_end();
                    let word = &self.src[self.pos..end];
                    let kind = if LITERAL_WORDS.contains(&word) {
                        TokenKind::Literal
                    } else if is_keyword(word) {
                        TokenKind::Keyword
                    } else {
                        TokenKind::Identifier
                    };
                    self.push(self.pos, end, kind);
                }
                _ => {
                    let rest = &self.src[self.pos..];
                    if let Some(p) = PUNCTUATION.iter().find(|p| rest.starts_with(**p)) {
                        self.push(self.pos, self.pos + p.len(), TokenKind::Punctuation);
                    } else if let Some(op) = OPERATORS.iter().find(|o| rest.starts_with(**o)) {
                        self.push(self.pos, self.pos + op.len(), TokenKind::Operator);
                    } else {
                        let width = self.char_at().len_utf8();
                        self.out.skipped += width;
                        self.pos += width;
                    }
                }
            }
        }
        self.out
    }

    fn char_at(&self) -> char {
        self.src[self.pos..].chars().next().unwrap_or('\0')
    }

    fn ident_end(&self) -> usize {
        self.src[self.pos..]
            .char_indices()
            .find(|&(i, c)| i > 0 && !is_ident_part(c))
            .map_or(self.bytes.len(), |(i, _)| self.pos + i)
    }

    fn string_end(&self) -> usize {
        if self.src[self.pos..].starts_with("\"\"\"") {
            return self.src[self.pos + 3..]
                .find("\"\"\"")
                .map_or(self.bytes.len(), |i| self.pos + 3 + i + 3);
        }
        self.quoted_end(b'"')
    }

    // Quoted literals stop at the closing quote or, unterminated, at end of line.
    fn quoted_end(&self, quote: u8) -> usize {
        let mut i = self.pos + 1;
        while i < self.bytes.len() {
            match self.bytes[i] {
                b'\\' => i += 2,
                b'\n' => return i,
                c if c == quote => return i + 1,
                _ => i += 1,
            }
        }
        self.bytes.len()
    }

    fn number_end(&self) -> usize {
        let mut i = self.pos;
        let b = self.bytes;
        if b[i] == b'0' && matches!(b.get(i + 1), Some(b'x' | b'X' | b'b' | b'B')) {
            i += 2;
            while i < b.len() && (b[i].is_ascii_hexdigit() || b[i] == b'_') {
                i += 1;
            }
        } else {
            while i < b.len() && (b[i].is_ascii_digit() || b[i] == b'_') {
                i += 1;
            }
            if i < b.len() && b[i] == b'.' && b.get(i + 1).is_some_and(|c| c.is_ascii_digit()) {
                i += 1;
                while i < b.len() && (b[i].is_ascii_digit() || b[i] == b'_') {
                    i += 1;
                }
            } else if i < b.len() && b[i] == b'.' && !b.get(i + 1).is_some_and(|c| is_ident_start(*c as char)) {
                // `1.` is a double literal, `1.foo` is not
                i += 1;
            }
            if i < b.len() && matches!(b[i], b'e' | b'E') {
                let mut j = i + 1;
                if j < b.len() && matches!(b[j], b'+' | b'-') {
                    j += 1;
                }
                if j < b.len() && b[j].is_ascii_digit() {
                    i = j;
                    while i < b.len() && b[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
        }
        if i < b.len() && matches!(b[i], b'l' | b'L' | b'f' | b'F' | b'd' | b'D') {
            i += 1;
        }
        i
    }
}

fn is_ident_start(c: char) -> bool {
    c == '_' || c == '$' || c.is_alphabetic()
}

fn is_ident_part(c: char) -> bool {
    is_ident_start(c) || c.is_ascii_digit() || c.is_numeric()
}
