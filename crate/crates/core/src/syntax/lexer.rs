//! Line-structured lexer feeding the recovering parser.
//!
//! Produces a flat token stream with synthetic `Newline`/`Indent`/`Dedent`
//! markers. Newlines are suppressed inside brackets, blank and comment-only
//! lines never touch the indentation stack, and a tab advances the indent
//! column to the next multiple of 8.

use crate::span::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokKind {
    /// Identifier (not a recognized keyword).
    Name,
    Int,
    Float,
    Str,
    Comment,
    /// Operator, delimiter, or keyword with its canonical text.
    Sym(&'static str),
    /// Byte(s) the lexer cannot classify; always a parse failure.
    Unknown,
    Newline,
    Indent,
    Dedent,
    Eof,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LexTok {
    pub kind: TokKind,
    pub span: Span,
}

const KEYWORDS: &[&str] = &[
    "and", "as", "break", "class", "continue", "def", "elif", "else", "for", "from", "if",
    "import", "in", "is", "not", "or", "pass", "return", "while", "with", "True", "False",
    "None",
];

/// Longest-match-first operator and delimiter table.
const OPERATORS: &[&str] = &[
    "**=", "//=", "<<=", ">>=", "==", "!=", "<=", ">=", "->", "+=", "-=", "*=", "/=", "%=",
    "&=", "|=", "^=", "**", "//", "<<", ">>", "(", ")", "[", "]", "{", "}", ",", ":", ".",
    ";", "@", "=", "+", "-", "*", "/", "%", "&", "|", "^", "~", "<", ">",
];

const TAB_WIDTH: usize = 8;

pub fn lex(src: &[u8]) -> Vec<LexTok> {
    Lexer {
        src,
        pos: 0,
        depth: 0,
        indents: vec![0],
        at_line_start: true,
        out: Vec::new(),
    }
    .run()
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    /// Open bracket depth; newlines and indentation are ignored inside.
    depth: usize,
    indents: Vec<usize>,
    at_line_start: bool,
    out: Vec<LexTok>,
}

impl<'a> Lexer<'a> {
    fn run(mut self) -> Vec<LexTok> {
        while self.pos < self.src.len() {
            if self.at_line_start && self.depth == 0 {
                self.handle_line_start();
                continue;
            }
            self.lex_token();
        }
        let end = self.src.len();
        if !self.at_line_start {
            self.push(TokKind::Newline, Span::empty(end));
        }
        while self.indents.len() > 1 {
            self.indents.pop();
            self.push(TokKind::Dedent, Span::empty(end));
        }
        self.push(TokKind::Eof, Span::empty(end));
        self.out
    }

    fn push(&mut self, kind: TokKind, span: Span) {
        self.out.push(LexTok { kind, span });
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<u8> {
        self.src.get(self.pos + offset).copied()
    }

    fn handle_line_start(&mut self) {
        let mut col = 0usize;
        let mut p = self.pos;
        while let Some(&b) = self.src.get(p) {
            match b {
                b' ' => col += 1,
                b'\t' => col = (col / TAB_WIDTH + 1) * TAB_WIDTH,
                _ => break,
            }
            p += 1;
        }
        match self.src.get(p) {
            // Blank line: contributes nothing.
            None | Some(b'\n') | Some(b'\r') => {
                self.pos = p;
                self.consume_line_end();
            }
            // Comment-only line: emit the comment, skip indentation logic.
            Some(b'#') => {
                self.pos = p;
                self.lex_comment();
                self.consume_line_end();
            }
            Some(_) => {
                let current = *self.indents.last().unwrap();
                if col > current {
                    self.indents.push(col);
                    self.push(TokKind::Indent, Span::empty(p));
                } else {
                    while *self.indents.last().unwrap() > col {
                        self.indents.pop();
                        self.push(TokKind::Dedent, Span::empty(p));
                    }
                    // An inconsistent dedent snaps to the nearest level.
                }
                self.pos = p;
                self.at_line_start = false;
            }
        }
    }

    /// Consume an optional `\r\n`, `\r`, or `\n` without emitting anything.
    fn consume_line_end(&mut self) {
        if self.peek() == Some(b'\r') {
            self.pos += 1;
        }
        if self.peek() == Some(b'\n') {
            self.pos += 1;
        }
        self.at_line_start = true;
    }

    fn lex_token(&mut self) {
        let b = match self.peek() {
            Some(b) => b,
            None => return,
        };
        match b {
            b' ' | b'\t' | 0x0b | 0x0c => self.pos += 1,
            b'\\' if matches!(self.peek_at(1), Some(b'\n') | Some(b'\r')) => {
                // Explicit line continuation.
                self.pos += 1;
                if self.peek() == Some(b'\r') {
                    self.pos += 1;
                }
                if self.peek() == Some(b'\n') {
                    self.pos += 1;
                }
            }
            b'\n' | b'\r' => {
                if self.depth > 0 {
                    self.pos += 1;
                } else {
                    let start = self.pos;
                    self.consume_line_end();
                    self.push(TokKind::Newline, Span::new(start, self.pos));
                }
            }
            b'#' => self.lex_comment(),
            b'\'' | b'"' => self.lex_string(self.pos),
            b'0'..=b'9' => self.lex_number(),
            b'.' if matches!(self.peek_at(1), Some(b'0'..=b'9')) => self.lex_number(),
            b'A'..=b'Z' | b'a'..=b'z' | b'_' => self.lex_name_or_string_prefix(),
            _ => self.lex_operator(),
        }
    }

    fn lex_comment(&mut self) {
        let start = self.pos;
        while let Some(b) = self.peek() {
            if b == b'\n' || b == b'\r' {
                break;
            }
            self.pos += 1;
        }
        self.push(TokKind::Comment, Span::new(start, self.pos));
    }

    fn lex_name_or_string_prefix(&mut self) {
        let start = self.pos;
        while let Some(b) = self.peek() {
            if b.is_ascii_alphanumeric() || b == b'_' {
                self.pos += 1;
            } else {
                break;
            }
        }
        let text = &self.src[start..self.pos];
        // String prefixes: r, b, u, f and two-letter combinations.
        if text.len() <= 2
            && text
                .iter()
                .all(|&c| matches!(c.to_ascii_lowercase(), b'r' | b'b' | b'u' | b'f'))
            && matches!(self.peek(), Some(b'\'') | Some(b'"'))
        {
            self.lex_string(start);
            return;
        }
        let kind = match std::str::from_utf8(text)
            .ok()
            .and_then(|t| KEYWORDS.iter().find(|&&k| k == t))
        {
            Some(&kw) => TokKind::Sym(kw),
            None => TokKind::Name,
        };
        self.push(kind, Span::new(start, self.pos));
    }

    /// Lex a quoted string starting at the quote under the cursor; `start`
    /// may precede it when a prefix like `r` or `rb` was already consumed.
    /// Unterminated single-quoted strings end at the line break.
    fn lex_string(&mut self, start: usize) {
        let quote = self.peek().expect("caller ensured a quote");
        let triple = self.peek_at(1) == Some(quote) && self.peek_at(2) == Some(quote);
        self.pos += if triple { 3 } else { 1 };
        loop {
            match self.peek() {
                None => break,
                Some(b'\\') => {
                    self.pos += 1;
                    if self.peek().is_some() {
                        self.pos += 1;
                    }
                }
                Some(b) if b == quote => {
                    if triple {
                        if self.peek_at(1) == Some(quote) && self.peek_at(2) == Some(quote) {
                            self.pos += 3;
                            break;
                        }
                        self.pos += 1;
                    } else {
                        self.pos += 1;
                        break;
                    }
                }
                Some(b'\n') | Some(b'\r') if !triple => break,
                Some(_) => self.pos += 1,
            }
        }
        self.push(TokKind::Str, Span::new(start, self.pos));
    }

    fn lex_number(&mut self) {
        let start = self.pos;
        if self.peek() == Some(b'0')
            && matches!(
                self.peek_at(1),
                Some(b'x') | Some(b'X') | Some(b'o') | Some(b'O') | Some(b'b') | Some(b'B')
            )
        {
            self.pos += 2;
            while let Some(b) = self.peek() {
                if b.is_ascii_alphanumeric() || b == b'_' {
                    self.pos += 1;
                } else {
                    break;
                }
            }
            self.push(TokKind::Int, Span::new(start, self.pos));
            return;
        }
        let mut is_float = false;
        if self.peek() == Some(b'.') {
            is_float = true;
            self.pos += 1;
        }
        self.consume_digits();
        if !is_float
            && self.peek() == Some(b'.')
            && matches!(self.peek_at(1), Some(b'0'..=b'9'))
        {
            is_float = true;
            self.pos += 1;
            self.consume_digits();
        }
        if matches!(self.peek(), Some(b'e') | Some(b'E')) {
            let mut ahead = 1;
            if matches!(self.peek_at(1), Some(b'+') | Some(b'-')) {
                ahead = 2;
            }
            if matches!(self.peek_at(ahead), Some(b'0'..=b'9')) {
                is_float = true;
                self.pos += ahead;
                self.consume_digits();
            }
        }
        let kind = if is_float { TokKind::Float } else { TokKind::Int };
        self.push(kind, Span::new(start, self.pos));
    }

    fn consume_digits(&mut self) {
        while let Some(b) = self.peek() {
            if b.is_ascii_digit() || b == b'_' {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn lex_operator(&mut self) {
        for op in OPERATORS {
            let bytes = op.as_bytes();
            if self.src[self.pos..].starts_with(bytes) {
                match bytes[0] {
                    b'(' | b'[' | b'{' => self.depth += 1,
                    b')' | b']' | b'}' => self.depth = self.depth.saturating_sub(1),
                    _ => {}
                }
                let span = Span::new(self.pos, self.pos + bytes.len());
                self.pos += bytes.len();
                self.push(TokKind::Sym(op), span);
                return;
            }
        }
        // Unusable byte (non-ASCII outside a string, `$`, `?`, ...).
        let span = Span::new(self.pos, self.pos + 1);
        self.pos += 1;
        self.push(TokKind::Unknown, span);
    }
}
