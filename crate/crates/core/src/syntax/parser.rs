//! Recursive-descent parser with statement-level error recovery.
//!
//! A statement that fails to parse is re-read as raw tokens up to the end of
//! its logical line and wrapped in an `ERROR` node; parsing resumes on the
//! next line. An unexpected indented suite is parsed normally and wrapped in
//! an `ERROR` node as a unit.

use super::lexer::{lex, LexTok, TokKind};
use super::SyntaxNode;
use crate::span::Span;

pub fn parse(doc: &[u8]) -> SyntaxNode {
    let toks = lex(doc);
    let mut parser = Parser { src: doc, toks, i: 0 };
    let children = parser.statements(false);
    SyntaxNode {
        node_type: "module".to_string(),
        span: Span::new(0, doc.len()),
        children,
    }
}

type PResult<T> = Result<T, ()>;

/// Precedence of a full expression (absorbs every infix operator).
const EXPR: u8 = 1;
const COMPARISON: u8 = 4;
const UNARY: u8 = 11;

fn infix_precedence(sym: &str) -> Option<(u8, bool)> {
    let table: (u8, bool) = match sym {
        "or" => (1, false),
        "and" => (2, false),
        "<" | ">" | "<=" | ">=" | "==" | "!=" | "in" | "is" => (COMPARISON, false),
        "|" => (5, false),
        "^" => (6, false),
        "&" => (7, false),
        "<<" | ">>" => (8, false),
        "+" | "-" => (9, false),
        "*" | "/" | "//" | "%" | "@" => (10, false),
        "**" => (12, true),
        _ => return None,
    };
    Some(table)
}

const AUGMENTED_OPS: &[&str] = &[
    "+=", "-=", "*=", "/=", "//=", "**=", "%=", "&=", "|=", "^=", "<<=", ">>=",
];

struct Parser<'a> {
    src: &'a [u8],
    toks: Vec<LexTok>,
    i: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> LexTok {
        self.toks[self.i.min(self.toks.len() - 1)]
    }

    fn peek_ahead(&self, n: usize) -> LexTok {
        self.toks[(self.i + n).min(self.toks.len() - 1)]
    }

    fn kind(&self) -> TokKind {
        self.peek().kind
    }

    fn bump(&mut self) -> LexTok {
        let tok = self.peek();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        tok
    }

    fn at_sym(&self, sym: &str) -> bool {
        matches!(self.kind(), TokKind::Sym(s) if s == sym)
    }

    fn eat_sym(&mut self, sym: &str) -> Option<SyntaxNode> {
        if self.at_sym(sym) {
            let tok = self.bump();
            Some(SyntaxNode::leaf(sym, tok.span))
        } else {
            None
        }
    }

    fn expect_sym(&mut self, sym: &str) -> PResult<SyntaxNode> {
        self.eat_sym(sym).ok_or(())
    }

    fn expect_identifier(&mut self) -> PResult<SyntaxNode> {
        if self.kind() == TokKind::Name {
            let tok = self.bump();
            Ok(SyntaxNode::leaf("identifier", tok.span))
        } else {
            Err(())
        }
    }

    fn comment_leaf(&mut self) -> SyntaxNode {
        let tok = self.bump();
        SyntaxNode::leaf("comment", tok.span)
    }

    /// Collect any comment tokens in place (implicit line joining puts them
    /// between elements inside brackets).
    fn gather_comments(&mut self, out: &mut Vec<SyntaxNode>) {
        while self.kind() == TokKind::Comment {
            let c = self.comment_leaf();
            out.push(c);
        }
    }

    fn starts_expression(&self) -> bool {
        match self.kind() {
            TokKind::Name | TokKind::Int | TokKind::Float | TokKind::Str => true,
            TokKind::Sym(s) => matches!(
                s,
                "(" | "[" | "{" | "not" | "-" | "+" | "~" | "True" | "False" | "None"
            ),
            _ => false,
        }
    }

    // ------------------------------------------------------------------
    // Statements
    // ------------------------------------------------------------------

    fn statements(&mut self, stop_at_dedent: bool) -> Vec<SyntaxNode> {
        let mut out = Vec::new();
        loop {
            match self.kind() {
                TokKind::Eof => break,
                TokKind::Dedent => {
                    if stop_at_dedent {
                        break;
                    }
                    self.bump();
                }
                TokKind::Newline => {
                    self.bump();
                }
                TokKind::Comment => {
                    let c = self.comment_leaf();
                    out.push(c);
                }
                TokKind::Indent => {
                    // Orphaned suite, e.g. after a malformed header line.
                    self.bump();
                    let inner = self.statements(true);
                    if self.kind() == TokKind::Dedent {
                        self.bump();
                    }
                    if !inner.is_empty() {
                        out.push(SyntaxNode::branch("ERROR", inner));
                    }
                }
                _ => {
                    let start = self.i;
                    match self.try_statement() {
                        Ok(nodes) => out.extend(nodes),
                        Err(()) => {
                            self.i = start;
                            out.push(self.error_line());
                        }
                    }
                }
            }
        }
        out
    }

    /// Consume the rest of the logical line as raw token leaves.
    fn error_line(&mut self) -> SyntaxNode {
        let mut children = Vec::new();
        loop {
            match self.kind() {
                TokKind::Newline => {
                    self.bump();
                    break;
                }
                TokKind::Eof | TokKind::Dedent | TokKind::Indent => break,
                _ => {
                    let tok = self.bump();
                    children.push(self.raw_leaf(tok));
                }
            }
        }
        SyntaxNode::branch("ERROR", children)
    }

    fn raw_leaf(&self, tok: LexTok) -> SyntaxNode {
        let node_type = match tok.kind {
            TokKind::Name => "identifier".to_string(),
            TokKind::Int => "integer".to_string(),
            TokKind::Float => "float".to_string(),
            TokKind::Str => "string".to_string(),
            TokKind::Comment => "comment".to_string(),
            TokKind::Sym("True") => "true".to_string(),
            TokKind::Sym("False") => "false".to_string(),
            TokKind::Sym("None") => "none".to_string(),
            TokKind::Sym(s) => s.to_string(),
            _ => String::from_utf8_lossy(tok.span.slice(self.src)).into_owned(),
        };
        SyntaxNode::leaf(node_type, tok.span)
    }

    fn try_statement(&mut self) -> PResult<Vec<SyntaxNode>> {
        match self.kind() {
            TokKind::Sym("def") => Ok(vec![self.function_definition()?]),
            TokKind::Sym("class") => Ok(vec![self.class_definition()?]),
            TokKind::Sym("@") => Ok(vec![self.decorated_definition()?]),
            TokKind::Sym("if") => Ok(vec![self.if_statement()?]),
            TokKind::Sym("for") => Ok(vec![self.for_statement()?]),
            TokKind::Sym("while") => Ok(vec![self.while_statement()?]),
            TokKind::Sym("with") => Ok(vec![self.with_statement()?]),
            _ => self.simple_statement_line(),
        }
    }

    /// One or more `;`-separated simple statements, an optional trailing
    /// comment, and the line terminator.
    fn simple_statement_line(&mut self) -> PResult<Vec<SyntaxNode>> {
        let mut out = vec![self.simple_statement()?];
        while self.at_sym(";") {
            let semi = self.bump();
            out.push(SyntaxNode::leaf(";", semi.span));
            if matches!(
                self.kind(),
                TokKind::Newline | TokKind::Comment | TokKind::Eof | TokKind::Dedent
            ) {
                break;
            }
            out.push(self.simple_statement()?);
        }
        if self.kind() == TokKind::Comment {
            let c = self.comment_leaf();
            out.push(c);
        }
        match self.kind() {
            TokKind::Newline => {
                self.bump();
            }
            TokKind::Eof | TokKind::Dedent => {}
            _ => return Err(()),
        }
        Ok(out)
    }

    fn simple_statement(&mut self) -> PResult<SyntaxNode> {
        match self.kind() {
            TokKind::Sym("return") => {
                let kw = self.expect_sym("return")?;
                let mut children = vec![kw];
                if self.starts_expression() {
                    children.push(self.expression_list()?);
                }
                Ok(SyntaxNode::branch("return_statement", children))
            }
            TokKind::Sym("pass") => Ok(SyntaxNode::branch(
                "pass_statement",
                vec![self.expect_sym("pass")?],
            )),
            TokKind::Sym("break") => Ok(SyntaxNode::branch(
                "break_statement",
                vec![self.expect_sym("break")?],
            )),
            TokKind::Sym("continue") => Ok(SyntaxNode::branch(
                "continue_statement",
                vec![self.expect_sym("continue")?],
            )),
            TokKind::Sym("import") => self.import_statement(),
            TokKind::Sym("from") => self.import_from_statement(),
            _ => self.expression_like_statement(),
        }
    }

    fn expression_like_statement(&mut self) -> PResult<SyntaxNode> {
        let left = self.expression_list()?;
        let inner = if self.at_sym(":") {
            // Annotated assignment: name ":" type ["=" value].
            let left = rename_list(left, "pattern_list");
            let colon = self.expect_sym(":")?;
            let ty = self.type_node()?;
            let mut children = vec![left, colon, ty];
            if self.at_sym("=") {
                children.push(self.expect_sym("=")?);
                children.push(self.expression_list()?);
            }
            SyntaxNode::branch("assignment", children)
        } else if self.at_sym("=") {
            self.assignment_tail(left)?
        } else if let TokKind::Sym(s) = self.kind() {
            if AUGMENTED_OPS.contains(&s) {
                let op = self.bump();
                let rhs = self.expression_list()?;
                SyntaxNode::branch(
                    "augmented_assignment",
                    vec![left, SyntaxNode::leaf(s, op.span), rhs],
                )
            } else {
                left
            }
        } else {
            left
        };
        Ok(SyntaxNode::branch("expression_statement", vec![inner]))
    }

    fn assignment_tail(&mut self, left: SyntaxNode) -> PResult<SyntaxNode> {
        let left = rename_list(left, "pattern_list");
        let eq = self.expect_sym("=")?;
        let value = self.expression_list()?;
        let right = if self.at_sym("=") {
            self.assignment_tail(value)?
        } else {
            value
        };
        Ok(SyntaxNode::branch("assignment", vec![left, eq, right]))
    }

    fn import_statement(&mut self) -> PResult<SyntaxNode> {
        let mut children = vec![self.expect_sym("import")?];
        children.push(self.dotted_or_aliased()?);
        while self.at_sym(",") {
            children.push(self.expect_sym(",")?);
            children.push(self.dotted_or_aliased()?);
        }
        Ok(SyntaxNode::branch("import_statement", children))
    }

    fn import_from_statement(&mut self) -> PResult<SyntaxNode> {
        let mut children = vec![self.expect_sym("from")?];
        children.push(self.dotted_name()?);
        children.push(self.expect_sym("import")?);
        if self.at_sym("*") {
            let star = self.bump();
            children.push(SyntaxNode::leaf("wildcard_import", star.span));
        } else if self.at_sym("(") {
            children.push(self.expect_sym("(")?);
            loop {
                self.gather_comments(&mut children);
                if self.at_sym(")") {
                    break;
                }
                children.push(self.dotted_or_aliased()?);
                self.gather_comments(&mut children);
                if let Some(comma) = self.eat_sym(",") {
                    children.push(comma);
                } else {
                    break;
                }
            }
            self.gather_comments(&mut children);
            children.push(self.expect_sym(")")?);
        } else {
            children.push(self.dotted_or_aliased()?);
            while self.at_sym(",") {
                children.push(self.expect_sym(",")?);
                children.push(self.dotted_or_aliased()?);
            }
        }
        Ok(SyntaxNode::branch("import_from_statement", children))
    }

    fn dotted_name(&mut self) -> PResult<SyntaxNode> {
        let mut children = vec![self.expect_identifier()?];
        while self.at_sym(".") {
            children.push(self.expect_sym(".")?);
            children.push(self.expect_identifier()?);
        }
        Ok(SyntaxNode::branch("dotted_name", children))
    }

    fn dotted_or_aliased(&mut self) -> PResult<SyntaxNode> {
        let name = self.dotted_name()?;
        if self.at_sym("as") {
            let kw = self.expect_sym("as")?;
            let alias = self.expect_identifier()?;
            Ok(SyntaxNode::branch("aliased_import", vec![name, kw, alias]))
        } else {
            Ok(name)
        }
    }

    fn function_definition(&mut self) -> PResult<SyntaxNode> {
        let mut children = vec![self.expect_sym("def")?, self.expect_identifier()?];
        children.push(self.parameters()?);
        if self.at_sym("->") {
            children.push(self.expect_sym("->")?);
            children.push(self.type_node()?);
        }
        children.push(self.expect_sym(":")?);
        children.push(self.block()?);
        Ok(SyntaxNode::branch("function_definition", children))
    }

    fn type_node(&mut self) -> PResult<SyntaxNode> {
        let expr = self.expression(EXPR)?;
        Ok(SyntaxNode::branch("type", vec![expr]))
    }

    fn parameters(&mut self) -> PResult<SyntaxNode> {
        let mut children = vec![self.expect_sym("(")?];
        loop {
            self.gather_comments(&mut children);
            if self.at_sym(")") {
                break;
            }
            children.push(self.parameter()?);
            self.gather_comments(&mut children);
            if let Some(comma) = self.eat_sym(",") {
                children.push(comma);
            } else {
                break;
            }
        }
        self.gather_comments(&mut children);
        children.push(self.expect_sym(")")?);
        Ok(SyntaxNode::branch("parameters", children))
    }

    fn parameter(&mut self) -> PResult<SyntaxNode> {
        if let Some(star) = self.eat_sym("*") {
            let name = self.expect_identifier()?;
            return Ok(SyntaxNode::branch("list_splat_pattern", vec![star, name]));
        }
        if let Some(stars) = self.eat_sym("**") {
            let name = self.expect_identifier()?;
            return Ok(SyntaxNode::branch(
                "dictionary_splat_pattern",
                vec![stars, name],
            ));
        }
        let name = self.expect_identifier()?;
        if self.at_sym(":") {
            let colon = self.expect_sym(":")?;
            let ty = self.type_node()?;
            if self.at_sym("=") {
                let eq = self.expect_sym("=")?;
                let value = self.expression(EXPR)?;
                return Ok(SyntaxNode::branch(
                    "typed_default_parameter",
                    vec![name, colon, ty, eq, value],
                ));
            }
            return Ok(SyntaxNode::branch("typed_parameter", vec![name, colon, ty]));
        }
        if self.at_sym("=") {
            let eq = self.expect_sym("=")?;
            let value = self.expression(EXPR)?;
            return Ok(SyntaxNode::branch(
                "default_parameter",
                vec![name, eq, value],
            ));
        }
        Ok(name)
    }

    fn class_definition(&mut self) -> PResult<SyntaxNode> {
        let mut children = vec![self.expect_sym("class")?, self.expect_identifier()?];
        if self.at_sym("(") {
            children.push(self.argument_list()?);
        }
        children.push(self.expect_sym(":")?);
        children.push(self.block()?);
        Ok(SyntaxNode::branch("class_definition", children))
    }

    fn decorated_definition(&mut self) -> PResult<SyntaxNode> {
        let mut children = Vec::new();
        while self.at_sym("@") {
            let at = self.expect_sym("@")?;
            let expr = self.expression(EXPR)?;
            children.push(SyntaxNode::branch("decorator", vec![at, expr]));
            if self.kind() == TokKind::Comment {
                let c = self.comment_leaf();
                children.push(c);
            }
            if self.kind() == TokKind::Newline {
                self.bump();
            } else {
                return Err(());
            }
            while self.kind() == TokKind::Comment {
                let c = self.comment_leaf();
                children.push(c);
                if self.kind() == TokKind::Newline {
                    self.bump();
                }
            }
        }
        let definition = match self.kind() {
            TokKind::Sym("def") => self.function_definition()?,
            TokKind::Sym("class") => self.class_definition()?,
            _ => return Err(()),
        };
        children.push(definition);
        Ok(SyntaxNode::branch("decorated_definition", children))
    }

    fn if_statement(&mut self) -> PResult<SyntaxNode> {
        let mut children = vec![self.expect_sym("if")?, self.expression(EXPR)?];
        children.push(self.expect_sym(":")?);
        children.push(self.block()?);
        while self.at_sym("elif") {
            let mut clause = vec![self.expect_sym("elif")?, self.expression(EXPR)?];
            clause.push(self.expect_sym(":")?);
            clause.push(self.block()?);
            children.push(SyntaxNode::branch("elif_clause", clause));
        }
        if let Some(clause) = self.else_clause()? {
            children.push(clause);
        }
        Ok(SyntaxNode::branch("if_statement", children))
    }

    fn else_clause(&mut self) -> PResult<Option<SyntaxNode>> {
        if !self.at_sym("else") {
            return Ok(None);
        }
        let mut clause = vec![self.expect_sym("else")?, self.expect_sym(":")?];
        clause.push(self.block()?);
        Ok(Some(SyntaxNode::branch("else_clause", clause)))
    }

    fn for_statement(&mut self) -> PResult<SyntaxNode> {
        let mut children = vec![self.expect_sym("for")?, self.target_list()?];
        children.push(self.expect_sym("in")?);
        children.push(self.expression_list()?);
        children.push(self.expect_sym(":")?);
        children.push(self.block()?);
        if let Some(clause) = self.else_clause()? {
            children.push(clause);
        }
        Ok(SyntaxNode::branch("for_statement", children))
    }

    fn while_statement(&mut self) -> PResult<SyntaxNode> {
        let mut children = vec![self.expect_sym("while")?, self.expression(EXPR)?];
        children.push(self.expect_sym(":")?);
        children.push(self.block()?);
        if let Some(clause) = self.else_clause()? {
            children.push(clause);
        }
        Ok(SyntaxNode::branch("while_statement", children))
    }

    fn with_statement(&mut self) -> PResult<SyntaxNode> {
        let with = self.expect_sym("with")?;
        let mut clause = vec![self.with_item()?];
        while self.at_sym(",") {
            clause.push(self.expect_sym(",")?);
            clause.push(self.with_item()?);
        }
        let clause = SyntaxNode::branch("with_clause", clause);
        let colon = self.expect_sym(":")?;
        let block = self.block()?;
        Ok(SyntaxNode::branch(
            "with_statement",
            vec![with, clause, colon, block],
        ))
    }

    fn with_item(&mut self) -> PResult<SyntaxNode> {
        let value = self.expression(EXPR)?;
        let inner = if self.at_sym("as") {
            let kw = self.expect_sym("as")?;
            let target = self.postfix_expression()?;
            SyntaxNode::branch("as_pattern", vec![value, kw, target])
        } else {
            value
        };
        Ok(SyntaxNode::branch("with_item", vec![inner]))
    }

    /// Suite after a header's `:`. Either an indented statement list or the
    /// remainder of the line.
    fn block(&mut self) -> PResult<SyntaxNode> {
        let mut children = Vec::new();
        // A trailing comment on the header line sits before the newline.
        while self.kind() == TokKind::Comment {
            let c = self.comment_leaf();
            children.push(c);
        }
        if self.kind() == TokKind::Newline {
            self.bump();
            // Comment-only lines before the first indented statement.
            while self.kind() == TokKind::Comment {
                let c = self.comment_leaf();
                children.push(c);
            }
            if self.kind() != TokKind::Indent {
                return Err(());
            }
            self.bump();
            let stmts = self.statements(true);
            if self.kind() == TokKind::Dedent {
                self.bump();
            }
            children.extend(stmts);
        } else {
            children.extend(self.simple_statement_line()?);
        }
        if children.is_empty() {
            return Err(());
        }
        Ok(SyntaxNode::branch("block", children))
    }

    // ------------------------------------------------------------------
    // Expressions
    // ------------------------------------------------------------------

    /// `for` targets: postfix-level expressions so the `in` keyword is never
    /// consumed as a comparison operator.
    fn target_list(&mut self) -> PResult<SyntaxNode> {
        let first = self.postfix_expression()?;
        if !self.at_sym(",") {
            return Ok(first);
        }
        let mut children = vec![first];
        while self.at_sym(",") {
            children.push(self.expect_sym(",")?);
            if self.at_sym("in") || !self.starts_expression() {
                break;
            }
            children.push(self.postfix_expression()?);
        }
        Ok(SyntaxNode::branch("pattern_list", children))
    }

    /// Comma-separated expressions outside brackets.
    fn expression_list(&mut self) -> PResult<SyntaxNode> {
        let first = self.expression(EXPR)?;
        if !self.at_sym(",") {
            return Ok(first);
        }
        let mut children = vec![first];
        while self.at_sym(",") {
            children.push(self.expect_sym(",")?);
            if !self.starts_expression() {
                break;
            }
            children.push(self.expression(EXPR)?);
        }
        Ok(SyntaxNode::branch("expression_list", children))
    }

    fn expression(&mut self, min_prec: u8) -> PResult<SyntaxNode> {
        let mut lhs = match self.kind() {
            TokKind::Sym("not") if self.peek_ahead(1).kind != TokKind::Sym("in") => {
                let kw = self.expect_sym("not")?;
                let operand = self.expression(COMPARISON)?;
                SyntaxNode::branch("not_operator", vec![kw, operand])
            }
            TokKind::Sym(s @ ("-" | "+" | "~")) => {
                let tok = self.bump();
                let operand = self.expression(UNARY)?;
                SyntaxNode::branch(
                    "unary_operator",
                    vec![SyntaxNode::leaf(s, tok.span), operand],
                )
            }
            _ => self.postfix_expression()?,
        };
        loop {
            let sym = match self.kind() {
                TokKind::Sym("not") if self.peek_ahead(1).kind == TokKind::Sym("in") => "not",
                TokKind::Sym(s) => s,
                _ => break,
            };
            let (prec, right_assoc) = match infix_precedence(sym) {
                Some(p) => p,
                None if sym == "not" => (COMPARISON, false),
                None => break,
            };
            if prec < min_prec {
                break;
            }
            if prec == COMPARISON {
                lhs = self.comparison_chain(lhs)?;
                continue;
            }
            let op = self.bump();
            let rhs = self.expression(if right_assoc { prec } else { prec + 1 })?;
            let node_type = match sym {
                "and" | "or" => "boolean_operator",
                _ => "binary_operator",
            };
            lhs = SyntaxNode::branch(
                node_type,
                vec![lhs, SyntaxNode::leaf(sym, op.span), rhs],
            );
        }
        Ok(lhs)
    }

    /// `a < b <= c`, `x not in xs`, `y is not None`: one node per chain with
    /// the operator words as individual leaves.
    fn comparison_chain(&mut self, first: SyntaxNode) -> PResult<SyntaxNode> {
        let mut children = vec![first];
        loop {
            match self.kind() {
                TokKind::Sym(s @ ("<" | ">" | "<=" | ">=" | "==" | "!=" | "in")) => {
                    let tok = self.bump();
                    children.push(SyntaxNode::leaf(s, tok.span));
                }
                TokKind::Sym("is") => {
                    children.push(self.expect_sym("is")?);
                    if let Some(not) = self.eat_sym("not") {
                        children.push(not);
                    }
                }
                TokKind::Sym("not") if self.peek_ahead(1).kind == TokKind::Sym("in") => {
                    children.push(self.expect_sym("not")?);
                    children.push(self.expect_sym("in")?);
                }
                _ => break,
            }
            children.push(self.expression(COMPARISON + 1)?);
        }
        if children.len() == 1 {
            return Err(());
        }
        Ok(SyntaxNode::branch("comparison_operator", children))
    }

    fn postfix_expression(&mut self) -> PResult<SyntaxNode> {
        let mut node = self.atom()?;
        loop {
            match self.kind() {
                TokKind::Sym("(") => {
                    let args = self.argument_list()?;
                    node = SyntaxNode::branch("call", vec![node, args]);
                }
                TokKind::Sym("[") => {
                    node = self.subscript(node)?;
                }
                TokKind::Sym(".") => {
                    let dot = self.expect_sym(".")?;
                    let name = self.expect_identifier()?;
                    node = SyntaxNode::branch("attribute", vec![node, dot, name]);
                }
                _ => break,
            }
        }
        Ok(node)
    }

    fn argument_list(&mut self) -> PResult<SyntaxNode> {
        let mut children = vec![self.expect_sym("(")?];
        loop {
            self.gather_comments(&mut children);
            if self.at_sym(")") {
                break;
            }
            children.push(self.argument()?);
            self.gather_comments(&mut children);
            if let Some(comma) = self.eat_sym(",") {
                children.push(comma);
            } else {
                break;
            }
        }
        self.gather_comments(&mut children);
        children.push(self.expect_sym(")")?);
        Ok(SyntaxNode::branch("argument_list", children))
    }

    fn argument(&mut self) -> PResult<SyntaxNode> {
        if let Some(stars) = self.eat_sym("**") {
            let value = self.expression(EXPR)?;
            return Ok(SyntaxNode::branch("dictionary_splat", vec![stars, value]));
        }
        if let Some(star) = self.eat_sym("*") {
            let value = self.expression(EXPR)?;
            return Ok(SyntaxNode::branch("list_splat", vec![star, value]));
        }
        if self.kind() == TokKind::Name && self.peek_ahead(1).kind == TokKind::Sym("=") {
            let name = self.expect_identifier()?;
            let eq = self.expect_sym("=")?;
            let value = self.expression(EXPR)?;
            return Ok(SyntaxNode::branch(
                "keyword_argument",
                vec![name, eq, value],
            ));
        }
        self.expression(EXPR)
    }

    fn subscript(&mut self, value: SyntaxNode) -> PResult<SyntaxNode> {
        let mut children = vec![value, self.expect_sym("[")?];
        loop {
            self.gather_comments(&mut children);
            if self.at_sym("]") {
                break;
            }
            children.push(self.subscript_element()?);
            if let Some(comma) = self.eat_sym(",") {
                children.push(comma);
            } else {
                break;
            }
        }
        children.push(self.expect_sym("]")?);
        Ok(SyntaxNode::branch("subscript", children))
    }

    /// A plain index expression or a `start:stop:step` slice.
    fn subscript_element(&mut self) -> PResult<SyntaxNode> {
        let mut parts = Vec::new();
        if !self.at_sym(":") {
            parts.push(self.expression(EXPR)?);
            if !self.at_sym(":") {
                return Ok(parts.pop().unwrap());
            }
        }
        while let Some(colon) = self.eat_sym(":") {
            parts.push(colon);
            if self.starts_expression() {
                parts.push(self.expression(EXPR)?);
            }
        }
        Ok(SyntaxNode::branch("slice", parts))
    }

    fn atom(&mut self) -> PResult<SyntaxNode> {
        match self.kind() {
            TokKind::Name => self.expect_identifier(),
            TokKind::Int => {
                let tok = self.bump();
                Ok(SyntaxNode::leaf("integer", tok.span))
            }
            TokKind::Float => {
                let tok = self.bump();
                Ok(SyntaxNode::leaf("float", tok.span))
            }
            TokKind::Str => {
                let tok = self.bump();
                let first = SyntaxNode::leaf("string", tok.span);
                if self.kind() != TokKind::Str {
                    return Ok(first);
                }
                let mut children = vec![first];
                while self.kind() == TokKind::Str {
                    let tok = self.bump();
                    children.push(SyntaxNode::leaf("string", tok.span));
                }
                Ok(SyntaxNode::branch("concatenated_string", children))
            }
            TokKind::Sym("True") => {
                let tok = self.bump();
                Ok(SyntaxNode::leaf("true", tok.span))
            }
            TokKind::Sym("False") => {
                let tok = self.bump();
                Ok(SyntaxNode::leaf("false", tok.span))
            }
            TokKind::Sym("None") => {
                let tok = self.bump();
                Ok(SyntaxNode::leaf("none", tok.span))
            }
            TokKind::Sym("(") => self.paren_group(),
            TokKind::Sym("[") => self.list_literal(),
            TokKind::Sym("{") => self.brace_literal(),
            _ => Err(()),
        }
    }

    fn paren_group(&mut self) -> PResult<SyntaxNode> {
        let open = self.expect_sym("(")?;
        let mut children = vec![open];
        self.gather_comments(&mut children);
        if self.at_sym(")") {
            children.push(self.expect_sym(")")?);
            return Ok(SyntaxNode::branch("tuple", children));
        }
        let first = self.collection_element()?;
        children.push(first);
        self.gather_comments(&mut children);
        if !self.at_sym(",") {
            children.push(self.expect_sym(")")?);
            return Ok(SyntaxNode::branch("parenthesized_expression", children));
        }
        while let Some(comma) = self.eat_sym(",") {
            children.push(comma);
            self.gather_comments(&mut children);
            if self.at_sym(")") {
                break;
            }
            children.push(self.collection_element()?);
            self.gather_comments(&mut children);
        }
        children.push(self.expect_sym(")")?);
        Ok(SyntaxNode::branch("tuple", children))
    }

    fn list_literal(&mut self) -> PResult<SyntaxNode> {
        let mut children = vec![self.expect_sym("[")?];
        loop {
            self.gather_comments(&mut children);
            if self.at_sym("]") {
                break;
            }
            children.push(self.collection_element()?);
            self.gather_comments(&mut children);
            if let Some(comma) = self.eat_sym(",") {
                children.push(comma);
            } else {
                break;
            }
        }
        self.gather_comments(&mut children);
        children.push(self.expect_sym("]")?);
        Ok(SyntaxNode::branch("list", children))
    }

    fn brace_literal(&mut self) -> PResult<SyntaxNode> {
        let mut children = vec![self.expect_sym("{")?];
        self.gather_comments(&mut children);
        if self.at_sym("}") {
            children.push(self.expect_sym("}")?);
            return Ok(SyntaxNode::branch("dictionary", children));
        }
        let first = self.collection_element()?;
        let is_dict = self.at_sym(":");
        let first = if is_dict {
            let colon = self.expect_sym(":")?;
            let value = self.expression(EXPR)?;
            SyntaxNode::branch("pair", vec![first, colon, value])
        } else {
            first
        };
        children.push(first);
        self.gather_comments(&mut children);
        while let Some(comma) = self.eat_sym(",") {
            children.push(comma);
            self.gather_comments(&mut children);
            if self.at_sym("}") {
                break;
            }
            let key = self.collection_element()?;
            let element = if is_dict {
                let colon = self.expect_sym(":")?;
                let value = self.expression(EXPR)?;
                SyntaxNode::branch("pair", vec![key, colon, value])
            } else {
                key
            };
            children.push(element);
            self.gather_comments(&mut children);
        }
        children.push(self.expect_sym("}")?);
        let node_type = if is_dict { "dictionary" } else { "set" };
        Ok(SyntaxNode::branch(node_type, children))
    }

    fn collection_element(&mut self) -> PResult<SyntaxNode> {
        if let Some(stars) = self.eat_sym("**") {
            let value = self.expression(EXPR)?;
            return Ok(SyntaxNode::branch("dictionary_splat", vec![stars, value]));
        }
        if let Some(star) = self.eat_sym("*") {
            let value = self.expression(EXPR)?;
            return Ok(SyntaxNode::branch("list_splat", vec![star, value]));
        }
        self.expression(EXPR)
    }
}

fn rename_list(mut node: SyntaxNode, name: &str) -> SyntaxNode {
    if node.node_type == "expression_list" {
        node.node_type = name.to_string();
    }
    node
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{leaves, NodeTag};

    fn types(node: &SyntaxNode) -> Vec<&str> {
        node.children.iter().map(|c| c.node_type.as_str()).collect()
    }

    fn first_stmt(doc: &[u8]) -> SyntaxNode {
        let root = parse(doc);
        root.children.into_iter().next().expect("statement")
    }

    #[test]
    fn operator_precedence_shapes_the_tree() {
        let stmt = first_stmt(b"x = 1 + 2 * 3\n");
        let assign = &stmt.children[0];
        let add = &assign.children[2];
        assert_eq!(add.node_type, "binary_operator");
        assert_eq!(types(add), vec!["integer", "+", "binary_operator"]);
    }

    #[test]
    fn power_is_right_associative() {
        let stmt = first_stmt(b"x = 2 ** 3 ** 2\n");
        let power = &stmt.children[0].children[2];
        assert_eq!(types(power), vec!["integer", "**", "binary_operator"]);
    }

    #[test]
    fn comparison_chains_are_one_node() {
        let stmt = first_stmt(b"ok = 0 <= x < 10\n");
        let cmp = &stmt.children[0].children[2];
        assert_eq!(cmp.node_type, "comparison_operator");
        assert_eq!(
            types(cmp),
            vec!["integer", "<=", "identifier", "<", "integer"]
        );
    }

    #[test]
    fn not_in_and_is_not_are_comparisons() {
        let stmt = first_stmt(b"r = a not in b\n");
        let cmp = &stmt.children[0].children[2];
        assert_eq!(types(cmp), vec!["identifier", "not", "in", "identifier"]);

        let stmt = first_stmt(b"r = a is not None\n");
        let cmp = &stmt.children[0].children[2];
        assert_eq!(types(cmp), vec!["identifier", "is", "not", "none"]);
    }

    #[test]
    fn boolean_and_not_operators() {
        let stmt = first_stmt(b"r = not a and b\n");
        let boolean = &stmt.children[0].children[2];
        assert_eq!(boolean.node_type, "boolean_operator");
        assert_eq!(types(boolean), vec!["not_operator", "and", "identifier"]);
    }

    #[test]
    fn call_attribute_subscript_chain() {
        let stmt = first_stmt(b"v = obj.items[0].get(k, default=1)\n");
        let call = &stmt.children[0].children[2];
        assert_eq!(call.node_type, "call");
        let callee = &call.children[0];
        assert_eq!(callee.node_type, "attribute");
        let args = &call.children[1];
        assert_eq!(
            types(args),
            vec!["(", "identifier", ",", "keyword_argument", ")"]
        );
    }

    #[test]
    fn splat_arguments() {
        let stmt = first_stmt(b"f(*args, **kwargs)\n");
        let args = &stmt.children[0].children[1];
        assert_eq!(
            types(args),
            vec!["(", "list_splat", ",", "dictionary_splat", ")"]
        );
    }

    #[test]
    fn chained_and_augmented_assignment() {
        let stmt = first_stmt(b"a = b = 1\n");
        let outer = &stmt.children[0];
        assert_eq!(outer.node_type, "assignment");
        assert_eq!(outer.children[2].node_type, "assignment");

        let stmt = first_stmt(b"total //= 2\n");
        let aug = &stmt.children[0];
        assert_eq!(aug.node_type, "augmented_assignment");
        assert_eq!(types(aug), vec!["identifier", "//=", "integer"]);
    }

    #[test]
    fn annotated_assignment_has_a_type_child() {
        let stmt = first_stmt(b"count: int = 0\n");
        let assign = &stmt.children[0];
        assert_eq!(types(assign), vec!["identifier", ":", "type", "=", "integer"]);
    }

    #[test]
    fn tuple_targets_become_pattern_list() {
        let stmt = first_stmt(b"a, b = 1, 2\n");
        let assign = &stmt.children[0];
        assert_eq!(assign.children[0].node_type, "pattern_list");
        assert_eq!(assign.children[2].node_type, "expression_list");
    }

    #[test]
    fn import_forms() {
        let stmt = first_stmt(b"import numpy as np\n");
        assert_eq!(stmt.node_type, "import_statement");
        assert_eq!(types(&stmt), vec!["import", "aliased_import"]);

        let stmt = first_stmt(b"from os.path import join, exists\n");
        assert_eq!(stmt.node_type, "import_from_statement");
        assert_eq!(
            types(&stmt),
            vec!["from", "dotted_name", "import", "dotted_name", ",", "dotted_name"]
        );
    }

    #[test]
    fn function_with_typed_defaults_and_return_type() {
        let doc = b"def f(a, b: int = 2, *args, **kw) -> str:\n    return a\n";
        let stmt = first_stmt(doc);
        assert_eq!(stmt.node_type, "function_definition");
        assert_eq!(
            types(&stmt),
            vec!["def", "identifier", "parameters", "->", "type", ":", "block"]
        );
        let params = &stmt.children[2];
        assert_eq!(
            types(params),
            vec![
                "(", "identifier", ",", "typed_default_parameter", ",",
                "list_splat_pattern", ",", "dictionary_splat_pattern", ")"
            ]
        );
    }

    #[test]
    fn decorated_class_with_superclass() {
        let doc = b"@register\nclass Widget(Base):\n    def run(self): pass\n";
        let stmt = first_stmt(doc);
        assert_eq!(stmt.node_type, "decorated_definition");
        assert_eq!(types(&stmt), vec!["decorator", "class_definition"]);
    }

    #[test]
    fn compound_statements_with_clauses() {
        let doc = b"if a:\n    x = 1\nelif b:\n    x = 2\nelse:\n    x = 3\n";
        let stmt = first_stmt(doc);
        assert_eq!(
            types(&stmt),
            vec!["if", "identifier", ":", "block", "elif_clause", "else_clause"]
        );

        let doc = b"for k, v in items:\n    print(k)\n";
        let stmt = first_stmt(doc);
        assert_eq!(stmt.children[1].node_type, "pattern_list");

        let doc = b"with open(p) as fh:\n    data = fh.read()\n";
        let stmt = first_stmt(doc);
        assert_eq!(stmt.node_type, "with_statement");
        let clause = &stmt.children[1];
        assert_eq!(clause.children[0].children[0].node_type, "as_pattern");
    }

    #[test]
    fn literals_and_collections() {
        let stmt = first_stmt(b"d = {'a': 1, 'b': 2}\n");
        let dict = &stmt.children[0].children[2];
        assert_eq!(dict.node_type, "dictionary");
        assert_eq!(types(dict), vec!["{", "pair", ",", "pair", "}"]);

        let stmt = first_stmt(b"s = {1, 2}\n");
        assert_eq!(stmt.children[0].children[2].node_type, "set");

        let stmt = first_stmt(b"t = (1, 2)\n");
        assert_eq!(stmt.children[0].children[2].node_type, "tuple");

        let stmt = first_stmt(b"g = (1)\n");
        assert_eq!(
            stmt.children[0].children[2].node_type,
            "parenthesized_expression"
        );

        let stmt = first_stmt(b"l = [x, 2.5, None]\n");
        let list = &stmt.children[0].children[2];
        assert_eq!(
            types(list),
            vec!["[", "identifier", ",", "float", ",", "none", "]"]
        );
    }

    #[test]
    fn slices_inside_subscripts() {
        let stmt = first_stmt(b"v = xs[1:2, ::3]\n");
        let sub = &stmt.children[0].children[2];
        assert_eq!(sub.node_type, "subscript");
        assert_eq!(
            types(sub),
            vec!["identifier", "[", "slice", ",", "slice", "]"]
        );
    }

    #[test]
    fn semicolons_split_statements() {
        let root = parse(b"a = 1; b = 2\n");
        let kinds: Vec<&str> = root.children.iter().map(|c| c.node_type.as_str()).collect();
        assert_eq!(kinds, vec!["expression_statement", ";", "expression_statement"]);
    }

    #[test]
    fn trailing_comments_attach_to_the_enclosing_block() {
        let root = parse(b"x = 1  # set x\n");
        let kinds: Vec<&str> = root.children.iter().map(|c| c.node_type.as_str()).collect();
        assert_eq!(kinds, vec!["expression_statement", "comment"]);
    }

    #[test]
    fn comment_before_first_indented_statement() {
        let doc = b"def f():\n    # leading\n    return 1\n";
        let stmt = first_stmt(doc);
        let block = stmt.children.last().unwrap();
        assert_eq!(types(block), vec!["comment", "return_statement"]);
    }

    #[test]
    fn comments_inside_argument_lists() {
        let doc = b"f(a,  # first\n  b)\n";
        let stmt = first_stmt(doc);
        let args = &stmt.children[0].children[1];
        assert_eq!(
            types(args),
            vec!["(", "identifier", ",", "comment", "identifier", ")"]
        );
    }

    #[test]
    fn concatenated_strings() {
        let stmt = first_stmt(b"msg = 'a' 'b'\n");
        let cat = &stmt.children[0].children[2];
        assert_eq!(cat.node_type, "concatenated_string");
        assert_eq!(types(cat), vec!["string", "string"]);
    }

    #[test]
    fn unsupported_constructs_recover_per_line() {
        let doc = b"try:\n    x = 1\nz = [i for i in y]\nok = 2\n";
        let root = parse(doc);
        let error_count = {
            let mut n = 0;
            root.walk(&mut |node| n += (node.node_type == "ERROR") as usize);
            n
        };
        assert!(error_count >= 2, "try header and comprehension both recover");
        let last = root.children.last().unwrap();
        assert_eq!(last.node_type, "expression_statement");
    }

    #[test]
    fn orphan_indent_wraps_parsed_statements() {
        // Balanced parentheses keep the malformed header on its own line.
        let doc = b"def f(:)\n    x = 1\n    y = 2\nz = 3\n";
        let root = parse(doc);
        assert_eq!(root.children[0].node_type, "ERROR");
        let orphan = &root.children[1];
        assert_eq!(orphan.node_type, "ERROR");
        assert_eq!(
            types(orphan),
            vec!["expression_statement", "expression_statement"]
        );
        assert_eq!(root.children[2].node_type, "expression_statement");
    }

    #[test]
    fn inline_if_else_blocks() {
        let doc = b"if x: a = 1\nelse: a = 2\n";
        let stmt = first_stmt(doc);
        assert_eq!(
            types(&stmt),
            vec!["if", "identifier", ":", "block", "else_clause"]
        );
    }

    #[test]
    fn child_spans_are_ordered_and_contained() {
        let doc: &[u8] =
            b"import os\n\n@cache\ndef f(a: int = 0) -> bool:\n    w = {'k': [1, 2][0]}\n    return a <= len(w) and not a\n";
        fn check(node: &SyntaxNode) {
            let mut cursor = node.span.start;
            for child in &node.children {
                assert!(child.span.start >= cursor, "overlap in {}", node.node_type);
                assert!(
                    node.span.contains(&child.span),
                    "{} escapes {}",
                    child.node_type,
                    node.node_type
                );
                cursor = child.span.end;
                check(child);
            }
        }
        check(&parse(doc));
    }

    #[test]
    fn leaves_under_assignment_expose_operator_text() {
        let got = leaves(&parse(b"x += 1\n"));
        assert_eq!(
            got.iter().map(|(t, _)| t.clone()).collect::<Vec<_>>(),
            vec![
                NodeTag::new("augmented_assignment", "identifier"),
                NodeTag::new("augmented_assignment", "+="),
                NodeTag::new("augmented_assignment", "integer"),
            ]
        );
    }
}
