use num_rational::BigRational;

use super::ast::*;
use super::lexer::{tokenize, SourceSpan, Tok, Token};
use super::LangError;
use crate::ratfunc::parse_decimal;

pub(super) struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    pub(super) fn new(text: &str, hash_comments: bool) -> Result<Self, LangError> {
        let toks = tokenize(text, hash_comments)
            .map_err(|(span, message)| LangError::Syntax { span, message })?;
        Ok(Self { toks, pos: 0 })
    }

    pub(super) fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    pub(super) fn peek_at(&self, n: usize) -> &Tok {
        &self.toks[(self.pos + n).min(self.toks.len() - 1)].tok
    }

    pub(super) fn span(&self) -> SourceSpan {
        self.toks[self.pos].span
    }

    pub(super) fn prev_span(&self) -> SourceSpan {
        self.toks[self.pos.saturating_sub(1)].span
    }

    pub(super) fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub(super) fn at_eof(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }

    pub(super) fn error(&self, message: impl Into<String>) -> LangError {
        LangError::Syntax {
            span: self.span(),
            message: message.into(),
        }
    }

    pub(super) fn unexpected(&self, what: &str) -> LangError {
        self.error(format!("expected {what}, found {}", self.peek().describe()))
    }

    pub(super) fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    pub(super) fn expect(&mut self, t: Tok, what: &str) -> Result<SourceSpan, LangError> {
        if *self.peek() == t {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(what))
        }
    }

    pub(super) fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    pub(super) fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.is_keyword(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub(super) fn expect_keyword(&mut self, kw: &str) -> Result<SourceSpan, LangError> {
        if self.is_keyword(kw) {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(&format!("'{kw}'")))
        }
    }

    pub(super) fn ident(&mut self, what: &str) -> Result<(String, SourceSpan), LangError> {
        match self.peek().clone() {
            Tok::Ident(s) if !is_reserved(&s) => {
                let span = self.bump().span;
                Ok((s, span))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    pub(super) fn number(&mut self) -> Result<(BigRational, String, SourceSpan), LangError> {
        match self.peek().clone() {
            Tok::Number(text) => {
                let span = self.bump().span;
                let value = parse_decimal(&text).ok_or(LangError::Syntax {
                    span,
                    message: format!("malformed number '{text}'"),
                })?;
                Ok((value, text, span))
            }
            _ => Err(self.unexpected("a number")),
        }
    }

    // expression grammar, loosest binding first:
    //   or := and ("|" and)*
    //   and := not ("&" not)*
    //   not := "!" not | rel
    //   rel := add (relop add)?
    //   add := mul (("+"|"-") mul)*
    //   mul := unary (("*"|"/") unary)*
    //   unary := "-" unary | atom
    pub(super) fn expr(&mut self) -> Result<Expr, LangError> {
        let mut lhs = self.and_expr()?;
        while self.eat(&Tok::Or) {
            let rhs = self.and_expr()?;
            lhs = Expr::binary(BinaryOp::Or, lhs, rhs);
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> Result<Expr, LangError> {
        let mut lhs = self.not_expr()?;
        while self.eat(&Tok::And) {
            let rhs = self.not_expr()?;
            lhs = Expr::binary(BinaryOp::And, lhs, rhs);
        }
        Ok(lhs)
    }

    fn not_expr(&mut self) -> Result<Expr, LangError> {
        if *self.peek() == Tok::Not {
            let start = self.bump().span;
            let inner = self.not_expr()?;
            let span = start.to(inner.span);
            return Ok(Expr::new(ExprKind::Unary(UnaryOp::Not, Box::new(inner)), span));
        }
        self.rel_expr()
    }

    fn rel_expr(&mut self) -> Result<Expr, LangError> {
        let lhs = self.add_expr()?;
        let op = match self.peek() {
            Tok::Eq => BinaryOp::Eq,
            Tok::Ne => BinaryOp::Ne,
            Tok::Lt => BinaryOp::Lt,
            Tok::Le => BinaryOp::Le,
            Tok::Gt => BinaryOp::Gt,
            Tok::Ge => BinaryOp::Ge,
            _ => return Ok(lhs),
        };
        self.bump();
        let rhs = self.add_expr()?;
        Ok(Expr::binary(op, lhs, rhs))
    }

    fn add_expr(&mut self) -> Result<Expr, LangError> {
        let mut lhs = self.mul_expr()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinaryOp::Add,
                Tok::Minus => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.mul_expr()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn mul_expr(&mut self) -> Result<Expr, LangError> {
        let mut lhs = self.unary_expr()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinaryOp::Mul,
                Tok::Slash => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary_expr()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn unary_expr(&mut self) -> Result<Expr, LangError> {
        if *self.peek() == Tok::Minus {
            let start = self.bump().span;
            let inner = self.unary_expr()?;
            let span = start.to(inner.span);
            return Ok(Expr::new(ExprKind::Unary(UnaryOp::Neg, Box::new(inner)), span));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr, LangError> {
        let span = self.span();
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            Tok::Number(_) => {
                let (value, text, span) = self.number()?;
                Ok(Expr::new(ExprKind::Num { value, text }, span))
            }
            Tok::Str(s) => {
                self.bump();
                Ok(Expr::new(ExprKind::Label(s), span))
            }
            Tok::Ident(s) if s == "true" || s == "false" => {
                self.bump();
                Ok(Expr::new(ExprKind::Bool(s == "true"), span))
            }
            Tok::Ident(s) if !is_reserved(&s) => {
                self.bump();
                Ok(Expr::new(ExprKind::Ident(s), span))
            }
            _ => Err(self.unexpected("an expression")),
        }
    }
}

pub(super) fn is_reserved(s: &str) -> bool {
    matches!(
        s,
        "dtmc"
            | "const"
            | "int"
            | "double"
            | "bool"
            | "module"
            | "endmodule"
            | "init"
            | "rewards"
            | "endrewards"
            | "true"
            | "false"
    )
}
