use std::collections::BTreeSet;
use std::fmt;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::lexer::SourceSpan;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Not,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Eq => "=",
            BinaryOp::Ne => "!=",
            BinaryOp::Lt => "<",
            BinaryOp::Le => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::Ge => ">=",
            BinaryOp::And => "&",
            BinaryOp::Or => "|",
        }
    }

    pub(crate) fn precedence(self) -> u8 {
        match self {
            BinaryOp::Or => 1,
            BinaryOp::And => 2,
            BinaryOp::Eq | BinaryOp::Ne | BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge => 4,
            BinaryOp::Add | BinaryOp::Sub => 5,
            BinaryOp::Mul | BinaryOp::Div => 6,
        }
    }

    pub fn is_relational(self) -> bool {
        self.precedence() == 4
    }
}

#[derive(Clone, Debug)]
pub enum ExprKind {
    /// Numeric literal with its exact value and source text.
    Num { value: BigRational, text: String },
    Bool(bool),
    Ident(String),
    /// Quoted atom reference such as `"s=7"` (property files only).
    Label(String),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
}

#[derive(Clone, Debug)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: SourceSpan,
}

/// Structural equality; spans are ignored.
impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        match (&self.kind, &other.kind) {
            (ExprKind::Num { value: a, .. }, ExprKind::Num { value: b, .. }) => a == b,
            (ExprKind::Bool(a), ExprKind::Bool(b)) => a == b,
            (ExprKind::Ident(a), ExprKind::Ident(b)) => a == b,
            (ExprKind::Label(a), ExprKind::Label(b)) => a == b,
            (ExprKind::Unary(o1, a), ExprKind::Unary(o2, b)) => o1 == o2 && a == b,
            (ExprKind::Binary(o1, a1, b1), ExprKind::Binary(o2, a2, b2)) => {
                o1 == o2 && a1 == a2 && b1 == b2
            }
            _ => false,
        }
    }
}

impl Expr {
    pub fn new(kind: ExprKind, span: SourceSpan) -> Self {
        Self { kind, span }
    }

    pub fn ident(name: &str) -> Self {
        Self::new(ExprKind::Ident(name.to_string()), SourceSpan::default())
    }

    pub fn int(n: i64) -> Self {
        Self::new(
            ExprKind::Num {
                value: BigRational::from_integer(n.into()),
                text: n.to_string(),
            },
            SourceSpan::default(),
        )
    }

    pub fn binary(op: BinaryOp, lhs: Expr, rhs: Expr) -> Self {
        let span = lhs.span.to(rhs.span);
        Self::new(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), span)
    }

    /// `name = value`, the form used for generated atoms.
    pub fn var_equals(name: &str, value: i64) -> Self {
        Self::binary(BinaryOp::Eq, Self::ident(name), Self::int(value))
    }

    fn precedence(&self) -> u8 {
        match &self.kind {
            ExprKind::Binary(op, ..) => op.precedence(),
            ExprKind::Unary(UnaryOp::Not, _) => 3,
            ExprKind::Unary(UnaryOp::Neg, _) => 7,
            _ => 8,
        }
    }

    /// Names referenced by the expression (labels excluded).
    pub fn identifiers(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_idents(&mut out);
        out
    }

    fn collect_idents(&self, out: &mut BTreeSet<String>) {
        match &self.kind {
            ExprKind::Ident(n) => {
                out.insert(n.clone());
            }
            ExprKind::Unary(_, e) => e.collect_idents(out),
            ExprKind::Binary(_, a, b) => {
                a.collect_idents(out);
                b.collect_idents(out);
            }
            _ => {}
        }
    }

    /// Visits every identifier with its span.
    pub fn for_each_ident(&self, f: &mut impl FnMut(&str, SourceSpan)) {
        match &self.kind {
            ExprKind::Ident(n) => f(n, self.span),
            ExprKind::Unary(_, e) => e.for_each_ident(f),
            ExprKind::Binary(_, a, b) => {
                a.for_each_ident(f);
                b.for_each_ident(f);
            }
            _ => {}
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn child(f: &mut fmt::Formatter<'_>, e: &Expr, paren: bool) -> fmt::Result {
            if paren {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        }
        match &self.kind {
            ExprKind::Num { text, .. } => f.write_str(text),
            ExprKind::Bool(b) => write!(f, "{b}"),
            ExprKind::Ident(n) => f.write_str(n),
            ExprKind::Label(l) => write!(f, "\"{l}\""),
            ExprKind::Unary(UnaryOp::Neg, e) => {
                f.write_str("-")?;
                child(f, e, e.precedence() < 7)
            }
            ExprKind::Unary(UnaryOp::Not, e) => {
                f.write_str("!")?;
                child(f, e, e.precedence() < 3)
            }
            ExprKind::Binary(op, a, b) => {
                let p = op.precedence();
                let left_paren = if op.is_relational() {
                    a.precedence() <= p
                } else {
                    a.precedence() < p
                };
                child(f, a, left_paren)?;
                match op {
                    BinaryOp::Mul | BinaryOp::Div | BinaryOp::Eq | BinaryOp::Ne
                    | BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge => {
                        f.write_str(op.symbol())?
                    }
                    _ => write!(f, " {} ", op.symbol())?,
                }
                child(f, b, b.precedence() <= p)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConstType {
    Int,
    Double,
    Bool,
}

#[derive(Clone, Debug)]
pub struct ConstDecl {
    pub name: String,
    pub ty: ConstType,
    /// `None` marks a symbolic parameter.
    pub value: Option<Expr>,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, PartialEq)]
pub enum VarDomain {
    Range(Expr, Expr),
    Bool,
}

#[derive(Clone, Debug)]
pub struct VarDecl {
    pub name: String,
    pub domain: VarDomain,
    pub init: Expr,
    pub span: SourceSpan,
}

#[derive(Clone, Debug)]
pub struct Update {
    pub var: String,
    pub value: Expr,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    pub prob: Expr,
    pub updates: Vec<Update>,
}

#[derive(Clone, Debug)]
pub struct Command {
    pub guard: Expr,
    pub branches: Vec<Branch>,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RewardItem {
    pub guard: Expr,
    pub value: Expr,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RewardDecl {
    pub label: String,
    pub items: Vec<RewardItem>,
}

/// Structural equality that skips the `span` field.
macro_rules! spanless_eq {
    ($ty:ident { $($field:ident),* }) => {
        impl PartialEq for $ty {
            fn eq(&self, other: &Self) -> bool {
                true $(&& self.$field == other.$field)*
            }
        }
    };
}

spanless_eq!(ConstDecl { name, ty, value });
spanless_eq!(VarDecl { name, domain, init });
spanless_eq!(Update { var, value });
spanless_eq!(Command { guard, branches });

/// Non-fatal finding reported while parsing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub span: SourceSpan,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: warning: {}", self.span, self.message)
    }
}
