use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::ast::{BinaryOp, Expr, ExprKind, UnaryOp};
use super::lexer::{SourceSpan, Tok};
use super::parser::Parser;
use super::LangError;

/// Probability bound of a `P` operator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProbBound {
    /// `P=?`
    Query,
    /// `P<=b`
    UpperBound(BigRational),
    /// `P>=b`
    LowerBound(BigRational),
}

impl ProbBound {
    pub fn value(&self) -> Option<&BigRational> {
        match self {
            ProbBound::Query => None,
            ProbBound::UpperBound(b) | ProbBound::LowerBound(b) => Some(b),
        }
    }

    /// Inclusive comparison against the bound; `None` for queries.
    pub fn satisfied_by(&self, p: f64) -> Option<bool> {
        use crate::ratfunc::rational_to_f64;
        match self {
            ProbBound::Query => None,
            ProbBound::UpperBound(b) => Some(p <= rational_to_f64(b)),
            ProbBound::LowerBound(b) => Some(p >= rational_to_f64(b)),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PathFormula {
    /// `F pred`
    Eventually(Expr),
    /// `F<=k pred`
    BoundedEventually(Expr, u64),
}

impl PathFormula {
    pub fn target(&self) -> &Expr {
        match self {
            PathFormula::Eventually(e) | PathFormula::BoundedEventually(e, _) => e,
        }
    }

    pub fn step_bound(&self) -> Option<u64> {
        match self {
            PathFormula::Eventually(_) => None,
            PathFormula::BoundedEventually(_, k) => Some(*k),
        }
    }
}

/// A PCTL reachability query `P⋈b [ F pred ]` or `P⋈b [ F<=k pred ]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PctlQuery {
    pub bound: ProbBound,
    pub path: PathFormula,
}

impl PctlQuery {
    pub fn eventually(bound: ProbBound, target: Expr) -> Self {
        Self {
            bound,
            path: PathFormula::Eventually(target),
        }
    }

    pub fn target(&self) -> &Expr {
        self.path.target()
    }
}

fn format_rational(r: &BigRational) -> String {
    // finite decimal expansion when the denominator is 2^a 5^b, else n/d
    let mut d = r.denom().clone();
    let two = num_bigint::BigInt::from(2);
    let five = num_bigint::BigInt::from(5);
    let (mut twos, mut fives) = (0u32, 0u32);
    while (&d % &two).is_zero() {
        d /= &two;
        twos += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        fives += 1;
    }
    if !d.is_one() {
        return format!("{}/{}", r.numer(), r.denom());
    }
    let digits = twos.max(fives) as usize;
    if digits == 0 {
        return r.numer().to_string();
    }
    let scaled = r * BigRational::from_integer(num_traits::pow(num_bigint::BigInt::from(10), digits));
    let n = scaled.to_integer();
    let s = n.magnitude().to_string();
    let s = format!("{:0>width$}", s, width = digits + 1);
    let (int, frac) = s.split_at(s.len() - digits);
    let frac = frac.trim_end_matches('0');
    let sign = if n < num_bigint::BigInt::zero() { "-" } else { "" };
    if frac.is_empty() {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

impl fmt::Display for PctlQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.bound {
            ProbBound::Query => f.write_str("P=?")?,
            ProbBound::UpperBound(b) => write!(f, "P<={}", format_rational(b))?,
            ProbBound::LowerBound(b) => write!(f, "P>={}", format_rational(b))?,
        }
        match &self.path {
            PathFormula::Eventually(e) => write!(f, " [ F {e} ]"),
            PathFormula::BoundedEventually(e, k) => write!(f, " [ F<={k} {e} ]"),
        }
    }
}

pub fn parse_property(text: &str) -> Result<PctlQuery, LangError> {
    let mut p = Parser::new(text, true)?;
    let q = parse_query(&mut p)?;
    if !p.at_eof() {
        return Err(p.unexpected("end of property"));
    }
    Ok(q)
}

/// Parses a property file: one query per non-blank line, `#` and `//`
/// comments allowed. Returns each query with its 1-based line number.
pub fn parse_property_file(text: &str) -> Result<Vec<(usize, PctlQuery)>, LangError> {
    let mut out = Vec::new();
    let mut offset = 0;
    for (i, line) in text.split('\n').enumerate() {
        let mut p = Parser::new(line, true).map_err(|e| shift(e, i + 1, offset))?;
        if !p.at_eof() {
            let q = parse_query(&mut p).map_err(|e| shift(e, i + 1, offset))?;
            if !p.at_eof() {
                return Err(shift(p.unexpected("end of line"), i + 1, offset));
            }
            out.push((i + 1, q));
        }
        offset += line.len() + 1;
    }
    Ok(out)
}

fn shift(e: LangError, line: usize, offset: usize) -> LangError {
    let fix = |s: SourceSpan| SourceSpan {
        start: s.start + offset,
        end: s.end + offset,
        line,
        column: s.column,
    };
    match e {
        LangError::Syntax { span, message } => LangError::Syntax {
            span: fix(span),
            message,
        },
        LangError::BoundOutOfRange { span, value } => LangError::BoundOutOfRange {
            span: fix(span),
            value,
        },
        other => other,
    }
}

fn parse_query(p: &mut Parser) -> Result<PctlQuery, LangError> {
    // optional `"name":` prefix
    if matches!(p.peek(), Tok::Str(_)) && *p.peek_at(1) == Tok::Colon {
        p.bump();
        p.bump();
    }
    if !p.eat_keyword("P") {
        if p.is_keyword("R") || p.is_keyword("S") {
            return Err(p.error("only P operators are supported"));
        }
        return Err(p.unexpected("'P'"));
    }
    let bound = match p.peek() {
        Tok::Eq => {
            p.bump();
            p.expect(Tok::Question, "'?'")?;
            ProbBound::Query
        }
        Tok::Le | Tok::Ge => {
            let upper = *p.peek() == Tok::Le;
            p.bump();
            let (mut value, _, span) = p.number()?;
            let mut end = span;
            if p.eat(&Tok::Slash) {
                let (d, _, s) = p.number()?;
                if d.is_zero() {
                    return Err(LangError::Syntax {
                        span: s,
                        message: "zero denominator in bound".into(),
                    });
                }
                value /= d;
                end = s;
            }
            if value < BigRational::zero() || value > BigRational::one() {
                return Err(LangError::BoundOutOfRange {
                    span: span.to(end),
                    value: format_rational(&value),
                });
            }
            if upper {
                ProbBound::UpperBound(value)
            } else {
                ProbBound::LowerBound(value)
            }
        }
        _ => return Err(p.unexpected("'=?', '<=' or '>='")),
    };
    p.expect(Tok::LBracket, "'['")?;
    if !p.eat_keyword("F") {
        return Err(p.unexpected("'F' (only reachability properties are supported)"));
    }
    let step_bound = if p.eat(&Tok::Le) {
        let (k, text, span) = p.number()?;
        if !k.is_integer() || k < BigRational::zero() {
            return Err(LangError::Syntax {
                span,
                message: format!("step bound '{text}' must be a non-negative integer"),
            });
        }
        let k: u64 = k.to_integer().try_into().map_err(|_| LangError::Syntax {
            span,
            message: "step bound too large".into(),
        })?;
        Some(k)
    } else {
        None
    };
    let target = p.expr()?;
    check_predicate(&target)?;
    p.expect(Tok::RBracket, "']'")?;
    let path = match step_bound {
        Some(k) => PathFormula::BoundedEventually(target, k),
        None => PathFormula::Eventually(target),
    };
    Ok(PctlQuery { bound, path })
}

/// Targets are conjunctions of comparisons, boolean variables, their
/// negations and quoted atoms.
fn check_predicate(e: &Expr) -> Result<(), LangError> {
    let bad = |e: &Expr| LangError::Syntax {
        span: e.span,
        message: format!("'{e}' is not a state predicate (expected a conjunction of comparisons)"),
    };
    match &e.kind {
        ExprKind::Binary(BinaryOp::And, a, b) => {
            check_predicate(a)?;
            check_predicate(b)
        }
        ExprKind::Binary(op, a, b) if op.is_relational() => {
            if is_arith(a) && is_arith(b) {
                Ok(())
            } else {
                Err(bad(e))
            }
        }
        ExprKind::Unary(UnaryOp::Not, a) => check_predicate(a),
        ExprKind::Ident(_) | ExprKind::Label(_) | ExprKind::Bool(_) => Ok(()),
        _ => Err(bad(e)),
    }
}

fn is_arith(e: &Expr) -> bool {
    match &e.kind {
        ExprKind::Num { .. } | ExprKind::Ident(_) => true,
        ExprKind::Unary(UnaryOp::Neg, a) => is_arith(a),
        ExprKind::Binary(op, a, b) => {
            matches!(op, BinaryOp::Add | BinaryOp::Sub | BinaryOp::Mul | BinaryOp::Div)
                && is_arith(a)
                && is_arith(b)
        }
        _ => false,
    }
}
