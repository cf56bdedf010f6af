//! Exact multivariate polynomial and rational-function arithmetic.

mod compiled;
mod gcd;
mod monomial;
mod parse;
mod poly;
mod rational;
mod space;

use thiserror::Error;

pub use compiled::{CompiledRf, F64Eval};
pub use monomial::Monomial;
pub use parse::parse_decimal;
pub use poly::{rational_to_f64, Point, Polynomial};
pub use rational::{int_term, RationalFunction};
pub use space::{ParamId, ParamSpace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RatFuncError {
    #[error("division by the zero function")]
    DivisionByZeroFunction,
    #[error("denominator vanishes at the evaluation point")]
    PoleAtPoint,
    #[error("parameter {0} is not bound")]
    UnboundParameter(ParamId),
    #[error("syntax error at byte {pos}: {message}")]
    Syntax { pos: usize, message: String },
}

impl RationalFunction {
    /// Parses an expression, interning unknown identifiers into `space`.
    pub fn parse(text: &str, space: &mut ParamSpace) -> Result<Self, RatFuncError> {
        parse::Parser::new(text, space).parse_all()
    }
}
