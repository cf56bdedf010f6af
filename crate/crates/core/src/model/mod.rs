//! Guarded-command models and their unfolding into explicit parametric DTMCs.

mod eval;
mod guarded;
mod pdtmc;
mod unfold;
mod valuation;

use std::collections::BTreeMap;

use num_rational::BigRational;
use thiserror::Error;

pub use guarded::GuardedModel;
pub use pdtmc::{BranchTarget, Choice, Pdtmc, StateId};
pub use unfold::unfold;
pub use valuation::{ParamValuation, Violation};

use crate::lang::SourceSpan;

/// Values for constants fixed at unfold time, and optional ranges for the
/// parameters left symbolic.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Bindings {
    pub values: BTreeMap<String, BigRational>,
    pub bounds: BTreeMap<String, (BigRational, BigRational)>,
}

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn fix(mut self, name: &str, value: BigRational) -> Self {
        self.values.insert(name.to_string(), value);
        self
    }

    /// Fixes a constant from decimal text such as `"0.88"`.
    pub fn fix_str(self, name: &str, value: &str) -> Self {
        let v = crate::ratfunc::parse_decimal(value)
            .unwrap_or_else(|| panic!("'{value}' is not a decimal literal"));
        self.fix(name, v)
    }

    pub fn bound(mut self, name: &str, lo: BigRational, hi: BigRational) -> Self {
        self.bounds.insert(name.to_string(), (lo, hi));
        self
    }

    pub fn get(&self, name: &str) -> Option<&BigRational> {
        self.values.get(name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("state {state}: commands {commands:?} are enabled simultaneously")]
    OverlappingGuards { state: String, commands: Vec<usize> },
    #[error("state {state}: no command is enabled (deadlock)")]
    Deadlock { state: String },
    #[error("state {state}: outgoing probabilities sum to {sum}, not 1")]
    MalformedDistribution { state: String, sum: String },
    #[error("{span}: constant '{name}' needs a value here")]
    UnboundConstant { name: String, span: SourceSpan },
    #[error("{span}: {message}")]
    Type { span: SourceSpan, message: String },
    #[error("state {state}: update sets '{var}' to {value}, outside its domain")]
    VariableOutOfRange { state: String, var: String, value: String },
    #[error("'{name}' is not a constant of the model")]
    UnknownConstant { name: String },
    #[error("binding for '{name}': {message}")]
    InvalidBinding { name: String, message: String },
    #[error("unknown atom \"{0}\"")]
    UnknownLabel(String),
}
