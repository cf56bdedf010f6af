//! Reachability analysis: closed-form state elimination and numeric solvers.

mod export;
mod numeric;
mod symbolic;

pub use export::{SymbolicEnvelope, ENVELOPE_FORMAT};
pub use numeric::{
    bounded_reach, numeric_reach, proxy_value, reach_vector, sweep_grid, NumericMethod,
    NumericOptions,
};
pub use symbolic::{
    symbolic_reach, symbolic_reach_with, EliminationOrder, EliminationStats, SymbolicOptions,
    SymbolicResult,
};

use thiserror::Error;

use crate::model::{ModelError, Violation};
use crate::ratfunc::RatFuncError;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("elimination blew up: {terms} terms exceed the cap of {cap}; fix more constants and retry")]
    EliminationBlowup { terms: usize, cap: usize },
    #[error("value iteration did not converge after {iterations} iterations (last change {delta:e})")]
    NonConvergence { iterations: u64, delta: f64 },
    #[error("singular system while solving for reachability")]
    Singular,
    #[error("invalid valuation: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidValuation(Vec<Violation>),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    RatFunc(#[from] RatFuncError),
}
