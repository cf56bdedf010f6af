//! Runtime checks of the safety requirements by substituting parameter
//! estimates into precomputed closed forms.

mod cache;
mod decide;
mod evaluate;
mod requirement;

pub use cache::{precompute, CachedExpr, ExpressionCache};
pub use decide::{decide, Action, Decision, DecisionPolicy};
pub use evaluate::{exit_code, Monitor, MonitorReport, RequirementResult};
pub use requirement::{Direction, MonitorConfig, RequirementId, RequirementSpec};

use thiserror::Error;

use crate::engine::EngineError;
use crate::model::ModelError;
use crate::ratfunc::RatFuncError;

#[derive(Debug, Error)]
pub enum MonitorError {
    #[error("expression cache is stale: {0}")]
    StaleCache(String),
    #[error("no cached expression for {0}")]
    MissingExpression(RequirementId),
    #[error("malformed cache: {0}")]
    Malformed(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    RatFunc(#[from] RatFuncError),
}
