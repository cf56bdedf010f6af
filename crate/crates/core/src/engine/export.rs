use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::symbolic::{EliminationStats, SymbolicResult};
use crate::ratfunc::{rational_to_f64, ParamSpace, RatFuncError, RationalFunction};

pub const ENVELOPE_FORMAT: &str = "radcheck-symbolic/1";

/// Stable JSON form of a closed-form result.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolicEnvelope {
    pub format: String,
    pub query: String,
    pub expression: String,
    pub free_parameters: Vec<String>,
    /// Exact values as `n/d` strings.
    pub fixed_bindings: BTreeMap<String, String>,
    pub states_eliminated: usize,
    pub max_terms: usize,
}

impl SymbolicResult {
    pub fn envelope(&self) -> SymbolicEnvelope {
        SymbolicEnvelope {
            format: ENVELOPE_FORMAT.to_string(),
            query: self.query.to_string(),
            expression: self.format(),
            free_parameters: self.free_params.iter().map(|id| self.space.name(*id).to_string()).collect(),
            fixed_bindings: self
                .fixed_bindings
                .iter()
                .map(|(k, v)| (k.clone(), v.to_string()))
                .collect(),
            states_eliminated: self.stats.states_eliminated,
            max_terms: self.stats.max_terms,
        }
    }
}

impl SymbolicEnvelope {
    pub fn stats(&self) -> EliminationStats {
        EliminationStats {
            states_eliminated: self.states_eliminated,
            max_terms: self.max_terms,
        }
    }

    /// Reparses the expression, interning names into `space`.
    pub fn expression(&self, space: &mut ParamSpace) -> Result<RationalFunction, RatFuncError> {
        RationalFunction::parse(&self.expression, space)
    }

    pub fn fixed_f64(&self) -> BTreeMap<String, f64> {
        self.fixed_bindings
            .iter()
            .filter_map(|(k, v)| {
                let r: num_rational::BigRational = v.parse().ok()?;
                Some((k.clone(), rational_to_f64(&r)))
            })
            .collect()
    }
}
