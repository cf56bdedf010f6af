use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::requirement::{RequirementId, RequirementSpec};
use super::MonitorError;
use crate::engine::{symbolic_reach, SymbolicEnvelope, SymbolicResult};
use crate::model::Pdtmc;
use crate::ratfunc::RationalFunction;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CachedExpr {
    pub id: RequirementId,
    /// Digest of the model fingerprint and the query text.
    pub fingerprint: String,
    pub result: SymbolicEnvelope,
}

/// Closed forms for the symbolic requirements of one chain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpressionCache {
    pub model_fingerprint: String,
    pub entries: Vec<CachedExpr>,
}

fn entry_fingerprint(model: &str, query: &str) -> String {
    let mut h = Sha256::new();
    h.update(model.as_bytes());
    h.update(b"\n");
    h.update(query.as_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Runs state elimination once per symbolic requirement.
pub fn precompute(p: &Pdtmc, specs: &[RequirementSpec]) -> Result<BTreeMap<RequirementId, SymbolicResult>, MonitorError> {
    let mut out = BTreeMap::new();
    for spec in specs.iter().filter(|s| s.is_symbolic()) {
        out.insert(spec.id, symbolic_reach(p, &spec.query)?);
    }
    Ok(out)
}

impl ExpressionCache {
    pub fn build(p: &Pdtmc, specs: &[RequirementSpec]) -> Result<Self, MonitorError> {
        Ok(Self::from_results(p, &precompute(p, specs)?))
    }

    pub fn from_results(p: &Pdtmc, results: &BTreeMap<RequirementId, SymbolicResult>) -> Self {
        let entries = results
            .iter()
            .map(|(id, r)| CachedExpr {
                id: *id,
                fingerprint: entry_fingerprint(p.fingerprint(), &r.query.to_string()),
                result: r.envelope(),
            })
            .collect();
        Self {
            model_fingerprint: p.fingerprint().to_string(),
            entries,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, MonitorError> {
        serde_json::from_str(text).map_err(|e| MonitorError::Malformed(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("cache serializes")
    }

    /// Closed form for `spec`, after checking that the entry was computed for
    /// this chain and this query.
    pub fn expression(&self, p: &Pdtmc, spec: &RequirementSpec) -> Result<RationalFunction, MonitorError> {
        if self.model_fingerprint != p.fingerprint() {
            return Err(MonitorError::StaleCache(
                "model text or fixed constants changed".to_string(),
            ));
        }
        let entry = self
            .entries
            .iter()
            .find(|e| e.id == spec.id)
            .ok_or(MonitorError::MissingExpression(spec.id))?;
        let query = spec.query.to_string();
        if entry.fingerprint != entry_fingerprint(p.fingerprint(), &query) || entry.result.query != query {
            return Err(MonitorError::StaleCache(format!("{} was computed for a different query", spec.id)));
        }
        let mut space = p.space().clone();
        let f = entry.result.expression(&mut space)?;
        if space.len() != p.space().len() {
            return Err(MonitorError::StaleCache(format!("{} mentions unknown parameters", spec.id)));
        }
        Ok(f)
    }
}
