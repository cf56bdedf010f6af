use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::evaluate::MonitorReport;
use super::requirement::RequirementId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Action {
    Continue,
    CompliantMode,
    Abort,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub action: Action,
    pub triggered_by: BTreeSet<String>,
    pub rationale: String,
}

/// Thresholds of the adaptation ladder.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionPolicy {
    /// Probability of undetected escalation above which the controller
    /// switches to compliant behaviour.
    pub escalation_risk: f64,
    /// Abort once the abort probability exceeds this multiple of its bound.
    pub abort_factor: f64,
    /// Action when a requirement cannot be evaluated.
    pub unevaluable: Action,
}

impl Default for DecisionPolicy {
    fn default() -> Self {
        Self {
            escalation_risk: 0.5,
            abort_factor: 2.0,
            unevaluable: Action::CompliantMode,
        }
    }
}

pub const ESCALATION_RULE: &str = "escalation-risk";

/// Applies the policy to a report. The strongest fired action wins; every
/// fired rule is listed.
pub fn decide(report: &MonitorReport, policy: &DecisionPolicy) -> Decision {
    let mut fired: Vec<(Action, String, String)> = Vec::new();
    for r in &report.results {
        if r.unevaluable {
            fired.push((policy.unevaluable, format!("{}-unevaluable", r.id), format!("{} could not be evaluated", r.id)));
        }
    }
    if let Some(h3) = report.get(RequirementId::H3) {
        if let Some(p) = h3.probability.filter(|p| *p > policy.escalation_risk) {
            fired.push((
                Action::CompliantMode,
                ESCALATION_RULE.to_string(),
                format!("escalation risk {p:.4} > {}", policy.escalation_risk),
            ));
        }
        if h3.satisfied == Some(false) {
            fired.push((
                Action::Abort,
                "H3".to_string(),
                format!("escalation cost {:.4} exceeds {}", h3.value.unwrap_or(f64::NAN), h3.threshold.unwrap_or(f64::NAN)),
            ));
        }
    }
    if let Some(h1) = report.get(RequirementId::H1) {
        if h1.satisfied == Some(false) {
            let (v, t) = (h1.value.unwrap_or(f64::NAN), h1.threshold.unwrap_or(f64::NAN));
            fired.push((Action::CompliantMode, "H1".to_string(), format!("abort probability {v:.4} > {t}")));
            if v > policy.abort_factor * t {
                fired.push((
                    Action::Abort,
                    "H1-critical".to_string(),
                    format!("abort probability {v:.4} > {} x {t}", policy.abort_factor),
                ));
            }
        }
    }
    let action = fired.iter().map(|f| f.0).max().unwrap_or(Action::Continue);
    let rationale = if fired.is_empty() {
        "all monitored requirements within bounds".to_string()
    } else {
        fired.iter().map(|f| f.2.clone()).collect::<Vec<_>>().join("; ")
    };
    Decision {
        action,
        triggered_by: fired.into_iter().map(|f| f.1).collect(),
        rationale,
    }
}
