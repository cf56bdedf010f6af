use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::cache::ExpressionCache;
use super::decide::{decide, Decision, DecisionPolicy};
use super::requirement::{Direction, RequirementId, RequirementSpec};
use super::MonitorError;
use crate::model::{ParamValuation, Pdtmc};
use crate::ratfunc::{rational_to_f64, CompiledRf, RationalFunction};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RequirementResult {
    pub id: RequirementId,
    /// Probability times the scalar, if any.
    pub value: Option<f64>,
    pub probability: Option<f64>,
    pub threshold: Option<f64>,
    pub satisfied: Option<bool>,
    /// Signed distance to the threshold; non-negative iff satisfied.
    pub margin: Option<f64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub unevaluable: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonitorReport {
    pub time: f64,
    pub valuation: BTreeMap<String, f64>,
    pub results: Vec<RequirementResult>,
    pub warnings: Vec<String>,
}

impl MonitorReport {
    pub fn get(&self, id: RequirementId) -> Option<&RequirementResult> {
        self.results.iter().find(|r| r.id == id)
    }
}

/// 0 when every thresholded requirement holds, 3 on a violation, 4 when
/// some requirement could not be evaluated.
pub fn exit_code(report: &MonitorReport) -> i32 {
    if report.results.iter().any(|r| r.unevaluable) {
        4
    } else if report.results.iter().any(|r| r.satisfied == Some(false)) {
        3
    } else {
        0
    }
}

/// Step-bounded reachability over the chain with transition functions
/// compiled to floating point.
struct BoundedPass {
    rows: Vec<Vec<(usize, usize)>>,
    targets: Vec<bool>,
    init: usize,
    steps: u64,
}

enum Check {
    Closed(CompiledRf),
    Bounded(BoundedPass),
}

/// Compiled requirement set for one chain. Evaluation only substitutes
/// values; no model checking happens at run time.
pub struct Monitor {
    specs: Vec<RequirementSpec>,
    checks: Vec<Check>,
    branch_fns: Vec<CompiledRf>,
    branch_names: Vec<String>,
    names: Vec<(usize, String)>,
    dense_len: usize,
    pub policy: DecisionPolicy,
}

const POLE_WARNING: f64 = 1e-9;

impl Monitor {
    pub fn new(
        p: &Pdtmc,
        specs: Vec<RequirementSpec>,
        cache: &ExpressionCache,
        policy: DecisionPolicy,
    ) -> Result<Self, MonitorError> {
        let mut fn_index: HashMap<RationalFunction, usize> = HashMap::new();
        let mut branch_fns = Vec::new();
        let mut branch_names = Vec::new();
        let mut rows = Vec::with_capacity(p.num_states());
        for s in 0..p.num_states() {
            let mut row = Vec::new();
            for (d, f) in p.successors(s) {
                let i = *fn_index.entry(f.clone()).or_insert_with(|| {
                    branch_fns.push(CompiledRf::new(f));
                    branch_names.push(f.format(p.space()));
                    branch_fns.len() - 1
                });
                row.push((*d, i));
            }
            rows.push(row);
        }
        let mut checks = Vec::with_capacity(specs.len());
        for spec in &specs {
            let check = match spec.query.path.step_bound() {
                None => Check::Closed(CompiledRf::new(&cache.expression(p, spec)?)),
                Some(k) => {
                    let t: BTreeSet<usize> = p.states_satisfying(spec.query.target())?;
                    Check::Bounded(BoundedPass {
                        rows: rows.clone(),
                        targets: (0..p.num_states()).map(|s| t.contains(&s)).collect(),
                        init: p.init(),
                        steps: k,
                    })
                }
            };
            checks.push(check);
        }
        let names = p
            .transition_params()
            .into_iter()
            .map(|id| (id.index(), p.space().name(id).to_string()))
            .collect();
        Ok(Self {
            specs,
            checks,
            branch_fns,
            branch_names,
            names,
            dense_len: p.space().len(),
            policy,
        })
    }

    pub fn specs(&self) -> &[RequirementSpec] {
        &self.specs
    }

    pub fn evaluate(&self, v: &ParamValuation, time: f64) -> MonitorReport {
        let values = v.to_dense(self.dense_len);
        let mut warnings = Vec::new();
        let mut branch_values = Vec::with_capacity(self.branch_fns.len());
        for (f, name) in self.branch_fns.iter().zip(&self.branch_names) {
            let x = f.eval(&values).value;
            if !(-1e-12..=1.0 + 1e-12).contains(&x) {
                warnings.push(format!("branch probability {name} = {x} outside [0, 1]"));
            }
            branch_values.push(x);
        }
        let mut results = Vec::with_capacity(self.specs.len());
        for (spec, check) in self.specs.iter().zip(&self.checks) {
            let probability = match check {
                Check::Closed(f) => {
                    let r = f.eval(&values);
                    if r.denominator == 0.0 || !r.value.is_finite() {
                        warnings.push(format!("{}: pole at the current estimates", spec.id));
                        None
                    } else {
                        if r.denominator.abs() < POLE_WARNING {
                            warnings.push(format!("{}: close to a pole (denominator {:e})", spec.id, r.denominator));
                        }
                        Some(r.value)
                    }
                }
                Check::Bounded(b) => Some(b.run(&branch_values)),
            };
            results.push(judge(spec, probability));
        }
        MonitorReport {
            time,
            valuation: self
                .names
                .iter()
                .map(|(i, n)| (n.clone(), values.get(*i).copied().unwrap_or(f64::NAN)))
                .collect(),
            results,
            warnings,
        }
    }

    pub fn decide(&self, report: &MonitorReport) -> Decision {
        decide(report, &self.policy)
    }
}

impl BoundedPass {
    fn run(&self, probs: &[f64]) -> f64 {
        let n = self.rows.len();
        let mut x: Vec<f64> = self.targets.iter().map(|&t| if t { 1.0 } else { 0.0 }).collect();
        let mut next = x.clone();
        for _ in 0..self.steps {
            for s in 0..n {
                if !self.targets[s] {
                    next[s] = self.rows[s].iter().map(|&(d, f)| probs[f] * x[d]).sum();
                }
            }
            std::mem::swap(&mut x, &mut next);
        }
        x[self.init]
    }
}

fn judge(spec: &RequirementSpec, probability: Option<f64>) -> RequirementResult {
    let threshold = spec.threshold_f64();
    let Some(p) = probability else {
        return RequirementResult {
            id: spec.id,
            value: None,
            probability: None,
            threshold,
            satisfied: None,
            margin: None,
            unevaluable: true,
        };
    };
    let value = match &spec.scalar {
        Some(c) => rational_to_f64(c) * p,
        None => p,
    };
    let margin = match (spec.direction, threshold) {
        (Direction::MustNotExceed, Some(t)) => Some(t - value),
        (Direction::MustMeet, Some(t)) => Some(value - t),
        _ => None,
    };
    RequirementResult {
        id: spec.id,
        value: Some(value),
        probability: Some(p),
        threshold,
        satisfied: margin.map(|m| m >= 0.0),
        margin,
        unevaluable: false,
    }
}
