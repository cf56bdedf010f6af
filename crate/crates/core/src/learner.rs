//! Bayesian point estimates of branch probabilities from timestamped
//! Bernoulli observations, with exponential ageing of old evidence.

use std::collections::BTreeMap;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{ParamValuation, Pdtmc};
use crate::ratfunc::rational_to_f64;

#[derive(Debug, Error, PartialEq)]
pub enum LearnerError {
    #[error("observation for {param} at time {time} precedes the last one at {last}")]
    TimeRegression { param: String, time: f64, last: f64 },
    #[error("observation for {got} fed to the belief over {expected}")]
    ParamMismatch { expected: String, got: String },
    #[error("no belief for free parameter {0}")]
    MissingBelief(String),
    #[error("invalid belief for {param}: {message}")]
    InvalidBelief { param: String, message: String },
}

/// One Bernoulli outcome for a parameter at a point in time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub param: String,
    pub outcome: bool,
    pub time: f64,
}

impl Observation {
    pub fn new(param: impl Into<String>, outcome: bool, time: f64) -> Self {
        Self {
            param: param.into(),
            outcome,
            time,
        }
    }
}

/// Aged sufficient statistics for one parameter.
///
/// After observations `x_1..x_k` at times `t_1..t_k` the accumulators hold
/// `S = sum w_l x_l` and `W = sum w_l` with `w_l = alpha^-(t_k - t_l)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeliefState {
    pub param: String,
    pub p0: f64,
    pub c0: f64,
    pub alpha: f64,
    pub k: u64,
    pub t_k: f64,
    #[serde(rename = "S")]
    pub s: f64,
    #[serde(rename = "W")]
    pub w: f64,
    /// Mix the prior against `W` instead of the raw count `k`.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub effective_count: bool,
}

impl BeliefState {
    pub fn new(param: impl Into<String>, p0: f64, c0: f64, alpha: f64) -> Result<Self, LearnerError> {
        let b = Self {
            param: param.into(),
            p0,
            c0,
            alpha,
            k: 0,
            t_k: 0.0,
            s: 0.0,
            w: 0.0,
            effective_count: false,
        };
        b.check()?;
        Ok(b)
    }

    pub fn check(&self) -> Result<(), LearnerError> {
        let bad = |message: &str| {
            Err(LearnerError::InvalidBelief {
                param: self.param.clone(),
                message: message.to_string(),
            })
        };
        if !(0.0..=1.0).contains(&self.p0) {
            return bad("prior must lie in [0, 1]");
        }
        if !(self.c0 > 0.0 && self.c0.is_finite()) {
            return bad("prior strength must be positive");
        }
        if !(self.alpha >= 1.0 && self.alpha.is_finite()) {
            return bad("decay must be at least 1");
        }
        if !(0.0 <= self.s && self.s <= self.w + 1e-9) {
            return bad("aged sum must lie in [0, W]");
        }
        Ok(())
    }

    /// Folds one observation into the accumulators.
    pub fn observe(&mut self, o: &Observation) -> Result<(), LearnerError> {
        if o.param != self.param {
            return Err(LearnerError::ParamMismatch {
                expected: self.param.clone(),
                got: o.param.clone(),
            });
        }
        if self.k > 0 {
            if o.time < self.t_k {
                return Err(LearnerError::TimeRegression {
                    param: self.param.clone(),
                    time: o.time,
                    last: self.t_k,
                });
            }
            let age = self.alpha.powf(-(o.time - self.t_k));
            self.s *= age;
            self.w *= age;
        }
        self.s += if o.outcome { 1.0 } else { 0.0 };
        self.w += 1.0;
        self.k += 1;
        self.t_k = o.time;
        Ok(())
    }

    /// Prior mean shrunk towards the aged empirical mean.
    pub fn estimate(&self) -> f64 {
        if self.k == 0 || self.w == 0.0 {
            return self.p0;
        }
        let n = if self.effective_count { self.w } else { self.k as f64 };
        let mean = self.s / self.w;
        let est = self.c0 / (self.c0 + n) * self.p0 + n / (self.c0 + n) * mean;
        est.clamp(0.0, 1.0)
    }

    /// Aged empirical mean `S / W`, if any observation was seen.
    pub fn empirical_mean(&self) -> Option<f64> {
        (self.k > 0).then(|| self.s / self.w)
    }
}

/// Current estimates for every parameter that occurs in a transition of
/// `p`, clamped into its bounds. Clamps are reported as warnings.
pub fn estimate_all(
    p: &Pdtmc,
    beliefs: &BTreeMap<String, BeliefState>,
) -> Result<(ParamValuation, Vec<String>), LearnerError> {
    let mut v = ParamValuation::new();
    let mut warnings = Vec::new();
    for id in p.transition_params() {
        let name = p.space().name(id);
        let b = beliefs
            .get(name)
            .ok_or_else(|| LearnerError::MissingBelief(name.to_string()))?;
        let est = b.estimate();
        let mut value = BigRational::from_float(est).expect("estimate is finite");
        if let Some((lo, hi)) = p.param_bounds(id) {
            if value < lo {
                warnings.push(format!("{name} estimate {est} clamped to {}", rational_to_f64(&lo)));
                value = lo;
            } else if value > hi {
                warnings.push(format!("{name} estimate {est} clamped to {}", rational_to_f64(&hi)));
                value = hi;
            }
        }
        v.set(id, value);
    }
    Ok((v, warnings))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obs(x: bool, t: f64) -> Observation {
        Observation::new("p", x, t)
    }

    #[test]
    fn first_observation() {
        let mut b = BeliefState::new("p", 0.8, 1.0, 1.0).unwrap();
        assert_eq!(b.estimate(), 0.8);
        b.observe(&obs(true, 1.0)).unwrap();
        assert_eq!((b.s, b.w, b.k), (1.0, 1.0, 1));
    }

    #[test]
    fn ageing_example() {
        let mut b = BeliefState::new("p", 0.5, 1.0, 2.0).unwrap();
        b.observe(&obs(true, 1.0)).unwrap();
        b.observe(&obs(false, 2.0)).unwrap();
        assert_eq!((b.s, b.w, b.k), (0.5, 1.5, 2));
        assert!((b.estimate() - 7.0 / 18.0).abs() < 1e-15);
    }

    #[test]
    fn single_success() {
        let mut b = BeliefState::new("p", 0.5, 1.0, 1.0).unwrap();
        b.observe(&obs(true, 1.0)).unwrap();
        assert_eq!(b.estimate(), 0.75);
    }

    #[test]
    fn plain_counting_without_decay() {
        let mut b = BeliefState::new("p", 0.5, 1.0, 1.0).unwrap();
        for i in 0..10 {
            b.observe(&obs(i % 3 == 0, i as f64)).unwrap();
        }
        assert_eq!((b.s, b.w), (4.0, 10.0));
    }

    #[test]
    fn rejects_time_regression() {
        let mut b = BeliefState::new("p", 0.5, 1.0, 1.0).unwrap();
        b.observe(&obs(true, 5.0)).unwrap();
        assert!(matches!(b.observe(&obs(true, 4.0)), Err(LearnerError::TimeRegression { .. })));
        b.observe(&obs(true, 5.0)).unwrap();
        let other = Observation::new("q", true, 6.0);
        assert!(matches!(b.observe(&other), Err(LearnerError::ParamMismatch { .. })));
    }

    #[test]
    fn effective_count_flag() {
        let mut b = BeliefState::new("p", 0.5, 1.0, 2.0).unwrap();
        b.effective_count = true;
        b.observe(&obs(true, 1.0)).unwrap();
        b.observe(&obs(false, 2.0)).unwrap();
        // 1/2.5 * 0.5 + 1.5/2.5 * (1/3)
        assert!((b.estimate() - 0.4).abs() < 1e-15);
    }

    #[test]
    fn json_snapshot() {
        let mut b = BeliefState::new("P7", 0.8, 10.0, 1.05).unwrap();
        b.observe(&Observation::new("P7", true, 3.0)).unwrap();
        let json = serde_json::to_value(&b).unwrap();
        for key in ["param", "p0", "c0", "alpha", "k", "t_k", "S", "W"] {
            assert!(json.get(key).is_some(), "{key}");
        }
        let back: BeliefState = serde_json::from_value(json).unwrap();
        assert_eq!(back, b);
    }

    #[test]
    fn invalid_beliefs() {
        assert!(BeliefState::new("p", 1.5, 1.0, 1.0).is_err());
        assert!(BeliefState::new("p", 0.5, 0.0, 1.0).is_err());
        assert!(BeliefState::new("p", 0.5, 1.0, 0.9).is_err());
    }
}
