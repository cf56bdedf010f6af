use std::fmt;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::lang::{parse_property, PctlQuery};
use crate::model::Pdtmc;
use crate::ratfunc::{parse_decimal, rational_to_f64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RequirementId {
    H1,
    H2,
    H3,
    H4,
    H5,
}

impl fmt::Display for RequirementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    MustNotExceed,
    MustMeet,
    /// Value is reported without a threshold.
    Report,
}

/// A requirement: a reachability query, optionally scaled into a cost or
/// reward, compared against a threshold.
#[derive(Clone, Debug)]
pub struct RequirementSpec {
    pub id: RequirementId,
    pub query: PctlQuery,
    pub scalar: Option<BigRational>,
    pub threshold: Option<BigRational>,
    pub direction: Direction,
}

impl RequirementSpec {
    /// Step-bounded requirements are checked numerically at run time.
    pub fn is_symbolic(&self) -> bool {
        self.query.path.step_bound().is_none()
    }

    pub fn threshold_f64(&self) -> Option<f64> {
        self.threshold.as_ref().map(rational_to_f64)
    }

    pub fn describe(&self) -> String {
        let q = self.query.to_string();
        match (&self.scalar, &self.threshold, self.direction) {
            (Some(c), Some(t), Direction::MustNotExceed) => format!("{c} * {q} <= {t}"),
            (Some(c), Some(t), Direction::MustMeet) => format!("{c} * {q} >= {t}"),
            (Some(c), _, _) => format!("{c} * {q}"),
            _ => q,
        }
    }
}

/// Numbers behind the default requirement set.
#[derive(Clone, Debug)]
pub struct MonitorConfig {
    pub c_s2: BigRational,
    pub r_s7: BigRational,
    pub max_c2: BigRational,
    /// Optional lower bound on the mitigation reward.
    pub h4_lower_bound: Option<BigRational>,
    pub h5_steps: u64,
}

impl Default for MonitorConfig {
    fn default() -> Self {
        let d = |s: &str| parse_decimal(s).expect("literal");
        Self {
            c_s2: d("10"),
            r_s7: d("10"),
            max_c2: d("3.0"),
            h4_lower_bound: None,
            h5_steps: 2,
        }
    }
}

impl MonitorConfig {
    /// Takes `C_S2`, `R_S7` and the trajectory horizon from the chain's fixed
    /// constants when they are bound there.
    pub fn for_model(p: &Pdtmc) -> Self {
        let mut cfg = Self::default();
        let fixed = p.fixed_bindings();
        if let Some(v) = fixed.get("C_S2") {
            cfg.c_s2 = v.clone();
        }
        if let Some(v) = fixed.get("R_S7") {
            cfg.r_s7 = v.clone();
        }
        if let Some(v) = fixed.get("MAX_TIME_TRAJECTORY") {
            if v.is_integer() {
                cfg.h5_steps = v.to_integer().try_into().unwrap_or(cfg.h5_steps);
            }
        }
        cfg
    }

    pub fn requirements(&self) -> Vec<RequirementSpec> {
        let q = |text: &str| parse_property(text).expect("built-in property parses");
        let h1 = q("P<=0.1 [ F s=8 ]");
        let h2 = q("P>=0.9 [ F s=3 ]");
        let h5 = q(&format!("P>=0.95 [ F<={} s=3 ]", self.h5_steps));
        vec![
            RequirementSpec {
                id: RequirementId::H1,
                threshold: h1.bound.value().cloned(),
                query: h1,
                scalar: None,
                direction: Direction::MustNotExceed,
            },
            RequirementSpec {
                id: RequirementId::H2,
                threshold: h2.bound.value().cloned(),
                query: h2,
                scalar: None,
                direction: Direction::MustMeet,
            },
            RequirementSpec {
                id: RequirementId::H3,
                query: q("P=? [ F s=2 ]"),
                scalar: Some(self.c_s2.clone()),
                threshold: Some(self.max_c2.clone()),
                direction: Direction::MustNotExceed,
            },
            RequirementSpec {
                id: RequirementId::H4,
                query: q("P=? [ F s=7 ]"),
                scalar: Some(self.r_s7.clone()),
                threshold: self.h4_lower_bound.clone(),
                direction: if self.h4_lower_bound.is_some() {
                    Direction::MustMeet
                } else {
                    Direction::Report
                },
            },
            RequirementSpec {
                id: RequirementId::H5,
                threshold: h5.bound.value().cloned(),
                query: h5,
                scalar: None,
                direction: Direction::MustMeet,
            },
        ]
    }
}
