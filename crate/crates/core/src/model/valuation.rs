use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::pdtmc::{Pdtmc, StateId};
use crate::ratfunc::{ParamId, ParamSpace, Point, RatFuncError, RationalFunction};

/// Exact values for (some of) the parameters of a chain.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParamValuation {
    values: Point,
}

impl ParamValuation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_point(values: Point) -> Self {
        Self { values }
    }

    /// Builds a valuation from names; unknown names are rejected.
    pub fn from_names<'a>(
        space: &ParamSpace,
        values: impl IntoIterator<Item = (&'a str, BigRational)>,
    ) -> Result<Self, String> {
        let mut out = Self::new();
        for (name, v) in values {
            let id = space.id(name).ok_or_else(|| format!("unknown parameter '{name}'"))?;
            out.values.insert(id, v);
        }
        Ok(out)
    }

    /// Converts floating-point values exactly.
    pub fn from_f64<'a>(
        space: &ParamSpace,
        values: impl IntoIterator<Item = (&'a str, f64)>,
    ) -> Result<Self, String> {
        let mut pairs = Vec::new();
        for (n, v) in values {
            let r = BigRational::from_float(v).ok_or_else(|| format!("'{n}' has non-finite value {v}"))?;
            pairs.push((n, r));
        }
        Self::from_names(space, pairs)
    }

    pub fn set(&mut self, id: ParamId, value: BigRational) {
        self.values.insert(id, value);
    }

    pub fn get(&self, id: ParamId) -> Option<&BigRational> {
        self.values.get(&id)
    }

    pub fn point(&self) -> &Point {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (ParamId, &BigRational)> {
        self.values.iter().map(|(k, v)| (*k, v))
    }

    /// Dense `f64` vector indexed by [`ParamId`]; unbound entries are NaN.
    pub fn to_dense(&self, len: usize) -> Vec<f64> {
        let mut out = vec![f64::NAN; len];
        for (id, v) in &self.values {
            if id.index() < len {
                out[id.index()] = crate::ratfunc::rational_to_f64(v);
            }
        }
        out
    }

    pub fn display<'a>(&'a self, space: &'a ParamSpace) -> impl fmt::Display + 'a {
        struct D<'a>(&'a ParamValuation, &'a ParamSpace);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                for (i, (id, v)) in self.0.values.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{}={}", self.1.name(*id), crate::ratfunc::rational_to_f64(v))?;
                }
                Ok(())
            }
        }
        D(self, space)
    }
}

/// Reason a valuation is not admissible for a chain.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Unbound { param: String },
    OutOfBounds { param: String, value: f64, lo: f64, hi: f64 },
    /// A branch probability outside `[0, 1]`. Reported once per command
    /// branch, with the first offending state and how many states share it.
    Probability {
        branch: String,
        state: String,
        value: f64,
        states: usize,
    },
    Pole { branch: String, state: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Unbound { param } => write!(f, "parameter {param} is not bound"),
            Violation::OutOfBounds { param, value, lo, hi } => {
                write!(f, "parameter {param} = {value} outside [{lo}, {hi}]")
            }
            Violation::Probability { branch, state, value, states } => write!(
                f,
                "branch \"{branch}\" = {value} on state {state} (and {} more)",
                states - 1
            ),
            Violation::Pole { branch, state } => {
                write!(f, "branch \"{branch}\" has a pole on state {state}")
            }
        }
    }
}

impl Pdtmc {
    /// Checks that `v` binds every free parameter within its bounds and that
    /// every instantiated branch probability lies in `[0, 1]`.
    pub fn validate_valuation(&self, v: &ParamValuation) -> Vec<Violation> {
        let mut out = Vec::new();
        let in_transitions = self.transition_params();
        for &id in &self.free {
            let name = self.space.name(id).to_string();
            let Some(x) = v.get(id) else {
                if in_transitions.contains(&id) {
                    out.push(Violation::Unbound { param: name });
                }
                continue;
            };
            let (lo, hi) = match self.bounds.get(&id) {
                Some((lo, hi)) => (lo.clone(), hi.clone()),
                None if in_transitions.contains(&id) => (BigRational::zero(), BigRational::one()),
                None => continue,
            };
            if *x < lo || *x > hi {
                use crate::ratfunc::rational_to_f64 as f;
                out.push(Violation::OutOfBounds {
                    param: name,
                    value: f(x),
                    lo: f(&lo),
                    hi: f(&hi),
                });
            }
        }
        if out.iter().any(|e| matches!(e, Violation::Unbound { .. })) {
            return out;
        }

        let mut cache: HashMap<&RationalFunction, Result<BigRational, RatFuncError>> = HashMap::new();
        let mut seen: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (s, choice) in self.choices.iter().enumerate() {
            for b in &choice.branches {
                let r = cache.entry(&b.prob).or_insert_with(|| b.prob.eval(v.point()));
                let bad = match r {
                    Ok(x) => *x < BigRational::zero() || *x > BigRational::one(),
                    Err(_) => true,
                };
                if !bad {
                    continue;
                }
                let key = (choice.command, b.branch);
                if let Some(&i) = seen.get(&key) {
                    if let Violation::Probability { states, .. } = &mut out[i] {
                        *states += 1;
                    }
                    continue;
                }
                seen.insert(key, out.len());
                out.push(self.branch_violation(s, choice.command, b.branch, r));
            }
        }
        out
    }

    fn branch_violation(
        &self,
        s: StateId,
        command: usize,
        branch: usize,
        r: &Result<BigRational, RatFuncError>,
    ) -> Violation {
        let text = if command == usize::MAX {
            "1".to_string()
        } else {
            self.branch_text(command, branch).to_string()
        };
        match r {
            Ok(x) => Violation::Probability {
                branch: text,
                state: self.describe_state(s),
                value: crate::ratfunc::rational_to_f64(x),
                states: 1,
            },
            Err(_) => Violation::Pole {
                branch: text,
                state: self.describe_state(s),
            },
        }
    }

    /// Instantiates every transition at `v` in double precision. Distinct
    /// probability functions are evaluated once, exactly, then rounded.
    pub fn instantiate(&self, v: &ParamValuation) -> Result<Vec<Vec<(StateId, f64)>>, RatFuncError> {
        let mut cache: HashMap<&RationalFunction, f64> = HashMap::new();
        let mut rows = Vec::with_capacity(self.rows.len());
        for row in &self.rows {
            let mut r = Vec::with_capacity(row.len());
            for (d, f) in row {
                let p = match cache.get(f) {
                    Some(p) => *p,
                    None => {
                        let p = crate::ratfunc::rational_to_f64(&f.eval(v.point())?);
                        cache.insert(f, p);
                        p
                    }
                };
                r.push((*d, p));
            }
            rows.push(r);
        }
        Ok(rows)
    }
}
