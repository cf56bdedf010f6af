use std::collections::BTreeSet;

use rayon::prelude::*;

use super::symbolic::SymbolicResult;
use super::EngineError;
use crate::lang::ast::Expr;
use crate::model::{ParamValuation, Pdtmc, StateId};
use crate::ratfunc::{rational_to_f64, CompiledRf, ParamId};
use num_rational::BigRational;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum NumericMethod {
    #[default]
    LinearSolve,
    ValueIteration,
}

#[derive(Clone, Copy, Debug)]
pub struct NumericOptions {
    pub tolerance: f64,
    pub max_iterations: u64,
    pub method: NumericMethod,
}

impl Default for NumericOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-12,
            max_iterations: 1_000_000,
            method: NumericMethod::LinearSolve,
        }
    }
}

type Rows = Vec<Vec<(StateId, f64)>>;

fn instantiate(p: &Pdtmc, v: &ParamValuation) -> Result<Rows, EngineError> {
    let violations = p.validate_valuation(v);
    if !violations.is_empty() {
        return Err(EngineError::InvalidValuation(violations));
    }
    let mut rows = p.instantiate(v)?;
    for r in &mut rows {
        r.retain(|(_, x)| *x != 0.0);
    }
    Ok(rows)
}

/// States with positive probability of reaching `targets`.
fn can_reach(rows: &Rows, targets: &BTreeSet<StateId>) -> Vec<bool> {
    let mut preds = vec![Vec::new(); rows.len()];
    for (s, r) in rows.iter().enumerate() {
        for (d, _) in r {
            preds[*d].push(s);
        }
    }
    let mut yes = vec![false; rows.len()];
    let mut stack: Vec<StateId> = targets.iter().copied().collect();
    for &t in targets {
        yes[t] = true;
    }
    while let Some(s) = stack.pop() {
        for &a in &preds[s] {
            if !yes[a] {
                yes[a] = true;
                stack.push(a);
            }
        }
    }
    yes
}

/// Probability of eventually reaching `target` from every state.
pub fn reach_vector(
    p: &Pdtmc,
    v: &ParamValuation,
    target: &Expr,
    opts: NumericOptions,
) -> Result<Vec<f64>, EngineError> {
    let targets = p.states_satisfying(target)?;
    let rows = instantiate(p, v)?;
    let n = rows.len();
    let good = can_reach(&rows, &targets);
    let unknown: Vec<StateId> = (0..n).filter(|s| good[*s] && !targets.contains(s)).collect();
    let mut x = vec![0.0; n];
    for &t in &targets {
        x[t] = 1.0;
    }
    if unknown.is_empty() {
        return Ok(x);
    }
    match opts.method {
        NumericMethod::LinearSolve => solve_linear(&rows, &targets, &unknown, &mut x)?,
        NumericMethod::ValueIteration => iterate(&rows, &targets, &unknown, &mut x, opts)?,
    }
    Ok(x)
}

fn solve_linear(
    rows: &Rows,
    targets: &BTreeSet<StateId>,
    unknown: &[StateId],
    x: &mut [f64],
) -> Result<(), EngineError> {
    let m = unknown.len();
    let mut pos = vec![usize::MAX; rows.len()];
    for (i, &s) in unknown.iter().enumerate() {
        pos[s] = i;
    }
    // augmented matrix [I - A | b]
    let w = m + 1;
    let mut a = vec![0.0; m * w];
    for (i, &s) in unknown.iter().enumerate() {
        a[i * w + i] = 1.0;
        for &(d, pr) in &rows[s] {
            if targets.contains(&d) {
                a[i * w + m] += pr;
            } else if pos[d] != usize::MAX {
                a[i * w + pos[d]] -= pr;
            }
        }
    }
    for col in 0..m {
        let pivot = (col..m)
            .max_by(|&r1, &r2| a[r1 * w + col].abs().total_cmp(&a[r2 * w + col].abs()))
            .unwrap();
        if a[pivot * w + col].abs() < 1e-300 {
            return Err(EngineError::Singular);
        }
        if pivot != col {
            for k in 0..w {
                a.swap(pivot * w + k, col * w + k);
            }
        }
        let d = a[col * w + col];
        for r in 0..m {
            if r == col {
                continue;
            }
            let f = a[r * w + col] / d;
            if f == 0.0 {
                continue;
            }
            for k in col..w {
                a[r * w + k] -= f * a[col * w + k];
            }
        }
    }
    for (i, &s) in unknown.iter().enumerate() {
        x[s] = (a[i * w + m] / a[i * w + i]).clamp(0.0, 1.0);
    }
    Ok(())
}

fn iterate(
    rows: &Rows,
    targets: &BTreeSet<StateId>,
    unknown: &[StateId],
    x: &mut [f64],
    opts: NumericOptions,
) -> Result<(), EngineError> {
    let mut delta = f64::INFINITY;
    for _ in 0..opts.max_iterations {
        let last = delta;
        delta = 0.0;
        for &s in unknown {
            let mut acc = 0.0;
            for &(d, pr) in &rows[s] {
                acc += pr * if targets.contains(&d) { 1.0 } else { x[d] };
            }
            delta = f64::max(delta, (acc - x[s]).abs());
            x[s] = acc;
        }
        // remaining error is about delta * r / (1 - r) for contraction rate r
        let rate = delta / last;
        let remaining = if rate < 1.0 { delta * rate / (1.0 - rate) } else { f64::INFINITY };
        if delta == 0.0 || (delta < opts.tolerance && remaining < opts.tolerance) {
            return Ok(());
        }
    }
    Err(EngineError::NonConvergence {
        iterations: opts.max_iterations,
        delta,
    })
}

/// Probability of eventually reaching `target` from the initial state.
pub fn numeric_reach(
    p: &Pdtmc,
    v: &ParamValuation,
    target: &Expr,
    opts: NumericOptions,
) -> Result<f64, EngineError> {
    Ok(reach_vector(p, v, target, opts)?[p.init()])
}

/// Probability of reaching `target` within `k` transitions.
pub fn bounded_reach(p: &Pdtmc, v: &ParamValuation, target: &Expr, k: u64) -> Result<f64, EngineError> {
    let targets = p.states_satisfying(target)?;
    let rows = instantiate(p, v)?;
    let n = rows.len();
    let mut x: Vec<f64> = (0..n).map(|s| if targets.contains(&s) { 1.0 } else { 0.0 }).collect();
    let mut next = x.clone();
    for _ in 0..k {
        for s in 0..n {
            if !targets.contains(&s) {
                next[s] = rows[s].iter().map(|&(d, pr)| pr * x[d]).sum();
            }
        }
        std::mem::swap(&mut x, &mut next);
    }
    Ok(x[p.init()])
}

/// `scalar` times the closed form evaluated exactly at `v`.
pub fn proxy_value(result: &SymbolicResult, scalar: &BigRational, v: &ParamValuation) -> Result<f64, EngineError> {
    let value = result.expr.eval(v.point())?;
    Ok(rational_to_f64(&(scalar * value)))
}

/// Evaluates `f` over the grid `xs × ys`, x-major. `base` supplies the
/// remaining parameters, indexed by [`ParamId`]. Poles evaluate to NaN.
pub fn sweep_grid(
    f: &CompiledRf,
    base: &[f64],
    x: (ParamId, &[f64]),
    y: (ParamId, &[f64]),
) -> Vec<f64> {
    let (xi, xs) = x;
    let (yi, ys) = y;
    xs.par_iter()
        .flat_map_iter(|&xv| {
            let mut point = base.to_vec();
            point[xi.index()] = xv;
            ys.iter()
                .map(|&yv| {
                    point[yi.index()] = yv;
                    let r = f.eval(&point);
                    if r.denominator == 0.0 { f64::NAN } else { r.value }
                })
                .collect::<Vec<_>>()
        })
        .collect()
}
