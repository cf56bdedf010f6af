use std::io::Write;
use std::path::Path;

use num_rational::BigRational;
use radcheck_core::engine::{
    bounded_reach, numeric_reach, sweep_grid, symbolic_reach, symbolic_reach_with, EliminationOrder,
    NumericOptions, SymbolicOptions,
};
use radcheck_core::lang::PctlQuery;
use radcheck_core::model::{ParamValuation, Pdtmc};
use radcheck_core::ratfunc::{rational_to_f64, CompiledRf};
use serde::Serialize;

use super::{queries, target_query, Failure, ModelArgs, Outcome, EXIT_VIOLATION};
use crate::args::Range;
use crate::output::{self, g12};

pub fn validate(m: &ModelArgs, out: Option<&Path>) -> Outcome {
    let p = m.load()?;
    let mut w = output::open(out)?;
    let free: Vec<&str> = p.free_params().iter().map(|id| p.space().name(*id)).collect();
    writeln!(w, "states: {}", p.num_states())?;
    writeln!(w, "transitions: {}", p.num_transitions())?;
    writeln!(w, "free parameters: {}", free.join(", "))?;
    writeln!(w, "fingerprint: {}", p.fingerprint())?;
    w.flush()?;
    Ok(0)
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
pub enum Order {
    MinFill,
    Index,
    ReverseIndex,
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
pub enum SymbolicFormat {
    Json,
    Text,
}

pub fn symbolic(
    m: &ModelArgs,
    property: Option<&Path>,
    target: Option<&str>,
    order: Order,
    term_cap: usize,
    format: SymbolicFormat,
    out: Option<&Path>,
) -> Outcome {
    let p = m.load()?;
    let opts = SymbolicOptions {
        order: match order {
            Order::MinFill => EliminationOrder::MinFill,
            Order::Index => EliminationOrder::Index,
            Order::ReverseIndex => EliminationOrder::ReverseIndex,
        },
        term_cap,
    };
    let mut lines = Vec::new();
    for q in queries(property, target)? {
        let r = symbolic_reach_with(&p, &q, opts)?;
        lines.push(match format {
            SymbolicFormat::Text => r.format(),
            SymbolicFormat::Json => serde_json::to_string(&r.envelope()).expect("envelope serializes"),
        });
    }
    let mut w = output::open(out)?;
    for l in lines {
        writeln!(w, "{l}")?;
    }
    w.flush()?;
    Ok(0)
}

#[derive(Serialize)]
struct CheckLine {
    query: String,
    value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    satisfied: Option<bool>,
}

pub fn check(m: &ModelArgs, property: Option<&Path>, target: Option<&str>, opts: NumericOptions, out: Option<&Path>) -> Outcome {
    let p = m.load()?;
    let v = ParamValuation::new();
    let mut lines = Vec::new();
    let mut code = 0;
    for q in queries(property, target)? {
        let value = match q.path.step_bound() {
            Some(k) => bounded_reach(&p, &v, q.target(), k)?,
            None => numeric_reach(&p, &v, q.target(), opts)?,
        };
        let satisfied = q.bound.satisfied_by(value);
        if satisfied == Some(false) {
            code = EXIT_VIOLATION;
        }
        lines.push(CheckLine {
            query: q.to_string(),
            value,
            satisfied,
        });
    }
    let mut w = output::open(out)?;
    for l in lines {
        writeln!(w, "{}", serde_json::to_string(&l).expect("serializes"))?;
    }
    w.flush()?;
    Ok(code)
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
pub enum Quantity {
    /// P=? [ F target ]
    Reach,
    /// C_S2 times the probability of reaching s=2
    ProxyCost,
    /// R_S7 times the probability of reaching s=7
    ProxyReward,
}

pub struct SweepSpec<'a> {
    pub x: &'a Range,
    pub y: &'a Range,
    pub resolution: usize,
    pub quantity: Quantity,
    pub target: Option<&'a str>,
}

fn scale_constant(p: &Pdtmc, name: &str) -> BigRational {
    p.fixed_bindings().get(name).cloned().unwrap_or_else(|| {
        eprintln!("note: {name} not fixed, using 10");
        BigRational::from_integer(10.into())
    })
}

fn axis(r: &Range, n: usize) -> Vec<f64> {
    let (lo, hi) = (rational_to_f64(&r.lo), rational_to_f64(&r.hi));
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

pub fn sweep(m: &ModelArgs, spec: &SweepSpec, out: Option<&Path>) -> Outcome {
    if spec.resolution < 2 {
        return Err(Failure::usage("--resolution must be at least 2"));
    }
    if spec.x.name == spec.y.name {
        return Err(Failure::usage("--x and --y name the same parameter"));
    }
    let p = m.load()?;
    let (query, scale): (PctlQuery, Option<BigRational>) = match spec.quantity {
        Quantity::Reach => {
            let t = spec.target.ok_or_else(|| Failure::usage("--quantity reach needs --target"))?;
            (target_query(t)?, None)
        }
        Quantity::ProxyCost => (target_query(spec.target.unwrap_or("s=2"))?, Some(scale_constant(&p, "C_S2"))),
        Quantity::ProxyReward => (target_query(spec.target.unwrap_or("s=7"))?, Some(scale_constant(&p, "R_S7"))),
    };
    let mut ids = Vec::new();
    for r in [spec.x, spec.y] {
        let id = p
            .space()
            .id(&r.name)
            .filter(|id| p.free_params().contains(id))
            .ok_or_else(|| Failure::usage(format!("'{}' is not a free parameter", r.name)))?;
        if let Some((lo, hi)) = p.param_bounds(id) {
            if r.lo < lo || r.hi > hi {
                return Err(Failure::usage(format!("range for '{}' leaves its bounds [{lo}, {hi}]", r.name)));
            }
        }
        ids.push(id);
    }
    let r = symbolic_reach(&p, &query)?;
    let extra: Vec<&str> = r
        .free_params
        .iter()
        .filter(|id| !ids.contains(id))
        .map(|id| p.space().name(*id))
        .collect();
    if !extra.is_empty() {
        return Err(Failure::usage(format!("fix the remaining parameters with --const: {}", extra.join(", "))));
    }
    let expr = match &scale {
        Some(c) => r.expr.mul(&radcheck_core::ratfunc::RationalFunction::constant(c.clone())),
        None => r.expr.clone(),
    };
    let f = CompiledRf::new(&expr);
    let (xs, ys) = (axis(spec.x, spec.resolution), axis(spec.y, spec.resolution));
    let base = vec![0.0; p.space().len()];
    let grid = sweep_grid(&f, &base, (ids[0], &xs), (ids[1], &ys));
    let mut w = csv::Writer::from_writer(output::open(out)?);
    let err = |e: csv::Error| Failure::usage(e.to_string());
    w.write_record([spec.x.name.as_str(), spec.y.name.as_str(), "value"]).map_err(err)?;
    for (i, x) in xs.iter().enumerate() {
        for (j, y) in ys.iter().enumerate() {
            w.write_record([g12(*x), g12(*y), g12(grid[i * ys.len() + j])]).map_err(err)?;
        }
    }
    w.flush()?;
    Ok(0)
}
