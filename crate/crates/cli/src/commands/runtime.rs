use std::collections::BTreeMap;
use std::fs;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use radcheck_core::learner::{estimate_all, BeliefState, Observation};
use radcheck_core::model::{ParamValuation, Pdtmc};
use radcheck_core::monitor::{
    exit_code, Decision, DecisionPolicy, ExpressionCache, Monitor, MonitorConfig, MonitorReport,
};
use radcheck_core::sim::{run_closed_loop, run_open_loop, ObservationMap, RunMetadata, SimConfig};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{Failure, ModelArgs, Outcome};
use crate::args::Assign;
use crate::output;

pub struct Learning<'a> {
    pub priors: &'a [Assign],
    pub c0: f64,
    pub alpha: f64,
}

impl Learning<'_> {
    fn beliefs(&self, p: &Pdtmc) -> Result<BTreeMap<String, BeliefState>, Failure> {
        let mut out = BTreeMap::new();
        for id in p.transition_params() {
            let name = p.space().name(id);
            let prior = self
                .priors
                .iter()
                .find(|a| a.name == name)
                .ok_or_else(|| Failure::usage(format!("no --prior for '{name}'")))?;
            let p0 = radcheck_core::ratfunc::rational_to_f64(&prior.value);
            let b = BeliefState::new(name, p0, self.c0, self.alpha).map_err(|e| Failure::usage(e.to_string()))?;
            out.insert(name.to_string(), b);
        }
        for a in self.priors {
            if !out.contains_key(&a.name) {
                return Err(Failure::usage(format!("--prior '{}' is not a free transition parameter", a.name)));
            }
        }
        Ok(out)
    }
}

fn load_monitor(p: &Pdtmc, cfg: &MonitorConfig, cache_path: Option<&Path>) -> Result<Monitor, Failure> {
    let specs = cfg.requirements();
    let usage = |e: radcheck_core::monitor::MonitorError| Failure::usage(e.to_string());
    let cache = match cache_path {
        Some(path) if path.exists() => {
            let text = fs::read_to_string(path)?;
            ExpressionCache::from_json(&text).map_err(usage)?
        }
        _ => {
            let cache = ExpressionCache::build(p, &specs).map_err(|e| match e {
                radcheck_core::monitor::MonitorError::Engine(e) => Failure::from(e),
                e => usage(e),
            })?;
            if let Some(path) = cache_path {
                fs::write(path, cache.to_json())?;
            }
            cache
        }
    };
    Monitor::new(p, specs, &cache, DecisionPolicy::default()).map_err(usage)
}

#[derive(Deserialize)]
struct Event {
    time: f64,
    param: Option<String>,
    outcome: Option<Value>,
    transition: Option<[i64; 2]>,
}

#[derive(Serialize)]
struct ReportLine<'a> {
    time: f64,
    values: BTreeMap<String, Option<f64>>,
    satisfied: BTreeMap<String, Option<bool>>,
    decisions: &'a Decision,
    warnings: &'a [String],
}

fn outcome(v: &Value) -> Option<bool> {
    match v {
        Value::Bool(b) => Some(*b),
        Value::Number(n) if n.as_f64() == Some(1.0) => Some(true),
        Value::Number(n) if n.as_f64() == Some(0.0) => Some(false),
        _ => None,
    }
}

fn write_report(w: &mut dyn Write, r: &MonitorReport, d: &Decision) -> io::Result<()> {
    let line = ReportLine {
        time: r.time,
        values: r.results.iter().map(|x| (x.id.to_string(), x.value)).collect(),
        satisfied: r.results.iter().map(|x| (x.id.to_string(), x.satisfied)).collect(),
        decisions: d,
        warnings: &r.warnings,
    };
    writeln!(w, "{}", serde_json::to_string(&line).expect("serializes"))
}

pub struct MonitorArgs<'a> {
    pub events: &'a Path,
    pub learning: Learning<'a>,
    pub config: MonitorConfig,
    pub cache: Option<&'a Path>,
}

pub fn monitor(m: &ModelArgs, a: &MonitorArgs, out: Option<&Path>) -> Outcome {
    let p = m.load()?;
    let mut beliefs = a.learning.beliefs(&p)?;
    let mon = load_monitor(&p, &a.config, a.cache)?;
    let map = ObservationMap::new(&p);
    let stage = p.variables().first().cloned().unwrap_or_default();
    let input: Box<dyn BufRead> = if a.events == Path::new("-") {
        Box::new(BufReader::new(io::stdin().lock()))
    } else {
        Box::new(BufReader::new(
            fs::File::open(a.events).map_err(|e| Failure::usage(format!("{}: {e}", a.events.display())))?,
        ))
    };
    let mut w = output::open(out)?;
    let mut last = None;
    let bad = |n: usize, msg: String| Failure::usage(format!("{}:{n}: {msg}", a.events.display()));
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let e: Event = serde_json::from_str(&line).map_err(|err| bad(i + 1, err.to_string()))?;
        let obs: Vec<Observation> = match (&e.param, &e.outcome, &e.transition) {
            (Some(param), Some(x), None) => {
                let x = outcome(x).ok_or_else(|| bad(i + 1, "outcome must be true/false or 0/1".into()))?;
                vec![Observation::new(param.clone(), x, e.time)]
            }
            (None, None, Some([from, to])) => {
                let obs = map.transition(&p, &stage, *from, *to, e.time);
                if obs.is_empty() {
                    eprintln!("{}:{}: transition {from}->{to} carries no parameter", a.events.display(), i + 1);
                }
                obs
            }
            _ => return Err(bad(i + 1, "expected {time, param, outcome} or {time, transition}".into())),
        };
        for o in &obs {
            let b = beliefs
                .get_mut(&o.param)
                .ok_or_else(|| bad(i + 1, format!("unknown parameter '{}'", o.param)))?;
            b.observe(o).map_err(|err| bad(i + 1, err.to_string()))?;
        }
        let (v, warnings) = estimate_all(&p, &beliefs).map_err(|err| Failure::usage(err.to_string()))?;
        let mut r = mon.evaluate(&v, e.time);
        r.warnings.extend(warnings);
        let d = mon.decide(&r);
        write_report(&mut w, &r, &d)?;
        last = Some(r);
    }
    let r = match last {
        Some(r) => r,
        None => {
            let (v, _) = estimate_all(&p, &beliefs).map_err(|err| Failure::usage(err.to_string()))?;
            let r = mon.evaluate(&v, 0.0);
            write_report(&mut w, &r, &mon.decide(&r))?;
            r
        }
    };
    w.flush()?;
    Ok(exit_code(&r))
}

pub struct SimulateArgs<'a> {
    pub truth: &'a [Assign],
    pub episodes: u64,
    pub seed: u64,
    pub decay_rate: f64,
    pub max_steps: u64,
    pub closed_loop: bool,
    pub no_effects: bool,
    pub learning: Learning<'a>,
    pub summary: Option<&'a Path>,
}

#[derive(Serialize)]
struct SummaryRow<'a> {
    episode: u64,
    outcome: &'a str,
    reward: String,
    cost: String,
    decisions: String,
}

pub fn simulate(m: &ModelArgs, a: &SimulateArgs, out: Option<&Path>) -> Outcome {
    let p = m.load()?;
    let truth = ParamValuation::from_names(p.space(), a.truth.iter().map(|t| (t.name.as_str(), t.value.clone())))
        .map_err(|e| Failure::usage(format!("--truth: {e}")))?;
    let mut cfg = SimConfig::new(truth, a.episodes, a.seed);
    cfg.decay_rate = a.decay_rate;
    cfg.max_steps = a.max_steps;
    if a.no_effects {
        cfg = cfg.without_effects();
    }
    let sim_err = |e: radcheck_core::sim::SimError| Failure::usage(e.to_string());
    let mut w = output::open(out)?;
    let meta = RunMetadata::new(&cfg, p.fingerprint());
    writeln!(w, "{}", serde_json::json!({ "metadata": meta }))?;
    let mut rows = Vec::new();
    let name = |o| match o {
        radcheck_core::sim::Outcome::Completed => "completed",
        radcheck_core::sim::Outcome::Aborted => "aborted",
        radcheck_core::sim::Outcome::Truncated => "truncated",
    };
    if a.closed_loop {
        let beliefs = a.learning.beliefs(&p)?;
        let mon = load_monitor(&p, &MonitorConfig::for_model(&p), None)?;
        let run = run_closed_loop(&p, &cfg, beliefs, &mon).map_err(sim_err)?;
        for e in &run.episodes {
            writeln!(w, "{}", serde_json::to_string(e).expect("serializes"))?;
            rows.push(SummaryRow {
                episode: e.trace.episode,
                outcome: name(e.trace.outcome),
                reward: output::g12(e.trace.reward),
                cost: output::g12(e.trace.cost),
                decisions: format!(
                    "{:?}{}",
                    e.decision.action,
                    e.decision.triggered_by.iter().map(|t| format!(";{t}")).collect::<String>()
                ),
            });
        }
    } else {
        for t in run_open_loop(&p, &cfg).map_err(sim_err)? {
            writeln!(w, "{}", serde_json::to_string(&t).expect("serializes"))?;
            rows.push(SummaryRow {
                episode: t.episode,
                outcome: name(t.outcome),
                reward: output::g12(t.reward),
                cost: output::g12(t.cost),
                decisions: String::new(),
            });
        }
    }
    w.flush()?;
    if let Some(path) = a.summary {
        let mut s = csv::Writer::from_writer(output::open(Some(path))?);
        for r in &rows {
            s.serialize(r).map_err(|e| Failure::usage(e.to_string()))?;
        }
        s.flush()?;
    }
    Ok(0)
}
