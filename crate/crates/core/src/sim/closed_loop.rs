use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::episode::{episode_rng, EpisodeTrace, Sampler};
use super::observe::ObservationMap;
use super::{SimConfig, SimError};
use crate::learner::{estimate_all, BeliefState};
use crate::model::{ParamValuation, Pdtmc};
use crate::monitor::{Action, Decision, Monitor, MonitorReport};
use crate::ratfunc::rational_to_f64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub trace: EpisodeTrace,
    /// Ground truth the episode was sampled under.
    pub truth: BTreeMap<String, f64>,
    pub report: MonitorReport,
    pub decision: Decision,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedLoopRun {
    pub episodes: Vec<EpisodeRecord>,
    pub beliefs: BTreeMap<String, BeliefState>,
}

impl ClosedLoopRun {
    /// Index of the first episode whose decision fired `rule`.
    pub fn first_trigger(&self, rule: &str) -> Option<usize> {
        self.episodes.iter().position(|e| e.decision.triggered_by.contains(rule))
    }
}

/// Scales the named parameters of `base`. Results are clamped to the
/// parameter bounds; a multiplier that would leave the chain invalid is
/// halved toward 1 until it does not.
pub fn apply_effects(
    p: &Pdtmc,
    base: &ParamValuation,
    multipliers: &BTreeMap<String, f64>,
) -> Result<ParamValuation, SimError> {
    let mut out = base.clone();
    for (name, m) in multipliers {
        let id = p.space().id(name).ok_or_else(|| SimError::UnknownParameter(name.clone()))?;
        let Some(orig) = base.get(id).cloned() else {
            return Err(SimError::UnknownParameter(name.clone()));
        };
        let mut factor = *m;
        for _ in 0..60 {
            let f = BigRational::from_float(factor).unwrap_or_else(BigRational::one);
            let mut x = &orig * f;
            if let Some((lo, hi)) = p.param_bounds(id) {
                x = x.max(lo).min(hi);
            }
            out.set(id, x);
            if p.validate_valuation(&out).is_empty() {
                break;
            }
            factor = 1.0 + (factor - 1.0) / 2.0;
            out.set(id, orig.clone());
        }
    }
    Ok(out)
}

fn truth_map(p: &Pdtmc, v: &ParamValuation) -> BTreeMap<String, f64> {
    v.iter().map(|(id, x)| (p.space().name(id).to_string(), rational_to_f64(x))).collect()
}

/// Sequential loop: simulate, observe, update beliefs, evaluate, decide and
/// apply the decision's effects to the next episode's ground truth.
pub fn run_closed_loop(
    p: &Pdtmc,
    cfg: &SimConfig,
    mut beliefs: BTreeMap<String, BeliefState>,
    monitor: &Monitor,
) -> Result<ClosedLoopRun, SimError> {
    let map = ObservationMap::new(p);
    let mut truth = cfg.ground_truth.clone();
    let mut sampler = Sampler::new(p, &truth, cfg.decay_rate)?;
    let mut clock = 0.0;
    let mut episodes = Vec::with_capacity(cfg.episodes as usize);
    for e in 0..cfg.episodes {
        let trace = sampler.run(e, cfg.max_steps, &mut episode_rng(cfg.seed, e));
        for o in map.map(&trace, clock) {
            if let Some(b) = beliefs.get_mut(&o.param) {
                b.observe(&o)?;
            }
        }
        clock += trace.steps.len() as f64;
        let (estimate, warnings) = estimate_all(p, &beliefs)?;
        let mut report = monitor.evaluate(&estimate, clock);
        report.warnings.extend(warnings);
        let decision = monitor.decide(&report);
        let next = match cfg.intervention_effects.get(&decision.action) {
            Some(m) if decision.action != Action::Continue => apply_effects(p, &cfg.ground_truth, m)?,
            _ => cfg.ground_truth.clone(),
        };
        episodes.push(EpisodeRecord {
            trace,
            truth: truth_map(p, &truth),
            report,
            decision,
        });
        if next != truth {
            truth = next;
            sampler = Sampler::new(p, &truth, cfg.decay_rate)?;
        }
    }
    Ok(ClosedLoopRun { episodes, beliefs })
}
