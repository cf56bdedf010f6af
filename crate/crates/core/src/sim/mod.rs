//! Seeded discrete-event simulation of a chain under ground-truth
//! parameters, with observation mapping and a closed adaptation loop.

mod closed_loop;
mod episode;
mod observe;

pub use closed_loop::{apply_effects, run_closed_loop, ClosedLoopRun, EpisodeRecord};
pub use episode::{episode_rng, run_episode, run_open_loop, EpisodeTrace, Outcome, Sampler, Scoring, TraceStep};
pub use observe::ObservationMap;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::learner::LearnerError;
use crate::model::{ParamValuation, Violation};
use crate::monitor::{Action, MonitorError};
use crate::ratfunc::RatFuncError;

/// Generator used for every episode: ChaCha8 seeded from the run seed, with
/// the episode index as stream number.
pub const RNG_NAME: &str = "ChaCha8Rng(seed_from_u64(seed), stream=episode)";

#[derive(Debug, Error)]
pub enum SimError {
    #[error("ground truth is not a valid valuation: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidGroundTruth(Vec<Violation>),
    #[error("unknown parameter '{0}' in intervention effects")]
    UnknownParameter(String),
    #[error(transparent)]
    RatFunc(#[from] RatFuncError),
    #[error(transparent)]
    Learner(#[from] LearnerError),
    #[error(transparent)]
    Monitor(#[from] MonitorError),
}

#[derive(Clone, Debug)]
pub struct SimConfig {
    pub ground_truth: ParamValuation,
    pub episodes: u64,
    pub seed: u64,
    pub decay_rate: f64,
    /// Parameter multipliers applied to the ground truth after each decision.
    pub intervention_effects: BTreeMap<Action, BTreeMap<String, f64>>,
    pub max_steps: u64,
}

impl SimConfig {
    pub fn new(ground_truth: ParamValuation, episodes: u64, seed: u64) -> Self {
        Self {
            ground_truth,
            episodes,
            seed,
            decay_rate: 0.5,
            intervention_effects: default_effects(),
            max_steps: 10_000,
        }
    }

    pub fn without_effects(mut self) -> Self {
        self.intervention_effects.clear();
        self
    }
}

pub fn default_effects() -> BTreeMap<Action, BTreeMap<String, f64>> {
    BTreeMap::from([
        (Action::CompliantMode, BTreeMap::from([("P2".to_string(), 1.5)])),
        (Action::Abort, BTreeMap::from([("P2".to_string(), 2.0)])),
    ])
}

/// Run metadata written ahead of trace output.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunMetadata {
    pub rng: String,
    pub seed: u64,
    pub episodes: u64,
    pub decay_rate: f64,
    pub model_fingerprint: String,
}

impl RunMetadata {
    pub fn new(cfg: &SimConfig, fingerprint: &str) -> Self {
        Self {
            rng: RNG_NAME.to_string(),
            seed: cfg.seed,
            episodes: cfg.episodes,
            decay_rate: cfg.decay_rate,
            model_fingerprint: fingerprint.to_string(),
        }
    }
}
