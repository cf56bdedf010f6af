use crate::learner::Observation;
use crate::model::Pdtmc;

use super::episode::EpisodeTrace;

/// For each command branch whose probability is a bare parameter name, the
/// Bernoulli observation it yields: 1 when that branch is taken, 0 when a
/// sibling branch is.
pub struct ObservationMap {
    params: Vec<Vec<Option<String>>>,
}

impl ObservationMap {
    pub fn new(p: &Pdtmc) -> Self {
        let transition = p.transition_params();
        let mut params: Vec<Vec<Option<String>>> = Vec::new();
        for s in 0..p.num_states() {
            let c = p.choice(s);
            if c.command == usize::MAX {
                continue;
            }
            if params.len() <= c.command {
                params.resize(c.command + 1, Vec::new());
            }
            if params[c.command].is_empty() {
                let n = c.branches.iter().map(|b| b.branch + 1).max().unwrap_or(0);
                params[c.command] = (0..n)
                    .map(|i| {
                        let text = p.branch_text(c.command, i).trim();
                        p.space()
                            .id(text)
                            .filter(|id| transition.contains(id))
                            .map(|_| text.to_string())
                    })
                    .collect();
            }
        }
        Self { params }
    }

    /// Observations for a transition between two values of `var`, as
    /// reported by an external event source. The first matching command is
    /// used.
    pub fn transition(&self, p: &Pdtmc, var: &str, from: i64, to: i64, time: f64) -> Vec<Observation> {
        for s in 0..p.num_states() {
            if p.value_of(s, var) != Some(from) {
                continue;
            }
            let c = p.choice(s);
            let Some(branches) = self.params.get(c.command) else {
                continue;
            };
            if let Some(taken) = c.branches.iter().find(|b| p.value_of(b.dst, var) == Some(to)) {
                return branches
                    .iter()
                    .enumerate()
                    .filter_map(|(i, n)| n.as_ref().map(|n| Observation::new(n.clone(), i == taken.branch, time)))
                    .collect();
            }
        }
        Vec::new()
    }

    /// Observations for one trace; step `i` is stamped `start + i`.
    pub fn map(&self, trace: &EpisodeTrace, start: f64) -> Vec<Observation> {
        let mut out = Vec::new();
        for st in &trace.steps {
            let Some(branches) = self.params.get(st.command) else {
                continue;
            };
            let time = start + st.step as f64;
            for (i, name) in branches.iter().enumerate() {
                if let Some(name) = name {
                    out.push(Observation::new(name.clone(), i == st.branch, time));
                }
            }
        }
        out
    }
}
