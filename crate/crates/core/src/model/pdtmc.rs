use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use num_rational::BigRational;

use super::eval::{eval_concrete, Binding, Env};
use super::ModelError;
use crate::lang::ast::Expr;
use crate::ratfunc::{ParamId, ParamSpace, RationalFunction};

pub type StateId = usize;

/// One probabilistic branch of the command enabled in a state.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchTarget {
    /// Index of the branch within its command.
    pub branch: usize,
    pub dst: StateId,
    pub prob: RationalFunction,
}

/// The (unique) command enabled in a state and its branches.
#[derive(Clone, Debug, PartialEq)]
pub struct Choice {
    pub command: usize,
    pub branches: Vec<BranchTarget>,
}

/// Explicit-state parametric DTMC over the reachable states of a model.
#[derive(Clone, Debug)]
pub struct Pdtmc {
    pub(crate) space: ParamSpace,
    pub(crate) fixed: BTreeMap<String, BigRational>,
    pub(crate) bounds: BTreeMap<ParamId, (BigRational, BigRational)>,
    pub(crate) free: BTreeSet<ParamId>,
    pub(crate) var_names: Vec<String>,
    pub(crate) var_bool: Vec<bool>,
    pub(crate) states: Vec<Vec<i64>>,
    pub(crate) init: StateId,
    pub(crate) choices: Vec<Choice>,
    pub(crate) rows: Vec<Vec<(StateId, RationalFunction)>>,
    pub(crate) labels: BTreeMap<String, BTreeSet<StateId>>,
    pub(crate) rewards: BTreeMap<String, BTreeMap<StateId, RationalFunction>>,
    pub(crate) names: HashMap<String, Binding>,
    /// Source text of each branch probability, per command.
    pub(crate) branch_text: Vec<Vec<String>>,
    pub(crate) fingerprint: String,
}

impl Pdtmc {
    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn init(&self) -> StateId {
        self.init
    }

    pub fn space(&self) -> &ParamSpace {
        &self.space
    }

    /// Parameters left symbolic at unfold time.
    pub fn free_params(&self) -> &BTreeSet<ParamId> {
        &self.free
    }

    /// Free parameters that occur in some transition probability.
    pub fn transition_params(&self) -> BTreeSet<ParamId> {
        self.transitions().flat_map(|(_, _, f)| f.params()).collect()
    }

    /// Bounds of a free parameter: the declared box, else `[0, 1]` for
    /// parameters used as probabilities.
    pub fn param_bounds(&self, id: ParamId) -> Option<(BigRational, BigRational)> {
        use num_traits::{One, Zero};
        if let Some(b) = self.bounds.get(&id) {
            return Some(b.clone());
        }
        self.transition_params()
            .contains(&id)
            .then(|| (BigRational::zero(), BigRational::one()))
    }

    pub fn fixed_bindings(&self) -> &BTreeMap<String, BigRational> {
        &self.fixed
    }

    pub fn bounds(&self) -> &BTreeMap<ParamId, (BigRational, BigRational)> {
        &self.bounds
    }

    pub fn variables(&self) -> &[String] {
        &self.var_names
    }

    pub fn valuation(&self, s: StateId) -> &[i64] {
        &self.states[s]
    }

    pub fn value_of(&self, s: StateId, var: &str) -> Option<i64> {
        let i = self.var_names.iter().position(|v| v == var)?;
        Some(self.states[s][i])
    }

    pub fn find_state(&self, valuation: &[i64]) -> Option<StateId> {
        self.states.iter().position(|v| v == valuation)
    }

    pub fn successors(&self, s: StateId) -> &[(StateId, RationalFunction)] {
        &self.rows[s]
    }

    pub fn choice(&self, s: StateId) -> &Choice {
        &self.choices[s]
    }

    /// All transitions as `(src, dst, probability)` in source order.
    pub fn transitions(&self) -> impl Iterator<Item = (StateId, StateId, &RationalFunction)> {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(s, row)| row.iter().map(move |(d, f)| (s, *d, f)))
    }

    pub fn labels(&self) -> &BTreeMap<String, BTreeSet<StateId>> {
        &self.labels
    }

    pub fn state_rewards(&self) -> &BTreeMap<String, BTreeMap<StateId, RationalFunction>> {
        &self.rewards
    }

    /// Probability text of branch `branch` of command `command`, as written.
    pub fn branch_text(&self, command: usize, branch: usize) -> &str {
        &self.branch_text[command][branch]
    }

    /// Digest of the model text and fixed bindings this chain was built from.
    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    /// `(s=0, t=0, time_step=0, trajectory_complete=false)`.
    pub fn describe_state(&self, s: StateId) -> String {
        let mut out = String::from("(");
        for (i, name) in self.var_names.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            let v = self.states[s][i];
            if self.var_bool[i] {
                let _ = write!(out, "{name}={}", v != 0);
            } else {
                let _ = write!(out, "{name}={v}");
            }
        }
        out.push(')');
        out
    }

    /// Forward reachable set through transitions that are not identically zero.
    pub fn reachable(&self, from: StateId) -> BTreeSet<StateId> {
        let mut seen = BTreeSet::from([from]);
        let mut queue = VecDeque::from([from]);
        while let Some(s) = queue.pop_front() {
            for (d, f) in &self.rows[s] {
                if !f.is_zero() && seen.insert(*d) {
                    queue.push_back(*d);
                }
            }
        }
        seen
    }

    /// States that can reach `targets` (targets included).
    pub fn backward_reachable(&self, targets: &BTreeSet<StateId>) -> BTreeSet<StateId> {
        let mut preds: Vec<Vec<StateId>> = vec![Vec::new(); self.num_states()];
        for (s, d, f) in self.transitions() {
            if !f.is_zero() {
                preds[d].push(s);
            }
        }
        let mut seen = targets.clone();
        let mut queue: VecDeque<StateId> = targets.iter().copied().collect();
        while let Some(s) = queue.pop_front() {
            for &p in &preds[s] {
                if seen.insert(p) {
                    queue.push_back(p);
                }
            }
        }
        seen
    }

    /// States satisfying a state predicate over variables, constants and
    /// quoted atoms.
    pub fn states_satisfying(&self, pred: &Expr) -> Result<BTreeSet<StateId>, ModelError> {
        let mut out = BTreeSet::new();
        for s in 0..self.num_states() {
            let label_fn = |l: &str| self.labels.get(l).map(|set| set.contains(&s));
            let env = Env {
                names: &self.names,
                state: &self.states[s],
                labels: Some(&label_fn),
            };
            if eval_concrete(pred, &env)?.as_bool(pred)? {
                out.insert(s);
            }
        }
        Ok(out)
    }

    /// Copy of the chain in which every state of `states` is absorbing
    /// (a probability-one self loop replaces its outgoing transitions).
    pub fn with_absorbing(&self, states: &BTreeSet<StateId>) -> Pdtmc {
        let mut out = self.clone();
        for &s in states {
            out.rows[s] = vec![(s, RationalFunction::one())];
            out.choices[s] = Choice {
                command: usize::MAX,
                branches: vec![BranchTarget {
                    branch: 0,
                    dst: s,
                    prob: RationalFunction::one(),
                }],
            };
        }
        out
    }
}
