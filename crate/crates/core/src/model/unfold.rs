use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use num_rational::BigRational;
use num_traits::Zero;
use sha2::{Digest, Sha256};

use super::eval::{eval_concrete, eval_rf, type_err, Binding, Env, Val};
use super::pdtmc::{BranchTarget, Choice, Pdtmc, StateId};
use super::{Bindings, GuardedModel, ModelError};
use crate::lang::ast::{ConstType, VarDomain};
use crate::ratfunc::RationalFunction;

/// Builds the explicit reachable state space of `model` with the constants
/// in `bindings` fixed. Double constants left unbound stay symbolic.
pub fn unfold(model: &GuardedModel, bindings: &Bindings) -> Result<Pdtmc, ModelError> {
    for name in bindings.values.keys().chain(bindings.bounds.keys()) {
        if model.constant(name).is_none() {
            return Err(ModelError::UnknownConstant { name: name.clone() });
        }
    }

    let space = model.param_space();
    let mut names: HashMap<String, Binding> = HashMap::new();
    let mut fixed = BTreeMap::new();
    let mut free = BTreeSet::new();
    let empty: [i64; 0] = [];

    for c in &model.constants {
        let value = match (&c.value, bindings.get(&c.name)) {
            (Some(_), Some(_)) => {
                return Err(ModelError::InvalidBinding {
                    name: c.name.clone(),
                    message: "constant already has a value in the model".into(),
                })
            }
            (Some(e), None) => {
                let env = Env {
                    names: &names,
                    state: &empty,
                    labels: None,
                };
                Some(eval_concrete(e, &env)?)
            }
            (None, Some(v)) => Some(match c.ty {
                ConstType::Bool => Val::Bool(!v.is_zero()),
                ConstType::Int if !v.is_integer() => {
                    return Err(ModelError::InvalidBinding {
                        name: c.name.clone(),
                        message: format!("int constant given non-integer value {v}"),
                    })
                }
                _ => Val::Num(v.clone()),
            }),
            (None, None) => None,
        };
        let binding = match value {
            Some(v) => {
                if let Val::Num(n) = &v {
                    fixed.insert(c.name.clone(), n.clone());
                }
                Binding::Value(v)
            }
            None if c.ty == ConstType::Double => {
                let id = space.id(&c.name).expect("double constants are in the space");
                free.insert(id);
                Binding::Param(id)
            }
            None => Binding::Unbound,
        };
        names.insert(c.name.clone(), binding);
    }

    let mut bounds = BTreeMap::new();
    for (name, (lo, hi)) in &bindings.bounds {
        let id = space.id(name).filter(|id| free.contains(id)).ok_or_else(|| ModelError::InvalidBinding {
            name: name.clone(),
            message: "bounds apply only to symbolic double parameters".into(),
        })?;
        if lo > hi {
            return Err(ModelError::InvalidBinding {
                name: name.clone(),
                message: format!("empty range [{lo}, {hi}]"),
            });
        }
        bounds.insert(id, (lo.clone(), hi.clone()));
    }

    // variable domains and initial valuation
    let mut domains = Vec::new();
    let mut init = Vec::new();
    for (i, v) in model.variables.iter().enumerate() {
        let env = Env {
            names: &names,
            state: &empty,
            labels: None,
        };
        let (lo, hi, is_bool) = match &v.domain {
            VarDomain::Bool => (0, 1, true),
            VarDomain::Range(lo, hi) => {
                let l = eval_concrete(lo, &env)?.as_int(lo)?;
                let h = eval_concrete(hi, &env)?.as_int(hi)?;
                if l > h {
                    return Err(type_err(lo, &format!("empty domain [{l}..{h}] for '{}'", v.name)));
                }
                (l, h, false)
            }
        };
        let iv = eval_concrete(&v.init, &env)?;
        let iv = if is_bool {
            iv.as_bool(&v.init)? as i64
        } else {
            iv.as_int(&v.init)?
        };
        if iv < lo || iv > hi {
            return Err(type_err(&v.init, &format!("initial value {iv} of '{}' outside [{lo}..{hi}]", v.name)));
        }
        domains.push((lo, hi));
        init.push(iv);
        names.insert(v.name.clone(), Binding::Var(i, is_bool));
    }
    let var_names: Vec<String> = model.variables.iter().map(|v| v.name.clone()).collect();
    let var_bool: Vec<bool> = model.variables.iter().map(|v| v.domain == VarDomain::Bool).collect();
    let var_index: HashMap<&str, usize> = var_names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();

    // probabilities that do not depend on the state are evaluated once
    let mut const_probs: Vec<Vec<Option<RationalFunction>>> = Vec::new();
    for cmd in &model.commands {
        let mut row = Vec::new();
        for b in &cmd.branches {
            let state_free = b.prob.identifiers().iter().all(|n| !var_index.contains_key(n.as_str()));
            row.push(if state_free {
                let env = Env {
                    names: &names,
                    state: &init,
                    labels: None,
                };
                Some(eval_rf(&b.prob, &env)?)
            } else {
                None
            });
        }
        const_probs.push(row);
    }

    let describe = |v: &[i64]| {
        let parts: Vec<String> = var_names
            .iter()
            .zip(v)
            .zip(&var_bool)
            .map(|((n, x), b)| if *b { format!("{n}={}", *x != 0) } else { format!("{n}={x}") })
            .collect();
        format!("({})", parts.join(", "))
    };

    let mut index: HashMap<Vec<i64>, StateId> = HashMap::new();
    let mut states: Vec<Vec<i64>> = Vec::new();
    let mut choices = Vec::new();
    let mut rows = Vec::new();
    index.insert(init.clone(), 0);
    states.push(init.clone());
    let mut queue = VecDeque::from([0usize]);
    while let Some(s) = queue.pop_front() {
        let cur = states[s].clone();
        let env = Env {
            names: &names,
            state: &cur,
            labels: None,
        };
        let mut enabled = Vec::new();
        for (ci, cmd) in model.commands.iter().enumerate() {
            if eval_concrete(&cmd.guard, &env)?.as_bool(&cmd.guard)? {
                enabled.push(ci);
            }
        }
        let ci = match enabled.as_slice() {
            [] => return Err(ModelError::Deadlock { state: describe(&cur) }),
            [one] => *one,
            _ => {
                return Err(ModelError::OverlappingGuards {
                    state: describe(&cur),
                    commands: enabled,
                })
            }
        };
        let cmd = &model.commands[ci];
        let mut branches = Vec::new();
        let mut row: Vec<(StateId, RationalFunction)> = Vec::new();
        let mut sum = RationalFunction::zero();
        for (bi, b) in cmd.branches.iter().enumerate() {
            let prob = match &const_probs[ci][bi] {
                Some(p) => p.clone(),
                None => eval_rf(&b.prob, &env)?,
            };
            sum = sum.add(&prob);
            if prob.is_zero() {
                continue;
            }
            let mut next = cur.clone();
            for u in &b.updates {
                let vi = var_index[u.var.as_str()];
                let val = eval_concrete(&u.value, &env)?;
                let raw = if var_bool[vi] {
                    val.as_bool(&u.value)? as i64
                } else {
                    val.as_int(&u.value)?
                };
                let (lo, hi) = domains[vi];
                if raw < lo || raw > hi {
                    return Err(ModelError::VariableOutOfRange {
                        state: describe(&cur),
                        var: u.var.clone(),
                        value: raw.to_string(),
                    });
                }
                next[vi] = raw;
            }
            let dst = match index.get(&next) {
                Some(d) => *d,
                None => {
                    let d = states.len();
                    index.insert(next.clone(), d);
                    states.push(next);
                    queue.push_back(d);
                    d
                }
            };
            match row.iter_mut().find(|(d, _)| *d == dst) {
                Some((_, f)) => *f = f.add(&prob),
                None => row.push((dst, prob.clone())),
            }
            branches.push(BranchTarget { branch: bi, dst, prob });
        }
        if !sum.equiv(&RationalFunction::one()) {
            return Err(ModelError::MalformedDistribution {
                state: describe(&cur),
                sum: sum.format(&space),
            });
        }
        row.retain(|(_, f)| !f.is_zero());
        debug_assert_eq!(choices.len(), s);
        choices.push(Choice { command: ci, branches });
        rows.push(row);
    }

    // atoms `var=value` and state rewards
    let mut labels: BTreeMap<String, BTreeSet<StateId>> = BTreeMap::new();
    for (s, v) in states.iter().enumerate() {
        for (i, name) in var_names.iter().enumerate() {
            let atom = if var_bool[i] {
                format!("{name}={}", v[i] != 0)
            } else {
                format!("{name}={}", v[i])
            };
            labels.entry(atom).or_default().insert(s);
        }
    }
    let mut rewards: BTreeMap<String, BTreeMap<StateId, RationalFunction>> = BTreeMap::new();
    for r in &model.rewards {
        let entry = rewards.entry(r.label.clone()).or_default();
        for (s, v) in states.iter().enumerate() {
            let env = Env {
                names: &names,
                state: v,
                labels: None,
            };
            for item in &r.items {
                if eval_concrete(&item.guard, &env)?.as_bool(&item.guard)? {
                    let value = eval_rf(&item.value, &env)?;
                    let slot = entry.entry(s).or_insert_with(RationalFunction::zero);
                    *slot = slot.add(&value);
                }
            }
        }
    }

    let branch_text = model
        .commands
        .iter()
        .map(|c| c.branches.iter().map(|b| b.prob.to_string()).collect())
        .collect();

    Ok(Pdtmc {
        fingerprint: fingerprint(model.source(), &fixed),
        space,
        fixed,
        bounds,
        free,
        var_names,
        var_bool,
        states,
        init: 0,
        choices,
        rows,
        labels,
        rewards,
        names,
        branch_text,
    })
}

pub(crate) fn fingerprint(source: &str, fixed: &BTreeMap<String, BigRational>) -> String {
    let mut h = Sha256::new();
    h.update(source.as_bytes());
    for (k, v) in fixed {
        h.update(format!("\n{k}={v}").as_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}
