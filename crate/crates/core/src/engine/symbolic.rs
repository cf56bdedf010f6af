use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use serde::Serialize;

use super::EngineError;
use crate::lang::{PathFormula, PctlQuery};
use crate::model::{Pdtmc, StateId};
use crate::ratfunc::{ParamId, ParamSpace, RationalFunction};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EliminationOrder {
    /// Greedy: smallest in-degree times out-degree first, ties by index.
    #[default]
    MinFill,
    /// Ascending state index.
    Index,
    /// Descending state index.
    ReverseIndex,
}

#[derive(Clone, Copy, Debug)]
pub struct SymbolicOptions {
    pub order: EliminationOrder,
    /// Largest term count (numerator plus denominator) tolerated in any
    /// intermediate transition function.
    pub term_cap: usize,
}

impl Default for SymbolicOptions {
    fn default() -> Self {
        Self {
            order: EliminationOrder::MinFill,
            term_cap: 200_000,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct EliminationStats {
    pub states_eliminated: usize,
    pub max_terms: usize,
}

#[derive(Clone, Debug)]
pub struct SymbolicResult {
    pub query: PctlQuery,
    pub expr: RationalFunction,
    pub free_params: BTreeSet<ParamId>,
    pub fixed_bindings: BTreeMap<String, BigRational>,
    pub stats: EliminationStats,
    pub space: ParamSpace,
}

impl SymbolicResult {
    pub fn format(&self) -> String {
        self.expr.format(&self.space)
    }
}

pub fn symbolic_reach(p: &Pdtmc, query: &PctlQuery) -> Result<SymbolicResult, EngineError> {
    symbolic_reach_with(p, query, SymbolicOptions::default())
}

/// Closed-form probability of the query's path formula from the initial
/// state. Unbounded queries use state elimination; step-bounded ones unroll
/// the backward recurrence symbolically.
pub fn symbolic_reach_with(
    p: &Pdtmc,
    query: &PctlQuery,
    opts: SymbolicOptions,
) -> Result<SymbolicResult, EngineError> {
    let targets = p.states_satisfying(query.target())?;
    let (expr, stats) = match query.path {
        PathFormula::Eventually(_) => eliminate(p, &targets, opts)?,
        PathFormula::BoundedEventually(_, k) => bounded(p, &targets, k, opts.term_cap)?,
    };
    Ok(SymbolicResult {
        query: query.clone(),
        free_params: expr.params(),
        expr,
        fixed_bindings: p.fixed_bindings().clone(),
        stats,
        space: p.space().clone(),
    })
}

const SINK: usize = usize::MAX;

struct Graph {
    out: BTreeMap<usize, BTreeMap<usize, RationalFunction>>,
    preds: BTreeMap<usize, BTreeSet<usize>>,
    max_terms: usize,
    cap: usize,
}

impl Graph {
    fn track(&mut self, f: &RationalFunction) -> Result<(), EngineError> {
        let n = f.term_count();
        self.max_terms = self.max_terms.max(n);
        if n > self.cap {
            return Err(EngineError::EliminationBlowup { terms: n, cap: self.cap });
        }
        Ok(())
    }

    fn cost(&self, s: usize) -> usize {
        let ins = self.preds[&s].iter().filter(|&&a| a != s).count();
        let outs = self.out[&s].keys().filter(|&&b| b != s).count();
        ins * outs
    }

    fn eliminate(&mut self, e: usize) -> Result<(), EngineError> {
        let mut row = self.out.remove(&e).unwrap_or_default();
        let preds = self.preds.remove(&e).unwrap_or_default();
        let stay = row.remove(&e);
        let factor = match stay {
            Some(l) => (&RationalFunction::one() - &l).recip()?,
            None => RationalFunction::one(),
        };
        let mut scaled = Vec::with_capacity(row.len());
        for (b, f) in row {
            let g = &f * &factor;
            self.track(&g)?;
            if let Some(set) = self.preds.get_mut(&b) {
                set.remove(&e);
            }
            scaled.push((b, g));
        }
        for a in preds {
            if a == e {
                continue;
            }
            let Some(arow) = self.out.get_mut(&a) else { continue };
            let Some(pae) = arow.remove(&e) else { continue };
            let mut fresh = Vec::with_capacity(scaled.len());
            for (b, g) in &scaled {
                let contrib = &pae * g;
                let sum = match arow.get(b) {
                    Some(old) => old + &contrib,
                    None => contrib,
                };
                fresh.push((*b, sum));
            }
            for (b, sum) in fresh {
                self.track(&sum)?;
                let arow = self.out.get_mut(&a).expect("row present");
                if sum.is_zero() {
                    arow.remove(&b);
                } else {
                    arow.insert(b, sum);
                    if b != SINK {
                        self.preds.get_mut(&b).expect("node present").insert(a);
                    }
                }
            }
        }
        Ok(())
    }
}

fn eliminate(
    p: &Pdtmc,
    targets: &BTreeSet<StateId>,
    opts: SymbolicOptions,
) -> Result<(RationalFunction, EliminationStats), EngineError> {
    let init = p.init();
    if targets.contains(&init) {
        return Ok((RationalFunction::one(), EliminationStats::default()));
    }
    let relevant = p.backward_reachable(targets);
    if !relevant.contains(&init) {
        return Ok((RationalFunction::zero(), EliminationStats::default()));
    }
    let live = p.reachable(init);
    let nodes: BTreeSet<usize> = live
        .intersection(&relevant)
        .copied()
        .filter(|s| !targets.contains(s))
        .collect();

    let mut g = Graph {
        out: BTreeMap::new(),
        preds: nodes.iter().map(|&s| (s, BTreeSet::new())).collect(),
        max_terms: 0,
        cap: opts.term_cap,
    };
    for &s in &nodes {
        let mut row: BTreeMap<usize, RationalFunction> = BTreeMap::new();
        for (d, f) in p.successors(s) {
            let key = if targets.contains(d) {
                SINK
            } else if nodes.contains(d) {
                *d
            } else {
                continue;
            };
            let slot = row.entry(key).or_insert_with(RationalFunction::zero);
            *slot = &*slot + f;
        }
        row.retain(|_, f| !f.is_zero());
        for (&d, f) in &row {
            g.track(f)?;
            if d != SINK {
                g.preds.get_mut(&d).expect("node present").insert(s);
            }
        }
        g.out.insert(s, row);
    }

    let mut remaining: BTreeSet<usize> = nodes.iter().copied().filter(|&s| s != init).collect();
    let mut eliminated = 0;
    while !remaining.is_empty() {
        let e = match opts.order {
            EliminationOrder::Index => *remaining.first().unwrap(),
            EliminationOrder::ReverseIndex => *remaining.last().unwrap(),
            EliminationOrder::MinFill => *remaining
                .iter()
                .min_by_key(|&&s| (g.cost(s), s))
                .unwrap(),
        };
        remaining.remove(&e);
        g.eliminate(e)?;
        eliminated += 1;
    }

    let row = g.out.remove(&init).unwrap_or_default();
    let hit = row.get(&SINK).cloned().unwrap_or_else(RationalFunction::zero);
    let expr = match row.get(&init) {
        Some(l) => hit.div(&(&RationalFunction::one() - l))?,
        None => hit,
    };
    g.track(&expr)?;
    let stats = EliminationStats {
        states_eliminated: eliminated,
        max_terms: g.max_terms,
    };
    Ok((expr, stats))
}

fn bounded(
    p: &Pdtmc,
    targets: &BTreeSet<StateId>,
    k: u64,
    cap: usize,
) -> Result<(RationalFunction, EliminationStats), EngineError> {
    let n = p.num_states();
    let mut x: Vec<RationalFunction> = (0..n)
        .map(|s| if targets.contains(&s) { RationalFunction::one() } else { RationalFunction::zero() })
        .collect();
    let mut max_terms = 0;
    for _ in 0..k {
        let mut next = Vec::with_capacity(n);
        for s in 0..n {
            if targets.contains(&s) {
                next.push(RationalFunction::one());
                continue;
            }
            let mut acc = RationalFunction::zero();
            for (d, f) in p.successors(s) {
                if !x[*d].is_zero() {
                    acc = &acc + &(f * &x[*d]);
                }
            }
            let terms = acc.term_count();
            max_terms = usize::max(max_terms, terms);
            if terms > cap {
                return Err(EngineError::EliminationBlowup { terms, cap });
            }
            next.push(acc);
        }
        x = next;
    }
    let stats = EliminationStats {
        states_eliminated: 0,
        max_terms,
    };
    Ok((x.swap_remove(p.init()), stats))
}
