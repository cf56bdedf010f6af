//! Acceptance suite: one PASS/FAIL line per criterion.

mod common;

use std::time::{Duration, Instant};

use common::*;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use radcheck_core::engine::{numeric_reach, symbolic_reach, NumericMethod, NumericOptions};
use radcheck_core::lang::{ast::Expr, parse_property};
use radcheck_core::learner::{BeliefState, Observation};
use radcheck_core::model::{Bindings, ParamValuation, Pdtmc};
use radcheck_core::monitor::{DecisionPolicy, ExpressionCache, Monitor, MonitorConfig};
use radcheck_core::ratfunc::{parse_decimal, rational_to_f64, RationalFunction};
use radcheck_core::sim::{run_closed_loop, run_open_loop, SimConfig};

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn reach_query(s: i64) -> radcheck_core::lang::PctlQuery {
    parse_property(&format!("P=? [ F s={s} ]")).unwrap()
}

fn parse_in(p: &Pdtmc, text: &str) -> RationalFunction {
    let mut space = p.space().clone();
    RationalFunction::parse(text, &mut space).unwrap()
}

fn rational(x: f64) -> BigRational {
    BigRational::new(((x * 1e9).round() as i64).into(), 1_000_000_000i64.into())
}

fn val(p: &Pdtmc, pairs: &[(&str, f64)]) -> ParamValuation {
    ParamValuation::from_names(p.space(), pairs.iter().map(|(n, x)| (*n, rational(*x)))).unwrap()
}

fn escalation_closed_form() -> Verdict {
    let start = Instant::now();
    let p = rad(&config_p2_p3());
    let r = symbolic_reach(&p, &reach_query(2)).map_err(|e| e.to_string())?;
    let took = start.elapsed();
    let oracle = parse_in(&p, ESCALATION_CLOSED_FORM);
    if !r.expr.equiv(&oracle) {
        let mut worst: f64 = 0.0;
        for i in 0..5 {
            for j in 0..5 {
                let v = val(&p, &[("P2", 0.06 + 0.0025 * i as f64), ("P3", 0.05 + 0.0125 * j as f64)]);
                let a = rational_to_f64(&r.expr.eval(v.point()).unwrap());
                let b = rational_to_f64(&oracle.eval(v.point()).unwrap());
                worst = worst.max((a - b).abs());
            }
        }
        return Err(format!("not equivalent: got {}, max grid deviation {worst:e}", r.format()));
    }
    if took >= Duration::from_secs(10) {
        return Err(format!("equivalent but took {took:?}"));
    }
    Ok(format!("{} in {took:.2?}", r.format()))
}

fn mitigation_cross_check() -> Verdict {
    let p = rad(&config_s7());
    let r = symbolic_reach(&p, &reach_query(7)).map_err(|e| e.to_string())?;
    let oracle = parse_in(&p, &format!("({MITIGATION_NUMERATOR})/({MITIGATION_DENOMINATOR})"));
    let ranges = [
        ("P2", 0.06, 0.07),
        ("P4", 0.087, 0.88),
        ("P5", 0.6, 0.7),
        ("P7", 0.07, 0.8),
        ("P8", 0.04, 0.05),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    let n = 100;
    for _ in 0..n {
        let pairs: Vec<(&str, f64)> = ranges.iter().map(|(name, lo, hi)| (*name, rng.random_range(*lo..*hi))).collect();
        let v = val(&p, &pairs);
        let a = rational_to_f64(&r.expr.eval(v.point()).unwrap());
        let b = rational_to_f64(&oracle.eval(v.point()).unwrap());
        worst = worst.max((a - b).abs());
    }
    if worst > 1e-6 {
        return Err(format!("max deviation {worst:e} over {n} points"));
    }
    let exact = if r.expr.equiv(&oracle) { ", identical as rational functions" } else { "" };
    Ok(format!("{n} points, max deviation {worst:e}{exact}"))
}

fn random_valuation(p: &Pdtmc, rng: &mut ChaCha8Rng) -> ParamValuation {
    let mut split = || {
        let a: f64 = rng.random_range(0.0..1.0);
        let b: f64 = rng.random_range(0.0..1.0) * (1.0 - a) * 0.999;
        (a, b)
    };
    let (p2, p9) = split();
    let (p4, p3) = split();
    let (p5, p6) = split();
    let (p7, p8, p10) = (rng.random(), rng.random(), rng.random_range(0.0..0.99));
    val(
        p,
        &[
            ("P2", p2),
            ("P3", p3),
            ("P4", p4),
            ("P5", p5),
            ("P6", p6),
            ("P7", p7),
            ("P8", p8),
            ("P9", p9),
            ("p10", p10),
        ],
    )
}

fn engine_self_consistency() -> Verdict {
    let p = rad(&horizons());
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let linear = NumericOptions::default();
    let iterate = NumericOptions {
        method: NumericMethod::ValueIteration,
        ..NumericOptions::default()
    };
    let (mut sym_gap, mut num_gap): (f64, f64) = (0.0, 0.0);
    for s in [2, 3, 7, 8] {
        let r = symbolic_reach(&p, &reach_query(s)).map_err(|e| e.to_string())?;
        let target = Expr::var_equals("s", s);
        for _ in 0..100 {
            let v = random_valuation(&p, &mut rng);
            if !p.validate_valuation(&v).is_empty() {
                return Err("sampler produced an invalid valuation".into());
            }
            let sym = rational_to_f64(&r.expr.eval(v.point()).map_err(|e| e.to_string())?);
            let a = numeric_reach(&p, &v, &target, linear).map_err(|e| e.to_string())?;
            let b = numeric_reach(&p, &v, &target, iterate).map_err(|e| e.to_string())?;
            sym_gap = sym_gap.max((sym - a).abs());
            num_gap = num_gap.max((a - b).abs());
        }
    }
    let detail = format!("400 valuations, symbolic-numeric {sym_gap:e}, linear-iteration {num_gap:e}");
    if sym_gap <= 1e-9 && num_gap <= 1e-9 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn hand_derived_anchor() -> Verdict {
    let p = rad(&config_p2_p3());
    let r = symbolic_reach(&p, &reach_query(2)).map_err(|e| e.to_string())?;
    let target = Expr::var_equals("s", 2);
    let mut worst: f64 = 0.0;
    for p3 in ["0", "0.05", "0.1", "0.12"] {
        let v = ParamValuation::from_names(
            p.space(),
            [("P2", BigRational::from_integer(0.into())), ("P3", parse_decimal(p3).unwrap())],
        )
        .unwrap();
        let sym = rational_to_f64(&r.expr.eval(v.point()).unwrap());
        for method in [NumericMethod::LinearSolve, NumericMethod::ValueIteration] {
            let opts = NumericOptions {
                method,
                ..NumericOptions::default()
            };
            let num = numeric_reach(&p, &v, &target, opts).map_err(|e| e.to_string())?;
            worst = worst.max((num - 0.99).abs());
        }
        worst = worst.max((sym - 0.99).abs());
    }
    if worst <= 1e-12 {
        Ok(format!("P[F s=2] = 0.99 at p2 = 0, max deviation {worst:e}"))
    } else {
        Err(format!("max deviation {worst:e}"))
    }
}

fn reward_landscape() -> Verdict {
    let start = Instant::now();
    let p = rad(&config_s7()
        .fix_str("P2", "0.9")
        .fix_str("P4", "0.7")
        .fix_str("P5", "0.65")
        .fix_str("R_S7", "10"));
    let r = symbolic_reach(&p, &reach_query(7)).map_err(|e| e.to_string())?;
    let scale = p.fixed_bindings()["R_S7"].clone();
    let (p7, p8) = (p.space().id("P7").unwrap(), p.space().id("P8").unwrap());
    let n = 21;
    let mut grid = vec![vec![BigRational::from_integer(0.into()); n]; n];
    for (i, row) in grid.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            let mut v = ParamValuation::new();
            v.set(p7, BigRational::new((i as i64).into(), 20.into()));
            v.set(p8, BigRational::new((j as i64).into(), 20.into()));
            *cell = &scale * r.expr.eval(v.point()).map_err(|e| format!("pole at ({i}/20, {j}/20): {e}"))?;
        }
    }
    let took = start.elapsed();
    for i in 0..n {
        for j in 0..n {
            if i + 1 < n && grid[i + 1][j] < grid[i][j] {
                return Err(format!("decreases in p7 at ({i}/20, {j}/20)"));
            }
            if j + 1 < n && grid[i][j + 1] > grid[i][j] {
                return Err(format!("increases in p8 at ({i}/20, {j}/20)"));
            }
        }
    }
    let cells = grid.iter().flatten();
    let max = rational_to_f64(cells.clone().max().unwrap());
    let min = rational_to_f64(cells.min().unwrap());
    let detail = format!("21x21 monotone, max {max:.4}, min {min:.4}, {took:.2?}");
    if max > 6.0 && min < 5.0 && took < Duration::from_secs(60) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn bayes_exactness() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let alpha = rng.random_range(1.0..1.5);
        let (p0, c0) = (rng.random_range(0.0..1.0), rng.random_range(0.1..20.0));
        let mut b = BeliefState::new("p", p0, c0, alpha).unwrap();
        let mut t = 0.0;
        let mut history = Vec::with_capacity(1000);
        for _ in 0..1000 {
            t += rng.random_range(0.0..2.0);
            let x = rng.random_bool(0.4);
            b.observe(&Observation::new("p", x, t)).unwrap();
            history.push((t, x));
        }
        let (mut s, mut w) = (0.0, 0.0);
        for (tl, x) in &history {
            let wl = alpha.powf(-(t - tl));
            s += wl * if *x { 1.0 } else { 0.0 };
            w += wl;
        }
        let k = history.len() as f64;
        let direct = c0 / (c0 + k) * p0 + k / (c0 + k) * (s / w);
        worst = worst.max((b.estimate() - direct).abs());
    }
    let mut one = BeliefState::new("p", 0.5, 1.0, 1.0).unwrap();
    one.observe(&Observation::new("p", true, 1.0)).unwrap();
    let mut two = BeliefState::new("p", 0.5, 1.0, 2.0).unwrap();
    two.observe(&Observation::new("p", true, 1.0)).unwrap();
    two.observe(&Observation::new("p", false, 2.0)).unwrap();
    let examples = one.estimate() == 0.75 && (two.estimate() - 7.0 / 18.0).abs() < 1e-15;
    let detail = format!("incremental-direct {worst:e}, examples {} and {}", one.estimate(), two.estimate());
    if worst <= 1e-12 && examples {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn learner_convergence() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut errors = Vec::new();
    for mu in [0.1, 0.5, 0.9] {
        let mut b = BeliefState::new("p", 0.5, 10.0, 1.0).unwrap();
        for t in 0..10_000 {
            b.observe(&Observation::new("p", rng.random_bool(mu), t as f64)).unwrap();
        }
        errors.push((b.estimate() - mu).abs());
    }
    let mut aged = BeliefState::new("p", 0.5, 10.0, 1.1).unwrap();
    let mut flat = BeliefState::new("p", 0.5, 10.0, 1.0).unwrap();
    for t in 0..1000 {
        let x = rng.random_bool(if t < 500 { 0.2 } else { 0.8 });
        let o = Observation::new("p", x, t as f64);
        aged.observe(&o).unwrap();
        flat.observe(&o).unwrap();
    }
    let responsive = (aged.estimate() - 0.8).abs() < (flat.estimate() - 0.8).abs();
    let detail = format!(
        "errors {:.4}/{:.4}/{:.4}, change point aged {:.3} vs plain {:.3}",
        errors[0],
        errors[1],
        errors[2],
        aged.estimate(),
        flat.estimate()
    );
    if errors.iter().all(|e| *e < 0.02) && responsive {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn scored() -> Bindings {
    horizons()
        .fix_str("C_S2", "10")
        .fix_str("C_S8", "5")
        .fix_str("R_S7", "10")
        .fix_str("BASE_REWARD_S3", "20")
}

const NOMINAL: [(&str, f64); 9] = [
    ("P2", 0.9),
    ("P3", 0.05),
    ("P4", 0.88),
    ("P5", 0.7),
    ("P6", 0.05),
    ("P7", 0.8),
    ("P8", 0.05),
    ("P9", 0.1),
    ("p10", 0.8),
];

fn simulation_consistency() -> Verdict {
    let p = rad(&scored());
    let truth = val(&p, &NOMINAL);
    let n = 100_000u64;
    let cfg = SimConfig::new(truth.clone(), n, 8);
    let traces = run_open_loop(&p, &cfg).map_err(|e| e.to_string())?;
    if traces != run_open_loop(&p, &cfg).map_err(|e| e.to_string())? {
        return Err("reruns differ".into());
    }
    let terminal = p.states_satisfying(&Expr::var_equals("s", 9)).map_err(|e| e.to_string())?;
    let episodic = p.with_absorbing(&terminal);
    let mut parts = Vec::new();
    let mut ok = true;
    for s in [2, 3, 7, 8] {
        let target = Expr::var_equals("s", s);
        let set = p.states_satisfying(&target).map_err(|e| e.to_string())?;
        let exact = numeric_reach(&episodic, &truth, &target, NumericOptions::default()).map_err(|e| e.to_string())?;
        let freq = traces.iter().filter(|t| t.visits(&set)).count() as f64 / n as f64;
        let se = (exact * (1.0 - exact) / n as f64).sqrt();
        let z = if se > 0.0 { (freq - exact) / se } else if freq == exact { 0.0 } else { f64::INFINITY };
        ok &= z.abs() <= 3.0;
        parts.push(format!("s={s} {freq:.4}/{exact:.4} z={z:+.2}"));
    }
    let detail = format!("{}; reruns identical", parts.join(", "));
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rad_monitor(p: &Pdtmc) -> Result<Monitor, String> {
    let specs = MonitorConfig::for_model(p).requirements();
    let cache = ExpressionCache::build(p, &specs).map_err(|e| e.to_string())?;
    Monitor::new(p, specs, &cache, DecisionPolicy::default()).map_err(|e| e.to_string())
}

fn monitor_budget() -> Verdict {
    let p = rad(&scored());
    let m = rad_monitor(&p)?;
    let v = val(&p, &NOMINAL);
    let mut times = Vec::with_capacity(1000);
    for i in 0..1000 {
        let start = Instant::now();
        let r = m.evaluate(&v, i as f64);
        times.push(start.elapsed());
        std::hint::black_box(r);
    }
    times.sort();
    let median = times[500];
    let detail = format!("median {median:.2?} over 1000 calls, closed forms only");
    if median < Duration::from_millis(10) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn adaptation_loop() -> Verdict {
    let p = rad(&scored());
    let m = rad_monitor(&p)?;
    let mut truth: Vec<(&str, f64)> = NOMINAL.to_vec();
    truth[0].1 = 0.06;
    let truth = val(&p, &truth);
    let mut firsts = Vec::new();
    let mut actions = std::collections::BTreeSet::new();
    for seed in 0..10 {
        let beliefs = NOMINAL
            .iter()
            .map(|(n, x)| (n.to_string(), BeliefState::new(*n, *x, 10.0, 1.05).unwrap()))
            .collect();
        let cfg = SimConfig::new(truth.clone(), 50, seed);
        let run = run_closed_loop(&p, &cfg, beliefs, &m).map_err(|e| e.to_string())?;
        match run.first_trigger("escalation-risk") {
            Some(i) => {
                firsts.push(i);
                actions.insert(format!("{:?}", run.episodes[i].decision.action));
            }
            None => return Err(format!("seed {seed}: escalation-risk rule never fired in 50 episodes")),
        }
    }
    Ok(format!(
        "rule fired by episode {} at worst (per seed {firsts:?}); resulting action {}",
        firsts.iter().max().unwrap(),
        actions.into_iter().collect::<Vec<_>>().join("/")
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("escalation closed form", escalation_closed_form),
        ("mitigation expression cross-check", mitigation_cross_check),
        ("engine self-consistency", engine_self_consistency),
        ("hand-derived anchor", hand_derived_anchor),
        ("reward landscape structure", reward_landscape),
        ("Bayes exactness", bayes_exactness),
        ("learner convergence", learner_convergence),
        ("simulation consistency", simulation_consistency),
        ("monitor budget", monitor_budget),
        ("end-to-end adaptation", adaptation_loop),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
