mod common;

use common::*;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use radcheck_core::engine::{
    bounded_reach, numeric_reach, proxy_value, symbolic_reach, symbolic_reach_with,
    EliminationOrder, EngineError, NumericMethod, NumericOptions, SymbolicEnvelope,
    SymbolicOptions,
};
use radcheck_core::lang::{ast::Expr, parse_property};
use radcheck_core::model::{ParamValuation, Pdtmc};
use radcheck_core::ratfunc::{parse_decimal, CompiledRf, ParamSpace, RationalFunction};

fn reach(p: &Pdtmc, s: i64) -> RationalFunction {
    let q = parse_property(&format!("P=? [ F s={s} ]")).unwrap();
    symbolic_reach(p, &q).unwrap().expr
}

fn parse_in(p: &Pdtmc, text: &str) -> RationalFunction {
    let mut space = p.space().clone();
    let f = RationalFunction::parse(text, &mut space).unwrap();
    assert_eq!(space.len(), p.space().len(), "oracle uses unknown names");
    f
}

/// Rounds to nine decimals so exact evaluation stays cheap.
fn val(p: &Pdtmc, pairs: &[(&str, f64)]) -> ParamValuation {
    let scale = 1_000_000_000i64;
    let to_rational = |x: f64| BigRational::new(((x * scale as f64).round() as i64).into(), scale.into());
    ParamValuation::from_names(p.space(), pairs.iter().map(|(n, x)| (*n, to_rational(*x)))).unwrap()
}

fn exact(p: &Pdtmc, pairs: &[(&str, &str)]) -> ParamValuation {
    ParamValuation::from_names(p.space(), pairs.iter().map(|(n, v)| (*n, parse_decimal(v).unwrap())))
        .unwrap()
}

#[test]
fn escalation_matches_closed_form() {
    let p = rad(&config_p2_p3());
    let expr = reach(&p, 2);
    let oracle = parse_in(&p, ESCALATION_CLOSED_FORM);
    assert!(expr.equiv(&oracle), "{}", expr.format(p.space()));
    for i in 0..=5 {
        for j in 0..=4 {
            let v = exact(&p, &[("P2", &format!("{}", i as f64 * 0.18)), ("P3", &format!("{}", j as f64 * 0.03))]);
            assert_eq!(expr.eval(v.point()).unwrap(), oracle.eval(v.point()).unwrap());
        }
    }
    assert_eq!(expr.format(p.space()), "(100*P2*P3 + 98*P2 - 99)/(88*P2 - 100)");
}

#[test]
fn mitigation_matches_full_expression() {
    let p = rad(&config_s7());
    let expr = reach(&p, 7);
    let mut space = p.space().clone();
    let num = RationalFunction::parse(MITIGATION_NUMERATOR, &mut space).unwrap();
    let den = RationalFunction::parse(MITIGATION_DENOMINATOR, &mut space).unwrap();
    assert_eq!(num.term_count(), 22);
    assert_eq!(den.term_count(), 25);
    let oracle = num.div(&den).unwrap();
    assert!(expr.equiv(&oracle));
}

#[test]
fn initial_target_is_certain() {
    let p = rad(&horizons());
    let q = parse_property("P=? [ F s=0 & time_step=0 & t=0 ]").unwrap();
    assert!(symbolic_reach(&p, &q).unwrap().expr.is_one());
    let q = parse_property("P=? [ F false ]").unwrap();
    assert!(symbolic_reach(&p, &q).unwrap().expr.is_zero());
}

#[test]
fn numeric_escalation_at_perfect_miss() {
    let p = rad(&config_p2_p3());
    let v = val(&p, &[("P2", 0.0), ("P3", 0.05)]);
    let target = Expr::var_equals("s", 2);
    for method in [NumericMethod::LinearSolve, NumericMethod::ValueIteration] {
        let opts = NumericOptions { method, ..Default::default() };
        let x = numeric_reach(&p, &v, &target, opts).unwrap();
        assert!((x - 0.99).abs() <= 1e-12, "{method:?} {x}");
    }
    let never = parse_property("P=? [ F s=5 & time_step=2 & trajectory_complete ]").unwrap();
    assert_eq!(numeric_reach(&p, &v, never.target(), NumericOptions::default()).unwrap(), 0.0);
}

#[test]
fn value_iteration_reports_non_convergence() {
    let p = rad(&config_p2_p3());
    let v = val(&p, &[("P2", 0.5), ("P3", 0.05)]);
    let opts = NumericOptions {
        method: NumericMethod::ValueIteration,
        max_iterations: 2,
        ..Default::default()
    };
    let err = numeric_reach(&p, &v, &Expr::var_equals("s", 8), opts).unwrap_err();
    assert!(matches!(err, EngineError::NonConvergence { iterations: 2, .. }));
}

#[test]
fn invalid_valuation_rejected() {
    let p = rad(&config_p2_p3());
    let v = val(&p, &[("P2", 0.95), ("P3", 0.05)]);
    let err = numeric_reach(&p, &v, &Expr::var_equals("s", 2), NumericOptions::default()).unwrap_err();
    assert!(matches!(err, EngineError::InvalidValuation(_)));
}

fn random_valuation(p: &Pdtmc, rng: &mut ChaCha8Rng) -> ParamValuation {
    let split = |rng: &mut ChaCha8Rng| {
        let a: f64 = rng.random_range(0.0..1.0);
        let b: f64 = rng.random_range(0.0..1.0) * (1.0 - a) * 0.999;
        (a, b)
    };
    let (p2, p9) = split(rng);
    let (p4, p3) = split(rng);
    let (p5, p6) = split(rng);
    let pairs = [
        ("P2", p2),
        ("P3", p3),
        ("P4", p4),
        ("P5", p5),
        ("P6", p6),
        ("P7", rng.random()),
        ("P8", rng.random()),
        ("P9", p9),
        ("p10", rng.random_range(0.0..0.99)),
    ];
    let v = val(p, &pairs);
    assert!(p.validate_valuation(&v).is_empty());
    v
}

#[test]
fn symbolic_and_numeric_agree() {
    let p = rad(&horizons());
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for s in [2, 3, 7, 8] {
        let expr = reach(&p, s);
        let target = Expr::var_equals("s", s);
        for _ in 0..100 {
            let v = random_valuation(&p, &mut rng);
            let sym = radcheck_core::ratfunc::rational_to_f64(&expr.eval(v.point()).unwrap());
            let num = numeric_reach(&p, &v, &target, NumericOptions::default()).unwrap();
            assert!((sym - num).abs() <= 1e-9, "s={s}: {sym} vs {num}");
            assert!((0.0..=1.0).contains(&num));
        }
    }
}

#[test]
fn elimination_order_does_not_matter() {
    let p = rad(&horizons());
    for s in [2, 7, 8] {
        let q = parse_property(&format!("P=? [ F s={s} ]")).unwrap();
        let results: Vec<RationalFunction> = [
            EliminationOrder::MinFill,
            EliminationOrder::Index,
            EliminationOrder::ReverseIndex,
        ]
        .into_iter()
        .map(|order| {
            let opts = SymbolicOptions { order, ..Default::default() };
            symbolic_reach_with(&p, &q, opts).unwrap().expr
        })
        .collect();
        assert!(results[0].equiv(&results[1]), "s={s}");
        assert!(results[0].equiv(&results[2]), "s={s}");
    }
}

#[test]
fn term_cap_raises_blowup() {
    let p = rad(&horizons());
    let q = parse_property("P=? [ F s=7 ]").unwrap();
    let opts = SymbolicOptions { term_cap: 50, ..Default::default() };
    let err = symbolic_reach_with(&p, &q, opts).unwrap_err();
    assert!(matches!(err, EngineError::EliminationBlowup { cap: 50, .. }));
}

fn grid() -> Vec<f64> {
    (0..=20).map(|i| i as f64 * 0.05).collect()
}

#[test]
fn mitigation_monotone_in_recovery_parameters() {
    let p = rad(&config_s7());
    let expr = CompiledRf::new(&reach(&p, 7));
    let at = |p7: f64, p8: f64| {
        let v = val(&p, &[("P2", 0.9), ("P4", 0.7), ("P5", 0.65), ("P7", p7), ("P8", p8)]);
        expr.eval(&v.to_dense(p.space().len())).value
    };
    for &a in &grid() {
        for w in grid().windows(2) {
            assert!(at(w[1], a) >= at(w[0], a) - 1e-12, "P7 at P8={a}");
            assert!(at(a, w[1]) <= at(a, w[0]) + 1e-12, "P8 at P7={a}");
        }
    }
}

#[test]
fn escalation_nonincreasing_in_detection() {
    let p = rad(&config_p2_p3());
    let expr = reach(&p, 2);
    for p3 in [0.0, 0.05, 0.1] {
        let mut last = f64::INFINITY;
        for p2 in grid().into_iter().filter(|x| *x <= 0.9 + 1e-9) {
            let v = val(&p, &[("P2", p2), ("P3", p3)]);
            let x = radcheck_core::ratfunc::rational_to_f64(&expr.eval(v.point()).unwrap());
            assert!(x <= last + 1e-12);
            last = x;
        }
    }
}

#[test]
fn bounded_reach_examples() {
    let p = rad(&config_p2_p3());
    let v = val(&p, &[("P2", 0.06), ("P3", 0.05)]);
    let done = Expr::var_equals("s", 3);
    assert_eq!(bounded_reach(&p, &v, &done, 0).unwrap(), 0.0);
    let start = parse_property("P=? [ F s=0 ]").unwrap();
    assert_eq!(bounded_reach(&p, &v, start.target(), 0).unwrap(), 1.0);
    let full = numeric_reach(&p, &v, &Expr::var_equals("s", 8), NumericOptions::default()).unwrap();
    let mut last = 0.0;
    for k in 0..400 {
        let x = bounded_reach(&p, &v, &Expr::var_equals("s", 8), k).unwrap();
        assert!(x >= last - 1e-15 && x <= full + 1e-12);
        last = x;
    }
    assert!((full - last).abs() < 1e-9);
    let unbounded = numeric_reach(&p, &v, &done, NumericOptions::default()).unwrap();
    let far = bounded_reach(&p, &v, &done, 40_000).unwrap();
    assert!(far <= unbounded + 1e-12 && unbounded - far < 1e-9, "{far} {unbounded}");
}

#[test]
fn symbolic_bounded_matches_numeric() {
    let p = rad(&config_p2_p3());
    let q = parse_property("P>=0.95 [ F<=6 s=3 ]").unwrap();
    let r = symbolic_reach(&p, &q).unwrap();
    let v = val(&p, &[("P2", 0.06), ("P3", 0.05)]);
    let sym = radcheck_core::ratfunc::rational_to_f64(&r.expr.eval(v.point()).unwrap());
    let num = bounded_reach(&p, &v, q.target(), 6).unwrap();
    assert!((sym - num).abs() < 1e-12);
}

#[test]
fn proxy_values() {
    let p = rad(&config_p2_p3());
    let q = parse_property("P=? [ F s=2 ]").unwrap();
    let r = symbolic_reach(&p, &q).unwrap();
    let v = val(&p, &[("P2", 0.5), ("P3", 0.05)]);
    let ten = BigRational::from_integer(10.into());
    let expected = 10.0 * radcheck_core::ratfunc::rational_to_f64(&r.expr.eval(v.point()).unwrap());
    assert!((proxy_value(&r, &ten, &v).unwrap() - expected).abs() < 1e-12);
    assert_eq!(proxy_value(&r, &BigRational::from_integer(0.into()), &v).unwrap(), 0.0);

    let alert = RationalFunction::constant(parse_decimal("0.03").unwrap());
    let mut fake = r.clone();
    fake.expr = alert;
    assert!((proxy_value(&fake, &ten, &v).unwrap() - 0.3).abs() < 1e-15);
}

#[test]
fn reward_at_favourable_corner() {
    let p = rad(&config_s7());
    let q = parse_property("P=? [ F s=7 ]").unwrap();
    let r = symbolic_reach(&p, &q).unwrap();
    let v = val(&p, &[("P2", 0.9), ("P4", 0.7), ("P5", 0.65), ("P7", 1.0), ("P8", 0.0)]);
    let ten = BigRational::from_integer(10.into());
    let reward = proxy_value(&r, &ten, &v).unwrap();
    assert!(reward > 6.0, "{reward}");
    let exact = r.expr.eval(v.point()).unwrap();
    assert_eq!(exact, BigRational::new(441.into(), 631.into()));
}

#[test]
fn envelope_round_trip() {
    let p = rad(&config_p2_p3());
    let q = parse_property("P=? [ F s=2 ]").unwrap();
    let r = symbolic_reach(&p, &q).unwrap();
    let json = serde_json::to_string_pretty(&r.envelope()).unwrap();
    let back: SymbolicEnvelope = serde_json::from_str(&json).unwrap();
    assert_eq!(back.query, "P=? [ F s=2 ]");
    assert_eq!(back.free_parameters, ["P2", "P3"]);
    assert_eq!(back.fixed_bindings["P4"], "22/25");
    let mut space = ParamSpace::new();
    let f = back.expression(&mut space).unwrap();
    let expected = RationalFunction::parse(ESCALATION_CLOSED_FORM, &mut space).unwrap();
    assert!(f.equiv(&expected));
}

