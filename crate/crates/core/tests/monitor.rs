mod common;

use common::*;
use num_rational::BigRational;
use radcheck_core::model::{ParamValuation, Pdtmc};
use radcheck_core::monitor::{
    decide, exit_code, Action, DecisionPolicy, ExpressionCache, Monitor, MonitorConfig, MonitorError,
    RequirementId,
};
use radcheck_core::ratfunc::parse_decimal;

fn val(p: &Pdtmc, pairs: &[(&str, f64)]) -> ParamValuation {
    let scale = 1_000_000_000i64;
    let r = |x: f64| BigRational::new(((x * scale as f64).round() as i64).into(), scale.into());
    ParamValuation::from_names(p.space(), pairs.iter().map(|(n, x)| (*n, r(*x)))).unwrap()
}

fn monitor_for(p: &Pdtmc, cfg: &MonitorConfig) -> Monitor {
    let specs = cfg.requirements();
    let cache = ExpressionCache::build(p, &specs).unwrap();
    Monitor::new(p, specs, &cache, DecisionPolicy::default()).unwrap()
}

fn chain() -> Pdtmc {
    rad(&config_p2_p3())
}

#[test]
fn escalation_cost_at_fixed_point() {
    let p = chain();
    let m = monitor_for(&p, &MonitorConfig::default());
    let r = m.evaluate(&val(&p, &[("P2", 0.06), ("P3", 0.05)]), 0.0);
    let h3 = r.get(RequirementId::H3).unwrap();
    // 10 * (-92.82 / -94.72)
    assert!((h3.value.unwrap() - 928.2 / 94.72).abs() < 1e-9);
    assert_eq!(h3.satisfied, Some(false));
    assert_eq!(exit_code(&r), 3);
}

#[test]
fn margins_match_satisfaction() {
    let p = chain();
    let m = monitor_for(&p, &MonitorConfig::default());
    for (a, b) in [(0.06, 0.05), (0.9, 0.05), (0.5, 0.5), (0.95, 0.01)] {
        let r = m.evaluate(&val(&p, &[("P2", a), ("P3", b)]), 1.0);
        for res in &r.results {
            if let (Some(mg), Some(sat)) = (res.margin, res.satisfied) {
                assert_eq!(mg >= 0.0, sat, "{:?}", res);
            }
        }
        assert!(r.get(RequirementId::H4).unwrap().satisfied.is_none());
    }
}

#[test]
fn raising_the_cost_budget_never_adds_violations() {
    let p = chain();
    let v = val(&p, &[("P2", 0.5), ("P3", 0.2)]);
    let mut last: Option<bool> = None;
    for budget in ["0.5", "2", "3", "6", "12"] {
        let cfg = MonitorConfig {
            max_c2: parse_decimal(budget).unwrap(),
            ..MonitorConfig::default()
        };
        let ok = monitor_for(&p, &cfg).evaluate(&v, 0.0).get(RequirementId::H3).unwrap().satisfied.unwrap();
        if let Some(prev) = last {
            assert!(ok || !prev, "budget {budget}");
        }
        last = Some(ok);
    }
}

#[test]
fn bounded_requirement_is_zero_at_trajectory_horizon() {
    let p = chain();
    let m = monitor_for(&p, &MonitorConfig::default());
    let r = m.evaluate(&val(&p, &[("P2", 0.9), ("P3", 0.05)]), 0.0);
    let h5 = r.get(RequirementId::H5).unwrap();
    assert_eq!(h5.probability, Some(0.0));
    assert_eq!(h5.satisfied, Some(false));
}

#[test]
fn decision_ladder() {
    let p = chain();
    let m = monitor_for(&p, &MonitorConfig::default());
    // low escalation risk: P[F s=2] = 0.05 * ... small, H3 holds
    let calm = m.evaluate(&val(&p, &[("P2", 0.99), ("P3", 0.9)]), 0.0);
    let h3 = calm.get(RequirementId::H3).unwrap();
    assert!(h3.satisfied.unwrap(), "{h3:?}");
    let d = m.decide(&calm);
    assert!(!d.triggered_by.contains("H3"));

    let risky = m.evaluate(&val(&p, &[("P2", 0.06), ("P3", 0.05)]), 0.0);
    let d = m.decide(&risky);
    assert_eq!(d.action, Action::Abort);
    assert!(d.triggered_by.contains("escalation-risk"));
    assert!(d.triggered_by.contains("H3"));
}

#[test]
fn pole_makes_requirement_unevaluable() {
    let p = chain();
    let m = monitor_for(&p, &MonitorConfig::default());
    // 88*P2 - 100 never vanishes in [0,1]; force NaN through an unbound parameter
    let r = m.evaluate(&ParamValuation::new(), 0.0);
    assert!(r.results.iter().any(|x| x.unevaluable));
    assert_eq!(exit_code(&r), 4);
    assert_eq!(decide(&r, &DecisionPolicy::default()).action, Action::CompliantMode);
}

#[test]
fn evaluation_is_deterministic() {
    let p = chain();
    let m = monitor_for(&p, &MonitorConfig::default());
    let v = val(&p, &[("P2", 0.31), ("P3", 0.77)]);
    let a = serde_json::to_string(&m.evaluate(&v, 3.0)).unwrap();
    let b = serde_json::to_string(&m.evaluate(&v, 3.0)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn cache_round_trip_and_staleness() {
    let p = chain();
    let specs = MonitorConfig::default().requirements();
    let cache = ExpressionCache::build(&p, &specs).unwrap();
    let back = ExpressionCache::from_json(&cache.to_json()).unwrap();
    assert_eq!(back, cache);
    Monitor::new(&p, specs.clone(), &back, DecisionPolicy::default()).unwrap();

    let other = rad(&config_p2_p3().fix_str("P4", "0.5"));
    let err = Monitor::new(&other, specs, &back, DecisionPolicy::default()).err().unwrap();
    assert!(matches!(err, MonitorError::StaleCache(_)), "{err}");
}

#[test]
fn abort_probability_above_bound_requests_compliance() {
    let p = rad(&horizons()
        .fix_str("P4", "0.88")
        .fix_str("P5", "0.7")
        .fix_str("P6", "0.05")
        .fix_str("P7", "0.8")
        .fix_str("P8", "0.05")
        .fix_str("p10", "0.8"));
    let m = monitor_for(&p, &MonitorConfig::default());
    let r = m.evaluate(&val(&p, &[("P2", 0.6), ("P3", 0.1), ("P9", 0.25)]), 0.0);
    let h1 = r.get(RequirementId::H1).unwrap();
    assert!(h1.value.unwrap() > 0.1, "{h1:?}");
    assert!(m.decide(&r).triggered_by.contains("H1"));
}
