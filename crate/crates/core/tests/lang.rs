mod common;

use common::*;
use proptest::prelude::*;
use radcheck_core::lang::{
    parse_model, parse_model_bytes, parse_property, LangError, PathFormula, ProbBound,
};

#[test]
fn bundled_model_shape() {
    let m = rad_model();
    assert_eq!(m.module_name, "robot_assisted_dressing");
    let vars: Vec<&str> = m.variables.iter().map(|v| v.name.as_str()).collect();
    assert_eq!(vars, ["s", "t", "time_step", "trajectory_complete"]);
    assert_eq!(m.commands.len(), 13);
    assert_eq!(m.rewards.len(), 5);
    assert!(m.constant("P1").unwrap().value.is_some());
}

#[test]
fn bundled_model_reprints() {
    let m = rad_model();
    let again = parse_model(&m.to_string()).unwrap();
    assert_eq!(again, m);
}

#[test]
fn syntax_errors_carry_positions() {
    let err = parse_model("dtmc\nmodule m\n  s : [0..1] init 0;\n  [] s=0 -> 0.5 (s'=1);\nendmodule\n")
        .unwrap_err();
    let span = err.span();
    assert_eq!(span.line, 4);
    assert!(matches!(err, LangError::Syntax { .. }));
}

#[test]
fn duplicate_and_unknown_names() {
    let dup = parse_model("dtmc\nconst double a;\nconst int a = 1;\nmodule m\n s : [0..1] init 0;\nendmodule\n");
    assert!(matches!(dup, Err(LangError::DuplicateName { ref name, .. }) if name == "a"), "{dup:?}");
    let unknown = parse_model("dtmc\nmodule m\n s : [0..1] init 0;\n [] s=0 -> q: (s'=1) + 1-q: true;\nendmodule\n");
    assert!(matches!(unknown, Err(LangError::UnknownIdentifier { ref name, .. }) if name == "q"), "{unknown:?}");
}

#[test]
fn case_sensitive_identifiers() {
    let r = parse_model("dtmc\nconst double p10;\nmodule m\n s : [0..1] init 0;\n [] s=0 -> P10: (s'=1) + 1-P10: true;\nendmodule\n");
    assert!(matches!(r, Err(LangError::UnknownIdentifier { ref name, .. }) if name == "P10"));
}

#[test]
fn invalid_utf8_is_a_syntax_error() {
    assert!(matches!(parse_model_bytes(b"dtmc\xff\xfe"), Err(LangError::Syntax { .. })));
}

#[test]
fn requirement_queries() {
    let q = parse_property("P<=0.1 [ F s=8 ]").unwrap();
    assert_eq!(q.bound.value().unwrap().to_string(), "1/10");
    assert!(matches!(q.bound, ProbBound::UpperBound(_)));
    let q = parse_property("P>=0.95 [ F<=2 s=3 ]").unwrap();
    assert!(matches!(q.path, PathFormula::BoundedEventually(_, 2)));
    assert_eq!(q.bound.value().unwrap().to_string(), "19/20");
}

fn atom() -> impl Strategy<Value = String> {
    let var = prop::sample::select(vec!["s", "t", "time_step"]);
    let op = prop::sample::select(vec!["=", "!=", "<", "<=", ">", ">="]);
    prop_oneof![
        (var, op, 0u8..10).prop_map(|(v, o, n)| format!("{v}{o}{n}")),
        Just("trajectory_complete".to_string()),
        Just("!trajectory_complete".to_string()),
        Just("\"s=7\"".to_string()),
        Just("true".to_string()),
    ]
}

fn predicate() -> impl Strategy<Value = String> {
    atom().prop_recursive(4, 16, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("{a} & {b}")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} | {b})")),
            inner.prop_map(|a| format!("!({a})")),
        ]
    })
}

fn conjunction() -> impl Strategy<Value = String> {
    prop::collection::vec(atom(), 1..5).prop_map(|v| v.join(" & "))
}

fn arith() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        prop::sample::select(vec!["a", "b", "c"]).prop_map(str::to_string),
        (0u32..100).prop_map(|n| n.to_string()),
        (0u32..100).prop_map(|n| format!("0.{n:02}")),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        let op = prop::sample::select(vec!["+", "-", "*", "/"]);
        prop_oneof![
            (inner.clone(), op, inner.clone()).prop_map(|(a, o, b)| format!("({a} {o} {b})")),
            inner.prop_map(|a| format!("-{a}")),
        ]
    })
}

proptest! {
    #[test]
    fn model_parser_never_panics(bytes in prop::collection::vec(any::<u8>(), 0..200)) {
        if let Err(e) = parse_model_bytes(&bytes) {
            let span = e.span();
            prop_assert!(span.start <= span.end);
            prop_assert!(span.end <= bytes.len());
        }
    }

    #[test]
    fn model_parser_survives_mutated_source(pos in 0usize..3000, len in 0usize..20, junk in "[ -~]{0,6}") {
        let src = RAD_SOURCE;
        let pos = pos.min(src.len());
        let end = (pos + len).min(src.len());
        if src.is_char_boundary(pos) && src.is_char_boundary(end) {
            let text = format!("{}{}{}", &src[..pos], junk, &src[end..]);
            if let Err(e) = parse_model(&text) {
                prop_assert!(e.span().end <= text.len());
            }
        }
    }

    #[test]
    fn property_parser_never_panics(text in "\\PC{0,60}") {
        if let Err(e) = parse_property(&text) {
            prop_assert!(e.span().end <= text.len());
        }
    }

    #[test]
    fn property_round_trip(
        pred in conjunction(),
        kind in 0u8..3,
        bound in 0u32..=100,
        k in prop::option::of(0u64..50),
    ) {
        let op = match kind {
            0 => "=?".to_string(),
            1 => format!("<={}", bound as f64 / 100.0),
            _ => format!(">={}", bound as f64 / 100.0),
        };
        let path = match k {
            Some(k) => format!("F<={k} {pred}"),
            None => format!("F {pred}"),
        };
        let q = parse_property(&format!("P{op} [ {path} ]")).unwrap();
        let again = parse_property(&q.to_string()).unwrap();
        prop_assert_eq!(&again, &q);
        prop_assert_eq!(again.to_string(), q.to_string());
    }

    #[test]
    fn model_round_trip(prob in arith(), guard in predicate()) {
        let guard = guard.replace("\"s=7\"", "s=7");
        let text = format!(
            "dtmc\nconst double a;\nconst double b = 0.5;\nconst int c = 3;\n\
             module m\n s : [0..9] init 0;\n t : [0..9] init 0;\n time_step : [0..9] init 0;\n\
             trajectory_complete : bool init false;\n\
             [] {guard} -> {prob}: (s'=1) & (t'=t+1) + 1 - ({prob}): true;\nendmodule\n\
             rewards \"r\"\n s=1 : {prob};\nendrewards\n"
        );
        let m = parse_model(&text).unwrap();
        let again = parse_model(&m.to_string()).unwrap();
        prop_assert_eq!(again, m);
    }
}
