use super::commands::{eval_prepared, verify_prepared, VerifyOptions};
use super::*;
use crate::arith::q;
use crate::opring::Side;
use crate::quad::QuadOptions;

const SIMPLE: &str = r#"{
  "operator": {"coeffs": ["-1/x^2", "1/x", "1"]},
  "interval": {"b": "1"},
  "conditions": ["regularized_zero_at_origin", {"terms": [{"kind": "eval", "point": "1"}]}]
}"#;

fn ivp(last: &str) -> ProblemSpec {
    let src = format!(
        r#"{{"operator": {{"coeffs": ["2/x^2", "4/x", "1"]}},
            "conditions": ["regularized_zero_at_origin", {last}]}}"#
    );
    ProblemSpec::from_str(&src).unwrap()
}

fn cf(s: &str) -> ClosedForm {
    parse_expr(s).unwrap()
}

#[test]
fn parses_simple_problem() {
    let s = ProblemSpec::from_str(SIMPLE).unwrap();
    assert_eq!(s.coeffs, vec![cf("-1/x^2"), cf("1/x"), cf("1")]);
    assert_eq!(s.b, one());
    assert_eq!(s.conditions[0], Condition::RegularizedZeroAtOrigin);
    assert_eq!(s.truncation, DEFAULT_TRUNCATION);
    let again = ProblemSpec::from_json(&s.to_json()).unwrap();
    assert_eq!(again, s);
}

#[test]
fn malformed_coefficient_is_a_parse_error() {
    let e = ProblemSpec::from_str(r#"{"operator": {"coeffs": ["1/(x", "1"]}}"#).unwrap_err();
    match e {
        Error::Parse { msg, .. } => assert!(msg.contains("operator.coeffs[0]"), "{msg}"),
        e => panic!("{e:?}"),
    }
}

#[test]
fn float_literal_is_rejected_with_advice() {
    let e = ProblemSpec::from_str(r#"{"operator": {"coeffs": ["1", "1"]}, "interval": {"b": 0.5}}"#).unwrap_err();
    assert!(e.to_string().contains("1/2"), "{e}");
    let e = ProblemSpec::from_str(
        r#"{"operator": {"coeffs": ["1", "1"]}, "conditions": [{"kind": "eval", "point": "1", "coeff": 0.5}]}"#,
    )
    .unwrap_err();
    assert!(e.to_string().contains("1/2"), "{e}");
}

#[test]
fn condition_point_outside_interval_is_rejected() {
    let e = ProblemSpec::from_str(
        r#"{"operator": {"coeffs": ["1", "1"]}, "interval": {"b": "1/2"}, "conditions": [{"kind": "eval", "point": "1"}]}"#,
    )
    .unwrap_err();
    assert!(e.to_string().contains("conditions[0]"), "{e}");
}

#[test]
fn scaling_round_trips_and_moves_points() {
    let (spec, _) = kirchhoff_preset(&KirchhoffConfig::default()).unwrap();
    let unit = scale_domain(&spec, &spec.b).unwrap();
    assert_eq!(unit.b, one());
    assert_eq!(
        unit.conditions[1],
        Condition::Terms(vec![(one(), Functional::PointEval { xi: one(), deriv: 0 })])
    );
    // the pole at ρ = 1 moves to 10/9
    assert!(unit.coeffs.iter().all(|c| !c.has_pole_in_unit_interval()));
    assert_eq!(scale_domain(&unit, &q(10, 9)).unwrap(), spec);
    let simple = ProblemSpec::from_str(SIMPLE).unwrap();
    assert_eq!(scale_domain(&simple, &one()).unwrap(), simple);
}

#[test]
fn coefficient_conditions_scale_with_their_exponent() {
    let spec = ProblemSpec {
        coeffs: vec![cf("-1/x^2"), cf("1/x"), cf("1")],
        b: qi(2),
        conditions: vec![Condition::Terms(vec![
            (one(), Functional::Coeff { k: 1, mu: zero() }),
            (one(), Functional::PointEval { xi: qi(2), deriv: 1 }),
        ])],
        truncation: 20,
    };
    let unit = scale_domain(&spec, &qi(2)).unwrap();
    let Condition::Terms(t) = &unit.conditions[0] else { panic!() };
    assert_eq!(t[0], (q(1, 2), Functional::Coeff { k: 1, mu: zero() }));
    assert_eq!(t[1], (q(1, 2), Functional::PointEval { xi: one(), deriv: 1 }));
}

#[test]
fn solve_reproduces_simple_kernel() {
    let out = cmd_solve(&ProblemSpec::from_str(SIMPLE).unwrap()).unwrap();
    let prep = prepare(&ProblemSpec::from_str(SIMPLE).unwrap()).unwrap();
    let below = prep.kernel.pieces.iter().find(|p| p.side == Side::Below).unwrap();
    let above = prep.kernel.pieces.iter().find(|p| p.side == Side::Above).unwrap();
    let sum = |p: &crate::opring::Piece, x: &Q, xi: &Q| -> Q {
        p.terms.iter().map(|t| t.p.eval(x).unwrap() * t.q.eval(xi).unwrap()).sum()
    };
    // g = xξ²/2 − ξ²/(2x) below, xξ²/2 − x/2 above
    for (x, xi) in [(q(1, 2), q(1, 3)), (q(3, 4), q(1, 5))] {
        assert_eq!(sum(below, &x, &xi), &x * &xi * &xi / qi(2) - &xi * &xi / (qi(2) * &x));
    }
    for (x, xi) in [(q(1, 3), q(1, 2)), (q(1, 5), q(3, 4))] {
        assert_eq!(sum(above, &x, &xi), &x * &xi * &xi / qi(2) - &x / qi(2));
    }
    assert_eq!(out["greens_function"]["pieces"].as_array().unwrap().len(), 2);
    assert_eq!(out["report"]["outcomes"][0], "redundant");
}

#[test]
fn ivp_initial_conditions_cover_all_analytic_forcings() {
    let out = cmd_solve(&ivp(r#"{"kind": "coeff", "k": 1}"#)).unwrap();
    assert_eq!(out["report"]["exceptional"]["analytic_accessible"], true);
    assert_eq!(out["report"]["projector_q_analytic"], "1");
}

#[test]
fn ivp_two_point_reports_exceptional_space() {
    let out = cmd_solve(&ivp(r#"{"kind": "eval", "point": "1"}"#)).unwrap();
    assert_eq!(out["report"]["exceptional"]["analytic_accessible"], false);
    assert!(!out["report"]["exceptional"]["generators"].as_array().unwrap().is_empty());
}

#[test]
fn eval_simple_exact_and_quadrature() {
    let prep = prepare(&ProblemSpec::from_str(SIMPLE).unwrap()).unwrap();
    let f = ClosedForm::one();
    let exact = eval_prepared(&prep, &f, EvalOptions { grid: 4, mode: EvalMode::Exact, ..Default::default() }).unwrap();
    for (x, u) in &exact {
        assert!((u - (x * x - x) / 3.0).abs() < 1e-15);
    }
    let quad = eval_prepared(&prep, &f, EvalOptions { grid: 2, ..Default::default() }).unwrap();
    assert!((quad[0].1 + 1.0 / 12.0).abs() < 1e-10);
    let zero = eval_prepared(&prep, &ClosedForm::zero(), EvalOptions { grid: 3, ..Default::default() }).unwrap();
    assert!(zero.iter().all(|(_, u)| *u == 0.0));
}

#[test]
fn eval_on_scaled_interval() {
    // u'' = 1 on [0, 2] with u(0) = u(2) = 0: u = y(y − 2)/2
    let spec = ProblemSpec::from_str(
        r#"{"operator": {"coeffs": ["0", "0", "1"]}, "interval": {"b": "2"},
            "conditions": [{"kind": "coeff", "k": 0}, {"kind": "eval", "point": "2"}]}"#,
    )
    .unwrap();
    let prep = prepare(&spec).unwrap();
    for mode in [EvalMode::Exact, EvalMode::Quadrature] {
        let rows = eval_prepared(&prep, &ClosedForm::one(), EvalOptions { grid: 4, mode, ..Default::default() }).unwrap();
        for (y, u) in rows {
            assert!((u - y * (y - 2.0) / 2.0).abs() < 1e-12, "{mode:?} {y} {u}");
        }
    }
}

#[test]
fn verify_simple_exactly() {
    let r = cmd_verify(&ProblemSpec::from_str(SIMPLE).unwrap(), &ClosedForm::one()).unwrap();
    assert!(r.exact && r.passed());
    let r = cmd_verify(&ProblemSpec::from_str(SIMPLE).unwrap(), &cf("x^3 - 2*x + 5")).unwrap();
    assert!(r.passed());
}

#[test]
fn verify_kirchhoff_numerically() {
    let (spec, _) = kirchhoff_preset(&KirchhoffConfig::default()).unwrap();
    let f = parse_forcing("kirchhoff-paper").unwrap();
    let r = cmd_verify(&spec, &f).unwrap();
    assert!(!r.exact);
    assert!(r.max_residual.unwrap() < 1e-6);
}

#[test]
fn corrupted_kernel_fails_verification() {
    let mut prep = prepare(&ProblemSpec::from_str(SIMPLE).unwrap()).unwrap();
    let t = &mut prep.kernel.pieces[0].terms[0];
    t.p = t.p.scale(&q(11, 10));
    let opts = VerifyOptions { force_numeric: true, ..Default::default() };
    let e = verify_prepared(&prep, &ClosedForm::one(), opts).unwrap_err();
    assert!(matches!(e.error, Error::VerificationFailed(_)), "{e}");
}

#[test]
fn csv_uses_fifteen_significant_digits() {
    assert_eq!(format_sig(-1.0 / 12.0), "-0.0833333333333333");
    assert_eq!(format_sig(0.25), "0.25");
    assert_eq!(format_sig(0.0), "0");
    assert_eq!(format_sig(1.0 / 3.0 * 1e-9), "3.33333333333333e-10");
    assert_eq!(to_csv(&[(0.5, -1.0 / 12.0)]), "x,u\n0.5,-0.0833333333333333\n");
}

#[test]
fn displacement_is_an_antiderivative() {
    let u = |x: f64| x * x;
    let w = displacement(&u, 0.0, 0.5, QuadOptions::default()).unwrap();
    assert!((w + 0.125 / 3.0).abs() < 1e-15);
}

#[test]
fn failing_step_is_named() {
    // u'' + u/x^3 has an irregular singularity
    let spec = ProblemSpec::from_str(r#"{"operator": {"coeffs": ["1/x^3", "0", "1"]}}"#).unwrap();
    let e = prepare(&spec).unwrap_err();
    assert_eq!(e.step, "operator");
}

#[test]
fn verify_falls_back_to_quadrature_without_closed_form() {
    let cfg = KirchhoffConfig { load: Load::Constant(one()), ..Default::default() };
    let (spec, f) = kirchhoff_preset(&cfg).unwrap();
    let prep = prepare(&spec).unwrap();
    let r = verify_prepared(&prep, &f, VerifyOptions::default()).unwrap();
    assert!(!r.exact && r.passed());
}
