mod common;

use common::*;
use proptest::prelude::*;
use singbvp::arith::{one, q};
use singbvp::pipeline::{
    eval_prepared, prepare, scale_domain, to_csv, verify_prepared, EvalMode, EvalOptions, Prepared, VerifyOptions,
};
use singbvp::quad::QuadOptions;
use std::sync::OnceLock;

fn catalog_cached() -> &'static Vec<(&'static str, Prepared)> {
    static C: OnceLock<Vec<(&'static str, Prepared)>> = OnceLock::new();
    C.get_or_init(catalog)
}

fn exact_catalog() -> impl Iterator<Item = &'static (&'static str, Prepared)> {
    catalog_cached().iter().filter(|(n, _)| *n != "kirchhoff")
}

fn opts(mode: EvalMode) -> EvalOptions {
    EvalOptions { grid: 11, mode, quad: QuadOptions { rel_tol: 1e-12, max_panels: 1 << 12 } }
}

proptest! {
    #![proptest_config(config(12))]

    #[test]
    fn quadrature_agrees_with_exact_evaluation(f in poly(3)) {
        for (name, p) in exact_catalog() {
            let ex = eval_prepared(p, &f, opts(EvalMode::Exact)).unwrap();
            let qu = eval_prepared(p, &f, opts(EvalMode::Quadrature)).unwrap();
            let scale = ex.iter().map(|r| r.1.abs()).fold(1e-300, f64::max);
            for ((x, a), (_, b)) in ex.iter().zip(&qu) {
                prop_assert!((a - b).abs() <= 1e-9 * scale, "{} at {}: {} vs {}", name, x, a, b);
            }
        }
    }

    #[test]
    fn scaling_round_trips(n in 1i64..7, d in 1i64..7) {
        let s = q(n, d);
        for src in [SIMPLE, IVP_INITIAL, IVP_TWO_POINT] {
            let base = spec(src);
            let there = scale_domain(&base, &s).unwrap();
            prop_assert_eq!(scale_domain(&there, &(one() / &s)).unwrap(), base);
        }
    }

    #[test]
    fn verification_passes_on_stretched_intervals(n in 1i64..5, d in 1i64..4, f in poly(3)) {
        let b = format!("{n}/{d}");
        let src = format!(
            r#"{{"operator": {{"coeffs": ["-1/x^2", "1/x", "1"]}}, "interval": {{"b": "{b}"}},
              "conditions": ["regularized_zero_at_origin", {{"kind": "eval", "point": "{b}"}}]}}"#
        );
        let p = prepare(&spec(&src)).unwrap();
        let r = verify_prepared(&p, &f, VerifyOptions::default()).unwrap();
        prop_assert!(r.passed());
        let r = verify_prepared(&p, &f, VerifyOptions { force_numeric: true, ..Default::default() }).unwrap();
        prop_assert!(r.passed());
    }

    #[test]
    fn verification_passes_on_the_catalog(f in poly(3)) {
        for (name, p) in catalog_cached() {
            let r = verify_prepared(p, &f, VerifyOptions::default());
            prop_assert!(r.as_ref().is_ok_and(|r| r.passed()), "{}: {:?}", name, r);
        }
    }

    #[test]
    fn csv_output_is_deterministic(f in poly(2)) {
        let p = &catalog_cached()[0].1;
        let a = to_csv(&eval_prepared(p, &f, opts(EvalMode::Quadrature)).unwrap());
        let b = to_csv(&eval_prepared(p, &f, opts(EvalMode::Quadrature)).unwrap());
        prop_assert_eq!(&a, &b);
        prop_assert!(a.starts_with("x,u\n"));
        prop_assert_eq!(a.lines().count(), 12);
    }
}
