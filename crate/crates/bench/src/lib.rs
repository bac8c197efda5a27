//! Problem fixtures shared by the benchmarks.

use singbvp::pipeline::{kirchhoff_preset, KirchhoffConfig, ProblemSpec};

pub const SIMPLE: &str = r#"{"operator": {"coeffs": ["-1/x^2", "1/x", "1"]},
  "conditions": ["regularized_zero_at_origin", {"kind": "eval", "point": "1"}]}"#;

pub const IVP_TWO_POINT: &str = r#"{"operator": {"coeffs": ["2/x^2", "4/x", "1"]},
  "conditions": ["regularized_zero_at_origin", {"kind": "eval", "point": "1"}]}"#;

pub fn simple() -> ProblemSpec {
    ProblemSpec::from_str(SIMPLE).expect("fixture parses")
}

pub fn ivp_two_point() -> ProblemSpec {
    ProblemSpec::from_str(IVP_TWO_POINT).expect("fixture parses")
}

pub fn kirchhoff() -> ProblemSpec {
    kirchhoff_preset(&KirchhoffConfig::default()).expect("default preset is valid").0
}
