//! Catalog problems and random generators shared by the property suites.
#![allow(dead_code)]

use proptest::prelude::*;
use singbvp::arith::{q, qi};
use singbvp::expr::parse_expr;
use singbvp::pipeline::{kirchhoff_preset, prepare, Prepared, ProblemSpec};
use singbvp::pipeline::KirchhoffConfig;
use singbvp::arith::falling_factorial;
use singbvp::linalg::Matrix;
use singbvp::{ClosedForm, FuchsianOperator, GenLaurentElement, GenLaurentSeries, Q};

pub const SIMPLE: &str = r#"{"operator": {"coeffs": ["-1/x^2", "1/x", "1"]},
  "conditions": ["regularized_zero_at_origin", {"kind": "eval", "point": "1"}]}"#;
pub const IVP_INITIAL: &str = r#"{"operator": {"coeffs": ["2/x^2", "4/x", "1"]},
  "conditions": ["regularized_zero_at_origin", {"kind": "coeff", "k": 1}]}"#;
pub const IVP_TWO_POINT: &str = r#"{"operator": {"coeffs": ["2/x^2", "4/x", "1"]},
  "conditions": ["regularized_zero_at_origin", {"kind": "eval", "point": "1"}]}"#;

pub fn cf(s: &str) -> ClosedForm {
    parse_expr(s).unwrap()
}

pub fn spec(src: &str) -> ProblemSpec {
    ProblemSpec::from_str(src).unwrap()
}

pub fn kirchhoff_spec() -> ProblemSpec {
    kirchhoff_preset(&KirchhoffConfig::default()).unwrap().0
}

/// (name, prepared problem) for the regular singular example, both
/// Euler initial/two-point variants and the Kirchhoff preset. Kirchhoff is
/// returned on the unit interval.
pub fn catalog() -> Vec<(&'static str, Prepared)> {
    vec![
        ("simple", prepare(&spec(SIMPLE)).unwrap()),
        ("ivp-initial", prepare(&spec(IVP_INITIAL)).unwrap()),
        ("ivp-two-point", prepare(&spec(IVP_TWO_POINT)).unwrap()),
        ("kirchhoff", prepare(&kirchhoff_spec()).unwrap()),
    ]
}

pub fn small_q() -> impl Strategy<Value = Q> {
    (-9i64..=9, 1i64..=4).prop_map(|(n, d)| q(n, d))
}

pub fn nonzero_q() -> impl Strategy<Value = Q> {
    (1i64..=9, 1i64..=4, any::<bool>()).prop_map(|(n, d, s)| q(if s { n } else { -n }, d))
}

/// Σ c_k x^k for k in [lo, hi].
pub fn laurent_poly(lo: i64, hi: i64) -> impl Strategy<Value = ClosedForm> {
    prop::collection::vec(small_q(), (hi - lo + 1) as usize).prop_map(move |cs| {
        cs.into_iter()
            .enumerate()
            .fold(ClosedForm::zero(), |acc, (i, c)| acc.add(&ClosedForm::monomial(c, &qi(lo + i as i64))))
    })
}

pub fn poly(deg: i64) -> impl Strategy<Value = ClosedForm> {
    laurent_poly(0, deg)
}

/// A truncated series component x^μ Σ_{k ≥ start} a_k x^k + O(x^(start+len)).
pub fn truncated_series() -> impl Strategy<Value = GenLaurentElement> {
    let mu = prop_oneof![Just(qi(0)), Just(q(1, 2)), Just(q(1, 3))];
    (mu, -4i64..=2, prop::collection::vec(small_q(), 1..8), any::<bool>()).prop_map(|(mu, start, cs, exact)| {
        let n = cs.len() as i64;
        let order = if exact { None } else { Some(start + n) };
        GenLaurentElement::from_series(GenLaurentSeries::new(mu, start, cs, order, singbvp::Radius::Infinite))
    })
}

/// Sum of up to three components with different fractional exponents.
pub fn element() -> impl Strategy<Value = GenLaurentElement> {
    prop::collection::vec(truncated_series(), 1..3).prop_map(|v| v.iter().fold(GenLaurentElement::zero(), |a, b| a.add(b)))
}

pub fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, failure_persistence: None, ..ProptestConfig::default() }
}

/// Coefficients c_j with Σ c_j s(s−1)…(s−j+1) = Π (s − r_i), found by
/// solving the triangular system at s = 0, 1, …, n.
fn euler_coefficients(roots: &[Q]) -> Vec<Q> {
    let n = roots.len();
    let mut m = Matrix::zeros(n + 1, n + 1);
    let mut rhs = Vec::new();
    for s in 0..=n {
        let sq = qi(s as i64);
        for j in 0..=n {
            m.set(s, j, falling_factorial(&sq, j));
        }
        rhs.push(roots.iter().fold(qi(1), |acc, r| acc * (&sq - r)));
    }
    m.solve(&rhs).unwrap()
}

/// x^(j−n)(c_j + d_j x) for j < n and a_n = 1: Fuchsian at 0 with the given
/// indicial roots. None when the operator is rejected.
pub fn euler_operator(roots: &[Q], ds: &[Q]) -> Option<FuchsianOperator> {
    let n = roots.len();
    let c = euler_coefficients(roots);
    let coeffs = (0..=n)
        .map(|j| {
            let d = if j < n { ds[j].clone() } else { qi(0) };
            let poly = ClosedForm::constant(c[j].clone()).add(&ClosedForm::monomial(d, &qi(1)));
            poly.mul(&ClosedForm::monomial(qi(1), &qi(j as i64 - n as i64)))
        })
        .collect();
    FuchsianOperator::new(coeffs).ok()
}
