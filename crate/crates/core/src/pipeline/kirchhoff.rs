//! Radially symmetric Kirchhoff plate with linearly graded thickness
//! t(ρ) = t0·(1 − ρ), written for the negative slope φ = −w′.

use super::{Condition, ProblemSpec, DEFAULT_TRUNCATION};
use crate::arith::{fmt_q, one, q, qi, zero, Q};
use num_traits::Zero;
use crate::closed::ClosedForm;
use crate::expr::parse_expr;
use crate::opring::Functional;
use crate::{Error, Result};

/// Forcing that reproduces the closed-form slope published for constant
/// load and β = 9/10. The published right-hand side (ρ+1)/(ρ(ρ−1)²)
/// carries one factor of ρ less; see [`PAPER_FORCING_DISPLAYED`].
pub const PAPER_FORCING: &str = "(x+1)/(x^2*(x-1)^2)";

/// The right-hand side exactly as printed next to the constant-load example.
pub const PAPER_FORCING_DISPLAYED: &str = "(x+1)/(x*(x-1)^2)";

#[derive(Clone, Debug, PartialEq)]
pub enum Load {
    /// q(ρ) = q0
    Constant(Q),
    /// q as an expression in ρ (written `x`).
    Expr(ClosedForm),
    /// Use the published forcing instead of deriving one from a load.
    PaperFixture,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KirchhoffConfig {
    /// Poisson ratio.
    pub nu: Q,
    pub t0: Q,
    pub e0: Q,
    /// Outer radius; ρ = r/b.
    pub b: Q,
    /// Cut-off a/b.
    pub beta: Q,
    pub load: Load,
    pub truncation: usize,
}

impl Default for KirchhoffConfig {
    fn default() -> Self {
        KirchhoffConfig {
            nu: q(1, 3),
            t0: one(),
            e0: one(),
            b: one(),
            beta: q(9, 10),
            load: Load::PaperFixture,
            truncation: DEFAULT_TRUNCATION,
        }
    }
}

impl KirchhoffConfig {
    pub fn validate(&self) -> Result<()> {
        if self.beta <= zero() || self.beta >= one() {
            return Err(Error::InvalidInput(format!(
                "beta = {} must lie in (0, 1): the rigidity vanishes at rho = 1",
                fmt_q(&self.beta)
            )));
        }
        if self.nu < zero() || self.nu >= q(1, 2) {
            return Err(Error::InvalidInput(format!("nu = {} must lie in [0, 1/2)", fmt_q(&self.nu))));
        }
        for (name, v) in [("t0", &self.t0), ("E0", &self.e0), ("b", &self.b)] {
            if *v <= zero() {
                return Err(Error::InvalidInput(format!("{name} must be positive")));
            }
        }
        Ok(())
    }

    /// D0 = E0·t0³ / (12(1 − ν²))
    pub fn d0(&self) -> Q {
        &self.e0 * &self.t0 * &self.t0 * &self.t0 / (qi(12) * (one() - &self.nu * &self.nu))
    }
}

/// Coefficients a_0, a_1, a_2 of
/// φ″ + (1/ρ − 3/(1−ρ))φ′ + (−3ν/(1−ρ) − 1/ρ)φ/ρ.
pub fn kirchhoff_coeffs(nu: &Q) -> Result<Vec<ClosedForm>> {
    let a0 = parse_expr(&format!("(-3*({})/(1-x) - 1/x)/x", fmt_q(nu)))?;
    let a1 = parse_expr("1/x - 3/(1-x)")?;
    Ok(vec![a0, a1, ClosedForm::one()])
}

/// f(ρ) = b²·Q_r(ρ)/D(ρ) with Q_r(ρ) = −(b/ρ)∫₀^ρ q(s)·s ds and
/// D(ρ) = D0·(1 − ρ)³.
pub fn load_to_forcing(cfg: &KirchhoffConfig) -> Result<ClosedForm> {
    let load = match &cfg.load {
        Load::Constant(q0) => ClosedForm::constant(q0.clone()),
        Load::Expr(e) => e.clone(),
        Load::PaperFixture => return parse_expr(PAPER_FORCING),
    };
    let h = load.mul(&ClosedForm::x());
    if let Some(o) = h.order() {
        if o < -one() {
            return Err(Error::InvalidInput(format!("load {} is not integrable at the centre", load.display("x"))));
        }
    }
    if !h.coeff(-1, &zero()).is_zero() {
        return Err(Error::LogObstruction(format!("cumulative load of {} contains log(rho)", load.display("x"))));
    }
    let prim = h.antiderivative_rb()?;
    let prim = prim.sub(&ClosedForm::constant(prim.coeff(0, &zero())));
    let qr = prim.shift(-1).scale(&-cfg.b.clone());
    let d = parse_expr("(1-x)^3")?.scale(&cfg.d0());
    qr.scale(&(&cfg.b * &cfg.b)).div(&d)
}

/// The slope problem on [0, β] with φ(0) = φ(β) = 0, together with its forcing.
pub fn kirchhoff_preset(cfg: &KirchhoffConfig) -> Result<(ProblemSpec, ClosedForm)> {
    cfg.validate()?;
    let spec = ProblemSpec {
        coeffs: kirchhoff_coeffs(&cfg.nu)?,
        b: cfg.beta.clone(),
        conditions: vec![
            Condition::RegularizedZeroAtOrigin,
            Condition::Terms(vec![(one(), Functional::PointEval { xi: cfg.beta.clone(), deriv: 0 })]),
        ],
        truncation: cfg.truncation,
    };
    Ok((spec, load_to_forcing(cfg)?))
}
