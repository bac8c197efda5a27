//! End-to-end handling of a problem file: parsing, scaling to [0, 1], the
//! four-step construction, and the solve / eval / verify commands.

mod commands;
pub mod kirchhoff;
mod numeric;

pub use commands::{
    cmd_eval, cmd_solve, cmd_verify, eval_prepared, format_sig, to_csv, verify_prepared, Check, EvalMode, EvalOptions, VerifyOptions,
    VerifyReport,
};
pub use kirchhoff::{kirchhoff_preset, load_to_forcing, KirchhoffConfig, Load, PAPER_FORCING};
pub use numeric::{displacement, quad_derivatives, quad_solution, residual, CompiledKernel};
pub use kirchhoff::PAPER_FORCING_DISPLAYED;

use crate::arith::{fmt_q, one, qi, qpow, qpow_rat, zero, Q};
use crate::boundary::{
    parse_terms,
    build_boundary_space, canonical_functionals, curbing_orders, impose_all, regularity_check, semi_regularity_check,
    BoundaryFunctional, Outcome,
};
use crate::closed::ClosedForm;
use crate::expr::parse_expr;
use crate::fuchsian::{fundamental_system, FuchsianOperator};
use crate::opring::{Functional, GreensFunction};
use crate::spaces::GeneralizedProblem;
use crate::{Error, Result};
use num_traits::Zero;
use serde_json::{json, Value};
use std::fmt;
use std::path::Path;

pub const DEFAULT_TRUNCATION: usize = 40;

/// One entry of the condition list.
#[derive(Clone, Debug, PartialEq)]
pub enum Condition {
    /// Σ c·φ = 0 with points in (0, b].
    Terms(Vec<(Q, Functional)>),
    /// u(0) = 0 in regularized form: no principal part and no constant term.
    RegularizedZeroAtOrigin,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProblemSpec {
    /// a_0, …, a_n
    pub coeffs: Vec<ClosedForm>,
    /// Regular endpoint of [0, b].
    pub b: Q,
    pub conditions: Vec<Condition>,
    pub truncation: usize,
}

/// An error annotated with the step of the pipeline that raised it.
#[derive(Debug, Clone, PartialEq)]
pub struct StepError {
    pub step: &'static str,
    pub error: Error,
}

impl fmt::Display for StepError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.step, self.error)
    }
}

impl std::error::Error for StepError {}

pub(crate) trait AtStep<T> {
    fn at(self, step: &'static str) -> std::result::Result<T, StepError>;
}

impl<T> AtStep<T> for Result<T> {
    fn at(self, step: &'static str) -> std::result::Result<T, StepError> {
        self.map_err(|error| StepError { step, error })
    }
}

fn perr(field: &str, msg: impl Into<String>) -> Error {
    Error::Parse { pos: 0, msg: format!("{field}: {}", msg.into()) }
}

fn expr_field(v: &Value, field: &str) -> Result<ClosedForm> {
    match v {
        Value::String(s) => parse_expr(s).map_err(|e| match e {
            Error::Parse { pos, msg } => Error::Parse { pos, msg: format!("{field}: {msg}") },
            e => e,
        }),
        Value::Number(n) if n.is_i64() => Ok(ClosedForm::constant(qi(n.as_i64().unwrap()))),
        Value::Number(_) => Err(perr(field, "floating-point numbers are not exact; write it as a fraction such as 1/2")),
        _ => Err(perr(field, "expected an expression string")),
    }
}

impl ProblemSpec {
    pub fn from_json(v: &Value) -> Result<Self> {
        let coeffs = v
            .pointer("/operator/coeffs")
            .and_then(Value::as_array)
            .ok_or_else(|| perr("operator.coeffs", "missing array of coefficient expressions"))?
            .iter()
            .enumerate()
            .map(|(i, c)| expr_field(c, &format!("operator.coeffs[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        let b = match v.pointer("/interval/b") {
            None => one(),
            Some(x) => crate::boundary::json_q(x, "interval.b")?,
        };
        if b <= zero() {
            return Err(perr("interval.b", "must be positive"));
        }
        let mut conditions = Vec::new();
        if let Some(cs) = v.get("conditions") {
            let cs = cs.as_array().ok_or_else(|| perr("conditions", "expected an array"))?;
            for (i, c) in cs.iter().enumerate() {
                if c.as_str() == Some("regularized_zero_at_origin") {
                    conditions.push(Condition::RegularizedZeroAtOrigin);
                    continue;
                }
                if let Some(s) = c.as_str() {
                    return Err(perr(&format!("conditions[{i}]"), format!("unknown keyword '{s}'")));
                }
                let terms = parse_terms(c).map_err(|e| match e {
                    Error::Parse { pos, msg } => Error::Parse { pos, msg: format!("conditions[{i}]: {msg}") },
                    e => e,
                })?;
                for (_, p) in &terms {
                    if let Functional::PointEval { xi, .. } = p {
                        if *xi <= zero() || *xi > b {
                            return Err(perr(&format!("conditions[{i}]"), format!("point {} outside (0, {}]", fmt_q(xi), fmt_q(&b))));
                        }
                    }
                }
                conditions.push(Condition::Terms(terms));
            }
        }
        let truncation = match v.pointer("/options/truncation") {
            None => DEFAULT_TRUNCATION,
            Some(t) => t.as_u64().filter(|&t| t >= 4).ok_or_else(|| perr("options.truncation", "expected an integer ≥ 4"))? as usize,
        };
        Ok(ProblemSpec { coeffs, b, conditions, truncation })
    }

    pub fn from_str(src: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(src).map_err(|e| Error::Parse {
            pos: e.column(),
            msg: format!("line {}, column {}: {e}", e.line(), e.column()),
        })?;
        Self::from_json(&v)
    }

    pub fn to_json(&self) -> Value {
        let conds: Vec<Value> = self
            .conditions
            .iter()
            .map(|c| match c {
                Condition::RegularizedZeroAtOrigin => json!("regularized_zero_at_origin"),
                Condition::Terms(t) => terms_json(t),
            })
            .collect();
        json!({
            "operator": {"coeffs": self.coeffs.iter().map(|c| c.display("x")).collect::<Vec<_>>()},
            "interval": {"b": fmt_q(&self.b)},
            "conditions": conds,
            "options": {"truncation": self.truncation},
        })
    }
}

/// Reads a problem file.
pub fn parse_problem(path: &Path) -> Result<ProblemSpec> {
    let src = std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    ProblemSpec::from_str(&src)
}

fn terms_json(t: &[(Q, Functional)]) -> Value {
    let items: Vec<Value> = t
        .iter()
        .map(|(c, p)| match p {
            Functional::PointEval { xi, deriv } => json!({"kind": "eval", "point": fmt_q(xi), "deriv": deriv, "coeff": fmt_q(c)}),
            Functional::Coeff { k, mu } => json!({"kind": "coeff", "k": k, "mu": fmt_q(mu), "coeff": fmt_q(c)}),
            Functional::DefInt { lo, hi } => json!({"kind": "integral", "lo": fmt_q(lo), "hi": fmt_q(hi), "coeff": fmt_q(c)}),
        })
        .collect();
    json!({ "terms": items })
}

/// Substitutes x → s·x: the problem on [0, b] becomes one on [0, b/s].
pub fn scale_domain(spec: &ProblemSpec, s: &Q) -> Result<ProblemSpec> {
    if *s <= zero() {
        return Err(Error::InvalidInput("scale factor must be positive".into()));
    }
    let coeffs = spec
        .coeffs
        .iter()
        .enumerate()
        .map(|(j, a)| Ok(a.scale_arg(s)?.scale(&qpow(s, -(j as i64)))))
        .collect::<Result<Vec<_>>>()?;
    let conditions = spec
        .conditions
        .iter()
        .map(|c| match c {
            Condition::RegularizedZeroAtOrigin => Ok(Condition::RegularizedZeroAtOrigin),
            Condition::Terms(t) => {
                let single = t.len() == 1;
                let scaled = t
                    .iter()
                    .map(|(c, p)| match p {
                        // u^(l)(ξ) = s^(−l)·v^(l)(ξ/s) with v(x) = u(s·x)
                        Functional::PointEval { xi, deriv } => {
                            Ok((c * qpow(s, -(*deriv as i64)), Functional::PointEval { xi: xi / s, deriv: *deriv }))
                        }
                        // c_e(u) = s^(−e)·c_e(v)
                        Functional::Coeff { k, mu } => {
                            let f = match qpow_rat(s, &-(qi(*k) + mu)) {
                                Some(f) => f,
                                // a lone term may be renormalized freely
                                None if single => one(),
                                None => return Err(Error::NonRationalValue(format!("{}^{}", fmt_q(s), fmt_q(&(qi(*k) + mu))))),
                            };
                            Ok((c * f, p.clone()))
                        }
                        Functional::DefInt { .. } => Err(Error::InvalidInput("integral conditions are not local".into())),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Condition::Terms(scaled))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ProblemSpec { coeffs, b: &spec.b / s, conditions, truncation: spec.truncation })
}

/// Expands `regularized_zero_at_origin` for each exponent class μ of the
/// kernel: c_k for k_μ ≤ k ≤ 0 when μ = 0 and k_μ ≤ k ≤ −1 otherwise.
pub fn regularized_zero(k_mus: &[(Q, i64)]) -> Vec<BoundaryFunctional> {
    let mut out = Vec::new();
    for (mu, km) in k_mus {
        let top = if mu.is_zero() { 0 } else { -1 };
        for k in *km..=top {
            out.push(BoundaryFunctional::coeff(k, mu.clone()));
        }
    }
    out
}

/// The problem after the four-step construction, on the unit interval.
#[derive(Clone, Debug)]
pub struct Prepared {
    /// As given, on [0, b].
    pub spec: ProblemSpec,
    /// Scaled to [0, 1].
    pub unit: ProblemSpec,
    pub conditions: Vec<BoundaryFunctional>,
    pub outcomes: Vec<Outcome>,
    pub regular: bool,
    pub problem: GeneralizedProblem,
    pub kernel: GreensFunction,
}

impl Prepared {
    pub fn b(&self) -> &Q {
        &self.spec.b
    }

    /// Forcing on [0, b] carried to the unit interval: f(b·x).
    pub fn unit_forcing(&self, f: &ClosedForm) -> Result<ClosedForm> {
        f.scale_arg(&self.spec.b)
    }

    pub fn warnings(&self) -> &[String] {
        self.problem.space.warnings()
    }
}

/// Runs the construction: scaling, fundamental system, canonical boundary
/// space, imposition of the conditions, then the projectors and G.
pub fn prepare(spec: &ProblemSpec) -> std::result::Result<Prepared, StepError> {
    let unit = scale_domain(spec, &spec.b).at("scale")?;
    let t = FuchsianOperator::new(unit.coeffs.clone()).at("operator")?;
    let fs = fundamental_system(&t, unit.truncation).at("fundamental system")?;
    let (canon, fs, _) = canonical_functionals(&fs).at("canonical functionals")?;
    let k_mus = curbing_orders(&fs);
    let mut conditions = Vec::new();
    for c in &unit.conditions {
        match c {
            Condition::RegularizedZeroAtOrigin => conditions.extend(regularized_zero(&k_mus)),
            Condition::Terms(t) => conditions.push(BoundaryFunctional::new(t.clone()).at("conditions")?),
        }
    }
    let regular = regularity_check(&conditions, &fs).at("regularity")?;
    let space = build_boundary_space(canon, k_mus);
    let (space, outcomes) = impose_all(&space, &conditions, &fs).at("impose conditions")?;
    if !semi_regularity_check(&space, &fs).at("semi-regularity")? {
        return Err(StepError {
            step: "semi-regularity",
            error: Error::NotSemiRegular("a kernel function satisfies every condition".into()),
        });
    }
    let problem = GeneralizedProblem::new(&t, &fs, &space, unit.truncation).at("projectors")?;
    let kernel = problem.green.extract_greens_function().at("green's function")?;
    Ok(Prepared { spec: spec.clone(), unit, conditions, outcomes, regular, problem, kernel })
}

/// Parses a forcing expression, or a named fixture.
pub fn parse_forcing(src: &str) -> Result<ClosedForm> {
    match src.trim() {
        "kirchhoff-paper" => parse_expr(PAPER_FORCING),
        "kirchhoff-paper-displayed" => parse_expr(kirchhoff::PAPER_FORCING_DISPLAYED),
        s => parse_expr(s),
    }
}

pub(crate) fn outcome_name(o: &Outcome) -> String {
    match o {
        Outcome::Traded(k) => format!("traded into slot {k}"),
        Outcome::Annexed => "annexed".into(),
        Outcome::RedundantCurbing => "redundant (curbing)".into(),
        Outcome::Redundant => "redundant".into(),
    }
}

#[cfg(test)]
mod tests;
