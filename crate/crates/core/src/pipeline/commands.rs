//! The solve, eval and verify commands.

use super::numeric::{quad_derivatives, quad_solution, residual, CompiledKernel};
use super::{outcome_name, prepare, AtStep, Prepared, ProblemSpec, StepError};
use crate::arith::{fmt_q, qi, to_f64, Q};
use crate::closed::ClosedForm;
use crate::opring::Functional;
use crate::quad::QuadOptions;
use crate::Error;
use serde_json::{json, Value};

type StepResult<T> = std::result::Result<T, StepError>;

/// Green's operator, kernel and construction report.
pub fn cmd_solve(spec: &ProblemSpec) -> StepResult<Value> {
    let prep = prepare(spec)?;
    Ok(solve_json(&prep))
}

pub(crate) fn solve_json(prep: &Prepared) -> Value {
    let mut report = prep.problem.report();
    report["interval"] = json!({"b": fmt_q(prep.b()), "kernel_coordinates": "x/b"});
    report["conditions"] = json!(prep.conditions.iter().map(|c| c.to_string()).collect::<Vec<_>>());
    report["outcomes"] = json!(prep.outcomes.iter().map(outcome_name).collect::<Vec<_>>());
    report["regular"] = json!(prep.regular);
    report["warnings"] = json!(prep.warnings());
    report["projector_q_analytic"] = json!(prep.problem.q_analytic.to_string());
    json!({
        "greens_operator": prep.problem.green.to_string(),
        "greens_function": prep.kernel.to_json(),
        "report": report,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalMode {
    Exact,
    Quadrature,
}

#[derive(Clone, Copy, Debug)]
pub struct EvalOptions {
    pub grid: usize,
    pub mode: EvalMode,
    pub quad: QuadOptions,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { grid: 10, mode: EvalMode::Quadrature, quad: QuadOptions::default() }
    }
}

/// Samples u = G f at y = i·b/N for i = 1..N.
pub fn cmd_eval(spec: &ProblemSpec, forcing: &ClosedForm, opts: EvalOptions) -> StepResult<Vec<(f64, f64)>> {
    let prep = prepare(spec)?;
    eval_prepared(&prep, forcing, opts)
}

pub fn eval_prepared(prep: &Prepared, forcing: &ClosedForm, opts: EvalOptions) -> StepResult<Vec<(f64, f64)>> {
    if opts.grid == 0 {
        return Err(StepError { step: "eval", error: Error::InvalidInput("grid must be positive".into()) });
    }
    let n = opts.grid as i64;
    let b = prep.b().clone();
    match opts.mode {
        EvalMode::Exact => {
            let fu = prep.unit_forcing(forcing).at("forcing")?;
            (1..=n)
                .map(|i| {
                    let x = Q::new(qi(i).numer().clone(), qi(n).numer().clone());
                    let u = prep.kernel.integrate_at(&fu, &x).at("exact integration")?;
                    Ok((to_f64(&(&x * &b)), to_f64(&u)))
                })
                .collect()
        }
        EvalMode::Quadrature => {
            let k = CompiledKernel::new(&prep.kernel, 0);
            let bf = to_f64(&b);
            (1..=n)
                .map(|i| {
                    let y = bf * i as f64 / n as f64;
                    Ok((y, quad_solution(prep, &k, forcing, y, opts.quad).at("quadrature")?))
                })
                .collect()
        }
    }
}

/// Decimal rendering with 15 significant digits.
pub fn format_sig(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { "0".into() } else { v.to_string() };
    }
    let mag = v.abs().log10().floor() as i32;
    if (-6..15).contains(&mag) {
        let decimals = (14 - mag).max(0) as usize;
        let s = format!("{v:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{v:.14e}")
    }
}

pub fn to_csv(rows: &[(f64, f64)]) -> String {
    let mut s = String::from("x,u\n");
    for (x, u) in rows {
        s.push_str(&format!("{},{}\n", format_sig(*x), format_sig(*u)));
    }
    s
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub exact: bool,
    pub checks: Vec<Check>,
    pub max_residual: Option<f64>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "mode": if self.exact { "exact" } else { "numeric" },
            "passed": self.passed(),
            "max_residual": self.max_residual,
            "checks": self.checks.iter().map(|c| json!({"name": c.name, "passed": c.passed, "detail": c.detail})).collect::<Vec<_>>(),
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    /// Skip the exact path even for analytic forcings.
    pub force_numeric: bool,
    pub tol: f64,
    pub samples: usize,
    pub quad: QuadOptions,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { force_numeric: false, tol: 1e-6, samples: 21, quad: QuadOptions::default() }
    }
}

/// Checks T(G f) = Q f and the boundary conditions on G f.
pub fn cmd_verify(spec: &ProblemSpec, forcing: &ClosedForm) -> StepResult<VerifyReport> {
    let prep = prepare(spec)?;
    verify_prepared(&prep, forcing, VerifyOptions::default())
}

pub fn verify_prepared(prep: &Prepared, forcing: &ClosedForm, opts: VerifyOptions) -> StepResult<VerifyReport> {
    let fu = prep.unit_forcing(forcing).at("forcing")?;
    let analytic = is_analytic(&fu);
    // forcings whose solution leaves the closed forms are checked numerically
    let exact = if analytic && !opts.force_numeric {
        match verify_exact(prep, &fu) {
            Err(Error::LogObstruction(_) | Error::NoClosedAntiderivative(_)) => None,
            r => Some(r.at("verify")?),
        }
    } else {
        None
    };
    let report = match exact {
        Some(r) => r,
        None => verify_numeric(prep, forcing, opts).at("verify")?,
    };
    match report.checks.iter().find(|c| !c.passed) {
        Some(c) => Err(StepError { step: "verify", error: Error::VerificationFailed(format!("{}: {}", c.name, c.detail)) }),
        None => Ok(report),
    }
}

/// Analytic on [0, 1]: integer exponents only, no principal part and no
/// pole in the closed interval.
fn is_analytic(f: &ClosedForm) -> bool {
    f.mus().iter().all(|m| m == &qi(0))
        && f.order().map_or(true, |o| o >= qi(0))
        && !f.has_pole_in_unit_interval()
        && f.eval(&qi(0)).is_ok()
}

fn verify_exact(prep: &Prepared, fu: &ClosedForm) -> crate::Result<VerifyReport> {
    let g = &prep.problem;
    let u = g.solve_closed(fu)?;
    let tu = g.t.apply_closed(&u);
    let qf = g.q_analytic.apply_closed(fu)?;
    let mut checks = vec![Check {
        name: "T(Gf) = Qf".into(),
        passed: tu == qf,
        detail: format!("T(Gf) - Qf = {}", tu.sub(&qf).display("x")),
    }];
    for beta in g.space.finite_part() {
        let v = beta.apply_closed(&u)?;
        checks.push(Check { name: format!("{beta} (Gf) = 0"), passed: v == qi(0), detail: format!("value {}", fmt_q(&v)) });
    }
    for (mu, km) in g.space.curbing() {
        let ok = u.order_in(mu).map_or(true, |o| o >= *km);
        checks.push(Check {
            name: format!("order of Gf in class {} at least {km}", fmt_q(mu)),
            passed: ok,
            detail: format!("order {:?}", u.order_in(mu)),
        });
    }
    Ok(VerifyReport { exact: true, checks, max_residual: Some(0.0) })
}

fn verify_numeric(prep: &Prepared, forcing: &ClosedForm, opts: VerifyOptions) -> crate::Result<VerifyReport> {
    let n = prep.problem.t.order();
    let kernel = CompiledKernel::new(&prep.kernel, n);
    let b = to_f64(prep.b());
    let mut worst: f64 = 0.0;
    let mut at = 0.0;
    for i in 1..=opts.samples {
        let y = b * i as f64 / (opts.samples + 1) as f64;
        let r = residual(prep, &kernel, forcing, y, opts.quad)?.abs();
        if r > worst || r.is_nan() {
            worst = r;
            at = y;
        }
    }
    let mut checks = vec![Check {
        name: "T(Gf) = Qf".into(),
        passed: worst < opts.tol,
        detail: format!("max residual {worst:.3e} at {at:.6}"),
    }];
    // point conditions in original coordinates; coefficient functionals
    // are not observable from samples
    for c in &prep.spec.conditions {
        let super::Condition::Terms(terms) = c else { continue };
        if terms.iter().any(|(_, p)| !matches!(p, Functional::PointEval { .. })) {
            continue;
        }
        let mut v = 0.0;
        for (coef, p) in terms {
            if let Functional::PointEval { xi, deriv } = p {
                let d = quad_derivatives(prep, &kernel, forcing, to_f64(xi), opts.quad)?;
                v += to_f64(coef) * d[*deriv];
            }
        }
        let name = terms
            .iter()
            .map(|(c, p)| {
                let f = crate::opring::print::functional_name(p);
                if c == &qi(1) {
                    f
                } else {
                    format!("{}*{f}", fmt_q(c))
                }
            })
            .collect::<Vec<_>>()
            .join(" + ");
        checks.push(Check { name: format!("{name} = 0"), passed: v.abs() < opts.tol, detail: format!("value {v:.3e}") });
    }
    Ok(VerifyReport { exact: false, checks, max_residual: Some(worst) })
}
