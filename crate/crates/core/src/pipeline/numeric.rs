//! Floating-point evaluation of u = G f by quadrature of the kernel.

use super::Prepared;
use crate::arith::to_f64;
use crate::closed::{ClosedForm, CompiledForm};
use crate::opring::{GreensFunction, Side};
use crate::quad::{integrate, QuadOptions};
use crate::{Error, Result};

#[derive(Clone, Debug)]
struct CompiledPiece {
    side: Side,
    lo: f64,
    hi: f64,
    /// (∂_x^j p for j = 0..=order, q)
    terms: Vec<(Vec<CompiledForm>, CompiledForm)>,
}

/// Kernel pieces compiled to floating point, with x-derivatives up to a
/// fixed order.
#[derive(Clone, Debug)]
pub struct CompiledKernel {
    pieces: Vec<CompiledPiece>,
    order: usize,
}

impl CompiledKernel {
    pub fn new(g: &GreensFunction, order: usize) -> Self {
        let pieces = g
            .pieces
            .iter()
            .map(|p| CompiledPiece {
                side: p.side,
                lo: to_f64(&p.cell.0),
                hi: to_f64(&p.cell.1),
                terms: p
                    .terms
                    .iter()
                    .map(|t| ((0..=order).map(|j| t.p.derivative_n(j).compile()).collect(), t.q.compile()))
                    .collect(),
            })
            .collect();
        CompiledKernel { pieces, order }
    }

    /// ∫_0^1 ∂_x^j g(x, ξ) f(ξ) dξ, one quadrature per piece and side.
    pub fn apply<F: Fn(f64) -> f64>(&self, j: usize, x: f64, f: &F, opts: QuadOptions) -> Result<f64> {
        assert!(j <= self.order, "derivative order {j} not compiled");
        let mut total = 0.0;
        for piece in &self.pieces {
            let (lo, hi) = match piece.side {
                Side::Below => (piece.lo, piece.hi.min(x)),
                Side::Above => (piece.lo.max(x), piece.hi),
            };
            if lo >= hi {
                continue;
            }
            let ps: Vec<f64> = piece.terms.iter().map(|(p, _)| p[j].eval(x)).collect();
            let integrand = |xi: f64| {
                let k: f64 = piece.terms.iter().zip(&ps).map(|((_, q), pv)| pv * q.eval(xi)).sum();
                k * f(xi)
            };
            total += integrate(&integrand, lo, hi, &graded(lo, hi), opts, x)?;
        }
        Ok(total)
    }
}

/// Breakpoints lo·4^k (or hi·4^−k when lo = 0) that resolve integrable
/// singularities at the left end, where the kernel and forcing may blow up.
fn graded(lo: f64, hi: f64) -> Vec<f64> {
    let mut pts = Vec::new();
    if lo > 0.0 {
        let mut p = lo * 4.0;
        while p < hi {
            pts.push(p);
            p *= 4.0;
        }
    } else {
        let mut p = hi / 4.0;
        for _ in 0..24 {
            pts.push(p);
            p /= 4.0;
        }
    }
    pts
}

/// Derivatives u, u′, …, u^(n) of u = G f at a point y of (0, b], with f
/// given on the original interval. The top derivative includes the jump of
/// ∂_x^(n−1) g across ξ = x.
pub fn quad_derivatives(prep: &Prepared, kernel: &CompiledKernel, f: &ClosedForm, y: f64, opts: QuadOptions) -> Result<Vec<f64>> {
    let b = to_f64(prep.b());
    let n = prep.problem.t.order();
    let fu = prep.unit_forcing(f)?.compile();
    let x = y / b;
    let mut out = Vec::with_capacity(kernel.order + 1);
    for j in 0..=kernel.order {
        let mut v = kernel.apply(j, x, &|xi| fu.eval(xi), opts)?;
        if j == n {
            let cells = prep.kernel.cells();
            let cell = cells
                .iter()
                .find(|(a, c)| to_f64(a) <= x && x <= to_f64(c))
                .ok_or_else(|| Error::InvalidInput(format!("point {y} outside the interval")))?;
            v += prep.kernel.jump(n - 1, cell).eval_f64(x) * fu.eval(x);
        }
        out.push(v * b.powi(-(j as i32)));
    }
    Ok(out)
}

/// u(y) = (G f)(y) by quadrature.
pub fn quad_solution(prep: &Prepared, kernel: &CompiledKernel, f: &ClosedForm, y: f64, opts: QuadOptions) -> Result<f64> {
    let fu = prep.unit_forcing(f)?.compile();
    let b = to_f64(prep.b());
    kernel.apply(0, y / b, &|xi| fu.eval(xi), opts)
}

/// (T u)(y) − target(y) on the original interval, where target is Q f
/// when the projector is not the identity and f otherwise.
pub fn residual(prep: &Prepared, kernel: &CompiledKernel, f: &ClosedForm, y: f64, opts: QuadOptions) -> Result<f64> {
    if kernel.order < prep.problem.t.order() {
        return Err(Error::InvalidInput(format!("the residual needs kernel derivatives up to order {}", prep.problem.t.order())));
    }
    let d = quad_derivatives(prep, kernel, f, y, opts)?;
    let lhs: f64 = prep.spec.coeffs.iter().zip(&d).map(|(a, v)| a.eval_f64(y) * v).sum();
    let target = if prep.problem.q_analytic.is_identity() {
        f.eval_f64(y)
    } else {
        prep.unit_forcing(f).and_then(|fu| prep.problem.q_analytic.apply_closed(&fu))?.eval_f64(y / to_f64(prep.b()))
    };
    Ok(lhs - target)
}

/// w(ρ) = −∫_{ρ0}^ρ u, given u as a function.
pub fn displacement<F: Fn(f64) -> f64>(u: &F, rho0: f64, rho: f64, opts: QuadOptions) -> Result<f64> {
    if rho >= rho0 {
        Ok(-integrate(u, rho0, rho, &graded(rho0, rho), opts, rho)?)
    } else {
        Ok(integrate(u, rho, rho0, &graded(rho, rho0), opts, rho)?)
    }
}
