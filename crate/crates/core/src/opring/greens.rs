//! Reading off the kernel g(x, ξ) of a purely integral operator.

use super::{IntDiffOperator, Tensor};
use crate::arith::{fmt_q, one, qi, zero, Q};
use crate::closed::ClosedForm;
use crate::{Error, Result};
use num_traits::Zero;
use serde_json::{json, Value};

/// Position of ξ relative to x.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Side {
    /// ξ ≤ x
    Below,
    /// ξ > x
    Above,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KernelTerm {
    pub p: ClosedForm,
    pub q: ClosedForm,
}

/// g(x, ξ) = Σ p(x)·q(ξ) for ξ in `cell` on the given side of x.
#[derive(Clone, Debug, PartialEq)]
pub struct Piece {
    pub side: Side,
    pub cell: (Q, Q),
    pub terms: Vec<KernelTerm>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GreensFunction {
    pub breakpoints: Vec<Q>,
    pub pieces: Vec<Piece>,
}

impl IntDiffOperator {
    /// Kernel of an operator that has no differential, evaluation or
    /// coefficient-functional part.
    pub fn extract_greens_function(&self) -> Result<GreensFunction> {
        if let Some((j, _)) = self.diff.iter().next() {
            return Err(Error::DistributionalKernel(format!("term with D^{j}")));
        }
        if let Some(((xi, j), _)) = self.evals.iter().next() {
            return Err(Error::DistributionalKernel(format!("evaluation e_{} D^{j}", fmt_q(xi))));
        }
        if let Some(((k, mu), _)) = self.coeffs.iter().next() {
            return Err(Error::DistributionalKernel(format!("coefficient functional c_{}", fmt_q(&(qi(*k) + mu)))));
        }
        let mut bps: Vec<Q> = self
            .defints
            .keys()
            .flat_map(|(a, b)| [a.clone(), b.clone()])
            .filter(|v| !v.is_zero() && *v != one())
            .collect();
        bps.sort();
        bps.dedup();
        let mut edges = vec![zero()];
        edges.extend(bps.iter().cloned());
        edges.push(one());
        let cells: Vec<(Q, Q)> = edges.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect();
        let mut pieces = Vec::new();
        for cell in &cells {
            for side in [Side::Below, Side::Above] {
                let mut t = Tensor::zero();
                if side == Side::Above {
                    t = t.add(&self.int.scale(&-one()));
                }
                for ((lo, hi), dt) in &self.defints {
                    if *lo <= cell.0 && cell.1 <= *hi {
                        t = t.add(dt);
                    }
                }
                if t.is_zero() {
                    continue;
                }
                let terms: Vec<KernelTerm> = t.terms().into_iter().map(|(p, q)| KernelTerm { p, q }).collect();
                if cell.0.is_zero() && side == Side::Below {
                    for kt in &terms {
                        if kt.q.order().map_or(false, |o| o <= -one()) {
                            return Err(Error::DistributionalKernel(format!(
                                "weight {} is not integrable at 0",
                                kt.q.display("xi")
                            )));
                        }
                    }
                }
                pieces.push(Piece { side, cell: cell.clone(), terms });
            }
        }
        Ok(GreensFunction { breakpoints: bps, pieces })
    }
}

impl GreensFunction {
    fn cell_pieces(&self, xi: f64) -> impl Iterator<Item = &Piece> {
        self.pieces.iter().filter(move |p| {
            let a = crate::arith::to_f64(&p.cell.0);
            let b = crate::arith::to_f64(&p.cell.1);
            (xi > a || (a == 0.0 && xi >= 0.0)) && xi <= b
        })
    }

    /// g(x, ξ) in floating point.
    pub fn eval(&self, x: f64, xi: f64) -> f64 {
        self.eval_dx(0, x, xi)
    }

    /// ∂_x^j g(x, ξ) in floating point, using cached derivatives when given.
    pub fn eval_dx(&self, j: usize, x: f64, xi: f64) -> f64 {
        let side = if xi <= x { Side::Below } else { Side::Above };
        self.cell_pieces(xi)
            .filter(|p| p.side == side)
            .flat_map(|p| p.terms.iter())
            .map(|t| t.p.derivative_n(j).eval_f64(x) * t.q.eval_f64(xi))
            .sum()
    }

    /// Pieces differentiated j times in x, for repeated numeric evaluation.
    pub fn differentiated(&self, j: usize) -> GreensFunction {
        GreensFunction {
            breakpoints: self.breakpoints.clone(),
            pieces: self
                .pieces
                .iter()
                .map(|p| Piece {
                    side: p.side,
                    cell: p.cell.clone(),
                    terms: p.terms.iter().map(|t| KernelTerm { p: t.p.derivative_n(j), q: t.q.clone() }).collect(),
                })
                .collect(),
        }
    }

    /// Jump (ξ→x from below minus from above) of ∂_x^m g across ξ = x, for x in `cell`.
    pub fn jump(&self, m: usize, cell: &(Q, Q)) -> ClosedForm {
        let mut acc = ClosedForm::zero();
        for p in self.pieces.iter().filter(|p| &p.cell == cell) {
            for t in &p.terms {
                let v = t.p.derivative_n(m).mul(&t.q);
                acc = if p.side == Side::Below { acc.add(&v) } else { acc.sub(&v) };
            }
        }
        acc
    }

    pub fn cells(&self) -> Vec<(Q, Q)> {
        let mut edges = vec![zero()];
        edges.extend(self.breakpoints.iter().cloned());
        edges.push(one());
        edges.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect()
    }

    /// Exact ∫_0^1 g(x0, ξ) f(ξ) dξ at a rational point.
    pub fn integrate_at(&self, f: &ClosedForm, x0: &Q) -> Result<Q> {
        let mut acc = zero();
        for p in &self.pieces {
            let (a, b) = &p.cell;
            let (lo, hi) = match p.side {
                Side::Below => (a.clone(), b.min(x0).clone()),
                Side::Above => (a.max(x0).clone(), b.clone()),
            };
            if lo >= hi {
                continue;
            }
            for t in &p.terms {
                let h = t.q.mul(f);
                if lo.is_zero() && h.order().map_or(false, |o| o <= -one()) {
                    return Err(Error::InvalidInput(format!(
                        "{} is not integrable at 0",
                        h.display("xi")
                    )));
                }
                acc += t.p.eval(x0)? * h.definite(&lo, &hi)?;
            }
        }
        Ok(acc)
    }

    /// ∫_0^1 g(x, ξ) f(ξ) dξ as a closed form in x (no breakpoints).
    pub fn integrate_closed(&self, f: &ClosedForm) -> Result<ClosedForm> {
        if !self.breakpoints.is_empty() {
            return Err(Error::InvalidInput("kernel has breakpoints; integrate pointwise".into()));
        }
        let mut acc = ClosedForm::zero();
        let mut logs = ClosedForm::zero();
        for p in &self.pieces {
            for t in &p.terms {
                let h = t.q.mul(f);
                let res = h.coeff(-1, &zero());
                let rest = h.sub(&ClosedForm::monomial(res.clone(), &-one()));
                let v = rest.antiderivative_rb()?;
                match p.side {
                    Side::Below => {
                        if h.order().map_or(false, |o| o <= -one()) {
                            return Err(Error::InvalidInput(format!(
                                "{} is not integrable at 0",
                                h.display("xi")
                            )));
                        }
                        let v0 = v.coeff(0, &zero());
                        acc = acc.add(&t.p.mul(&v.sub(&ClosedForm::constant(v0))));
                    }
                    Side::Above => {
                        acc = acc.sub(&t.p.mul(&v));
                        logs = logs.sub(&t.p.scale(&res));
                    }
                }
            }
        }
        if !logs.is_zero() {
            return Err(Error::LogObstruction(format!("log x multiplied by {}", logs.display("x"))));
        }
        Ok(acc)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "breakpoints": self.breakpoints.iter().map(fmt_q).collect::<Vec<_>>(),
            "pieces": self.pieces.iter().map(|p| {
                let mut region = match p.side { Side::Below => "xi<=x".to_string(), Side::Above => "xi>x".to_string() };
                if !self.breakpoints.is_empty() {
                    region = format!("{region}; {}<=xi<={}", fmt_q(&p.cell.0), fmt_q(&p.cell.1));
                }
                json!({
                    "region": region,
                    "terms": p.terms.iter().map(|t| json!({"p": t.p.display("x"), "q": t.q.display("xi")})).collect::<Vec<_>>(),
                })
            }).collect::<Vec<_>>(),
        })
    }
}
