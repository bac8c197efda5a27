//! Rewriting products of operators into normal form.

use super::{Functional, IntDiffOperator, Mode, Term};
use crate::arith::{binom, falling_factorial, one, qi, split_exponent, zero, Q};
use crate::closed::ClosedForm;
use crate::{Error, Result};
use num_traits::Zero;

pub(super) fn compose(a: &IntDiffOperator, b: &IntDiffOperator, mode: Mode) -> Result<IntDiffOperator> {
    let mut out = IntDiffOperator::zero();
    for t in a.terms() {
        let part = match t {
            Term::Diff { coef, order } => {
                let mut d = b.clone();
                for _ in 0..order {
                    d = d_then(&d, mode);
                }
                left_mul(&coef, &d, mode)
            }
            Term::Int { left, right } => left_mul(&left, &a_then(&left_mul(&right, b, mode), mode)?, mode),
            Term::Bdry { left, functional, inner } => {
                left_mul(&left, &phi_then(&functional, &left_mul(&inner, b, mode), mode)?, mode)
            }
        };
        out.absorb(&part, mode, &one());
    }
    Ok(out)
}

/// c·op
pub(super) fn left_mul(c: &ClosedForm, op: &IntDiffOperator, mode: Mode) -> IntDiffOperator {
    if c.is_one() {
        return op.clone();
    }
    let mut out = IntDiffOperator::zero();
    for t in op.terms() {
        match t {
            Term::Diff { coef, order } => out.push_diff(&c.mul(&coef), order),
            Term::Int { left, right } => out.push_int(&c.mul(&left), &right),
            Term::Bdry { left, functional, inner } => out.push_bdry(mode, &c.mul(&left), &functional, &inner),
        }
    }
    out
}

/// D∘op
fn d_then(op: &IntDiffOperator, mode: Mode) -> IntDiffOperator {
    let mut out = IntDiffOperator::zero();
    for t in op.terms() {
        match t {
            Term::Diff { coef, order } => {
                out.push_diff(&coef.derivative(), order);
                out.push_diff(&coef, order + 1);
            }
            Term::Int { left, right } => {
                out.push_int(&left.derivative(), &right);
                out.push_diff(&left.mul(&right), 0);
            }
            Term::Bdry { left, functional, inner } => out.push_bdry(mode, &left.derivative(), &functional, &inner),
        }
    }
    out
}

/// A∘op
fn a_then(op: &IntDiffOperator, mode: Mode) -> Result<IntDiffOperator> {
    let mut out = IntDiffOperator::zero();
    for t in op.terms() {
        match t {
            Term::Diff { coef, order } => out.absorb(&a_diff(&coef, order, mode)?, mode, &one()),
            Term::Int { left, right } => {
                // A·l·A·r = V·A·r - A·(V r),  V = A l
                let v = left.antiderivative_rb()?;
                out.push_int(&v, &right);
                out.push_int(&ClosedForm::one(), &v.mul(&right).neg());
            }
            Term::Bdry { left, functional, inner } => {
                out.push_bdry(mode, &left.antiderivative_rb()?, &functional, &inner)
            }
        }
    }
    Ok(out)
}

/// A∘c∘D^i by repeated integration by parts.
fn a_diff(c: &ClosedForm, i: usize, mode: Mode) -> Result<IntDiffOperator> {
    if i == 0 {
        return Ok(IntDiffOperator::integral(ClosedForm::one(), c.clone()));
    }
    let mut out = IntDiffOperator::diff(c.clone(), i - 1);
    let lower = IntDiffOperator::diff(c.clone(), i - 1);
    let at_one = phi_then(&Functional::PointEval { xi: one(), deriv: 0 }, &lower, mode)?;
    out.absorb(&at_one, mode, &-one());
    out.absorb(&a_diff(&c.derivative(), i - 1, mode)?, mode, &-one());
    Ok(out)
}

/// φ∘op, a sum of boundary terms with constant left factors.
fn phi_then(phi: &Functional, op: &IntDiffOperator, mode: Mode) -> Result<IntDiffOperator> {
    let mut out = IntDiffOperator::zero();
    for t in op.terms() {
        match (phi, t) {
            (_, Term::Bdry { left, functional, inner }) => {
                let s = scalar(phi, &left)?;
                out.push_bdry(mode, &ClosedForm::constant(s), &functional, &inner);
            }
            (Functional::PointEval { xi, deriv }, Term::Diff { coef, order }) => {
                for l in 0..=*deriv {
                    let s = binom(*deriv, l) * coef.derivative_n(deriv - l).eval(xi)?;
                    out.push_eval(xi, l + order, &ClosedForm::constant(s));
                }
            }
            (Functional::PointEval { xi, deriv }, Term::Int { left, right }) => {
                for m in 0..=*deriv {
                    let s = binom(*deriv, m) * left.derivative_n(deriv - m).eval(xi)?;
                    if s.is_zero() {
                        continue;
                    }
                    out.absorb(&eval_of_integral(xi, m, &right, mode)?, mode, &s);
                }
            }
            (Functional::Coeff { k, mu }, Term::Diff { coef, order }) => {
                for l in 0..=order {
                    let sign = if (order - l) % 2 == 0 { one() } else { -one() };
                    let s = sign * binom(order, l) * falling_factorial(&(qi(k + l as i64) + mu), l);
                    if s.is_zero() {
                        continue;
                    }
                    out.push_coeff(mode, k + l as i64, mu, &ClosedForm::constant(s), &coef.derivative_n(order - l));
                }
            }
            (Functional::Coeff { k, mu }, Term::Int { left, right }) => {
                let e0 = qi(*k) + mu;
                for (c, e) in coeff_terms_of_left(&left, &e0, &right, mode)? {
                    coeff_of_integral(&mut out, &(&e0 - &e), &c, &right, mode);
                }
            }
            (Functional::DefInt { lo, hi }, Term::Diff { coef, order }) => {
                if order == 0 {
                    out.push_defint(lo, hi, &ClosedForm::one(), &coef);
                    continue;
                }
                let lower = IntDiffOperator::diff(coef.clone(), order - 1);
                out.absorb(&phi_then(&Functional::PointEval { xi: hi.clone(), deriv: 0 }, &lower, mode)?, mode, &one());
                let bottom = if lo.is_zero() {
                    Functional::Coeff { k: 0, mu: zero() }
                } else {
                    Functional::PointEval { xi: lo.clone(), deriv: 0 }
                };
                out.absorb(&phi_then(&bottom, &lower, mode)?, mode, &-one());
                let rest = IntDiffOperator::diff(coef.derivative(), order - 1);
                out.absorb(&phi_then(phi, &rest, mode)?, mode, &-one());
            }
            (Functional::DefInt { lo, hi }, Term::Int { left, right }) => {
                // F(l·A r) = [V·A r]_lo^hi - F(V r),  V = A l
                let v = left.antiderivative_rb()?;
                let at_hi = v.eval(hi)?;
                if !at_hi.is_zero() {
                    out.absorb(&eval_of_integral(hi, 0, &right, mode)?, mode, &at_hi);
                }
                if lo.is_zero() {
                    let inner = IntDiffOperator::integral(v.clone(), right.clone());
                    out.absorb(&phi_then(&Functional::Coeff { k: 0, mu: zero() }, &inner, mode)?, mode, &-one());
                } else {
                    let at_lo = v.eval(lo)?;
                    if !at_lo.is_zero() {
                        out.absorb(&eval_of_integral(lo, 0, &right, mode)?, mode, &-at_lo);
                    }
                }
                out.push_defint(lo, hi, &ClosedForm::constant(-one()), &v.mul(&right));
            }
        }
    }
    Ok(out)
}

/// e_ξ D^m ∘ A ∘ r
fn eval_of_integral(xi: &Q, m: usize, r: &ClosedForm, mode: Mode) -> Result<IntDiffOperator> {
    let mut out = IntDiffOperator::zero();
    if m == 0 {
        out.push_defint(xi, &one(), &ClosedForm::constant(-one()), r);
        return Ok(out);
    }
    let _ = mode;
    for s in 0..m {
        let c = binom(m - 1, s) * r.derivative_n(m - 1 - s).eval(xi)?;
        out.push_eval(xi, s, &ClosedForm::constant(c));
    }
    Ok(out)
}

/// c_t∘A∘r scaled by c: (c/t)·c_{t-1}∘r, or -c·F∘r at t = 0.
fn coeff_of_integral(out: &mut IntDiffOperator, t: &Q, c: &Q, r: &ClosedForm, mode: Mode) {
    if t.is_zero() {
        out.push_defint(&zero(), &one(), &ClosedForm::constant(-c.clone()), r);
    } else {
        let (k, mu) = split_exponent(&(t - one()));
        out.push_coeff(mode, k, &mu, &ClosedForm::constant(c / t), r);
    }
}

/// The terms (coefficient, exponent) of the left factor that can meet the
/// functional c_{e0} after multiplication with A(r·f).
fn coeff_terms_of_left(left: &ClosedForm, e0: &Q, r: &ClosedForm, mode: Mode) -> Result<Vec<(Q, Q)>> {
    if let Some(t) = left.laurent_terms() {
        return Ok(t);
    }
    if !mode.analytic {
        return Err(Error::NotFinitary(format!(
            "coefficient functional after a non-Laurent factor {}",
            left.display("x")
        )));
    }
    // lowest exponent A(r·f) can carry for analytic f
    let mut low = zero();
    for (mu, rf) in r.parts() {
        if let Some(o) = rf.order() {
            let e = qi(o + 1) + mu;
            if e < low {
                low = e;
            }
        }
    }
    let emax = e0 - &low;
    let mut out = Vec::new();
    for (mu, rf) in left.parts() {
        let top = (&emax - mu).floor().to_integer();
        let top: i64 = top.try_into().unwrap_or(i64::MAX);
        let (ord, cs) = rf.expand(top);
        for (i, c) in cs.into_iter().enumerate() {
            if !c.is_zero() {
                out.push((c, qi(ord + i as i64) + mu));
            }
        }
    }
    Ok(out)
}

/// φ applied to a closed form.
fn scalar(phi: &Functional, f: &ClosedForm) -> Result<Q> {
    match phi {
        Functional::PointEval { xi, deriv } => f.derivative_n(*deriv).eval(xi),
        Functional::Coeff { k, mu } => Ok(f.coeff(*k, mu)),
        Functional::DefInt { lo, hi } => f.definite(lo, hi),
    }
}

pub(super) fn functional_value(phi: &Functional, f: &ClosedForm) -> Result<Q> {
    scalar(phi, f)
}
