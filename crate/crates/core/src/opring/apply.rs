//! Direct evaluation of operators on closed forms and on series.

use super::{compose::functional_value, Functional, IntDiffOperator, Term};
use crate::arith::{fmt_q, one, zero, Q};
use crate::closed::ClosedForm;
use crate::series::GenLaurentElement;
use crate::{Error, Result};
use num_traits::Zero;

/// ∫_1^x h split as rational part plus residue·log x.
fn integral_with_log(h: &ClosedForm) -> Result<(ClosedForm, Q)> {
    let res = h.coeff(-1, &zero());
    if res.is_zero() {
        return Ok((h.antiderivative_rb()?, zero()));
    }
    let rest = h.sub(&ClosedForm::monomial(res.clone(), &-one()));
    Ok((rest.antiderivative_rb()?, res))
}

impl IntDiffOperator {
    /// Evaluates the operator on a closed form.
    pub fn apply_closed(&self, f: &ClosedForm) -> Result<ClosedForm> {
        let mut acc = ClosedForm::zero();
        for (j, c) in &self.diff {
            acc = acc.add(&c.mul(&f.derivative_n(*j)));
        }
        // logarithms from individual integrals must cancel across terms
        let mut log_coeff = ClosedForm::zero();
        for (l, r) in self.int.by_right() {
            let (v, res) = integral_with_log(&r.mul(f))?;
            acc = acc.add(&l.mul(&v));
            if !res.is_zero() {
                log_coeff = log_coeff.add(&l.scale(&res));
            }
        }
        if !log_coeff.is_zero() {
            return Err(Error::LogObstruction(format!("log x multiplied by {}", log_coeff.display("x"))));
        }
        for t in self.terms() {
            if let Term::Bdry { left, functional, inner } = t {
                let v = functional_value(&functional, &inner.mul(f))?;
                acc = acc.add(&left.scale(&v));
            }
        }
        Ok(acc)
    }

    /// Evaluates on a series. Exact inputs go through closed forms; truncated
    /// inputs support only terms that need finitely many known coefficients.
    pub fn apply_series(&self, f: &GenLaurentElement, upto: i64) -> Result<GenLaurentElement> {
        if let Some(cf) = ClosedForm::from_element(f) {
            return Ok(self.apply_closed(&cf)?.to_element(upto));
        }
        let ser = |c: &ClosedForm| c.to_element(upto);
        let mut acc = GenLaurentElement::zero();
        for t in self.terms() {
            match t {
                Term::Diff { coef, order } => acc = acc.add(&ser(&coef).mul(&f.derivative_n(order))),
                Term::Int { left, right } => {
                    acc = acc.add(&ser(&left).mul(&ser(&right).mul(f).integrate_rb()?));
                }
                Term::Bdry { left, functional: Functional::Coeff { k, mu }, inner } => {
                    let v = ser(&inner).mul(f).coeff(k, &mu)?;
                    acc = acc.add(&ser(&left).scale(&v));
                }
                Term::Bdry { functional, .. } => {
                    return Err(Error::TruncationExceeded(format!(
                        "{} needs the whole series",
                        match functional {
                            Functional::PointEval { xi, .. } => format!("evaluation at {}", fmt_q(&xi)),
                            _ => "a definite integral".to_string(),
                        }
                    )));
                }
            }
        }
        Ok(acc)
    }

    /// Exact value of a boundary-only operator (a functional) on f.
    pub fn functional_on(&self, f: &ClosedForm) -> Result<Q> {
        let v = self.apply_closed(f)?;
        v.as_constant().ok_or_else(|| Error::InvalidInput("operator is not a scalar functional".into()))
    }
}

/// Value of a single functional on a closed form.
pub fn apply_functional(phi: &Functional, f: &ClosedForm) -> Result<Q> {
    functional_value(phi, f)
}

