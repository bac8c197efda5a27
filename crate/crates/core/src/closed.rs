//! Closed forms Σ_μ x^μ·r_μ(x) with rational functions r_μ and μ in [0,1).
//!
//! This is the exact function type for operator coefficients, fundamental
//! solutions and kernel factors. Laurent polynomials embed as the case where
//! every denominator is a power of x.

use crate::arith::{fmt_q, one, qi, qpow_rat, split_exponent, to_f64, zero, Q};
use crate::poly::Poly;
use crate::ratfunc::RationalFunction;
use crate::series::{GenLaurentElement, GenLaurentSeries, Radius};
use crate::{Error, Result};
use num_traits::{One, Zero};
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ClosedForm {
    parts: BTreeMap<Q, RationalFunction>,
}

impl ClosedForm {
    pub fn zero() -> Self {
        ClosedForm::default()
    }

    pub fn one() -> Self {
        ClosedForm::constant(one())
    }

    pub fn constant(a: Q) -> Self {
        ClosedForm::from_rf(RationalFunction::constant(a))
    }

    pub fn from_rf(r: RationalFunction) -> Self {
        ClosedForm::from_part(zero(), r)
    }

    pub fn from_poly(p: Poly) -> Self {
        ClosedForm::from_rf(RationalFunction::from_poly(p))
    }

    /// x^μ·r for μ in [0,1).
    pub fn from_part(mu: Q, r: RationalFunction) -> Self {
        let mut c = ClosedForm::zero();
        c.add_part(mu, r);
        c
    }

    /// c·x^e for any rational exponent.
    pub fn monomial(c: Q, e: &Q) -> Self {
        let (k, mu) = split_exponent(e);
        ClosedForm::from_part(mu, RationalFunction::monomial(c, k))
    }

    pub fn x() -> Self {
        ClosedForm::monomial(one(), &one())
    }

    fn add_part(&mut self, mu: Q, r: RationalFunction) {
        let v = match self.parts.get(&mu) {
            Some(old) => old + &r,
            None => r,
        };
        if v.is_zero() {
            self.parts.remove(&mu);
        } else {
            self.parts.insert(mu, v);
        }
    }

    pub fn parts(&self) -> impl Iterator<Item = (&Q, &RationalFunction)> {
        self.parts.iter()
    }

    pub fn part(&self, mu: &Q) -> RationalFunction {
        self.parts.get(mu).cloned().unwrap_or_else(RationalFunction::zero)
    }

    pub fn mus(&self) -> Vec<Q> {
        self.parts.keys().cloned().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.parts.len() == 1 && self.parts.get(&zero()).map_or(false, |r| r.is_one())
    }

    pub fn as_constant(&self) -> Option<Q> {
        if self.is_zero() {
            return Some(zero());
        }
        if self.parts.len() == 1 {
            return self.parts.get(&zero())?.as_constant();
        }
        None
    }

    pub fn is_laurent(&self) -> bool {
        self.parts.values().all(|r| r.is_laurent())
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (mu, r) in &o.parts {
            out.add_part(mu.clone(), r.clone());
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-one())
    }

    pub fn scale(&self, a: &Q) -> Self {
        if a.is_zero() {
            return ClosedForm::zero();
        }
        ClosedForm { parts: self.parts.iter().map(|(m, r)| (m.clone(), r.scale(a))).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = ClosedForm::zero();
        for (m1, r1) in &self.parts {
            for (m2, r2) in &o.parts {
                let mut mu = m1 + m2;
                let mut r = r1 * r2;
                if mu >= one() {
                    mu -= one();
                    r = r.shift(1);
                }
                out.add_part(mu, r);
            }
        }
        out
    }

    /// Multiplies by x^k.
    pub fn shift(&self, k: i64) -> Self {
        ClosedForm { parts: self.parts.iter().map(|(m, r)| (m.clone(), r.shift(k))).collect() }
    }

    /// Reciprocal of a closed form with a single fractional part.
    pub fn inv(&self) -> Result<Self> {
        if self.parts.len() != 1 {
            return Err(Error::InvalidInput("reciprocal of a sum of fractional parts".into()));
        }
        let (mu, r) = self.parts.iter().next().unwrap();
        let ri = r.recip()?;
        if mu.is_zero() {
            Ok(ClosedForm::from_rf(ri))
        } else {
            Ok(ClosedForm::from_part(one() - mu, ri.shift(-1)))
        }
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut acc = ClosedForm::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        let mut out = ClosedForm::zero();
        for (mu, r) in &self.parts {
            let mut d = r.derivative();
            if !mu.is_zero() {
                d = &d + &r.scale(mu).shift(-1);
            }
            out.add_part(mu.clone(), d);
        }
        out
    }

    pub fn derivative_n(&self, n: usize) -> Self {
        let mut u = self.clone();
        for _ in 0..n {
            u = u.derivative();
        }
        u
    }

    pub fn eval(&self, x: &Q) -> Result<Q> {
        let mut v = zero();
        for (mu, r) in &self.parts {
            let p = qpow_rat(x, mu)
                .ok_or_else(|| Error::NonRationalValue(format!("{}^{}", fmt_q(x), fmt_q(mu))))?;
            if p.is_zero() {
                // x = 0 with μ > 0: the product vanishes only if r is finite there
                let o = r.order().unwrap_or(0);
                if qi(o) + mu < zero() {
                    return Err(Error::PoleInInterval("evaluation at 0".into()));
                }
                if qi(o) + mu > zero() {
                    continue;
                }
            }
            v += p * r.eval(x)?;
        }
        Ok(v)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.parts.iter().map(|(mu, r)| x.powf(to_f64(mu)) * r.eval_f64(x)).sum()
    }

    /// Coefficient of x^(k+μ) in the expansion at 0.
    pub fn coeff(&self, k: i64, mu: &Q) -> Q {
        self.parts.get(mu).map_or_else(zero, |r| r.coeff_at(k))
    }

    pub fn coeff_at(&self, e: &Q) -> Q {
        let (k, mu) = split_exponent(e);
        self.coeff(k, &mu)
    }

    /// Lowest exponent present in the expansion.
    pub fn order(&self) -> Option<Q> {
        self.parts.iter().filter_map(|(mu, r)| r.order().map(|k| qi(k) + mu)).min()
    }

    /// Lowest integer index present in component μ.
    pub fn order_in(&self, mu: &Q) -> Option<i64> {
        self.parts.get(mu).and_then(|r| r.order())
    }

    /// Splits into a Laurent part and a part analytic at 0 (per component).
    pub fn split_laurent(&self) -> (Self, Self) {
        let mut l = ClosedForm::zero();
        let mut p = ClosedForm::zero();
        for (mu, r) in &self.parts {
            let (a, b) = r.split_laurent();
            l.add_part(mu.clone(), a);
            p.add_part(mu.clone(), b);
        }
        (l, p)
    }

    /// Finite list of terms (coefficient, exponent) of a Laurent closed form.
    pub fn laurent_terms(&self) -> Option<Vec<(Q, Q)>> {
        let mut out = Vec::new();
        for (mu, r) in &self.parts {
            if !r.is_laurent() {
                return None;
            }
            let v = r.den().valuation().unwrap_or(0) as i64;
            for (i, c) in r.num().coeffs().iter().enumerate() {
                if !c.is_zero() {
                    out.push((c.clone(), qi(i as i64 - v) + mu));
                }
            }
        }
        Some(out)
    }

    /// Expansion at 0 through integer index `upto` in every component.
    /// Laurent closed forms expand exactly.
    pub fn to_element(&self, upto: i64) -> GenLaurentElement {
        let mut out = GenLaurentElement::zero();
        for (mu, r) in &self.parts {
            out = out.add(&GenLaurentElement::from_series(laurent_expand_mu(mu, r, upto)));
        }
        out
    }

    /// Exact elements convert back to closed forms.
    pub fn from_element(u: &GenLaurentElement) -> Option<Self> {
        if !u.is_exact() {
            return None;
        }
        let mut out = ClosedForm::zero();
        for s in u.components() {
            for (i, a) in s.coeffs().iter().enumerate() {
                out = out.add(&ClosedForm::from_part(
                    s.mu().clone(),
                    RationalFunction::monomial(a.clone(), s.start() + i as i64),
                ));
            }
        }
        Some(out)
    }

    /// The integral from 1 to x as a closed form.
    pub fn antiderivative_rb(&self) -> Result<Self> {
        let mut out = ClosedForm::zero();
        let mut constant = zero();
        for (mu, r) in &self.parts {
            let (lpart, ppart) = r.split_laurent();
            let v = lpart.den().valuation().unwrap_or(0) as i64;
            for (i, c) in lpart.num().coeffs().iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let k = i as i64 - v;
                let e1 = qi(k + 1) + mu;
                if e1.is_zero() {
                    return Err(Error::LogObstruction(format!("residue {}", fmt_q(c))));
                }
                let t = c / &e1;
                constant -= &t;
                out.add_part(mu.clone(), RationalFunction::monomial(t, k + 1));
            }
            if !ppart.is_zero() {
                if !mu.is_zero() {
                    return Err(Error::NoClosedAntiderivative(format!(
                        "x^{}*({})",
                        fmt_q(mu),
                        ppart.display("x")
                    )));
                }
                let f = ppart
                    .rational_antiderivative()
                    .ok_or_else(|| Error::LogObstruction(format!("({}) has a logarithmic integral", ppart.display("x"))))?;
                constant -= f.eval(&one())?;
                out.add_part(zero(), f);
            }
        }
        out.add_part(zero(), RationalFunction::constant(constant));
        Ok(out)
    }

    /// ∫_lo^hi, with Hadamard finite part at 0 when lo = 0.
    pub fn definite(&self, lo: &Q, hi: &Q) -> Result<Q> {
        let v = self.antiderivative_rb()?;
        let top = v.eval(hi)?;
        let bottom = if lo.is_zero() { v.coeff(0, &zero()) } else { v.eval(lo)? };
        Ok(top - bottom)
    }

    /// f(b·x); only rational results are supported.
    pub fn scale_arg(&self, b: &Q) -> Result<Self> {
        let mut out = ClosedForm::zero();
        for (mu, r) in &self.parts {
            let f = qpow_rat(b, mu)
                .ok_or_else(|| Error::NonRationalValue(format!("{}^{}", fmt_q(b), fmt_q(mu))))?;
            out.add_part(mu.clone(), r.scale_arg(b).scale(&f));
        }
        Ok(out)
    }

    /// Poles of any component inside (0, 1].
    pub fn has_pole_in_unit_interval(&self) -> bool {
        self.parts.values().any(|r| {
            let d = r.den();
            let v = d.valuation().unwrap_or(0);
            d.unshift(v).count_roots(&zero(), &one()) > 0
        })
    }

    pub fn display(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = Vec::new();
        for (mu, r) in &self.parts {
            let body = if let Some(terms) = laurent_terms_of(r) {
                terms
                    .into_iter()
                    .map(|(c, k)| mono(&c, &(qi(k) + mu), var))
                    .collect::<Vec<_>>()
                    .join(" + ")
                    .replace("+ -", "- ")
            } else {
                let s = r.display(var);
                if mu.is_zero() {
                    s
                } else {
                    format!("{var}^({})*({s})", fmt_q(mu))
                }
            };
            out.push(body);
        }
        out.join(" + ").replace("+ -", "- ")
    }
}

fn laurent_terms_of(r: &RationalFunction) -> Option<Vec<(Q, i64)>> {
    if !r.is_laurent() {
        return None;
    }
    let v = r.den().valuation().unwrap_or(0) as i64;
    Some(
        r.num()
            .coeffs()
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (c.clone(), i as i64 - v))
            .collect(),
    )
}

fn mono(c: &Q, e: &Q, var: &str) -> String {
    let xpart = if e.is_zero() {
        String::new()
    } else if e.is_one() {
        var.to_string()
    } else if e.is_integer() && *e > zero() {
        format!("{var}^{}", fmt_q(e))
    } else {
        format!("{var}^({})", fmt_q(e))
    };
    if xpart.is_empty() {
        fmt_q(c)
    } else if c.is_one() {
        xpart
    } else if *c == -one() {
        format!("-{xpart}")
    } else {
        format!("{}*{xpart}", fmt_q(c))
    }
}

/// Floating-point image of a closed form for repeated evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct CompiledForm {
    parts: Vec<(f64, Vec<f64>, Vec<f64>)>,
}

impl CompiledForm {
    pub fn eval(&self, x: f64) -> f64 {
        let horner = |c: &[f64]| c.iter().rev().fold(0.0, |acc, a| acc * x + a);
        self.parts
            .iter()
            .map(|(mu, n, d)| {
                let v = horner(n) / horner(d);
                if *mu == 0.0 {
                    v
                } else {
                    x.powf(*mu) * v
                }
            })
            .sum()
    }
}

impl ClosedForm {
    pub fn compile(&self) -> CompiledForm {
        let conv = |p: &Poly| p.coeffs().iter().map(to_f64).collect::<Vec<_>>();
        CompiledForm { parts: self.parts.iter().map(|(mu, r)| (to_f64(mu), conv(r.num()), conv(r.den()))).collect() }
    }
}

/// Laurent expansion of a rational function through x^upto.
pub fn laurent_expand(r: &RationalFunction, upto: i64) -> GenLaurentSeries {
    laurent_expand_mu(&zero(), r, upto)
}

fn laurent_expand_mu(mu: &Q, r: &RationalFunction, upto: i64) -> GenLaurentSeries {
    if r.is_laurent() {
        let v = r.den().valuation().unwrap_or(0) as i64;
        let c = r.num().coeffs().to_vec();
        return GenLaurentSeries::exact(mu.clone(), -v, c);
    }
    let (ord, c) = r.expand(upto);
    let radius = match r.den().min_root_modulus_lower_bound() {
        Some(b) => Radius::Finite(b),
        None => Radius::Infinite,
    };
    GenLaurentSeries::new(mu.clone(), ord, c, Some((upto + 1).max(ord)), radius)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::q;

    fn rf(n: &[i64], d: &[i64]) -> RationalFunction {
        RationalFunction::new(Poly::from_ints(n), Poly::from_ints(d))
    }

    #[test]
    fn expansions() {
        let s = laurent_expand(&rf(&[1, 1], &[0, 0, 1]), 0);
        assert_eq!(s.start(), -2);
        assert_eq!(s.coeffs(), &[qi(1), qi(1)]);
        assert!(s.is_exact());
        let g = laurent_expand(&rf(&[1], &[1, -1]), 3);
        assert_eq!(g.coeffs(), vec![qi(1); 4].as_slice());
        match g.radius() {
            Radius::Finite(r) => assert!(*r <= qi(1) && *r > q(99, 100)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn fractional_derivative_and_integral() {
        let u = ClosedForm::monomial(qi(1), &q(3, 2));
        assert_eq!(u.derivative(), ClosedForm::monomial(q(3, 2), &q(1, 2)));
        let a = ClosedForm::monomial(qi(1), &q(1, 2)).antiderivative_rb().unwrap();
        assert_eq!(a, ClosedForm::monomial(q(2, 3), &q(3, 2)).sub(&ClosedForm::constant(q(2, 3))));
    }

    #[test]
    fn integral_of_rational_part() {
        let f = ClosedForm::from_rf(rf(&[1], &[1, 2, 1]));
        let a = f.antiderivative_rb().unwrap();
        assert_eq!(a.derivative(), f);
        assert_eq!(a.eval(&qi(1)).unwrap(), zero());
    }

    #[test]
    fn finite_part_integral() {
        // ∫_0^1 x^-2 in the finite-part sense equals -1
        let f = ClosedForm::monomial(qi(1), &qi(-2));
        assert_eq!(f.definite(&qi(0), &qi(1)).unwrap(), qi(-1));
        let g = ClosedForm::monomial(qi(1), &qi(2));
        assert_eq!(g.definite(&qi(0), &qi(1)).unwrap(), q(1, 3));
    }

    #[test]
    fn display_laurent() {
        let f = ClosedForm::monomial(q(1, 3), &qi(2)).sub(&ClosedForm::monomial(q(1, 3), &qi(1)));
        assert_eq!(f.display("x"), "1/3*x^2 - 1/3*x");
    }
}
