//! Generalized Laurent series x^μ·Σ a_k x^k with fractional μ in [0,1),
//! direct sums of them, and finite generalized Laurent polynomials.
//!
//! A series is either exact (finitely many terms, no truncation) or known
//! only below a truncation exponent. Reading a coefficient at or beyond the
//! truncation is an error rather than a silent zero.

use crate::arith::{fmt_q, one, qi, qpow_rat, split_exponent, zero, Q};
use crate::{Error, Result};
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Radius of convergence bookkeeping.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Radius {
    Infinite,
    Finite(Q),
    Unknown,
}

impl Radius {
    pub fn min(&self, o: &Radius) -> Radius {
        match (self, o) {
            (Radius::Unknown, _) | (_, Radius::Unknown) => Radius::Unknown,
            (Radius::Infinite, r) | (r, Radius::Infinite) => r.clone(),
            (Radius::Finite(a), Radius::Finite(b)) => Radius::Finite(a.min(b).clone()),
        }
    }
}

/// Bound on the truncation error of a partial evaluation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TailBound {
    Exact,
    Bound(Q),
    Unknown,
}

#[derive(Clone, Debug)]
pub struct GenLaurentSeries {
    mu: Q,
    start: i64,
    coeffs: Vec<Q>,
    /// First unknown integer index; None means the series is exact.
    order: Option<i64>,
    radius: Radius,
}

impl PartialEq for GenLaurentSeries {
    fn eq(&self, o: &Self) -> bool {
        self.mu == o.mu && self.order == o.order && self.start == o.start && self.coeffs == o.coeffs
    }
}

impl GenLaurentSeries {
    pub fn new(mu: Q, start: i64, coeffs: Vec<Q>, order: Option<i64>, radius: Radius) -> Self {
        assert!(!mu.is_negative() && mu < one(), "fractional exponent must lie in [0,1)");
        let mut s = GenLaurentSeries { mu, start, coeffs, order, radius };
        s.normalize();
        s
    }

    pub fn exact(mu: Q, start: i64, coeffs: Vec<Q>) -> Self {
        GenLaurentSeries::new(mu, start, coeffs, None, Radius::Infinite)
    }

    fn normalize(&mut self) {
        if let Some(o) = self.order {
            let keep = (o - self.start).max(0) as usize;
            self.coeffs.truncate(keep);
        }
        let lead = self.coeffs.iter().position(|a| !a.is_zero());
        match lead {
            None => {
                self.coeffs.clear();
                self.start = self.order.unwrap_or(0);
            }
            Some(p) => {
                self.coeffs.drain(..p);
                self.start += p as i64;
                if self.order.is_none() {
                    while self.coeffs.last().map_or(false, |a| a.is_zero()) {
                        self.coeffs.pop();
                    }
                }
            }
        }
    }

    pub fn mu(&self) -> &Q {
        &self.mu
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn order(&self) -> Option<i64> {
        self.order
    }

    pub fn radius(&self) -> &Radius {
        &self.radius
    }

    pub fn is_exact(&self) -> bool {
        self.order.is_none()
    }

    /// Number of known coefficients from the leading index on.
    pub fn truncation_order(&self) -> Option<usize> {
        self.order.map(|o| (o - self.start).max(0) as usize)
    }

    /// All known coefficients vanish.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Index of the first nonzero coefficient.
    pub fn valuation(&self) -> Option<i64> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.start)
        }
    }

    /// Lowest index that may carry a nonzero value, known or not.
    fn floor_index(&self) -> Option<i64> {
        if self.coeffs.is_empty() {
            self.order
        } else {
            Some(self.start)
        }
    }

    /// Last index with a known coefficient, plus one.
    fn known_end(&self) -> i64 {
        self.order.unwrap_or(self.start + self.coeffs.len() as i64)
    }

    pub fn coeff(&self, k: i64) -> Result<Q> {
        if let Some(o) = self.order {
            if k >= o {
                return Err(Error::TruncationExceeded(format!(
                    "coefficient {k} of a series known below {o}"
                )));
            }
        }
        if k < self.start || k >= self.start + self.coeffs.len() as i64 {
            return Ok(zero());
        }
        Ok(self.coeffs[(k - self.start) as usize].clone())
    }

    fn c(&self, k: i64) -> Q {
        if k < self.start || k >= self.start + self.coeffs.len() as i64 {
            zero()
        } else {
            self.coeffs[(k - self.start) as usize].clone()
        }
    }

    pub fn with_order(&self, order: Option<i64>) -> Self {
        let o = match (self.order, order) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, None) => a,
            (None, b) => b,
        };
        GenLaurentSeries::new(self.mu.clone(), self.start, self.coeffs.clone(), o, self.radius.clone())
    }

    fn combine(&self, o: &Self, sign: &Q) -> Self {
        assert_eq!(self.mu, o.mu);
        let order = min_opt(self.order, o.order);
        let lo = self.start.min(o.start);
        let hi = self.known_end().max(o.known_end());
        let hi = order.map_or(hi, |x| x.min(hi));
        let coeffs = (lo..hi.max(lo)).map(|k| self.c(k) + sign * o.c(k)).collect();
        GenLaurentSeries::new(self.mu.clone(), lo, coeffs, order, self.radius.min(&o.radius))
    }

    pub fn scale(&self, a: &Q) -> Self {
        let coeffs = self.coeffs.iter().map(|c| c * a).collect();
        GenLaurentSeries::new(self.mu.clone(), self.start, coeffs, self.order, self.radius.clone())
    }

    /// Multiplies by x^k.
    pub fn shift(&self, k: i64) -> Self {
        GenLaurentSeries::new(
            self.mu.clone(),
            self.start + k,
            self.coeffs.clone(),
            self.order.map(|o| o + k),
            self.radius.clone(),
        )
    }

    /// Evaluates the known part at x0 with the tail estimate
    /// |a_{N+T}|·(x0/r)^T/(1 - x0/r).
    pub fn evaluate_partial(&self, x0: &Q) -> Result<(Q, TailBound)> {
        let mut v = zero();
        for (i, a) in self.coeffs.iter().enumerate() {
            let e = qi(self.start + i as i64) + &self.mu;
            let p = qpow_rat(x0, &e).ok_or_else(|| {
                Error::NonRationalValue(format!("{}^{}", fmt_q(x0), fmt_q(&e)))
            })?;
            v += a * p;
        }
        let tail = match (self.order, &self.radius) {
            (None, _) => TailBound::Exact,
            (Some(_), Radius::Infinite) => TailBound::Bound(zero()),
            (Some(_), Radius::Finite(r)) if x0.abs() < *r && !self.coeffs.is_empty() => {
                let t = self.coeffs.len() as i64 - 1;
                let ratio = x0.abs() / r;
                let last = self.coeffs.last().unwrap().abs();
                TailBound::Bound(last * crate::arith::qpow(&ratio, t) / (one() - ratio))
            }
            _ => TailBound::Unknown,
        };
        Ok((v, tail))
    }
}

fn min_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

fn add_opt(a: Option<i64>, b: i64) -> Option<i64> {
    a.map(|x| x + b)
}

/// Multiplies two series with the carry x^1 when μ1 + μ2 ≥ 1.
fn series_mul(a: &GenLaurentSeries, b: &GenLaurentSeries) -> GenLaurentSeries {
    let mut mu = &a.mu + &b.mu;
    let mut carry = 0;
    if mu >= one() {
        mu -= one();
        carry = 1;
    }
    // precision: each unknown tail multiplies the other factor's lowest term
    let order = match (a.floor_index(), b.floor_index()) {
        (Some(fa), Some(fb)) => min_opt(add_opt(a.order, fb), add_opt(b.order, fa)),
        _ => None,
    }
    .map(|o| o + carry);
    let start = a.start + b.start + carry;
    let mut n = if a.coeffs.is_empty() || b.coeffs.is_empty() { 0 } else { a.coeffs.len() + b.coeffs.len() - 1 };
    if let Some(o) = order {
        n = n.min((o - start).max(0) as usize);
    }
    let mut coeffs = vec![zero(); n];
    for (i, x) in a.coeffs.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.coeffs.iter().enumerate() {
            if i + j < n {
                coeffs[i + j] += x * y;
            }
        }
    }
    GenLaurentSeries::new(mu, start, coeffs, order, a.radius.min(&b.radius))
}

/// Finite direct sum over fractional exponents.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct GenLaurentElement {
    comps: BTreeMap<Q, GenLaurentSeries>,
}

/// Which part of an element to keep.
#[derive(Clone, Debug, PartialEq)]
pub enum Projection {
    /// Terms with negative total exponent.
    Principal,
    /// Everything else.
    Regular,
    /// The single component with this fractional exponent.
    Indicial(Q),
}

impl GenLaurentElement {
    pub fn zero() -> Self {
        GenLaurentElement::default()
    }

    pub fn one() -> Self {
        GenLaurentElement::from_series(GenLaurentSeries::exact(zero(), 0, vec![one()]))
    }

    pub fn from_series(s: GenLaurentSeries) -> Self {
        let mut e = GenLaurentElement::zero();
        e.insert(s);
        e
    }

    /// c·x^(k+μ) for a rational exponent e = k + μ.
    pub fn monomial(c: Q, e: &Q) -> Self {
        let (k, mu) = split_exponent(e);
        GenLaurentElement::from_series(GenLaurentSeries::exact(mu, k, vec![c]))
    }

    fn insert(&mut self, s: GenLaurentSeries) {
        if s.is_zero() && s.is_exact() {
            self.comps.remove(&s.mu);
        } else {
            self.comps.insert(s.mu.clone(), s);
        }
    }

    pub fn components(&self) -> impl Iterator<Item = &GenLaurentSeries> {
        self.comps.values()
    }

    pub fn component(&self, mu: &Q) -> Option<&GenLaurentSeries> {
        self.comps.get(mu)
    }

    pub fn mus(&self) -> Vec<Q> {
        self.comps.keys().cloned().collect()
    }

    pub fn is_exact(&self) -> bool {
        self.comps.values().all(|s| s.is_exact())
    }

    /// All known coefficients vanish.
    pub fn is_zero(&self) -> bool {
        self.comps.values().all(|s| s.is_zero())
    }

    /// Smallest exponent with a nonzero known coefficient, with its coefficient.
    pub fn leading(&self) -> Option<(Q, Q)> {
        self.comps
            .values()
            .filter_map(|s| s.valuation().map(|k| (qi(k) + &s.mu, s.c(k))))
            .min_by(|a, b| a.0.cmp(&b.0))
    }

    /// Smallest truncation exponent over components.
    pub fn precision(&self) -> Option<Q> {
        self.comps.values().filter_map(|s| s.order.map(|o| qi(o) + &s.mu)).min()
    }

    pub fn coeff(&self, k: i64, mu: &Q) -> Result<Q> {
        match self.comps.get(mu) {
            Some(s) => s.coeff(k),
            None => Ok(zero()),
        }
    }

    /// Coefficient of x^e for a rational exponent.
    pub fn coeff_at(&self, e: &Q) -> Result<Q> {
        let (k, mu) = split_exponent(e);
        self.coeff(k, &mu)
    }

    pub fn add(&self, o: &Self) -> Self {
        self.combine(o, &one())
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.combine(o, &-one())
    }

    fn combine(&self, o: &Self, sign: &Q) -> Self {
        let mut out = self.clone();
        for (mu, s) in &o.comps {
            let r = match self.comps.get(mu) {
                Some(t) => t.combine(s, sign),
                None => s.scale(sign),
            };
            out.insert(r);
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&-one())
    }

    pub fn scale(&self, a: &Q) -> Self {
        let mut out = GenLaurentElement::zero();
        for s in self.comps.values() {
            out.insert(s.scale(a));
        }
        out
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = GenLaurentElement::zero();
        for a in self.comps.values() {
            for b in o.comps.values() {
                let p = series_mul(a, b);
                let r = match out.comps.get(&p.mu) {
                    Some(t) => t.combine(&p, &one()),
                    None => p,
                };
                out.insert(r);
            }
        }
        out
    }

    /// Multiplies by x^k.
    pub fn shift(&self, k: i64) -> Self {
        let mut out = GenLaurentElement::zero();
        for s in self.comps.values() {
            out.insert(s.shift(k));
        }
        out
    }

    /// Caps every component at the given integer truncation index.
    pub fn truncate(&self, order: i64) -> Self {
        let mut out = GenLaurentElement::zero();
        for s in self.comps.values() {
            out.insert(s.with_order(Some(order)));
        }
        out
    }

    pub fn with_radius(&self, r: Radius) -> Self {
        let mut out = self.clone();
        for s in out.comps.values_mut() {
            s.radius = r.clone();
        }
        out
    }

    pub fn differentiate(&self) -> Self {
        let mut out = GenLaurentElement::zero();
        for s in self.comps.values() {
            let coeffs = s
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, a)| a * (qi(s.start + i as i64) + &s.mu))
                .collect();
            out.insert(GenLaurentSeries::new(
                s.mu.clone(),
                s.start - 1,
                coeffs,
                s.order.map(|o| o - 1),
                s.radius.clone(),
            ));
        }
        out
    }

    pub fn derivative_n(&self, n: usize) -> Self {
        let mut u = self.clone();
        for _ in 0..n {
            u = u.differentiate();
        }
        u
    }

    /// The integral from 1 to x. For truncated input the constant of
    /// integration is taken from the known terms, so the result evaluates
    /// to exactly 0 at x = 1 in partial evaluation.
    pub fn integrate_rb(&self) -> Result<Self> {
        let mut out = GenLaurentElement::zero();
        let mut constant = zero();
        for s in self.comps.values() {
            if s.mu.is_zero() {
                if s.order.map_or(false, |o| o <= -1) {
                    return Err(Error::TruncationExceeded("residue coefficient is unknown".into()));
                }
                if !s.c(-1).is_zero() {
                    return Err(Error::LogObstruction(format!("residue {}", fmt_q(&s.c(-1)))));
                }
            }
            let mut coeffs = Vec::with_capacity(s.coeffs.len());
            for (i, a) in s.coeffs.iter().enumerate() {
                let e1 = qi(s.start + i as i64 + 1) + &s.mu;
                if a.is_zero() {
                    coeffs.push(zero());
                    continue;
                }
                let c = a / &e1;
                constant -= &c;
                coeffs.push(c);
            }
            out.insert(GenLaurentSeries::new(
                s.mu.clone(),
                s.start + 1,
                coeffs,
                s.order.map(|o| o + 1),
                s.radius.clone(),
            ));
        }
        let c = GenLaurentSeries::exact(zero(), 0, vec![constant]);
        let merged = match out.comps.get(&zero()) {
            Some(t) => t.combine(&c, &one()),
            None => c,
        };
        out.insert(merged);
        Ok(out)
    }

    pub fn project(&self, which: &Projection) -> Self {
        let mut out = GenLaurentElement::zero();
        for s in self.comps.values() {
            match which {
                Projection::Indicial(mu) => {
                    if &s.mu == mu {
                        out.insert(s.clone());
                    }
                }
                Projection::Principal | Projection::Regular => {
                    // k + μ < 0 exactly when k < 0, since μ lies in [0,1)
                    let keep_p = matches!(which, Projection::Principal);
                    let coeffs: Vec<Q> = s
                        .coeffs
                        .iter()
                        .enumerate()
                        .map(|(i, a)| if (s.start + i as i64 <= -1) == keep_p { a.clone() } else { zero() })
                        .collect();
                    let order = match (keep_p, s.order) {
                        (true, Some(o)) if o >= 0 => None,
                        (_, o) => o,
                    };
                    out.insert(GenLaurentSeries::new(s.mu.clone(), s.start, coeffs, order, s.radius.clone()));
                }
            }
        }
        out
    }

    pub fn pp(&self) -> Self {
        self.project(&Projection::Principal)
    }

    pub fn reg(&self) -> Self {
        self.project(&Projection::Regular)
    }

    pub fn evaluate_partial(&self, x0: &Q) -> Result<(Q, TailBound)> {
        let mut v = zero();
        let mut tail = TailBound::Exact;
        for s in self.comps.values() {
            let (a, t) = s.evaluate_partial(x0)?;
            v += a;
            tail = match (tail, t) {
                (TailBound::Unknown, _) | (_, TailBound::Unknown) => TailBound::Unknown,
                (TailBound::Exact, t) => t,
                (t, TailBound::Exact) => t,
                (TailBound::Bound(a), TailBound::Bound(b)) => TailBound::Bound(a + b),
            };
        }
        Ok((v, tail))
    }

    /// Multiplicative inverse of a single-component element, to the given
    /// number of terms when the input is not a monomial.
    pub fn inverse(&self, terms: usize) -> Result<Self> {
        if self.comps.len() != 1 {
            return Err(Error::InvalidInput("only single-component elements are invertible".into()));
        }
        let s = self.comps.values().next().unwrap();
        if s.coeffs.is_empty() {
            return Err(Error::TruncationExceeded("inverse of a series with no known terms".into()));
        }
        let (k, mu) = if s.mu.is_zero() { (-s.start, zero()) } else { (-s.start - 1, one() - &s.mu) };
        let a0inv = s.coeffs[0].recip();
        let avail = s.truncation_order().unwrap_or(usize::MAX);
        let exact_mono = s.is_exact() && s.coeffs.len() == 1;
        let n = if exact_mono { 1 } else { terms.min(avail) };
        let mut inv: Vec<Q> = Vec::with_capacity(n);
        for i in 0..n {
            let mut acc = if i == 0 { one() } else { zero() };
            for j in 1..=i {
                acc -= s.c(s.start + j as i64) * &inv[i - j];
            }
            inv.push(acc * &a0inv);
        }
        let order = if exact_mono { None } else { Some(k + n as i64) };
        Ok(GenLaurentElement::from_series(GenLaurentSeries::new(mu, k, inv, order, Radius::Unknown)))
    }
}

impl fmt::Display for GenLaurentElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for s in self.comps.values() {
            for (i, a) in s.coeffs.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                let e = qi(s.start + i as i64) + &s.mu;
                parts.push(format!("{}*x^({})", fmt_q(a), fmt_q(&e)));
            }
            if let Some(o) = s.order {
                parts.push(format!("O(x^({}))", fmt_q(&(qi(o) + &s.mu))));
            }
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Finite sum of terms c·x^e with rational exponents.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct GenLaurentPoly {
    terms: BTreeMap<Q, Q>,
}

impl GenLaurentPoly {
    pub fn new() -> Self {
        GenLaurentPoly::default()
    }

    pub fn from_terms(it: impl IntoIterator<Item = (Q, Q)>) -> Self {
        let mut p = GenLaurentPoly::new();
        for (e, c) in it {
            p.add_term(e, c);
        }
        p
    }

    pub fn add_term(&mut self, e: Q, c: Q) {
        let v = self.terms.get(&e).cloned().unwrap_or_else(zero) + c;
        if v.is_zero() {
            self.terms.remove(&e);
        } else {
            self.terms.insert(e, v);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Q, &Q)> {
        self.terms.iter()
    }

    pub fn to_element(&self) -> GenLaurentElement {
        let mut out = GenLaurentElement::zero();
        for (e, c) in &self.terms {
            out = out.add(&GenLaurentElement::monomial(c.clone(), e));
        }
        out
    }

    pub fn from_element(u: &GenLaurentElement) -> Option<Self> {
        if !u.is_exact() {
            return None;
        }
        let mut p = GenLaurentPoly::new();
        for s in u.components() {
            for (i, a) in s.coeffs().iter().enumerate() {
                p.add_term(qi(s.start() + i as i64) + s.mu(), a.clone());
            }
        }
        Some(p)
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&zero()).map_or(false, |c| c.is_one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::q;

    fn ex(mu: Q, start: i64, c: &[i64]) -> GenLaurentElement {
        GenLaurentElement::from_series(GenLaurentSeries::exact(mu, start, c.iter().map(|&v| qi(v)).collect()))
    }

    #[test]
    fn product_carries_fractional_exponents() {
        let a = GenLaurentElement::monomial(qi(1), &q(1, 2));
        let p = a.mul(&a);
        assert_eq!(p, GenLaurentElement::monomial(qi(1), &qi(1)));
        let b = GenLaurentElement::monomial(qi(1), &q(-1, 2));
        assert_eq!(b.mul(&a), GenLaurentElement::one());
    }

    #[test]
    fn integral_from_one() {
        let u = ex(zero(), 0, &[0, 0, 1]);
        let i = u.integrate_rb().unwrap();
        assert_eq!(i, ex(zero(), 0, &[-1, 0, 0, 1]).scale(&q(1, 3)));
        let obstructed = ex(zero(), -1, &[1]);
        assert!(matches!(obstructed.integrate_rb(), Err(Error::LogObstruction(_))));
        let h = GenLaurentElement::monomial(qi(1), &q(-1, 2)).integrate_rb().unwrap();
        assert_eq!(h.coeff_at(&q(1, 2)).unwrap(), qi(2));
        assert_eq!(h.coeff_at(&qi(0)).unwrap(), qi(-2));
    }

    #[test]
    fn principal_and_regular_parts() {
        let u = ex(zero(), -2, &[1, 2, 3, 4]);
        assert_eq!(u.pp(), ex(zero(), -2, &[1, 2]));
        assert_eq!(u.reg(), ex(zero(), 0, &[3, 4]));
        assert_eq!(u.pp().add(&u.reg()), u);
    }

    #[test]
    fn truncated_read_is_an_error() {
        let s = GenLaurentSeries::new(zero(), 0, vec![qi(1); 4], Some(4), Radius::Finite(qi(1)));
        assert!(s.coeff(3).is_ok());
        assert!(matches!(s.coeff(4), Err(Error::TruncationExceeded(_))));
        let (v, t) = s.evaluate_partial(&q(1, 2)).unwrap();
        assert_eq!(v, q(15, 8));
        assert_eq!(t, TailBound::Bound(q(1, 4)));
    }

    #[test]
    fn truncated_products_track_precision() {
        let s = GenLaurentElement::from_series(GenLaurentSeries::new(zero(), 0, vec![qi(1); 3], Some(3), Radius::Unknown));
        let x = ex(zero(), -1, &[1]);
        let p = s.mul(&x);
        assert_eq!(p.precision(), Some(qi(2)));
    }

    #[test]
    fn inverse_of_geometric() {
        let s = ex(zero(), 0, &[1, -1]);
        let inv = s.inverse(5).unwrap();
        for k in 0..5 {
            assert_eq!(inv.coeff(k, &zero()).unwrap(), qi(1));
        }
    }
}
