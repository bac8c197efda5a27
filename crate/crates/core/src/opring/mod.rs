//! Integro-differential operators in normal form.
//!
//! Every operator is stored as
//!   Σ a_j·D^j + Σ a·A·b + Σ a·φ∘b
//! where A is the integral from 1 to x and φ ranges over point evaluations
//! e_ξ D^j, coefficient functionals c_{k+μ} and definite integrals F from lo
//! to hi. Tensor parts are kept as reduced bivariate rational functions so
//! that two operators are equal exactly when their stored forms are equal.

mod apply;
mod compose;
mod greens;
pub(crate) mod print;

pub use apply::apply_functional;
pub use greens::{GreensFunction, KernelTerm, Piece, Side};

use crate::arith::{one, split_exponent, zero, Q};
use crate::closed::ClosedForm;
use crate::poly::Poly;
use crate::ratfunc::RationalFunction;
use crate::Result;
use num_traits::Zero;
use std::collections::BTreeMap;

/// Boundary functional kinds.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Functional {
    /// u ↦ u^(deriv)(xi)
    PointEval { xi: Q, deriv: usize },
    /// u ↦ coefficient of x^(k+μ)
    Coeff { k: i64, mu: Q },
    /// u ↦ ∫_lo^hi u, finite part at 0
    DefInt { lo: Q, hi: Q },
}

/// One term of the normal form, as handed out to consumers.
#[derive(Clone, Debug, PartialEq)]
pub enum Term {
    Diff { coef: ClosedForm, order: usize },
    Int { left: ClosedForm, right: ClosedForm },
    Bdry { left: ClosedForm, functional: Functional, inner: ClosedForm },
}

/// Normalization context: in analytic mode inputs are assumed analytic at 0,
/// so coefficient functionals below x^0 or off the integer lattice vanish.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Mode {
    pub analytic: bool,
}

impl Mode {
    pub const GENERAL: Mode = Mode { analytic: false };
    pub const ANALYTIC: Mode = Mode { analytic: true };
}

/// x^μx ξ^μξ·N(x,ξ)/(L(x)·M(ξ)) with num[j] the x-polynomial multiplying ξ^j.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Bivariate {
    l: Poly,
    m: Poly,
    num: Vec<Poly>,
}

impl Bivariate {
    fn from_pair(a: &RationalFunction, b: &RationalFunction) -> Bivariate {
        let num = b.num().coeffs().iter().map(|c| a.num().scale(c)).collect();
        let mut bv = Bivariate { l: a.den().clone(), m: b.den().clone(), num };
        bv.reduce();
        bv
    }

    fn is_zero(&self) -> bool {
        self.num.iter().all(|p| p.is_zero())
    }

    /// N·a(x)·b(ξ)
    fn mul_polys(num: &[Poly], a: &Poly, b: &Poly) -> Vec<Poly> {
        let mut out = vec![Poly::zero(); num.len() + b.coeffs().len()];
        for (j, p) in num.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let pa = p * a;
            for (i, c) in b.coeffs().iter().enumerate() {
                if !c.is_zero() {
                    out[i + j] = &out[i + j] + &pa.scale(c);
                }
            }
        }
        out
    }

    fn add(&self, o: &Bivariate) -> Bivariate {
        let l = Poly::lcm(&self.l, &o.l);
        let m = Poly::lcm(&self.m, &o.m);
        let a1 = Bivariate::mul_polys(&self.num, &l.exact_div(&self.l), &m.exact_div(&self.m));
        let a2 = Bivariate::mul_polys(&o.num, &l.exact_div(&o.l), &m.exact_div(&o.m));
        let n = a1.len().max(a2.len());
        let num = (0..n)
            .map(|j| {
                let z = Poly::zero();
                &*a1.get(j).unwrap_or(&z) + a2.get(j).unwrap_or(&z)
            })
            .collect();
        let mut bv = Bivariate { l, m, num };
        bv.reduce();
        bv
    }

    fn scale(&self, c: &Q) -> Bivariate {
        Bivariate { l: self.l.clone(), m: self.m.clone(), num: self.num.iter().map(|p| p.scale(c)).collect() }
    }

    fn reduce(&mut self) {
        while self.num.last().map_or(false, |p| p.is_zero()) {
            self.num.pop();
        }
        if self.num.is_empty() {
            self.l = Poly::one();
            self.m = Poly::one();
            return;
        }
        let mut g = self.l.clone();
        for p in &self.num {
            g = Poly::gcd(&g, p);
        }
        if g.degree().unwrap_or(0) > 0 {
            self.l = self.l.exact_div(&g);
            self.num = self.num.iter().map(|p| p.exact_div(&g)).collect();
        }
        // same in ξ, on the transposed numerator
        let dx = self.num.iter().filter_map(|p| p.degree()).max().unwrap_or(0);
        let cols: Vec<Poly> = (0..=dx).map(|i| Poly::new(self.num.iter().map(|p| p.coeff(i)).collect())).collect();
        let mut h = self.m.clone();
        for c in &cols {
            h = Poly::gcd(&h, c);
        }
        if h.degree().unwrap_or(0) > 0 {
            self.m = self.m.exact_div(&h);
            let cols: Vec<Poly> = cols.iter().map(|c| c.exact_div(&h)).collect();
            let dxi = cols.iter().filter_map(|c| c.degree()).max().unwrap_or(0);
            self.num = (0..=dxi).map(|j| Poly::new(cols.iter().map(|c| c.coeff(j)).collect())).collect();
            while self.num.last().map_or(false, |p| p.is_zero()) {
                self.num.pop();
            }
        }
        let lm = self.l.lead();
        if lm != one() {
            let inv = lm.recip();
            self.l = self.l.scale(&inv);
            self.num = self.num.iter().map(|p| p.scale(&lm)).collect();
        }
    }

    /// Separable terms (N_j(x)/L(x), ξ^j/M(ξ)).
    fn terms(&self) -> Vec<(RationalFunction, RationalFunction)> {
        self.num
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(j, p)| {
                (
                    RationalFunction::new(p.clone(), self.l.clone()),
                    RationalFunction::new(Poly::monomial(one(), j), self.m.clone()),
                )
            })
            .collect()
    }
}

/// Canonical sum of products left(x)·right(ξ).
#[derive(Clone, Debug, PartialEq, Eq, Default, PartialOrd, Ord)]
pub struct Tensor {
    parts: BTreeMap<(Q, Q), Bivariate>,
}

impl Tensor {
    pub fn zero() -> Tensor {
        Tensor::default()
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn from_pair(left: &ClosedForm, right: &ClosedForm) -> Tensor {
        let mut t = Tensor::zero();
        t.add_pair(left, right);
        t
    }

    pub fn add_pair(&mut self, left: &ClosedForm, right: &ClosedForm) {
        for (mx, a) in left.parts() {
            for (mxi, b) in right.parts() {
                let bv = Bivariate::from_pair(a, b);
                self.add_bivariate((mx.clone(), mxi.clone()), bv);
            }
        }
    }

    fn add_bivariate(&mut self, key: (Q, Q), bv: Bivariate) {
        let merged = match self.parts.get(&key) {
            Some(old) => old.add(&bv),
            None => bv,
        };
        if merged.is_zero() {
            self.parts.remove(&key);
        } else {
            self.parts.insert(key, merged);
        }
    }

    pub fn add(&self, o: &Tensor) -> Tensor {
        let mut out = self.clone();
        for (k, bv) in &o.parts {
            out.add_bivariate(k.clone(), bv.clone());
        }
        out
    }

    pub fn scale(&self, c: &Q) -> Tensor {
        if c.is_zero() {
            return Tensor::zero();
        }
        Tensor { parts: self.parts.iter().map(|(k, b)| (k.clone(), b.scale(c))).collect() }
    }

    /// Separable terms, grouped so that each right factor is ξ^(j+μξ)/M(ξ).
    pub fn terms(&self) -> Vec<(ClosedForm, ClosedForm)> {
        let mut out = Vec::new();
        for ((mx, mxi), bv) in &self.parts {
            for (a, b) in bv.terms() {
                out.push((ClosedForm::from_part(mx.clone(), a), ClosedForm::from_part(mxi.clone(), b)));
            }
        }
        out
    }

    /// Multiplies every left factor by c.
    pub fn left_mul(&self, c: &ClosedForm) -> Tensor {
        let mut out = Tensor::zero();
        for (l, r) in self.terms() {
            out.add_pair(&c.mul(&l), &r);
        }
        out
    }

    /// Groups terms with equal right factor: Σ_r (Σ left)⊗r.
    pub fn by_right(&self) -> Vec<(ClosedForm, ClosedForm)> {
        let mut m: BTreeMap<ClosedForm, ClosedForm> = BTreeMap::new();
        for (l, r) in self.terms() {
            let e = m.entry(r).or_default();
            *e = e.add(&l);
        }
        m.into_iter().filter(|(_, l)| !l.is_zero()).map(|(r, l)| (l, r)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct IntDiffOperator {
    diff: BTreeMap<usize, ClosedForm>,
    int: Tensor,
    evals: BTreeMap<(Q, usize), ClosedForm>,
    coeffs: BTreeMap<(i64, Q), Tensor>,
    defints: BTreeMap<(Q, Q), Tensor>,
}

impl IntDiffOperator {
    pub fn zero() -> Self {
        IntDiffOperator::default()
    }

    pub fn identity() -> Self {
        IntDiffOperator::diff(ClosedForm::one(), 0)
    }

    /// c·D^j
    pub fn diff(c: ClosedForm, j: usize) -> Self {
        let mut op = IntDiffOperator::zero();
        op.push_diff(&c, j);
        op
    }

    pub fn multiplication(c: ClosedForm) -> Self {
        IntDiffOperator::diff(c, 0)
    }

    /// left·A·right
    pub fn integral(left: ClosedForm, right: ClosedForm) -> Self {
        let mut op = IntDiffOperator::zero();
        op.push_int(&left, &right);
        op
    }

    /// The functional φ as an operator with left factor 1.
    pub fn functional(phi: &Functional, mode: Mode) -> Self {
        let mut op = IntDiffOperator::zero();
        op.push_bdry(mode, &ClosedForm::one(), phi, &ClosedForm::one());
        op
    }

    /// left·φ∘inner
    pub fn boundary(left: &ClosedForm, phi: &Functional, inner: &ClosedForm, mode: Mode) -> Self {
        let mut op = IntDiffOperator::zero();
        op.push_bdry(mode, left, phi, inner);
        op
    }

    pub fn is_zero(&self) -> bool {
        self.diff.is_empty() && self.int.is_zero() && self.evals.is_empty() && self.coeffs.is_empty() && self.defints.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        *self == IntDiffOperator::identity()
    }

    pub fn has_boundary_part(&self) -> bool {
        !(self.evals.is_empty() && self.coeffs.is_empty() && self.defints.is_empty())
    }

    pub fn diff_part(&self) -> impl Iterator<Item = (&usize, &ClosedForm)> {
        self.diff.iter()
    }

    pub fn int_part(&self) -> &Tensor {
        &self.int
    }

    pub(crate) fn push_diff(&mut self, c: &ClosedForm, j: usize) {
        if c.is_zero() {
            return;
        }
        let v = self.diff.get(&j).map_or_else(|| c.clone(), |o| o.add(c));
        if v.is_zero() {
            self.diff.remove(&j);
        } else {
            self.diff.insert(j, v);
        }
    }

    pub(crate) fn push_int(&mut self, l: &ClosedForm, r: &ClosedForm) {
        if l.is_zero() || r.is_zero() {
            return;
        }
        self.int = self.int.add(&Tensor::from_pair(l, r));
    }

    pub(crate) fn push_eval(&mut self, xi: &Q, j: usize, l: &ClosedForm) {
        if l.is_zero() {
            return;
        }
        let key = (xi.clone(), j);
        let v = self.evals.get(&key).map_or_else(|| l.clone(), |o| o.add(l));
        if v.is_zero() {
            self.evals.remove(&key);
        } else {
            self.evals.insert(key, v);
        }
    }

    fn push_tensor<K: Ord + Clone>(map: &mut BTreeMap<K, Tensor>, key: K, t: Tensor) {
        let v = match map.get(&key) {
            Some(o) => o.add(&t),
            None => t,
        };
        if v.is_zero() {
            map.remove(&key);
        } else {
            map.insert(key, v);
        }
    }

    /// left·c_{k+μ}∘inner; the Laurent part of inner is shifted into the
    /// functional index, the part analytic at 0 is kept (or expanded finitely
    /// in analytic mode).
    pub(crate) fn push_coeff(&mut self, mode: Mode, k: i64, mu: &Q, left: &ClosedForm, inner: &ClosedForm) {
        if left.is_zero() || inner.is_zero() {
            return;
        }
        let (lpart, ppart) = inner.split_laurent();
        let e0 = crate::arith::qi(k) + mu;
        for (c, e) in lpart.laurent_terms().unwrap_or_default() {
            let (k2, mu2) = split_exponent(&(&e0 - &e));
            self.push_coeff_plain(mode, k2, &mu2, &left.scale(&c));
        }
        if ppart.is_zero() {
            return;
        }
        if mode.analytic {
            // c_{k+μ}(x^μr·r·f) = Σ r_i c_{k-i}(f) when μr = μ, f analytic
            for (mur, r) in ppart.parts() {
                if mur != mu || k < 0 {
                    continue;
                }
                let (ord, cs) = r.expand(k);
                for (i, c) in cs.iter().enumerate() {
                    let idx = ord + i as i64;
                    if !c.is_zero() {
                        self.push_coeff_plain(mode, k - idx, &zero(), &left.scale(c));
                    }
                }
            }
        } else {
            IntDiffOperator::push_tensor(&mut self.coeffs, (k, mu.clone()), Tensor::from_pair(left, &ppart));
        }
    }

    fn push_coeff_plain(&mut self, mode: Mode, k: i64, mu: &Q, left: &ClosedForm) {
        if mode.analytic && (k < 0 || !mu.is_zero()) {
            return;
        }
        IntDiffOperator::push_tensor(&mut self.coeffs, (k, mu.clone()), Tensor::from_pair(left, &ClosedForm::one()));
    }

    pub(crate) fn push_defint(&mut self, lo: &Q, hi: &Q, left: &ClosedForm, inner: &ClosedForm) {
        if lo == hi || left.is_zero() || inner.is_zero() {
            return;
        }
        if lo > hi {
            self.push_defint(hi, lo, &left.neg(), inner);
            return;
        }
        IntDiffOperator::push_tensor(&mut self.defints, (lo.clone(), hi.clone()), Tensor::from_pair(left, inner));
    }

    pub(crate) fn push_bdry(&mut self, mode: Mode, left: &ClosedForm, phi: &Functional, inner: &ClosedForm) {
        match phi {
            Functional::PointEval { xi, deriv } => {
                // inner factors on point evaluations are expanded by Leibniz
                if inner.is_one() {
                    self.push_eval(xi, *deriv, left);
                } else {
                    for l in 0..=*deriv {
                        let c = crate::arith::binom(*deriv, l);
                        let v = inner.derivative_n(deriv - l).eval(xi).expect("inner factor must be finite at ξ");
                        self.push_eval(xi, l, &left.scale(&(c * v)));
                    }
                }
            }
            Functional::Coeff { k, mu } => self.push_coeff(mode, *k, mu, left, inner),
            Functional::DefInt { lo, hi } => self.push_defint(lo, hi, left, inner),
        }
    }

    /// Appends every term of `o` under the given mode.
    pub(crate) fn absorb(&mut self, o: &IntDiffOperator, mode: Mode, sign: &Q) {
        for t in o.terms() {
            match t {
                Term::Diff { coef, order } => self.push_diff(&coef.scale(sign), order),
                Term::Int { left, right } => self.push_int(&left.scale(sign), &right),
                Term::Bdry { left, functional, inner } => self.push_bdry(mode, &left.scale(sign), &functional, &inner),
            }
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        out.diff_add(o, &one());
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut out = self.clone();
        out.diff_add(o, &-one());
        out
    }

    /// Term-wise sum that keeps stored tensors untouched (no re-expansion).
    fn diff_add(&mut self, o: &Self, sign: &Q) {
        for (j, c) in &o.diff {
            self.push_diff(&c.scale(sign), *j);
        }
        self.int = self.int.add(&o.int.scale(sign));
        for ((xi, j), l) in &o.evals {
            self.push_eval(xi, *j, &l.scale(sign));
        }
        for (k, t) in &o.coeffs {
            IntDiffOperator::push_tensor(&mut self.coeffs, k.clone(), t.scale(sign));
        }
        for (k, t) in &o.defints {
            IntDiffOperator::push_tensor(&mut self.defints, k.clone(), t.scale(sign));
        }
    }

    pub fn scale(&self, c: &Q) -> Self {
        let mut out = IntDiffOperator::zero();
        out.diff_add(self, c);
        out
    }

    pub fn terms(&self) -> Vec<Term> {
        let mut out = Vec::new();
        for (j, c) in &self.diff {
            out.push(Term::Diff { coef: c.clone(), order: *j });
        }
        for (l, r) in self.int.terms() {
            out.push(Term::Int { left: l, right: r });
        }
        for ((xi, j), l) in &self.evals {
            out.push(Term::Bdry {
                left: l.clone(),
                functional: Functional::PointEval { xi: xi.clone(), deriv: *j },
                inner: ClosedForm::one(),
            });
        }
        for ((k, mu), t) in &self.coeffs {
            for (l, r) in t.by_right() {
                out.push(Term::Bdry { left: l, functional: Functional::Coeff { k: *k, mu: mu.clone() }, inner: r });
            }
        }
        for ((lo, hi), t) in &self.defints {
            for (l, r) in t.by_right() {
                out.push(Term::Bdry { left: l, functional: Functional::DefInt { lo: lo.clone(), hi: hi.clone() }, inner: r });
            }
        }
        out
    }

    /// Number of terms in normal form.
    pub fn len(&self) -> usize {
        self.terms().len()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    /// Re-normalizes for analytic inputs.
    pub fn restrict_to_analytic(&self) -> Self {
        let mut out = IntDiffOperator::zero();
        out.absorb(self, Mode::ANALYTIC, &one());
        out
    }

    /// Normal form of self∘o.
    pub fn compose(&self, o: &Self) -> Result<Self> {
        compose::compose(self, o, Mode::GENERAL)
    }

    /// Normal form of self∘o for analytic inputs.
    pub fn compose_analytic(&self, o: &Self) -> Result<Self> {
        compose::compose(&self.restrict_to_analytic(), &o.restrict_to_analytic(), Mode::ANALYTIC)
    }

    pub fn compose_in(&self, o: &Self, mode: Mode) -> Result<Self> {
        compose::compose(self, o, mode)
    }
}

#[cfg(test)]
mod tests;
