//! Reduced rational functions N/D over Q with monic denominator.

use crate::arith::{one, qi, zero, Q};
use crate::poly::Poly;
use crate::Error;
use num_traits::Zero;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalFunction {
    num: Poly,
    den: Poly,
}

impl RationalFunction {
    pub fn new(num: Poly, den: Poly) -> RationalFunction {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return RationalFunction::zero();
        }
        let g = Poly::gcd(&num, &den);
        let (mut n, mut d) = (num.exact_div(&g), den.exact_div(&g));
        let l = d.lead().recip();
        n = n.scale(&l);
        d = d.scale(&l);
        RationalFunction { num: n, den: d }
    }

    pub fn zero() -> RationalFunction {
        RationalFunction { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> RationalFunction {
        RationalFunction::from_poly(Poly::one())
    }

    pub fn constant(a: Q) -> RationalFunction {
        RationalFunction::from_poly(Poly::constant(a))
    }

    pub fn from_poly(p: Poly) -> RationalFunction {
        RationalFunction { num: p, den: Poly::one() }
    }

    /// a·x^k for any integer k.
    pub fn monomial(a: Q, k: i64) -> RationalFunction {
        if k >= 0 {
            RationalFunction::from_poly(Poly::monomial(a, k as usize))
        } else {
            RationalFunction::new(Poly::constant(a), Poly::monomial(one(), (-k) as usize))
        }
    }

    pub fn x() -> RationalFunction {
        RationalFunction::monomial(one(), 1)
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn as_constant(&self) -> Option<Q> {
        if self.den.is_one() && self.num.degree().unwrap_or(0) == 0 {
            Some(self.num.coeff(0))
        } else {
            None
        }
    }

    pub fn scale(&self, a: &Q) -> RationalFunction {
        if a.is_zero() {
            return RationalFunction::zero();
        }
        RationalFunction { num: self.num.scale(a), den: self.den.clone() }
    }

    /// Multiplies by x^k.
    pub fn shift(&self, k: i64) -> RationalFunction {
        self * &RationalFunction::monomial(one(), k)
    }

    pub fn recip(&self) -> Result<RationalFunction, Error> {
        if self.is_zero() {
            return Err(Error::InvalidInput("division by the zero function".into()));
        }
        Ok(RationalFunction::new(self.den.clone(), self.num.clone()))
    }

    pub fn derivative(&self) -> RationalFunction {
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        RationalFunction::new(n, &self.den * &self.den)
    }

    pub fn eval(&self, x: &Q) -> Result<Q, Error> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return Err(Error::PoleInInterval(format!("pole at x = {}", crate::arith::fmt_q(x))));
        }
        Ok(self.num.eval(x) / d)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.num.eval_f64(x) / self.den.eval_f64(x)
    }

    /// r(b·x)
    pub fn scale_arg(&self, b: &Q) -> RationalFunction {
        RationalFunction::new(self.num.scale_arg(b), self.den.scale_arg(b))
    }

    /// Denominator is a power of x.
    pub fn is_laurent(&self) -> bool {
        self.den.is_monomial()
    }

    /// Order at 0: valuation(num) - valuation(den). None for zero.
    pub fn order(&self) -> Option<i64> {
        let vn = self.num.valuation()? as i64;
        let vd = self.den.valuation().unwrap_or(0) as i64;
        Some(vn - vd)
    }

    /// Laurent coefficients for exponents order..=upto.
    pub fn expand(&self, upto: i64) -> (i64, Vec<Q>) {
        let Some(ord) = self.order() else { return (0, vec![]) };
        if upto < ord {
            return (ord, vec![]);
        }
        let vd = self.den.valuation().unwrap_or(0);
        let vn = self.num.valuation().unwrap();
        let d = self.den.unshift(vd);
        let n = self.num.unshift(vn);
        let len = (upto - ord + 1) as usize;
        // power-series division n/d with d(0) != 0
        let d0inv = d.coeff(0).recip();
        let mut out: Vec<Q> = Vec::with_capacity(len);
        for k in 0..len {
            let mut acc = n.coeff(k);
            for j in 1..=k.min(d.degree().unwrap_or(0)) {
                acc -= d.coeff(j) * &out[k - j];
            }
            out.push(acc * &d0inv);
        }
        (ord, out)
    }

    /// Coefficient of x^k in the Laurent expansion at 0.
    pub fn coeff_at(&self, k: i64) -> Q {
        let (ord, c) = self.expand(k);
        if k < ord {
            return zero();
        }
        c.get((k - ord) as usize).cloned().unwrap_or_else(zero)
    }

    /// Writes r = L + P/D with L a Laurent polynomial (as x^-a·poly) and D(0) != 0, deg P < deg D.
    /// Returns (laurent part, proper part).
    pub fn split_laurent(&self) -> (RationalFunction, RationalFunction) {
        let a = self.den.valuation().unwrap_or(0);
        let d = self.den.unshift(a);
        if d.degree() == Some(0) {
            return (self.clone(), RationalFunction::zero());
        }
        let xa = Poly::monomial(one(), a);
        // s·x^a + t·d = 1
        let (_, s, _) = Poly::ext_gcd(&xa, &d);
        let r = (&self.num * &s).div_rem(&d).1;
        let l = (&self.num - &(&r * &xa)).exact_div(&d);
        (RationalFunction::new(l, xa), RationalFunction::new(r, d))
    }

    /// Antiderivative that is itself rational, if one exists.
    pub fn rational_antiderivative(&self) -> Option<RationalFunction> {
        if self.is_zero() {
            return Some(RationalFunction::zero());
        }
        let (qpart, rem) = self.num.div_rem(&self.den);
        let mut out = RationalFunction::from_poly(poly_integral(&qpart));
        if rem.is_zero() {
            return Some(out);
        }
        let d = &self.den;
        let e = Poly::gcd(d, &d.derivative());
        let e2 = &e * &e;
        if !d.divides(&e2) {
            return None;
        }
        let m = e2.exact_div(d);
        let rhs = &rem * &m;
        let de = e.degree().unwrap_or(0);
        if de == 0 {
            return None;
        }
        // solve P'E - P E' = rhs for P with deg P < deg E
        let ed = e.derivative();
        let cols: Vec<Poly> = (0..de)
            .map(|k| {
                let pk = Poly::monomial(one(), k);
                &(&pk.derivative() * &e) - &(&pk * &ed)
            })
            .collect();
        let rows = cols.iter().map(|c| c.c_len()).chain([rhs.c_len()]).max().unwrap_or(0);
        let mut mat = crate::linalg::Matrix::zeros(rows, de);
        let mut b = vec![zero(); rows];
        for (j, c) in cols.iter().enumerate() {
            for i in 0..rows {
                mat.set(i, j, c.coeff(i));
            }
        }
        for (i, bi) in b.iter_mut().enumerate() {
            *bi = rhs.coeff(i);
        }
        let sol = mat.solve(&b)?;
        out = &out + &RationalFunction::new(Poly::new(sol), e);
        Some(out)
    }

    pub fn display(&self, var: &str) -> String {
        if self.den.is_one() {
            return self.num.display(var);
        }
        let n = self.num.display(var);
        let d = self.den.display(var);
        let wrap = |s: String, p: &Poly| {
            if p.coeffs().iter().filter(|a| !a.is_zero()).count() > 1 {
                format!("({s})")
            } else {
                s
            }
        };
        format!("{}/{}", wrap(n, &self.num), wrap(d, &self.den))
    }
}

trait CLen {
    fn c_len(&self) -> usize;
}
impl CLen for Poly {
    fn c_len(&self) -> usize {
        self.coeffs().len()
    }
}

pub fn poly_integral(p: &Poly) -> Poly {
    let mut c = vec![zero()];
    for (k, a) in p.coeffs().iter().enumerate() {
        c.push(a / qi(k as i64 + 1));
    }
    Poly::new(c)
}

impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, o: &RationalFunction) -> RationalFunction {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            return RationalFunction::new(&self.num + &o.num, self.den.clone());
        }
        let g = Poly::gcd(&self.den, &o.den);
        let a = o.den.exact_div(&g);
        let b = self.den.exact_div(&g);
        RationalFunction::new(&(&self.num * &a) + &(&o.num * &b), &self.den * &a)
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, o: &RationalFunction) -> RationalFunction {
        self + &(-o)
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction { num: -&self.num, den: self.den.clone() }
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, o: &RationalFunction) -> RationalFunction {
        if self.is_zero() || o.is_zero() {
            return RationalFunction::zero();
        }
        RationalFunction::new(&self.num * &o.num, &self.den * &o.den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::q;

    fn rf(n: &[i64], d: &[i64]) -> RationalFunction {
        RationalFunction::new(Poly::from_ints(n), Poly::from_ints(d))
    }

    #[test]
    fn reduces_and_normalizes() {
        let r = rf(&[-2, 2], &[-2, 0, 2]);
        assert_eq!(r, rf(&[1], &[1, 1]));
    }

    #[test]
    fn expansion_of_geometric_series() {
        let (ord, c) = rf(&[1], &[1, -1]).expand(3);
        assert_eq!(ord, 0);
        assert_eq!(c, vec![qi(1), qi(1), qi(1), qi(1)]);
        let (ord, c) = rf(&[1, 1], &[0, 0, 1]).expand(0);
        assert_eq!(ord, -2);
        assert_eq!(c, vec![qi(1), qi(1), qi(0)]);
    }

    #[test]
    fn laurent_split_recombines() {
        let r = rf(&[3, 0, 1], &[0, 0, 1, -1]);
        let (l, p) = r.split_laurent();
        assert!(l.is_laurent());
        assert!(!p.den().coeff(0).is_zero());
        assert_eq!(&l + &p, r);
    }

    #[test]
    fn antiderivatives() {
        // d/dx 1/(1-x) = 1/(1-x)^2
        let r = rf(&[1], &[1, -2, 1]);
        let a = r.rational_antiderivative().unwrap();
        assert_eq!(a.derivative(), r);
        assert!(rf(&[1], &[1, 1]).rational_antiderivative().is_none());
        let p = rf(&[0, 0, 3], &[1]);
        assert_eq!(p.rational_antiderivative().unwrap(), rf(&[0, 0, 0, 1], &[1]));
        let _ = q(1, 2);
    }
}
