//! Dense univariate polynomials over Q, lowest degree first.

use crate::arith::{fmt_q, one, qi, zero, Q};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Poly {
    c: Vec<Q>,
}

impl Poly {
    pub fn new(mut c: Vec<Q>) -> Poly {
        while c.last().map_or(false, |x| x.is_zero()) {
            c.pop();
        }
        Poly { c }
    }

    pub fn zero() -> Poly {
        Poly { c: vec![] }
    }

    pub fn one() -> Poly {
        Poly::constant(one())
    }

    pub fn constant(a: Q) -> Poly {
        Poly::new(vec![a])
    }

    /// a·x^k
    pub fn monomial(a: Q, k: usize) -> Poly {
        let mut c = vec![zero(); k + 1];
        c[k] = a;
        Poly::new(c)
    }

    pub fn x() -> Poly {
        Poly::monomial(one(), 1)
    }

    pub fn from_ints(c: &[i64]) -> Poly {
        Poly::new(c.iter().map(|&v| qi(v)).collect())
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.c
    }

    pub fn coeff(&self, k: usize) -> Q {
        self.c.get(k).cloned().unwrap_or_else(zero)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.c.len() == 1 && self.c[0].is_one()
    }

    /// Degree; the zero polynomial has none.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn lead(&self) -> Q {
        self.c.last().cloned().unwrap_or_else(zero)
    }

    /// Order of vanishing at 0.
    pub fn valuation(&self) -> Option<usize> {
        self.c.iter().position(|a| !a.is_zero())
    }

    pub fn is_monomial(&self) -> bool {
        self.c.iter().filter(|a| !a.is_zero()).count() == 1
    }

    pub fn scale(&self, a: &Q) -> Poly {
        if a.is_zero() {
            return Poly::zero();
        }
        Poly { c: self.c.iter().map(|x| x * a).collect() }
    }

    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![zero(); k];
        c.extend(self.c.iter().cloned());
        Poly { c }
    }

    /// Drops the factor x^k; the caller guarantees divisibility.
    pub fn unshift(&self, k: usize) -> Poly {
        Poly::new(self.c.iter().skip(k).cloned().collect())
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let l = self.lead().recip();
        self.scale(&l)
    }

    pub fn eval(&self, x: &Q) -> Q {
        let mut acc = zero();
        for a in self.c.iter().rev() {
            acc = acc * x + a;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for a in self.c.iter().rev() {
            acc = acc * x + crate::arith::to_f64(a);
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(self.c.iter().enumerate().skip(1).map(|(i, a)| a * qi(i as i64)).collect())
    }

    /// p(b·x)
    pub fn scale_arg(&self, b: &Q) -> Poly {
        let mut f = one();
        let mut c = Vec::with_capacity(self.c.len());
        for a in &self.c {
            c.push(a * &f);
            f *= b;
        }
        Poly::new(c)
    }

    /// p(x + h)
    pub fn translate(&self, h: &Q) -> Poly {
        let mut acc = Poly::zero();
        let lin = Poly::new(vec![h.clone(), one()]);
        for a in self.c.iter().rev() {
            acc = &(&acc * &lin) + &Poly::constant(a.clone());
        }
        acc
    }

    pub fn pow(&self, e: usize) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.c.len() - 1;
        let inv = d.lead().recip();
        let mut r = self.c.clone();
        if r.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut qv = vec![zero(); r.len() - dd];
        for i in (0..qv.len()).rev() {
            let t = &r[i + dd] * &inv;
            if !t.is_zero() {
                for (j, b) in d.c.iter().enumerate() {
                    let v = &r[i + j] - &t * b;
                    r[i + j] = v;
                }
            }
            qv[i] = t;
        }
        r.truncate(dd);
        (Poly::new(qv), Poly::new(r))
    }

    /// Quotient when the division is known to be exact.
    pub fn exact_div(&self, d: &Poly) -> Poly {
        let (q, r) = self.div_rem(d);
        debug_assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    pub fn divides(&self, other: &Poly) -> bool {
        other.div_rem(self).1.is_zero()
    }

    /// Monic gcd; gcd(0,0) = 0.
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_zero() {
            let r = x.div_rem(&y).1;
            x = y;
            y = r.primitive_like();
        }
        x.monic()
    }

    /// Rescales by a rational to keep coefficient growth down in remainder sequences.
    fn primitive_like(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.monic()
    }

    pub fn lcm(a: &Poly, b: &Poly) -> Poly {
        if a.is_zero() || b.is_zero() {
            return Poly::zero();
        }
        let g = Poly::gcd(a, b);
        (&a.exact_div(&g) * b).monic()
    }

    /// (g, s, t) with s·a + t·b = g monic.
    pub fn ext_gcd(a: &Poly, b: &Poly) -> (Poly, Poly, Poly) {
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (Poly::one(), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (qq, r) = r0.div_rem(&r1);
            let s = &s0 - &(&qq * &s1);
            let t = &t0 - &(&qq * &t1);
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
            t0 = t1;
            t1 = t;
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let l = r0.lead().recip();
        (r0.scale(&l), s0.scale(&l), t0.scale(&l))
    }

    pub fn squarefree_part(&self) -> Poly {
        if self.degree().unwrap_or(0) == 0 {
            return self.monic();
        }
        let g = Poly::gcd(self, &self.derivative());
        self.exact_div(&g).monic()
    }

    /// Integer polynomial with the same roots.
    pub fn integer_coeffs(&self) -> Vec<BigInt> {
        let mut l = BigInt::one();
        for a in &self.c {
            l = l.lcm(a.denom());
        }
        let v: Vec<BigInt> = self.c.iter().map(|a| (a * Q::from_integer(l.clone())).to_integer()).collect();
        let mut g = BigInt::zero();
        for a in &v {
            g = g.gcd(a);
        }
        if g.is_zero() {
            return v;
        }
        v.into_iter().map(|a| a / &g).collect()
    }

    /// All rational roots with multiplicity, ascending.
    pub fn rational_roots(&self) -> (Vec<Q>, Poly) {
        let mut p = self.clone();
        let mut roots = Vec::new();
        if p.is_zero() {
            return (roots, p);
        }
        while p.coeff(0).is_zero() && p.degree().unwrap_or(0) > 0 {
            roots.push(zero());
            p = p.unshift(1);
        }
        loop {
            let Some(deg) = p.degree() else { break };
            if deg == 0 {
                break;
            }
            let ic = p.integer_coeffs();
            let a0 = ic[0].abs();
            let an = ic[ic.len() - 1].abs();
            let mut found = None;
            'outer: for num in divisors(&a0) {
                for den in divisors(&an) {
                    for s in [1i64, -1] {
                        let r = Q::new(&num * BigInt::from(s), den.clone());
                        if p.eval(&r).is_zero() {
                            found = Some(r);
                            break 'outer;
                        }
                    }
                }
            }
            match found {
                Some(r) => {
                    p = p.exact_div(&Poly::new(vec![-r.clone(), one()]));
                    roots.push(r);
                }
                None => break,
            }
        }
        roots.sort();
        (roots, p)
    }

    /// Sturm sequence of a squarefree polynomial.
    fn sturm(&self) -> Vec<Poly> {
        let mut seq = vec![self.clone(), self.derivative()];
        loop {
            let n = seq.len();
            if seq[n - 1].is_zero() {
                seq.pop();
                break;
            }
            let r = seq[n - 2].div_rem(&seq[n - 1]).1;
            if r.is_zero() {
                break;
            }
            let l = r.lead().abs().recip();
            seq.push(-&r.scale(&l));
        }
        seq
    }

    fn sign_changes(seq: &[Poly], x: &Q) -> usize {
        let mut last = 0i8;
        let mut n = 0;
        for p in seq {
            let v = p.eval(x);
            let s = if v.is_positive() { 1 } else if v.is_negative() { -1 } else { 0 };
            if s != 0 {
                if last != 0 && s != last {
                    n += 1;
                }
                last = s;
            }
        }
        n
    }

    /// Number of distinct real roots in the half-open interval (a, b].
    pub fn count_roots(&self, a: &Q, b: &Q) -> usize {
        if self.degree().unwrap_or(0) == 0 {
            return 0;
        }
        let s = self.squarefree_part().sturm();
        Poly::sign_changes(&s, a) - Poly::sign_changes(&s, b)
    }

    /// Cauchy bound: every root satisfies |z| < bound.
    pub fn root_bound(&self) -> Q {
        let l = self.lead().abs();
        let m = self.c.iter().take(self.c.len().saturating_sub(1)).map(|a| a.abs()).max().unwrap_or_else(zero);
        one() + m / l
    }

    /// Rational lower bound for the smallest modulus of a root, exact for real-rooted input.
    /// Returns None for constants (no roots). Roots at 0 are ignored.
    pub fn min_root_modulus_lower_bound(&self) -> Option<Q> {
        let mut p = self.squarefree_part();
        if let Some(v) = p.valuation() {
            p = p.unshift(v);
        }
        let d = p.degree()?;
        if d == 0 {
            return None;
        }
        let big = p.root_bound();
        let real = p.count_roots(&-&big, &big);
        if real == d {
            // isolate the smallest |root| by bisection on (0, r] and [-r, 0)
            let mut lo = zero();
            let mut hi = big;
            let eps = crate::arith::q(1, 1 << 30);
            let count = |r: &Q| p.count_roots(&zero(), r) + p.count_roots(&-r, &zero());
            while &hi - &lo > eps {
                let mid = (&lo + &hi) / qi(2);
                if count(&mid) > 0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Some(lo);
        }
        // Cauchy lower bound: positive root of |p0| - sum |pk| r^k
        let mut aux = vec![p.coeff(0).abs()];
        aux.extend(p.c.iter().skip(1).map(|a| -a.abs()));
        let aux = Poly::new(aux);
        let mut lo = zero();
        let mut hi = one();
        while aux.eval(&hi).is_positive() {
            hi = hi * qi(2);
        }
        let eps = crate::arith::q(1, 1 << 30);
        while &hi - &lo > eps {
            let mid = (&lo + &hi) / qi(2);
            if aux.eval(&mid).is_positive() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(lo)
    }

    pub fn display(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, a) in self.c.iter().enumerate().rev() {
            if a.is_zero() {
                continue;
            }
            let neg = a.is_negative();
            let mag = a.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = match k {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{k}"),
            };
            if k == 0 {
                out.push_str(&fmt_q(&mag));
            } else if mag.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{}*{}", fmt_q(&mag), mono));
            }
        }
        out
    }
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    if n.is_zero() {
        return vec![BigInt::one()];
    }
    let mut out = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= *n {
        if (n % &d).is_zero() {
            out.push(d.clone());
            let o = n / &d;
            if o != d {
                out.push(o);
            }
        }
        d += 1;
    }
    out.sort();
    out
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        Poly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        Poly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { c: self.c.iter().map(|a| -a).collect() }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::new(c)
    }
}
