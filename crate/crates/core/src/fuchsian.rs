//! Local analysis of a linear differential operator with a regular singular
//! point at 0: indicial polynomial, Frobenius solutions, Wronskian and the
//! fundamental right inverse built by variation of constants.

use crate::arith::{falling_factorial, fmt_q, one, qi, split_exponent, zero, Q};
use crate::closed::{laurent_expand, ClosedForm};
use crate::linalg::Matrix;
use crate::opring::IntDiffOperator;
use crate::poly::Poly;
use crate::ratfunc::RationalFunction;
use crate::series::{GenLaurentElement, GenLaurentSeries, Radius};
use crate::{Error, Result};
use num_traits::Zero;

/// T = Σ_j a_j(x) D^j with rational coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct FuchsianOperator {
    coeffs: Vec<RationalFunction>,
}

impl FuchsianOperator {
    /// Builds the operator and checks that 0 is a regular singular point and
    /// that (0, 1] is free of coefficient poles and leading-coefficient zeros.
    pub fn new(coeffs: Vec<ClosedForm>) -> Result<Self> {
        let mut rf = Vec::with_capacity(coeffs.len());
        for (j, c) in coeffs.iter().enumerate() {
            if c.mus().iter().any(|m| !m.is_zero()) {
                return Err(Error::InvalidInput(format!("coefficient a_{j} has a fractional power of x")));
            }
            rf.push(c.part(&zero()));
        }
        FuchsianOperator::from_rational(rf)
    }

    pub fn from_rational(coeffs: Vec<RationalFunction>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::InvalidInput("operator order must be at least 1".into()));
        }
        if coeffs.last().unwrap().is_zero() {
            return Err(Error::InvalidInput("leading coefficient vanishes".into()));
        }
        let t = FuchsianOperator { coeffs };
        for (j, a) in t.coeffs.iter().enumerate() {
            let d = a.den();
            let v = d.valuation().unwrap_or(0);
            if d.unshift(v).count_roots(&zero(), &one()) > 0 {
                return Err(Error::PoleInInterval(format!("a_{j} = {}", a.display("x"))));
            }
        }
        let an = t.coeffs.last().unwrap().num();
        let v = an.valuation().unwrap_or(0);
        if an.unshift(v).count_roots(&zero(), &one()) > 0 {
            return Err(Error::PoleInInterval("leading coefficient vanishes inside (0,1]".into()));
        }
        t.normalized_shifted()?;
        Ok(t)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, j: usize) -> &RationalFunction {
        &self.coeffs[j]
    }

    pub fn coeffs(&self) -> &[RationalFunction] {
        &self.coeffs
    }

    pub fn leading(&self) -> &RationalFunction {
        self.coeffs.last().unwrap()
    }

    /// q_j = x^(n-j)·a_j/a_n, all required to be analytic at 0.
    fn normalized_shifted(&self) -> Result<Vec<RationalFunction>> {
        let n = self.order();
        let an = self.leading();
        let mut out = Vec::with_capacity(n + 1);
        for (j, a) in self.coeffs.iter().enumerate() {
            let q = (a * &an.recip()?).shift((n - j) as i64);
            if let Some(o) = q.order() {
                if o < 0 {
                    return Err(Error::NotFuchsian(format!(
                        "x^{}·a_{j}/a_{n} has a pole of order {} at 0",
                        n - j,
                        -o
                    )));
                }
            }
            out.push(q);
        }
        Ok(out)
    }

    /// T u for a closed form.
    pub fn apply_closed(&self, u: &ClosedForm) -> ClosedForm {
        let mut acc = ClosedForm::zero();
        let mut d = u.clone();
        for a in &self.coeffs {
            acc = acc.add(&ClosedForm::from_rf(a.clone()).mul(&d));
            d = d.derivative();
        }
        acc
    }

    /// T u on a series; coefficients are expanded through integer index `upto`.
    pub fn apply_series(&self, u: &GenLaurentElement, upto: i64) -> GenLaurentElement {
        let mut acc = GenLaurentElement::zero();
        let mut d = u.clone();
        for a in &self.coeffs {
            let s = GenLaurentElement::from_series(laurent_expand(a, upto));
            acc = acc.add(&s.mul(&d));
            d = d.differentiate();
        }
        acc
    }

    /// Same operator in the variable x = ρ/b: a_j(b·x)/b^j.
    pub fn scale_arg(&self, b: &Q) -> FuchsianOperator {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, a)| a.scale_arg(b).scale(&crate::arith::qpow(b, -(j as i64))))
            .collect();
        FuchsianOperator { coeffs }
    }

    pub fn to_operator(&self) -> IntDiffOperator {
        let mut op = IntDiffOperator::zero();
        for (j, a) in self.coeffs.iter().enumerate() {
            op = op.add(&IntDiffOperator::diff(ClosedForm::from_rf(a.clone()), j));
        }
        op
    }

    /// Monic version a_j/a_n.
    pub fn monic(&self) -> Result<FuchsianOperator> {
        let inv = self.leading().recip()?;
        FuchsianOperator::from_rational(self.coeffs.iter().map(|a| a * &inv).collect())
    }

    /// Lower bound on the radius of convergence of the normalized coefficients.
    pub fn radius(&self) -> Radius {
        let mut r = Radius::Infinite;
        if let Ok(qs) = self.normalized_shifted() {
            for q in qs {
                if let Some(b) = q.den().min_root_modulus_lower_bound() {
                    r = r.min(&Radius::Finite(b));
                }
            }
        }
        r
    }

    pub fn display(&self) -> String {
        let mut parts = Vec::new();
        for (j, a) in self.coeffs.iter().enumerate().rev() {
            if a.is_zero() {
                continue;
            }
            let d = match j {
                0 => String::new(),
                1 => "D".into(),
                _ => format!("D^{j}"),
            };
            parts.push(format!("({}){}", a.display("x"), if d.is_empty() { d } else { format!("*{d}") }));
        }
        parts.join(" + ")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IndicialData {
    /// Indicial polynomial in the exponent variable, monic.
    pub poly: Poly,
    /// Rational roots with multiplicity, ascending.
    pub roots: Vec<Q>,
    /// Distinct fractional parts of the roots, ascending.
    pub mus: Vec<Q>,
}

/// Series data q_{j,m} used by the recursion.
struct Recursion {
    q: Vec<Vec<Q>>,
}

impl Recursion {
    fn new(t: &FuchsianOperator, terms: usize) -> Result<Recursion> {
        let qs = t.normalized_shifted()?;
        let q = qs
            .iter()
            .map(|r| {
                let (ord, c) = r.expand(terms as i64 - 1);
                (0..terms).map(|m| if (m as i64) < ord { zero() } else { c.get(m - ord as usize).cloned().unwrap_or_else(zero) }).collect()
            })
            .collect();
        Ok(Recursion { q })
    }

    /// F_m(s) = Σ_j q_{j,m}·s(s-1)…(s-j+1)
    fn f(&self, m: usize, s: &Q) -> Q {
        let mut acc = zero();
        for (j, qj) in self.q.iter().enumerate() {
            if let Some(c) = qj.get(m) {
                if !c.is_zero() {
                    acc += c * falling_factorial(s, j);
                }
            }
        }
        acc
    }
}

pub fn indicial_data(t: &FuchsianOperator) -> Result<IndicialData> {
    let qs = t.normalized_shifted()?;
    let mut poly = Poly::zero();
    for (j, q) in qs.iter().enumerate() {
        let c = q.coeff_at(0);
        if c.is_zero() {
            continue;
        }
        // s(s-1)…(s-j+1) as a polynomial
        let mut ff = Poly::one();
        for i in 0..j {
            ff = &ff * &Poly::new(vec![qi(-(i as i64)), one()]);
        }
        poly = &poly + &ff.scale(&c);
    }
    let (roots, rest) = poly.rational_roots();
    if rest.degree().unwrap_or(0) > 0 {
        return Err(Error::IrrationalIndicialRoots(rest.display("s")));
    }
    let mut mus: Vec<Q> = roots.iter().map(|r| split_exponent(r).1).collect();
    mus.sort();
    mus.dedup();
    Ok(IndicialData { poly, roots, mus })
}

/// Fails on a repeated root or when a higher root λ+k makes the recursion
/// from λ inconsistent.
pub fn nonresonance_check(t: &FuchsianOperator) -> Result<()> {
    let data = indicial_data(t)?;
    for w in data.roots.windows(2) {
        if w[0] == w[1] {
            return Err(Error::ResonantObstruction(fmt_q(&w[0]), fmt_q(&w[1])));
        }
    }
    for (i, lam) in data.roots.iter().enumerate() {
        let gap = data.roots[i + 1..]
            .iter()
            .filter_map(|r| {
                let d = r - lam;
                d.is_integer().then(|| d.to_integer())
            })
            .max();
        if let Some(g) = gap {
            let g: usize = g.try_into().unwrap();
            frobenius_coeffs(t, lam, g + 1)?;
        }
    }
    Ok(())
}

fn frobenius_coeffs(t: &FuchsianOperator, lam: &Q, terms: usize) -> Result<Vec<Q>> {
    let rec = Recursion::new(t, terms)?;
    let mut c = vec![one()];
    for k in 1..terms {
        let s = lam + qi(k as i64);
        let f0 = rec.f(0, &s);
        let mut rhs = zero();
        for m in 1..=k {
            let prev = &c[k - m];
            if prev.is_zero() {
                continue;
            }
            rhs -= rec.f(m, &(&s - qi(m as i64))) * prev;
        }
        if f0.is_zero() {
            if !rhs.is_zero() {
                return Err(Error::ResonantObstruction(fmt_q(lam), fmt_q(&s)));
            }
            c.push(zero());
        } else {
            c.push(rhs / f0);
        }
    }
    Ok(c)
}

/// x^λ·Σ_{k<terms} c_k x^k with c_0 = 1; the free coefficient at a
/// nonresonant integer gap is set to 0.
pub fn frobenius_solution(t: &FuchsianOperator, lam: &Q, terms: usize) -> Result<GenLaurentElement> {
    let c = frobenius_coeffs(t, lam, terms)?;
    let (k0, mu) = split_exponent(lam);
    Ok(GenLaurentElement::from_series(GenLaurentSeries::new(
        mu,
        k0,
        c,
        Some(k0 + terms as i64),
        t.radius(),
    )))
}

/// Tries to recognize x^λ·φ(x) with φ rational from its Taylor coefficients by
/// Padé approximation, accepting a candidate only if T annihilates it exactly.
pub fn detect_closed_form(t: &FuchsianOperator, lam: &Q, c: &[Q]) -> Option<ClosedForm> {
    let n = c.len();
    const MAX_DEN: usize = 8;
    const MARGIN: usize = 4;
    for total in 0..n.saturating_sub(MARGIN) {
        for m in 0..=total.min(MAX_DEN) {
            let l = total - m;
            let Some(den) = pade_denominator(c, l, m) else { continue };
            // (den·φ) must vanish from l+1 up to the known length
            let prod: Vec<Q> = (0..n)
                .map(|k| (0..=m.min(k)).map(|i| den.coeff(i) * &c[k - i]).fold(zero(), |a, b| a + b))
                .collect();
            if prod[l + 1..].iter().any(|v| !v.is_zero()) {
                continue;
            }
            let num = Poly::new(prod[..=l].to_vec());
            let cand = ClosedForm::monomial(one(), lam).mul(&ClosedForm::from_rf(RationalFunction::new(num, den)));
            if t.apply_closed(&cand).is_zero() {
                return Some(cand);
            }
        }
    }
    None
}

fn pade_denominator(c: &[Q], l: usize, m: usize) -> Option<Poly> {
    if m == 0 {
        return Some(Poly::one());
    }
    // Σ_{i=1..m} Q_i c_{l+j-i} = -c_{l+j}, j = 1..m
    let get = |k: i64| if k < 0 { zero() } else { c.get(k as usize).cloned().unwrap_or_else(zero) };
    let mut a = Matrix::zeros(m, m);
    let mut b = vec![zero(); m];
    for j in 1..=m {
        for i in 1..=m {
            a.set(j - 1, i - 1, get(l as i64 + j as i64 - i as i64));
        }
        b[j - 1] = -get((l + j) as i64);
    }
    let sol = a.solve(&b)?;
    let mut v = vec![one()];
    v.extend(sol);
    let p = Poly::new(v);
    if p.coeff(0).is_zero() {
        return None;
    }
    Some(p)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub exponent: Q,
    pub series: GenLaurentElement,
    pub closed: Option<ClosedForm>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FundamentalSystem {
    pub solutions: Vec<Solution>,
    pub terms: usize,
}

impl FundamentalSystem {
    pub fn n(&self) -> usize {
        self.solutions.len()
    }

    pub fn closed_basis(&self) -> Option<Vec<ClosedForm>> {
        self.solutions.iter().map(|s| s.closed.clone()).collect()
    }

    pub fn series_basis(&self) -> Vec<GenLaurentElement> {
        self.solutions.iter().map(|s| s.series.clone()).collect()
    }

    pub fn is_exact(&self) -> bool {
        self.solutions.iter().all(|s| s.closed.is_some())
    }

    /// A user-supplied closed-form basis, checked against T.
    pub fn from_closed(t: &FuchsianOperator, basis: Vec<ClosedForm>, terms: usize) -> Result<Self> {
        if basis.len() != t.order() {
            return Err(Error::InvalidInput(format!("expected {} basis functions, got {}", t.order(), basis.len())));
        }
        let mut solutions = Vec::new();
        for u in basis {
            if !t.apply_closed(&u).is_zero() {
                return Err(Error::InvalidInput(format!("{} is not annihilated by T", u.display("x"))));
            }
            let exponent = u.order().ok_or(Error::WronskianDegenerate)?;
            let upto = split_exponent(&exponent).0 + terms as i64 - 1;
            solutions.push(Solution { exponent, series: u.to_element(upto), closed: Some(u) });
        }
        let fs = FundamentalSystem { solutions, terms };
        if wronskian_closed(&fs).map_or(true, |w| w.is_zero()) {
            return Err(Error::WronskianDegenerate);
        }
        Ok(fs)
    }
}

/// Frobenius basis, one solution per indicial root, with closed forms
/// attached where they are recognized.
pub fn fundamental_system(t: &FuchsianOperator, terms: usize) -> Result<FundamentalSystem> {
    nonresonance_check(t)?;
    let data = indicial_data(t)?;
    let mut solutions = Vec::new();
    for lam in &data.roots {
        let series = frobenius_solution(t, lam, terms)?;
        let (k0, mu) = split_exponent(lam);
        let comp = series.component(&mu).unwrap();
        let c: Vec<Q> = (0..terms as i64).map(|k| comp.coeff(k0 + k).unwrap()).collect();
        let closed = detect_closed_form(t, lam, &c);
        let series = match &closed {
            Some(cf) if cf.is_laurent() => cf.to_element(0),
            _ => series,
        };
        solutions.push(Solution { exponent: lam.clone(), series, closed });
    }
    Ok(FundamentalSystem { solutions, terms })
}

/// Minimal ring interface for determinants.
pub(crate) trait Ring: Clone {
    fn r_zero() -> Self;
    fn r_add(&self, o: &Self) -> Self;
    fn r_sub(&self, o: &Self) -> Self;
    fn r_mul(&self, o: &Self) -> Self;
}

impl Ring for ClosedForm {
    fn r_zero() -> Self {
        ClosedForm::zero()
    }
    fn r_add(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn r_sub(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn r_mul(&self, o: &Self) -> Self {
        self.mul(o)
    }
}

impl Ring for GenLaurentElement {
    fn r_zero() -> Self {
        GenLaurentElement::zero()
    }
    fn r_add(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn r_sub(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn r_mul(&self, o: &Self) -> Self {
        self.mul(o)
    }
}

pub(crate) fn det<R: Ring>(m: &[Vec<R>]) -> R {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = R::r_zero();
    for j in 0..n {
        let minor: Vec<Vec<R>> = m[1..].iter().map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, v)| v.clone()).collect()).collect();
        let t = m[0][j].r_mul(&det(&minor));
        acc = if j % 2 == 0 { acc.r_add(&t) } else { acc.r_sub(&t) };
    }
    acc
}

/// Cofactors of the last row of the Wronskian matrix.
pub(crate) fn last_row_cofactors<R: Ring>(m: &[Vec<R>]) -> Vec<R> {
    let n = m.len();
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<R>> = m[..n - 1]
                .iter()
                .map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, v)| v.clone()).collect())
                .collect();
            let d = det(&minor);
            if (n - 1 + j) % 2 == 0 {
                d
            } else {
                R::r_zero().r_sub(&d)
            }
        })
        .collect()
}

fn wronskian_matrix<R: Ring>(basis: &[R], deriv: impl Fn(&R) -> R) -> Vec<Vec<R>> {
    let n = basis.len();
    let mut rows = vec![basis.to_vec()];
    for i in 1..n {
        rows.push(rows[i - 1].iter().map(&deriv).collect());
    }
    rows
}

pub fn wronskian(fs: &FundamentalSystem) -> GenLaurentElement {
    let b = fs.series_basis();
    det(&wronskian_matrix(&b, |u: &GenLaurentElement| u.differentiate()))
}

pub fn wronskian_closed(fs: &FundamentalSystem) -> Option<ClosedForm> {
    let b = fs.closed_basis()?;
    Some(det(&wronskian_matrix(&b, |u: &ClosedForm| u.derivative())))
}

/// Weights w_j = C_{n-1,j}/(W·a_n) of the variation-of-constants formula.
pub fn right_inverse_weights(t: &FuchsianOperator, fs: &FundamentalSystem) -> Result<Vec<ClosedForm>> {
    let b = fs.closed_basis().ok_or_else(|| {
        Error::InvalidInput("no closed-form fundamental system; use the series right inverse".into())
    })?;
    let m = wronskian_matrix(&b, |u: &ClosedForm| u.derivative());
    let w = det(&m);
    if w.is_zero() {
        return Err(Error::WronskianDegenerate);
    }
    let denom = w.mul(&ClosedForm::from_rf(t.leading().clone()));
    let cof = if b.len() == 1 { vec![ClosedForm::one()] } else { last_row_cofactors(&m) };
    cof.iter().map(|c| c.div(&denom)).collect()
}

/// T^◊ = Σ_j u_j·A·w_j with A the integral from 1.
pub fn fundamental_right_inverse(t: &FuchsianOperator, fs: &FundamentalSystem) -> Result<IntDiffOperator> {
    let w = right_inverse_weights(t, fs)?;
    let b = fs.closed_basis().unwrap();
    let mut op = IntDiffOperator::zero();
    for (u, wj) in b.iter().zip(&w) {
        op = op.add(&IntDiffOperator::integral(u.clone(), wj.clone()));
    }
    Ok(op)
}

/// The same right inverse evaluated purely on truncated series.
pub fn apply_right_inverse_series(t: &FuchsianOperator, fs: &FundamentalSystem, f: &GenLaurentElement) -> Result<GenLaurentElement> {
    let b = fs.series_basis();
    let terms = fs.terms;
    let m = wronskian_matrix(&b, |u: &GenLaurentElement| u.differentiate());
    let w = det(&m);
    let upto = terms as i64;
    let an = GenLaurentElement::from_series(laurent_expand(t.leading(), upto));
    let denom = w.mul(&an);
    if denom.is_zero() {
        return Err(Error::WronskianDegenerate);
    }
    let inv = denom.inverse(terms)?;
    let cof = if b.len() == 1 { vec![GenLaurentElement::one()] } else { last_row_cofactors(&m) };
    let mut acc = GenLaurentElement::zero();
    for (u, c) in b.iter().zip(&cof) {
        let integrand = c.mul(&inv).mul(f);
        acc = acc.add(&u.mul(&integrand.integrate_rb()?));
    }
    Ok(acc)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::q;
    use crate::expr::parse_expr;

    fn op(cs: &[&str]) -> FuchsianOperator {
        FuchsianOperator::new(cs.iter().map(|s| parse_expr(s).unwrap()).collect()).unwrap()
    }

    fn simple() -> FuchsianOperator {
        op(&["-1/x^2", "1/x", "1"])
    }

    #[test]
    fn indicial_roots() {
        assert_eq!(indicial_data(&simple()).unwrap().roots, vec![qi(-1), qi(1)]);
        assert_eq!(indicial_data(&op(&["2/x^2", "4/x", "1"])).unwrap().roots, vec![qi(-2), qi(-1)]);
        let frac = indicial_data(&op(&["0", "1/(2*x)", "1"])).unwrap();
        assert_eq!(frac.roots, vec![qi(0), q(1, 2)]);
        assert_eq!(frac.mus, vec![qi(0), q(1, 2)]);
    }

    #[test]
    fn rejects_irregular_and_irrational() {
        let bad = FuchsianOperator::new(vec![parse_expr("1/x^3").unwrap(), parse_expr("0").unwrap(), parse_expr("1").unwrap()]);
        assert!(matches!(bad, Err(Error::NotFuchsian(_))));
        assert!(matches!(indicial_data(&op(&["-1/x^2", "0", "1"])), Err(Error::IrrationalIndicialRoots(_))));
        let pole = FuchsianOperator::new(vec![parse_expr("1/(2*x-1)").unwrap(), parse_expr("1").unwrap()]);
        assert!(matches!(pole, Err(Error::PoleInInterval(_))));
    }

    #[test]
    fn resonance_detection() {
        // Euler operator with a double root
        let double = op(&["1/x^2", "-1/x", "1"]);
        assert!(matches!(nonresonance_check(&double), Err(Error::ResonantObstruction(_, _))));
        // Bessel of order 1/2 shifted: roots 0 and 1 with log-free solutions
        assert!(nonresonance_check(&simple()).is_ok());
        // x u'' + u = 0 style: roots 0, 1 and a logarithmic solution
        let log = op(&["1/x", "0", "1"]);
        assert!(matches!(nonresonance_check(&log), Err(Error::ResonantObstruction(_, _))));
    }

    #[test]
    fn frobenius_recovers_closed_forms() {
        let fs = fundamental_system(&simple(), 20).unwrap();
        let b = fs.closed_basis().unwrap();
        assert_eq!(b, vec![parse_expr("1/x").unwrap(), parse_expr("x").unwrap()]);
        assert_eq!(wronskian_closed(&fs).unwrap(), parse_expr("2/x").unwrap());
    }

    #[test]
    fn frobenius_series_solves_operator() {
        // plate operator in ρ, rescaled so that the pole at ρ = 1 sits at x = 10/9
        let rf = |s: &str| parse_expr(s).unwrap().part(&qi(0));
        let plate = FuchsianOperator {
            coeffs: vec![rf("-(1/(1-x) + 1/x)/x"), rf("1/x - 3/(1-x)"), rf("1")],
        };
        let t = plate.scale_arg(&q(9, 10));
        assert!(FuchsianOperator::from_rational(t.coeffs().to_vec()).is_ok());
        let fs = fundamental_system(&t, 24).unwrap();
        assert!(fs.is_exact());
        let data = indicial_data(&t).unwrap();
        for lam in &data.roots {
            let u = frobenius_solution(&t, lam, 12).unwrap();
            let r = t.apply_series(&u, 20);
            for s in r.components() {
                assert!(s.is_zero(), "residual {r}");
            }
        }
    }

    #[test]
    fn right_inverse_of_simple_operator() {
        let t = simple();
        let fs = fundamental_system(&t, 20).unwrap();
        let ri = fundamental_right_inverse(&t, &fs).unwrap();
        let want = IntDiffOperator::integral(parse_expr("x/2").unwrap(), ClosedForm::one())
            .sub(&IntDiffOperator::integral(parse_expr("1/(2*x)").unwrap(), parse_expr("x^2").unwrap()));
        assert_eq!(ri, want);
        let f = parse_expr("x^3 - 2*x + 7").unwrap();
        assert_eq!(t.apply_closed(&ri.apply_closed(&f).unwrap()), f);
    }

    #[test]
    fn series_right_inverse_and_abel() {
        // Bessel operator of order 1/2: roots ±1/2, no logarithm
        let t = op(&["1 - 1/(4*x^2)", "1/x", "1"]);
        let fs = fundamental_system(&t, 16).unwrap();
        let w = wronskian(&fs);
        // W'/W + p_1 = 0 through the known order
        let p1 = GenLaurentElement::from_series(laurent_expand(t.coeff(1), 10));
        let abel = w.differentiate().add(&p1.mul(&w));
        for s in abel.components() {
            assert!(s.is_zero(), "{abel}");
        }
        let f = GenLaurentElement::one();
        let u = apply_right_inverse_series(&t, &fs, &f).unwrap();
        let r = t.apply_series(&u, 20).sub(&f);
        for s in r.components() {
            assert!(s.is_zero(), "{r}");
        }
    }
}
