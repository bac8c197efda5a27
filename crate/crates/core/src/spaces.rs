//! Admissible and accessible spaces, their projectors, the exceptional
//! space and the generalized Green's operator.
//!
//! The admissible space is computed by a series ansatz: below an offset j_μ
//! every coefficient is an unknown, above it the function is x^(j_μ+μ)·b_μ(x)
//! with b_μ analytic. Imposing the finite part of the boundary space gives a
//! linear system in the unknowns and in point data b_ν^(i)(ξ). When a row
//! constrains the point data alone, the offset of the lowest class involved is
//! raised by one and the system is rebuilt. Once every row has a pivot among
//! the unknowns, the free unknowns yield the Laurent-polynomial basis and the
//! point data yield the couplings.

use crate::arith::{binom, falling_factorial, fmt_q, one, qi, qpow_rat, zero, Q};
use crate::boundary::{apply_kernel_projector, kernel_projector, BoundaryFunctional, BoundarySpace};
use crate::closed::ClosedForm;
use crate::fuchsian::{fundamental_right_inverse, FuchsianOperator, FundamentalSystem};
use crate::linalg::Matrix;
use crate::opring::{Functional, IntDiffOperator, Mode};
use crate::series::{GenLaurentElement, GenLaurentPoly};
use crate::{Error, Result};
use num_traits::Zero;
use serde_json::{json, Value};
use std::collections::{BTreeMap, BTreeSet};

/// One exponent class x^μ·A_μ of the admissible space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub mu: Q,
    /// Curbing bound: coefficients below k_μ vanish.
    pub k_mu: i64,
    /// Tail offset: the analytic part is x^(j+μ)·b_μ(x).
    pub j: i64,
    /// Laurent polynomials (full exponents, including μ).
    pub basis: Vec<GenLaurentPoly>,
    /// For each basis element the index k of its free coefficient x^(k+μ).
    pub free: Vec<i64>,
}

/// x^? polynomial q multiplying e_ξ D^i(b_ν), landing in class μ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coupling {
    pub mu: Q,
    pub nu: Q,
    pub xi: Q,
    pub deriv: usize,
    pub q: GenLaurentPoly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdmissibleSpaceRepr {
    pub blocks: Vec<Block>,
    pub couplings: Vec<Coupling>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Col {
    A { mu: Q, k: i64 },
    B { nu: Q, xi: Q, i: usize },
}

fn ff_pow(xi: &Q, e: &Q) -> Result<Q> {
    qpow_rat(xi, e).ok_or_else(|| Error::NonRationalValue(format!("{}^{}", fmt_q(xi), fmt_q(e))))
}

/// Executes the ansatz-and-eliminate construction for ⊥B.
pub fn admissible_space(space: &BoundarySpace, trunc: usize) -> Result<AdmissibleSpaceRepr> {
    let finite = space.finite_part();
    let mus = space.mus();
    let mut j: BTreeMap<Q, i64> = BTreeMap::new();
    for (mu, km) in space.curbing() {
        let s = finite.iter().filter_map(|b| b.max_coeff_index(mu)).max().unwrap_or(km - 1);
        j.insert(mu.clone(), s.max(km - 1) + 1);
    }
    for b in &finite {
        for (_, p) in b.terms() {
            if let Functional::Coeff { mu, .. } = p {
                if !j.contains_key(mu) {
                    return Err(Error::NotSemiRegular(format!("condition {b} uses an exponent class outside the indicial data")));
                }
            }
        }
    }
    let mut xis: BTreeSet<Q> = BTreeSet::new();
    let mut max_l = 0;
    for b in &finite {
        for (_, p) in b.terms() {
            if let Functional::PointEval { xi, deriv } = p {
                xis.insert(xi.clone());
                max_l = max_l.max(*deriv);
            }
        }
    }
    let start: BTreeMap<Q, i64> = j.clone();
    loop {
        let mut cols: Vec<Col> = Vec::new();
        for (mu, km) in space.curbing() {
            for k in *km..j[mu] {
                cols.push(Col::A { mu: mu.clone(), k });
            }
        }
        let n_a = cols.len();
        for nu in &mus {
            for xi in &xis {
                for i in 0..=max_l {
                    cols.push(Col::B { nu: nu.clone(), xi: xi.clone(), i });
                }
            }
        }
        let index: BTreeMap<Col, usize> = cols.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
        let mut m = Matrix::zeros(finite.len(), cols.len());
        for (row, b) in finite.iter().enumerate() {
            for (c, p) in b.terms() {
                match p {
                    Functional::Coeff { k, mu } => {
                        let col = index[&Col::A { mu: mu.clone(), k: *k }];
                        m.set(row, col, m.get(row, col) + c);
                    }
                    Functional::PointEval { xi, deriv } => {
                        for (mu, km) in space.curbing() {
                            for k in *km..j[mu] {
                                let e = qi(k) + mu;
                                let v = falling_factorial(&e, *deriv) * ff_pow(xi, &(&e - qi(*deriv as i64)))?;
                                let col = index[&Col::A { mu: mu.clone(), k }];
                                m.set(row, col, m.get(row, col) + c * v);
                            }
                        }
                        // D^l(x^r b)(ξ) = Σ_i C(l,i)·r^(l−i falling)·ξ^(r−l+i)·b^(i)(ξ)
                        for nu in &mus {
                            let r = qi(j[nu]) + nu;
                            for i in 0..=*deriv {
                                let v = binom(*deriv, i)
                                    * falling_factorial(&r, deriv - i)
                                    * ff_pow(xi, &(&r - qi((deriv - i) as i64)))?;
                                let col = index[&Col::B { nu: nu.clone(), xi: xi.clone(), i }];
                                m.set(row, col, m.get(row, col) + c * v);
                            }
                        }
                    }
                    Functional::DefInt { .. } => unreachable!("boundary functionals are local"),
                }
            }
        }
        let (red, piv) = m.rref();
        let constraint = piv.iter().position(|&p| p >= n_a);
        if let Some(row) = constraint {
            // raise the offset of the lowest class the constraint touches
            let nu = (n_a..cols.len())
                .filter(|&c| !red.get(row, c).is_zero())
                .map(|c| match &cols[c] {
                    Col::B { nu, .. } => nu.clone(),
                    Col::A { .. } => unreachable!(),
                })
                .min()
                .unwrap();
            let e = j.get_mut(&nu).unwrap();
            *e += 1;
            if (*e - start[&nu]) as usize > trunc {
                return Err(Error::TruncationExceeded(format!(
                    "eliminating the point conditions needs more than {trunc} extra coefficients"
                )));
            }
            continue;
        }
        return Ok(assemble(space, &j, &cols, n_a, &red, &piv));
    }
}

fn assemble(space: &BoundarySpace, j: &BTreeMap<Q, i64>, cols: &[Col], n_a: usize, red: &Matrix, piv: &[usize]) -> AdmissibleSpaceRepr {
    let exp_of = |c: &Col| match c {
        Col::A { mu, k } => (mu.clone(), qi(*k) + mu),
        Col::B { .. } => unreachable!(),
    };
    let mut blocks: Vec<Block> = space
        .curbing()
        .iter()
        .map(|(mu, km)| Block { mu: mu.clone(), k_mu: *km, j: j[mu], basis: Vec::new(), free: Vec::new() })
        .collect();
    for c in 0..n_a {
        if piv.contains(&c) {
            continue;
        }
        let (mu, e) = exp_of(&cols[c]);
        let mut p = GenLaurentPoly::from_terms([(e, one())]);
        for (row, &pc) in piv.iter().enumerate() {
            let v = red.get(row, c);
            if !v.is_zero() {
                p.add_term(exp_of(&cols[pc]).1, -v.clone());
            }
        }
        let b = blocks.iter_mut().find(|b| b.mu == mu).unwrap();
        b.basis.push(p);
        if let Col::A { k, .. } = &cols[c] {
            b.free.push(*k);
        }
    }
    let mut couplings: Vec<Coupling> = Vec::new();
    for c in n_a..cols.len() {
        let Col::B { nu, xi, i } = &cols[c] else { unreachable!() };
        let mut per: BTreeMap<Q, GenLaurentPoly> = BTreeMap::new();
        for (row, &pc) in piv.iter().enumerate() {
            let v = red.get(row, c);
            if !v.is_zero() {
                let (mu, e) = exp_of(&cols[pc]);
                per.entry(mu).or_default().add_term(e, -v.clone());
            }
        }
        for (mu, q) in per {
            if q.terms().next().is_some() {
                couplings.push(Coupling { mu, nu: nu.clone(), xi: xi.clone(), deriv: *i, q });
            }
        }
    }
    AdmissibleSpaceRepr { blocks, couplings }
}

fn poly_closed(p: &GenLaurentPoly) -> ClosedForm {
    p.terms().fold(ClosedForm::zero(), |acc, (e, c)| acc.add(&ClosedForm::monomial(c.clone(), e)))
}

/// The projector onto ⊥B from the finite representation.
///
/// Per class μ it keeps the tail from x^(j+μ) on, reads the free
/// coefficients against the basis, and adds the couplings driven by the tail
/// data. On elements of ⊥B every part reproduces itself, so P is the identity
/// there; coefficient reads are coordinate functionals of the echelon basis.
///
/// The kernel of this projector is spanned by head monomials and need not
/// contain Ker T. [`ProjectorP::along_kernel`] precomposes with 1 − P_ker,
/// where P_ker projects onto Ker T along ⊥B_reg ⊇ ⊥B; the result is again a
/// projector onto ⊥B and annihilates Ker T.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectorP {
    pub repr: AdmissibleSpaceRepr,
    kernel: Option<(FundamentalSystem, Vec<BoundaryFunctional>)>,
}

pub fn admissible_projector(repr: AdmissibleSpaceRepr) -> ProjectorP {
    ProjectorP { repr, kernel: None }
}

impl ProjectorP {
    /// P∘(1 − P_ker) with P_ker the kernel projector of (T, regular).
    pub fn along_kernel(self, fs: &FundamentalSystem, regular: &[BoundaryFunctional]) -> ProjectorP {
        ProjectorP { kernel: Some((fs.clone(), regular.to_vec())), ..self }
    }

    pub fn is_along_kernel(&self) -> bool {
        self.kernel.is_some()
    }

    pub fn apply_closed(&self, u: &ClosedForm) -> Result<ClosedForm> {
        match &self.kernel {
            None => self.apply_closed_raw(u),
            Some((fs, betas)) => {
                let pk = kernel_projector(fs, betas)?;
                self.apply_closed_raw(&u.sub(&pk.apply_closed(u)?))
            }
        }
    }

    pub fn apply_series(&self, u: &GenLaurentElement) -> Result<GenLaurentElement> {
        match &self.kernel {
            None => self.apply_series_raw(u),
            Some((fs, betas)) => {
                if u.is_exact() {
                    if let Some(cf) = ClosedForm::from_element(u) {
                        if fs.is_exact() {
                            let v = self.apply_closed(&cf)?;
                            let upto = u.precision().map_or(0, |p| crate::arith::split_exponent(&p).0);
                            return Ok(v.to_element(upto));
                        }
                    }
                }
                self.apply_series_raw(&u.sub(&apply_kernel_projector(fs, betas, u)?))
            }
        }
    }

    /// P as an operator, valid on inputs without terms below x^(k_μ).
    pub fn to_operator(&self) -> Result<IntDiffOperator> {
        let raw = self.to_operator_raw()?;
        match &self.kernel {
            None => Ok(raw),
            Some((fs, betas)) => raw.compose(&IntDiffOperator::identity().sub(&kernel_projector(fs, betas)?)),
        }
    }

    fn block(&self, mu: &Q) -> Result<&Block> {
        self.repr
            .blocks
            .iter()
            .find(|b| &b.mu == mu)
            .ok_or_else(|| Error::InvalidInput(format!("component x^{} lies outside the function space", fmt_q(mu))))
    }

    fn apply_closed_raw(&self, u: &ClosedForm) -> Result<ClosedForm> {
        for mu in u.mus() {
            self.block(&mu)?;
        }
        let mut out = ClosedForm::zero();
        let mut tails: BTreeMap<Q, ClosedForm> = BTreeMap::new();
        for b in &self.repr.blocks {
            let comp = ClosedForm::from_part(b.mu.clone(), u.part(&b.mu));
            let mut head = ClosedForm::zero();
            if let Some(ord) = comp.order_in(&b.mu) {
                for k in ord..b.j {
                    head = head.add(&ClosedForm::monomial(u.coeff(k, &b.mu), &(qi(k) + &b.mu)));
                }
            }
            let tail = comp.sub(&head);
            out = out.add(&tail);
            tails.insert(b.mu.clone(), ClosedForm::from_rf(tail.part(&b.mu)).shift(-b.j));
            for (p, k) in b.basis.iter().zip(&b.free) {
                out = out.add(&poly_closed(p).scale(&u.coeff(*k, &b.mu)));
            }
        }
        for c in &self.repr.couplings {
            let v = tails[&c.nu].derivative_n(c.deriv).eval(&c.xi)?;
            out = out.add(&poly_closed(&c.q).scale(&v));
        }
        Ok(out)
    }

    /// Exact elements go through the closed-form path; a truncated element is
    /// admissible input only when no coupling needs its point values.
    fn apply_series_raw(&self, u: &GenLaurentElement) -> Result<GenLaurentElement> {
        if u.is_exact() {
            if let Some(cf) = ClosedForm::from_element(u) {
                let v = self.apply_closed_raw(&cf)?;
                let upto = u.precision().map_or(0, |p| crate::arith::split_exponent(&p).0);
                return Ok(v.to_element(upto));
            }
        }
        if !self.repr.couplings.is_empty() {
            return Err(Error::TruncationExceeded("couplings need exact point values of the tail".into()));
        }
        let mut out = GenLaurentElement::zero();
        for comp in u.components() {
            let b = self.block(comp.mu())?;
            let mut head = GenLaurentElement::zero();
            for k in comp.start()..b.j {
                head = head.add(&GenLaurentElement::monomial(comp.coeff(k)?, &(qi(k) + &b.mu)));
            }
            out = out.add(&GenLaurentElement::from_series(comp.clone()).sub(&head));
            for (p, k) in b.basis.iter().zip(&b.free) {
                out = out.add(&p.to_element().scale(&comp.coeff(*k)?));
            }
        }
        Ok(out)
    }

    /// Only the integer class is supported: other classes would need point
    /// values of x^μ.
    fn to_operator_raw(&self) -> Result<IntDiffOperator> {
        if self.repr.blocks.iter().any(|b| !b.mu.is_zero()) {
            return Err(Error::NotFinitary("the finite projector is built for integer exponents only".into()));
        }
        let Some(b) = self.repr.blocks.first() else {
            return Ok(IntDiffOperator::zero());
        };
        let g = Mode::GENERAL;
        let mut head = IntDiffOperator::zero();
        for k in b.k_mu..b.j {
            head = head.add(&IntDiffOperator::boundary(&ClosedForm::monomial(one(), &qi(k)), &Functional::Coeff { k, mu: zero() }, &ClosedForm::one(), g));
        }
        let tail = IntDiffOperator::identity().sub(&head);
        let mut p = tail.clone();
        for (pb, k) in b.basis.iter().zip(&b.free) {
            p = p.add(&IntDiffOperator::boundary(&poly_closed(pb), &Functional::Coeff { k: *k, mu: zero() }, &ClosedForm::one(), g));
        }
        let unshift = IntDiffOperator::multiplication(ClosedForm::monomial(one(), &qi(-b.j)));
        for c in &self.repr.couplings {
            let phi = IntDiffOperator::functional(&Functional::PointEval { xi: c.xi.clone(), deriv: c.deriv }, g);
            let data = phi.compose(&unshift)?.compose(&tail)?;
            p = p.add(&IntDiffOperator::multiplication(poly_closed(&c.q)).compose(&data)?);
        }
        Ok(p)
    }
}

/// Q = T∘P∘T^◊, kept as a composition and evaluated lazily.
///
/// Its domain is T(F): where T^◊ meets a logarithm the input has no preimage
/// in the function space and the error is passed on.
#[derive(Clone, Debug)]
pub struct ProjectorQ {
    pub t: FuchsianOperator,
    pub p: ProjectorP,
    pub tri: IntDiffOperator,
}

pub fn accessible_projector(t: &FuchsianOperator, p: ProjectorP, tri: IntDiffOperator, fs: &FundamentalSystem) -> Result<ProjectorQ> {
    if let Some(basis) = fs.closed_basis() {
        for u in &basis {
            if !p.apply_closed(u)?.is_zero() {
                return Err(Error::VerificationFailed(format!("P does not annihilate the kernel element {}", u.display("x"))));
            }
        }
    }
    Ok(ProjectorQ { t: t.clone(), p, tri })
}

impl ProjectorQ {
    pub fn apply_closed(&self, f: &ClosedForm) -> Result<ClosedForm> {
        let u = self.tri.apply_closed(f)?;
        Ok(self.t.apply_closed(&self.p.apply_closed(&u)?))
    }

    pub fn apply_series(&self, f: &GenLaurentElement) -> Result<GenLaurentElement> {
        let cf = ClosedForm::from_element(f)
            .filter(|_| f.is_exact())
            .ok_or_else(|| Error::TruncationExceeded("Q is evaluated on exact elements only".into()))?;
        Ok(self.apply_closed(&cf)?.to_element(0))
    }

    /// Q as a normal form for analytic inputs.
    pub fn analytic_operator(&self) -> Result<IntDiffOperator> {
        // only the rightmost factor sees analytic inputs, so fold from the right
        let m = Mode::ANALYTIC;
        let inner = self.p.to_operator()?.compose_in(&self.tri, m)?;
        self.t.to_operator().compose_in(&inner, m)
    }
}

/// Generators of the chosen complement E = Img(1 − Q) within a window.
#[derive(Clone, Debug, PartialEq)]
pub struct ExceptionalSpace {
    /// Per class μ: every monomial x^(k+μ) with k ≤ bound lies in E.
    pub cofinite: Vec<(Q, i64)>,
    /// Further generators, in echelon form where they are Laurent polynomials.
    pub generators: Vec<ClosedForm>,
    /// Monomials with no preimage in the function space.
    pub outside_image: Vec<Q>,
    /// Whether Q fixes every analytic monomial in the window.
    pub analytic_accessible: bool,
    pub window: (i64, i64),
}

impl ExceptionalSpace {
    pub fn is_empty(&self) -> bool {
        self.cofinite.is_empty() && self.generators.is_empty() && self.outside_image.is_empty()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "cofinite": self.cofinite.iter().map(|(m, k)| json!({"mu": fmt_q(m), "k_at_most": k})).collect::<Vec<_>>(),
            "generators": self.generators.iter().map(|g| g.display("x")).collect::<Vec<_>>(),
            "outside_image": self.outside_image.iter().map(fmt_q).collect::<Vec<_>>(),
            "analytic_accessible": self.analytic_accessible,
            "window": [self.window.0, self.window.1],
        })
    }
}

fn obstructed(e: &Error) -> bool {
    matches!(e, Error::LogObstruction(_) | Error::NoClosedAntiderivative(_))
}

/// Scans x^(k+μ) for k in [lo, hi] and collects (1 − Q)x^(k+μ).
pub fn exceptional_space(q: &ProjectorQ, lo: i64, hi: i64) -> Result<ExceptionalSpace> {
    let mut cofinite = Vec::new();
    let mut outside = Vec::new();
    let mut rest: Vec<ClosedForm> = Vec::new();
    let mut analytic_accessible = true;
    for b in &q.p.repr.blocks {
        let mut prefix = true;
        let mut bound = None;
        for k in lo..=hi {
            let e = qi(k) + &b.mu;
            let x = ClosedForm::monomial(one(), &e);
            let w = match q.apply_closed(&x) {
                Ok(v) => x.sub(&v),
                Err(err) if obstructed(&err) => {
                    outside.push(e.clone());
                    x.clone()
                }
                Err(err) => return Err(err),
            };
            if prefix && w == x {
                bound = Some(k);
                continue;
            }
            prefix = false;
            if !w.is_zero() {
                if e >= zero() {
                    analytic_accessible = false;
                }
                rest.push(w);
            }
        }
        if let Some(k) = bound {
            cofinite.push((b.mu.clone(), k));
            outside.retain(|e| *e > qi(k) + &b.mu);
        }
    }
    Ok(ExceptionalSpace { cofinite, generators: echelon(rest), outside_image: outside, analytic_accessible, window: (lo, hi) })
}

/// Reduced echelon basis of the Laurent generators; others are kept as given.
fn echelon(gens: Vec<ClosedForm>) -> Vec<ClosedForm> {
    let (laurent, other): (Vec<_>, Vec<_>) = gens.into_iter().partition(|g| g.laurent_terms().is_some());
    let mut exps: BTreeSet<Q> = BTreeSet::new();
    let rows: Vec<Vec<(Q, Q)>> = laurent.iter().map(|g| g.laurent_terms().unwrap()).collect();
    for r in &rows {
        for (_, e) in r {
            exps.insert(e.clone());
        }
    }
    let exps: Vec<Q> = exps.into_iter().collect();
    let mut m = Matrix::zeros(rows.len(), exps.len());
    for (i, r) in rows.iter().enumerate() {
        for (c, e) in r {
            let j = exps.iter().position(|x| x == e).unwrap();
            m.set(i, j, c.clone());
        }
    }
    let (red, piv) = m.rref();
    let mut out: Vec<ClosedForm> = (0..piv.len())
        .map(|i| {
            (0..exps.len()).fold(ClosedForm::zero(), |acc, j| acc.add(&ClosedForm::monomial(red.get(i, j).clone(), &exps[j])))
        })
        .collect();
    out.extend(other);
    out
}

/// G = (1 − P_ker)∘T^◊∘Q on analytic inputs, where P_ker is the kernel
/// projector of the regular subproblem.
pub fn greens_operator(t: &FuchsianOperator, space: &BoundarySpace, fs: &FundamentalSystem, trunc: usize) -> Result<IntDiffOperator> {
    let tri = fundamental_right_inverse(t, fs)?;
    let p = admissible_projector(admissible_space(space, trunc)?).along_kernel(fs, space.regular_part());
    let q = accessible_projector(t, p, tri.clone(), fs)?;
    greens_from_parts(space, fs, &tri, &q.analytic_operator()?)
}

fn greens_from_parts(space: &BoundarySpace, fs: &FundamentalSystem, tri: &IntDiffOperator, q_an: &IntDiffOperator) -> Result<IntDiffOperator> {
    let m = Mode::ANALYTIC;
    let pk = kernel_projector(fs, space.regular_part())?;
    let inner = tri.compose_in(q_an, m)?;
    IntDiffOperator::identity().sub(&pk).compose_in(&inner, m)
}

/// Everything the four-step program produces for one problem.
#[derive(Clone, Debug)]
pub struct GeneralizedProblem {
    pub t: FuchsianOperator,
    pub fs: FundamentalSystem,
    pub space: BoundarySpace,
    pub repr: AdmissibleSpaceRepr,
    pub tri: IntDiffOperator,
    pub q: ProjectorQ,
    pub q_analytic: IntDiffOperator,
    pub kernel_projector: IntDiffOperator,
    pub green: IntDiffOperator,
    pub exceptional: ExceptionalSpace,
}

impl GeneralizedProblem {
    pub fn new(t: &FuchsianOperator, fs: &FundamentalSystem, space: &BoundarySpace, trunc: usize) -> Result<Self> {
        let repr = admissible_space(space, trunc)?;
        let tri = fundamental_right_inverse(t, fs)?;
        let q = accessible_projector(t, admissible_projector(repr.clone()).along_kernel(fs, space.regular_part()), tri.clone(), fs)?;
        let q_analytic = q.analytic_operator()?;
        let green = greens_from_parts(space, fs, &tri, &q_analytic)?;
        let lowest = repr.blocks.iter().map(|b| b.k_mu).min().unwrap_or(0) - t.order() as i64 - 2;
        let highest = repr.blocks.iter().map(|b| b.j).max().unwrap_or(0) + t.order() as i64 + 2;
        let exceptional = exceptional_space(&q, lowest, highest)?;
        Ok(GeneralizedProblem {
            t: t.clone(),
            fs: fs.clone(),
            space: space.clone(),
            kernel_projector: kernel_projector(fs, space.regular_part())?,
            repr,
            tri,
            q,
            q_analytic,
            green,
            exceptional,
        })
    }

    pub fn p(&self) -> &ProjectorP {
        &self.q.p
    }

    /// Q f on all of F. Monomials in the cofinite families of E are dropped
    /// before Q is applied, so forcings whose preimage under T^◊ would carry
    /// a logarithm are handled as well.
    pub fn apply_q(&self, f: &ClosedForm) -> Result<ClosedForm> {
        let (laurent, _) = f.split_laurent();
        let mut rest = f.clone();
        for (a, e) in laurent.laurent_terms().unwrap_or_default() {
            let in_e = self.exceptional.cofinite.iter().any(|(mu, k)| {
                let d = &e - mu;
                d.is_integer() && d <= qi(*k)
            });
            if in_e {
                rest = rest.sub(&ClosedForm::monomial(a, &e));
            }
        }
        self.q.apply_closed(&rest)
    }

    /// Gf for an analytic (or merely admissible) closed-form forcing.
    pub fn solve_closed(&self, f: &ClosedForm) -> Result<ClosedForm> {
        self.green.apply_closed(f)
    }

    pub fn report(&self) -> Value {
        let blocks: Vec<Value> = self
            .repr
            .blocks
            .iter()
            .map(|b| {
                json!({
                    "mu": fmt_q(&b.mu),
                    "k_mu": b.k_mu,
                    "j": b.j,
                    "basis": b.basis.iter().map(|p| poly_closed(p).display("x")).collect::<Vec<_>>(),
                })
            })
            .collect();
        let couplings: Vec<Value> = self
            .repr
            .couplings
            .iter()
            .map(|c| json!({"mu": fmt_q(&c.mu), "nu": fmt_q(&c.nu), "xi": fmt_q(&c.xi), "deriv": c.deriv, "q": poly_closed(&c.q).display("x")}))
            .collect();
        json!({
            "operator": self.t.display(),
            "fundamental_system": self.fs.solutions.iter().map(|s| match &s.closed {
                Some(c) => c.display("x"),
                None => format!("series x^{} + ...", fmt_q(&s.exponent)),
            }).collect::<Vec<_>>(),
            "boundary_space": self.space.to_json(),
            "admissible": {"blocks": blocks, "couplings": couplings},
            "right_inverse": self.tri.to_string(),
            "kernel_projector": self.kernel_projector.to_string(),
            "exceptional": self.exceptional.to_json(),
        })
    }
}
