//! Boundary functionals, boundary spaces and the regular subproblem.
//!
//! A boundary space is kept in finite presentation: the `n` functionals of
//! the regular subproblem, the annexed extras, and per exponent class μ a
//! curbing family {c_{k+μ} : k < k_μ}.

use crate::arith::{fmt_q, one, parse_q, qi, split_exponent, zero, Q};
use crate::closed::ClosedForm;
use crate::fuchsian::{FundamentalSystem, Solution};
use crate::linalg::Matrix;
use crate::opring::print::functional_name;
use crate::opring::{Functional, IntDiffOperator, Mode};
use crate::series::GenLaurentElement;
use crate::{Error, Result};
use num_traits::{One, Zero};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::fmt;

/// Finite linear combination of point derivatives and coefficient functionals.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct BoundaryFunctional {
    terms: Vec<(Q, Functional)>,
}

impl BoundaryFunctional {
    pub fn new(terms: Vec<(Q, Functional)>) -> Result<Self> {
        for (_, phi) in &terms {
            match phi {
                Functional::PointEval { xi, .. } => {
                    if *xi <= zero() || *xi > one() {
                        return Err(Error::InvalidInput(format!("evaluation point {} outside (0,1]", fmt_q(xi))));
                    }
                }
                Functional::Coeff { .. } => {}
                Functional::DefInt { .. } => {
                    return Err(Error::InvalidInput("integral conditions are not local".into()));
                }
            }
        }
        Ok(Self::normalized(terms))
    }

    fn normalized(terms: Vec<(Q, Functional)>) -> Self {
        let mut acc: BTreeMap<Functional, Q> = BTreeMap::new();
        for (c, phi) in terms {
            *acc.entry(phi).or_insert_with(zero) += c;
        }
        BoundaryFunctional { terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).map(|(p, c)| (c, p)).collect() }
    }

    /// c_{k+μ}
    pub fn coeff(k: i64, mu: Q) -> Self {
        BoundaryFunctional { terms: vec![(one(), Functional::Coeff { k, mu })] }
    }

    /// e_ξ D^j
    pub fn eval(xi: Q, deriv: usize) -> Result<Self> {
        Self::new(vec![(one(), Functional::PointEval { xi, deriv })])
    }

    pub fn terms(&self) -> &[(Q, Functional)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::normalized(self.terms.iter().chain(&o.terms).cloned().collect())
    }

    pub fn scale(&self, a: &Q) -> Self {
        Self::normalized(self.terms.iter().map(|(c, p)| (c * a, p.clone())).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&-one()))
    }

    pub fn apply_closed(&self, u: &ClosedForm) -> Result<Q> {
        let mut s = zero();
        for (c, phi) in &self.terms {
            s += c * crate::opring::apply_functional(phi, u)?;
        }
        Ok(s)
    }

    /// Exact on exact elements; point evaluations of a truncated series
    /// cannot be decided exactly.
    pub fn apply_series(&self, u: &GenLaurentElement) -> Result<Q> {
        if u.is_exact() {
            if let Some(cf) = ClosedForm::from_element(u) {
                return self.apply_closed(&cf);
            }
        }
        let mut s = zero();
        for (c, phi) in &self.terms {
            let v = match phi {
                Functional::Coeff { k, mu } => u.coeff(*k, mu)?,
                _ => {
                    return Err(Error::TruncationExceeded(format!(
                        "{} needs the full series, only a truncation is known",
                        functional_name(phi)
                    )))
                }
            };
            s += c * v;
        }
        Ok(s)
    }

    pub fn apply_solution(&self, u: &Solution) -> Result<Q> {
        match &u.closed {
            Some(cf) => self.apply_closed(cf),
            None => self.apply_series(&u.series),
        }
    }

    /// The functional as a boundary operator with values in the constants.
    pub fn to_operator(&self) -> IntDiffOperator {
        self.to_operator_with(&ClosedForm::one())
    }

    /// u ↦ β(u)·left
    pub fn to_operator_with(&self, left: &ClosedForm) -> IntDiffOperator {
        let mut op = IntDiffOperator::zero();
        for (c, phi) in &self.terms {
            op = op.add(&IntDiffOperator::boundary(&left.scale(c), phi, &ClosedForm::one(), Mode::GENERAL));
        }
        op
    }

    /// Largest k with c_{k+μ} occurring.
    pub fn max_coeff_index(&self, mu: &Q) -> Option<i64> {
        self.terms
            .iter()
            .filter_map(|(_, p)| match p {
                Functional::Coeff { k, mu: m } if m == mu => Some(*k),
                _ => None,
            })
            .max()
    }

    /// Drops every coefficient term that belongs to a curbing family.
    pub fn without_curbing(&self, curbing: &[(Q, i64)]) -> Self {
        let keep = |p: &Functional| match p {
            Functional::Coeff { k, mu } => !curbing.iter().any(|(m, km)| m == mu && k < km),
            _ => true,
        };
        Self::normalized(self.terms.iter().filter(|(_, p)| keep(p)).cloned().collect())
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(c, p)| match p {
                Functional::PointEval { xi, deriv } => {
                    json!({"kind": "eval", "point": fmt_q(xi), "deriv": deriv, "coeff": fmt_q(c)})
                }
                Functional::Coeff { k, mu } => json!({"kind": "coeff", "k": k, "mu": fmt_q(mu), "coeff": fmt_q(c)}),
                Functional::DefInt { .. } => unreachable!("rejected on construction"),
            })
            .collect();
        json!({ "terms": terms })
    }

    /// Parses `{"terms":[...]}` or a single term object.
    pub fn from_json(v: &Value) -> Result<Self> {
        Self::new(parse_terms(v)?)
    }
}

/// Terms of a condition object, with no restriction on evaluation points.
pub(crate) fn parse_terms(v: &Value) -> Result<Vec<(Q, Functional)>> {
    {
        let terms = match v.get("terms") {
            Some(Value::Array(a)) => a.clone(),
            Some(_) => return Err(field_err("terms", "expected an array")),
            None => vec![v.clone()],
        };
        let mut out = Vec::new();
        for t in &terms {
            let c = match t.get("coeff") {
                None => one(),
                Some(x) => json_q(x, "coeff")?,
            };
            let kind = t.get("kind").and_then(Value::as_str).ok_or_else(|| field_err("kind", "missing"))?;
            let phi = match kind {
                "eval" => Functional::PointEval {
                    xi: json_q(t.get("point").ok_or_else(|| field_err("point", "missing"))?, "point")?,
                    deriv: match t.get("deriv") {
                        None => 0,
                        Some(d) => d.as_u64().ok_or_else(|| field_err("deriv", "expected a natural number"))? as usize,
                    },
                },
                "coeff" => {
                    let k = t.get("k").and_then(Value::as_i64).ok_or_else(|| field_err("k", "expected an integer"))?;
                    let mu = match t.get("mu") {
                        None => zero(),
                        Some(m) => json_q(m, "mu")?,
                    };
                    // accept any rational exponent and split it
                    let (kk, m) = split_exponent(&(qi(k) + mu));
                    Functional::Coeff { k: kk, mu: m }
                }
                other => return Err(field_err("kind", &format!("unknown kind '{other}'"))),
            };
            out.push((c, phi));
        }
        Ok(out)
    }
}

fn field_err(field: &str, msg: &str) -> Error {
    Error::Parse { pos: 0, msg: format!("condition field '{field}': {msg}") }
}

pub(crate) fn json_q(v: &Value, field: &str) -> Result<Q> {
    match v {
        Value::String(s) => parse_q(s).map_err(|e| match e {
            Error::Parse { msg, .. } => field_err(field, &msg),
            e => e,
        }),
        Value::Number(n) if n.is_i64() => Ok(qi(n.as_i64().unwrap())),
        Value::Number(_) => Err(field_err(field, "floating-point numbers are not exact; write it as a fraction such as 1/2")),
        _ => Err(field_err(field, "expected a rational string")),
    }
}

impl fmt::Display for BoundaryFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (c, p)) in self.terms.iter().enumerate() {
            let name = functional_name(p);
            let neg = *c < zero();
            let a = if neg { -c.clone() } else { c.clone() };
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if a.is_one() {
                write!(f, "{name}")?;
            } else {
                write!(f, "{}*{name}", fmt_q(&a))?;
            }
        }
        Ok(())
    }
}

/// β_i(u_j) for i, j = 1..n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvaluationMatrix {
    pub entries: Matrix,
}

impl EvaluationMatrix {
    pub fn det(&self) -> Q {
        self.entries.det()
    }

    pub fn is_regular(&self) -> bool {
        self.entries.rows() == self.entries.cols() && !self.det().is_zero()
    }

    pub fn is_lower_unitriangular(&self) -> bool {
        self.entries.rows() == self.entries.cols() && self.entries.is_lower_unitriangular()
    }
}

pub fn evaluation_matrix(betas: &[BoundaryFunctional], us: &[Solution]) -> Result<EvaluationMatrix> {
    let mut m = Matrix::zeros(betas.len(), us.len());
    for (i, b) in betas.iter().enumerate() {
        for (j, u) in us.iter().enumerate() {
            m.set(i, j, b.apply_solution(u)?);
        }
    }
    Ok(EvaluationMatrix { entries: m })
}

pub fn evaluation_matrix_series(betas: &[BoundaryFunctional], us: &[GenLaurentElement]) -> Result<EvaluationMatrix> {
    let mut m = Matrix::zeros(betas.len(), us.len());
    for (i, b) in betas.iter().enumerate() {
        for (j, u) in us.iter().enumerate() {
            m.set(i, j, b.apply_series(u)?);
        }
    }
    Ok(EvaluationMatrix { entries: m })
}

fn leading_of(s: &Solution) -> Result<(Q, Q)> {
    let lead = match &s.closed {
        Some(cf) => cf.order().map(|e| {
            let c = cf.coeff_at(&e);
            (e, c)
        }),
        None => s.series.leading(),
    };
    lead.ok_or_else(|| Error::TruncationExceeded("tie-breaking cancelled every known coefficient".into()))
}

fn make_monic(s: Solution) -> Result<Solution> {
    let (e, c) = leading_of(&s)?;
    let inv = one() / c;
    Ok(Solution { exponent: e, series: s.series.scale(&inv), closed: s.closed.map(|cf| cf.scale(&inv)) })
}

fn difference(a: &Solution, b: &Solution) -> Solution {
    let closed = match (&a.closed, &b.closed) {
        (Some(x), Some(y)) => Some(x.sub(y)),
        _ => None,
    };
    Solution { exponent: a.exponent.clone(), series: a.series.sub(&b.series), closed }
}

/// Monic fundamental system with strictly increasing orders and the matching
/// coefficient functionals; the evaluation matrix is lower unitriangular.
pub fn canonical_functionals(fs: &FundamentalSystem) -> Result<(Vec<BoundaryFunctional>, FundamentalSystem, EvaluationMatrix)> {
    let mut sols: Vec<Solution> = fs.solutions.iter().cloned().map(make_monic).collect::<Result<_>>()?;
    let cap = fs.n() * (fs.terms + 1) + 1;
    for _ in 0..cap {
        sols.sort_by(|a, b| a.exponent.cmp(&b.exponent));
        let Some(i) = (0..sols.len().saturating_sub(1)).find(|&i| sols[i].exponent == sols[i + 1].exponent) else {
            break;
        };
        sols[i + 1] = make_monic(difference(&sols[i + 1], &sols[i]))?;
    }
    if sols.windows(2).any(|w| w[0].exponent >= w[1].exponent) {
        return Err(Error::TruncationExceeded("could not separate the orders of the fundamental solutions".into()));
    }
    let betas: Vec<BoundaryFunctional> = sols
        .iter()
        .map(|s| {
            let (k, mu) = split_exponent(&s.exponent);
            BoundaryFunctional::coeff(k, mu)
        })
        .collect();
    let fs2 = FundamentalSystem { solutions: sols, terms: fs.terms };
    let e = evaluation_matrix(&betas, &fs2.solutions)?;
    debug_assert!(e.is_lower_unitriangular());
    Ok((betas, fs2, e))
}

/// k_μ: smallest order per exponent class among the fundamental solutions.
pub fn curbing_orders(fs: &FundamentalSystem) -> Vec<(Q, i64)> {
    let mut m: BTreeMap<Q, i64> = BTreeMap::new();
    for s in &fs.solutions {
        let (k, mu) = split_exponent(&s.exponent);
        let e = m.entry(mu).or_insert(k);
        *e = (*e).min(k);
    }
    m.into_iter().collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundarySpace {
    regular: Vec<BoundaryFunctional>,
    protected: Vec<bool>,
    annexed: Vec<BoundaryFunctional>,
    curbing: Vec<(Q, i64)>,
    warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// Replaced the functional in this slot of the regular subproblem.
    Traded(usize),
    /// Appended as an extra condition; the accessible space shrinks.
    Annexed,
    /// Lies in the span of the curbing families.
    RedundantCurbing,
    /// Already implied by the finite part.
    Redundant,
}

pub fn build_boundary_space(betas: Vec<BoundaryFunctional>, k_mus: Vec<(Q, i64)>) -> BoundarySpace {
    let n = betas.len();
    BoundarySpace { regular: betas, protected: vec![false; n], annexed: Vec::new(), curbing: k_mus, warnings: Vec::new() }
}

impl BoundarySpace {
    /// The n functionals of the regular subproblem.
    pub fn regular_part(&self) -> &[BoundaryFunctional] {
        &self.regular
    }

    pub fn annexed(&self) -> &[BoundaryFunctional] {
        &self.annexed
    }

    pub fn finite_part(&self) -> Vec<BoundaryFunctional> {
        self.regular.iter().chain(&self.annexed).cloned().collect()
    }

    pub fn curbing(&self) -> &[(Q, i64)] {
        &self.curbing
    }

    pub fn protected(&self) -> &[bool] {
        &self.protected
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn mus(&self) -> Vec<Q> {
        self.curbing.iter().map(|(m, _)| m.clone()).collect()
    }

    pub fn k_mu(&self, mu: &Q) -> Option<i64> {
        self.curbing.iter().find(|(m, _)| m == mu).map(|(_, k)| *k)
    }

    pub fn in_curbing(&self, k: i64, mu: &Q) -> bool {
        self.k_mu(mu).map_or(false, |km| k < km)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "regular": self.regular.iter().map(|b| b.to_string()).collect::<Vec<_>>(),
            "annexed": self.annexed.iter().map(|b| b.to_string()).collect::<Vec<_>>(),
            "curbing": self.curbing.iter().map(|(m, k)| json!({"mu": fmt_q(m), "below": k})).collect::<Vec<_>>(),
            "warnings": self.warnings,
        })
    }
}

/// Coordinates of β in the finite part, treating the basic functionals as
/// independent symbols (they are linearly independent on the function space).
fn symbolic_coordinates(parts: &[BoundaryFunctional], beta: &BoundaryFunctional) -> Option<Vec<Q>> {
    let mut index: BTreeMap<Functional, usize> = BTreeMap::new();
    for b in parts.iter().chain(std::iter::once(beta)) {
        for (_, p) in b.terms() {
            let l = index.len();
            index.entry(p.clone()).or_insert(l);
        }
    }
    let mut m = Matrix::zeros(index.len(), parts.len());
    for (j, b) in parts.iter().enumerate() {
        for (c, p) in b.terms() {
            m.set(index[p], j, c.clone());
        }
    }
    let mut rhs = vec![zero(); index.len()];
    for (c, p) in beta.terms() {
        rhs[index[p]] = c.clone();
    }
    m.solve(&rhs)
}

/// Imposes β on the space: trade it into the regular subproblem when it
/// separates the kernel, otherwise annex it. Slots that already hold an
/// imposed condition are never traded away.
pub fn trade_or_annex(space: &BoundarySpace, beta: &BoundaryFunctional, fs: &FundamentalSystem) -> Result<(BoundarySpace, Outcome)> {
    let mut sp = space.clone();
    let b = beta.without_curbing(&space.curbing);
    if b.is_zero() {
        return Ok((sp, Outcome::RedundantCurbing));
    }
    let finite = space.finite_part();
    if let Some(d) = symbolic_coordinates(&finite, &b) {
        for (i, di) in d.iter().take(sp.regular.len()).enumerate() {
            if !di.is_zero() {
                sp.protected[i] = true;
            }
        }
        return Ok((sp, Outcome::Redundant));
    }
    let r: Vec<Q> = fs.solutions.iter().map(|u| b.apply_solution(u)).collect::<Result<_>>()?;
    if r.iter().any(|v| !v.is_zero()) {
        let e = evaluation_matrix(&space.regular, &fs.solutions)?;
        let c = e.entries.transpose().solve(&r).ok_or(Error::SingularEvaluationMatrix)?;
        if let Some(k) = (0..c.len()).rev().find(|&k| !c[k].is_zero() && !space.protected[k]) {
            sp.regular[k] = b;
            sp.protected[k] = true;
            return Ok((sp, Outcome::Traded(k)));
        }
    }
    sp.warnings.push(format!("annexed {b}: the accessible space shrinks"));
    sp.annexed.push(b);
    Ok((sp, Outcome::Annexed))
}

/// Imposes a list of conditions in order.
pub fn impose_all(space: &BoundarySpace, betas: &[BoundaryFunctional], fs: &FundamentalSystem) -> Result<(BoundarySpace, Vec<Outcome>)> {
    let mut sp = space.clone();
    let mut out = Vec::new();
    for b in betas {
        let (s, o) = trade_or_annex(&sp, b, fs)?;
        sp = s;
        out.push(o);
    }
    Ok((sp, out))
}

/// (T, [β_1..β_n]) is regular iff the evaluation matrix is square and invertible.
pub fn regularity_check(betas: &[BoundaryFunctional], fs: &FundamentalSystem) -> Result<bool> {
    if betas.len() != fs.n() {
        return Ok(false);
    }
    Ok(evaluation_matrix(betas, &fs.solutions)?.is_regular())
}

/// Ker T ∩ ⊥B = O, tested on the finite part plus a window of each
/// curbing family reaching down to the lowest kernel order.
pub fn semi_regularity_check(space: &BoundarySpace, fs: &FundamentalSystem) -> Result<bool> {
    let mut rows = space.finite_part();
    let lowest = fs.solutions.iter().map(|s| split_exponent(&s.exponent).0).min().unwrap_or(0);
    for (mu, km) in &space.curbing {
        for k in lowest.min(*km)..*km {
            rows.push(BoundaryFunctional::coeff(k, mu.clone()));
        }
    }
    Ok(evaluation_matrix(&rows, &fs.solutions)?.entries.rank() == fs.n())
}

/// Dual functionals β̃ = E⁻¹β, so that β̃_i(u_j) = δ_ij.
pub fn dual_functionals(fs: &FundamentalSystem, betas: &[BoundaryFunctional]) -> Result<Vec<BoundaryFunctional>> {
    let e = evaluation_matrix(betas, &fs.solutions)?;
    let inv = e.entries.inverse().ok_or(Error::SingularEvaluationMatrix)?;
    Ok((0..betas.len())
        .map(|i| {
            (0..betas.len()).fold(BoundaryFunctional::default(), |acc, l| acc.add(&betas[l].scale(inv.get(i, l))))
        })
        .collect())
}

/// P = Σ u_i·β̃_i, the projector onto Ker T along ⊥[β_1..β_n].
pub fn kernel_projector(fs: &FundamentalSystem, betas: &[BoundaryFunctional]) -> Result<IntDiffOperator> {
    let basis = fs
        .closed_basis()
        .ok_or_else(|| Error::InvalidInput("the kernel projector needs closed-form fundamental solutions".into()))?;
    let duals = dual_functionals(fs, betas)?;
    Ok(basis.iter().zip(&duals).fold(IntDiffOperator::zero(), |acc, (u, b)| acc.add(&b.to_operator_with(u))))
}

/// The kernel projector applied to a series, via the series basis.
pub fn apply_kernel_projector(fs: &FundamentalSystem, betas: &[BoundaryFunctional], f: &GenLaurentElement) -> Result<GenLaurentElement> {
    let duals = dual_functionals(fs, betas)?;
    let mut acc = GenLaurentElement::zero();
    for (s, b) in fs.solutions.iter().zip(&duals) {
        let c = b.apply_series(f)?;
        if !c.is_zero() {
            acc = acc.add(&s.series.scale(&c));
        }
    }
    Ok(acc)
}
