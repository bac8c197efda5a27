//! Human-readable and JSON renderings of normal forms.
//!
//! Notation: A is the integral from 1 to x, F the integral from 0 to 1
//! (F_lo^hi for other limits), e_ξ D^j the j-th derivative at ξ and
//! c_{k+μ} the coefficient of x^(k+μ).

use super::{Functional, IntDiffOperator, Term};
use crate::arith::{fmt_q, qi};
use crate::closed::ClosedForm;
use num_traits::{One, Zero};
use serde_json::{json, Value};
use std::fmt;

fn factor(c: &ClosedForm, var: &str) -> String {
    let s = c.display(var);
    if s.contains(' ') || s.starts_with('-') {
        format!("({s})")
    } else {
        s
    }
}

pub(crate) fn functional_name(phi: &Functional) -> String {
    match phi {
        Functional::PointEval { xi, deriv } => match deriv {
            0 => format!("e_{}", fmt_q(xi)),
            1 => format!("e_{} D", fmt_q(xi)),
            d => format!("e_{} D^{d}", fmt_q(xi)),
        },
        Functional::Coeff { k, mu } => format!("c_{{{}}}", fmt_q(&(qi(*k) + mu))),
        Functional::DefInt { lo, hi } => {
            if lo.is_zero() && hi.is_one() {
                "F".into()
            } else {
                format!("F_{}^{}", fmt_q(lo), fmt_q(hi))
            }
        }
    }
}

/// Left factor with its trailing `*`, or a bare sign for ±1.
fn left_prefix(left: &ClosedForm) -> String {
    if left.is_one() {
        return String::new();
    }
    match left.as_constant() {
        Some(c) if c == -num_rational::BigRational::one() => "-".into(),
        Some(c) => format!("{}*", fmt_q(&c)),
        None => format!("{}*", factor(left, "x")),
    }
}

fn term_string(t: &Term) -> String {
    match t {
        Term::Diff { coef, order } => {
            let d = match order {
                0 => String::new(),
                1 => "D".into(),
                k => format!("D^{k}"),
            };
            if d.is_empty() {
                factor(coef, "x")
            } else if coef.is_one() {
                d
            } else {
                format!("{}*{d}", factor(coef, "x"))
            }
        }
        Term::Int { left, right } => {
            let l = left_prefix(left);
            let r = if right.is_one() { String::new() } else { format!("*{}", factor(right, "x")) };
            format!("{l}A{r}")
        }
        Term::Bdry { left, functional, inner } => {
            let l = left_prefix(left);
            let r = if inner.is_one() { String::new() } else { format!("∘{}", factor(inner, "x")) };
            format!("{l}{}{r}", functional_name(functional))
        }
    }
}

impl fmt::Display for IntDiffOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        let s: Vec<String> = terms.iter().map(term_string).collect();
        write!(f, "{}", s.join(" + "))
    }
}

fn functional_json(phi: &Functional) -> Value {
    match phi {
        Functional::PointEval { xi, deriv } => json!({"kind": "eval", "point": fmt_q(xi), "deriv": deriv}),
        Functional::Coeff { k, mu } => json!({"kind": "coeff", "k": k, "mu": fmt_q(mu)}),
        Functional::DefInt { lo, hi } => json!({"kind": "defint", "lo": fmt_q(lo), "hi": fmt_q(hi)}),
    }
}

impl IntDiffOperator {
    /// Canonical JSON: terms in normal-form order, closed forms as strings.
    pub fn to_json(&self) -> Value {
        let mut diff = Vec::new();
        let mut int = Vec::new();
        let mut bdry = Vec::new();
        for t in self.terms() {
            match t {
                Term::Diff { coef, order } => diff.push(json!({"order": order, "coeff": coef.display("x")})),
                Term::Int { left, right } => int.push(json!({"left": left.display("x"), "right": right.display("x")})),
                Term::Bdry { left, functional, inner } => bdry.push(json!({
                    "left": left.display("x"),
                    "functional": functional_json(&functional),
                    "inner": inner.display("x"),
                })),
            }
        }
        json!({"diff": diff, "int": int, "bdry": bdry})
    }
}
