mod common;

use common::*;
use proptest::prelude::*;
use singbvp::arith::{qi, zero};
use singbvp::{ClosedForm, Prepared};
use std::sync::OnceLock;

fn catalog_cached() -> &'static Vec<(&'static str, Prepared)> {
    static C: OnceLock<Vec<(&'static str, Prepared)>> = OnceLock::new();
    C.get_or_init(catalog)
}

/// Members whose fundamental system is known in closed form.
fn exact() -> impl Iterator<Item = &'static (&'static str, Prepared)> {
    catalog_cached().iter().filter(|(_, p)| p.problem.fs.is_exact())
}

#[test]
fn projector_p_kills_the_kernel() {
    // truncated systems are checked when the problem is built
    for (name, p) in exact() {
        let pp = p.problem.p();
        assert!(pp.is_along_kernel());
        for u in p.problem.fs.closed_basis().unwrap() {
            assert!(pp.apply_closed(&u).unwrap().is_zero(), "{name}: P({})", u.display("x"));
        }
    }
}

proptest! {
    #![proptest_config(config(40))]

    #[test]
    fn q_is_the_regular_part_in_the_simple_example(c in small_q(), f in poly(4)) {
        let p = &catalog_cached().iter().find(|(n, _)| *n == "simple").unwrap().1;
        let pp = ClosedForm::monomial(c, &qi(-2));
        prop_assert_eq!(p.problem.q.apply_closed(&pp.add(&f)).unwrap(), f);
    }

    #[test]
    fn p_is_idempotent(u in laurent_poly(-1, 5)) {
        for (name, p) in exact() {
            let pp = p.problem.p();
            let Ok(once) = pp.apply_closed(&u) else { continue };
            prop_assert_eq!(pp.apply_closed(&once).unwrap(), once, "{}", name);
        }
    }

    #[test]
    fn q_is_idempotent_on_the_image(u in laurent_poly(-1, 5)) {
        for (name, p) in exact() {
            let g = &p.problem;
            let f = g.t.apply_closed(&u);
            let Ok(once) = g.q.apply_closed(&f) else { continue };
            prop_assert_eq!(g.q.apply_closed(&once).unwrap(), once, "{}", name);
        }
    }

    #[test]
    fn green_inverts_up_to_q(f in poly(4)) {
        for (name, p) in exact() {
            let g = &p.problem;
            let u = g.solve_closed(&f).unwrap();
            prop_assert_eq!(g.t.apply_closed(&u), g.q_analytic.apply_closed(&f).unwrap(), "{}", name);
        }
    }

    #[test]
    fn green_satisfies_the_regular_conditions(f in poly(4)) {
        for (name, p) in exact() {
            let g = &p.problem;
            let u = g.solve_closed(&f).unwrap();
            for b in g.space.regular_part() {
                prop_assert_eq!(b.apply_closed(&u).unwrap(), zero(), "{}: {}", name, b);
            }
        }
    }
}
