mod common;

use common::*;
use proptest::prelude::*;
use singbvp::arith::{q, zero};
use singbvp::boundary::{
    build_boundary_space, canonical_functionals, curbing_orders, evaluation_matrix, kernel_projector, semi_regularity_check,
    trade_or_annex,
};
use singbvp::fuchsian::fundamental_system;
use singbvp::{BoundaryFunctional, FuchsianOperator, IntDiffOperator, Outcome};
use std::sync::OnceLock;

fn catalog_cached() -> &'static Vec<(&'static str, singbvp::Prepared)> {
    static C: OnceLock<Vec<(&'static str, singbvp::Prepared)>> = OnceLock::new();
    C.get_or_init(catalog)
}

/// A_j = x^(j−n)(c_j + d_j x): Fuchsian at 0 with prescribed indicial roots.
fn random_operator() -> impl Strategy<Value = FuchsianOperator> {
    (1usize..=3)
        .prop_flat_map(|n| {
            let root = (-3i64..=3, 1i64..=3).prop_map(|(a, b)| q(a, b));
            (prop::collection::btree_set(root, n), prop::collection::vec(small_q(), n))
        })
        .prop_filter_map("roots collide", |(roots, ds)| euler_operator(&roots.into_iter().collect::<Vec<_>>(), &ds))
}

#[test]
fn canonical_matrices_on_catalog() {
    for (name, p) in catalog_cached() {
        let fs = fundamental_system(&p.problem.t, 20).unwrap();
        let (_, _, e) = canonical_functionals(&fs).unwrap();
        assert!(e.is_lower_unitriangular(), "{name}");
    }
}

#[test]
fn catalog_spaces_are_semi_regular() {
    for (name, p) in catalog_cached() {
        let fs = fundamental_system(&p.problem.t, 20).unwrap();
        let (b, fs, _) = canonical_functionals(&fs).unwrap();
        let space = build_boundary_space(b, curbing_orders(&fs));
        assert!(semi_regularity_check(&space, &fs).unwrap(), "{name}");
    }
}

proptest! {
    #![proptest_config(config(20))]

    #[test]
    fn canonical_matrices_on_random_systems(t in random_operator()) {
        // resonant cases are refused by the solver and do not count
        let Ok(fs) = fundamental_system(&t, 12) else { return Ok(()) };
        let (_, _, e) = canonical_functionals(&fs).unwrap();
        prop_assert!(e.is_lower_unitriangular());
    }
}

fn point_condition() -> impl Strategy<Value = BoundaryFunctional> {
    (prop::collection::vec((nonzero_q(), 1i64..=4, 0usize..2), 1..3)).prop_map(|ts| {
        ts.into_iter()
            .map(|(c, d, j)| BoundaryFunctional::eval(q(1, d), j).unwrap().scale(&c))
            .fold(BoundaryFunctional::default(), |a, b| a.add(&b))
    })
}

proptest! {
    #![proptest_config(config(30))]

    #[test]
    fn trading_keeps_the_regular_part_regular(beta in point_condition()) {
        for (_, p) in catalog_cached() {
            let fs = &p.problem.fs;
            let (b, _, _) = canonical_functionals(fs).unwrap();
            let space = build_boundary_space(b, curbing_orders(fs));
            let (sp, o) = trade_or_annex(&space, &beta, fs).unwrap();
            if let Outcome::Traded(_) = o {
                prop_assert!(evaluation_matrix(sp.regular_part(), &fs.solutions).unwrap().det() != zero());
            }
        }
    }

    #[test]
    fn kernel_projector_laws(f in laurent_poly(-2, 4)) {
        for (name, p) in catalog_cached() {
            let fs = &p.problem.fs;
            let betas = p.problem.space.regular_part();
            let pk = kernel_projector(fs, betas).unwrap();
            prop_assert_eq!(pk.compose(&pk).unwrap(), pk.clone(), "{}", name);
            for u in fs.closed_basis().unwrap() {
                prop_assert_eq!(pk.apply_closed(&u).unwrap(), u);
            }
            let rest = IntDiffOperator::identity().sub(&pk).apply_closed(&f).unwrap();
            for b in betas {
                prop_assert_eq!(b.apply_closed(&rest).unwrap(), zero(), "{}: {}", name, b);
            }
        }
    }
}
