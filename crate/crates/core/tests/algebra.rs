use casimir_core::linalg::{max_abs_diff, CMatrix, C64};
use casimir_core::multiparticle::collective_unitary;
use casimir_core::{build_basis, collective_set, compute_structure_tensors, embed, verify_identities};
use proptest::prelude::*;

fn cmatrix(d: usize, raw: &[(f64, f64)]) -> CMatrix {
    CMatrix::from_iterator(d, d, raw.iter().map(|&(re, im)| C64::new(re, im)))
}

#[test]
fn identity_suite_d2_to_d5() {
    for d in 2..=5 {
        let basis = build_basis(d).unwrap();
        let tensors = compute_structure_tensors(&basis);
        let reports = verify_identities(&tensors, &basis, 1e-10).unwrap();
        assert_eq!(reports.len(), 11);
        for r in &reports {
            assert!(r.passed, "d={d} {:?} residual {}", r.identity, r.max_residual);
        }
    }
}

#[test]
fn lie_closure_sweep() {
    for d in 2..=4 {
        let basis = build_basis(d).unwrap();
        let tensors = compute_structure_tensors(&basis);
        for n in 1..=3 {
            let set = collective_set(&basis, n).unwrap();
            assert!(set.lie_closure_residual(&tensors).unwrap() < 1e-10, "d={d} n={n}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn structure_tensor_transpositions(d in 2usize..=4, seed in any::<u64>()) {
        let basis = build_basis(d).unwrap();
        let t = compute_structure_tensors(&basis);
        let g = basis.len() as u64;
        let (i, j, k) = ((seed % g) as usize, ((seed / g) % g) as usize, ((seed / (g * g)) % g) as usize);
        let f = t.f(i, j, k);
        prop_assert_eq!(t.f(j, i, k), -f);
        prop_assert_eq!(t.f(i, k, j), -f);
        prop_assert_eq!(t.f(k, i, j), f);
        let s = t.d_sym(i, j, k);
        prop_assert_eq!(t.d_sym(j, i, k), s);
        prop_assert_eq!(t.d_sym(k, j, i), s);
        prop_assert_eq!(t.d_sym(j, k, i), s);
    }

    #[test]
    fn embedding_is_a_homomorphism(
        a in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 9),
        b in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 9),
        site in 0usize..3,
    ) {
        let (a, b) = (cmatrix(3, &a), cmatrix(3, &b));
        let lhs = embed(&(&a * &b), site, 3).unwrap();
        let rhs = embed(&a, site, 3).unwrap().matrix() * embed(&b, site, 3).unwrap().matrix();
        prop_assert!(max_abs_diff(lhs.matrix(), &rhs) < 1e-12);
    }

    #[test]
    fn conjugation_stays_in_collective_span(
        v in prop::collection::vec(-1.0f64..1.0, 8),
        n in 1usize..=2,
    ) {
        let basis = build_basis(3).unwrap();
        let set = collective_set(&basis, n).unwrap();
        let coeffs: Vec<C64> = v.iter().map(|x| C64::new(0.0, *x)).collect();
        let u = collective_unitary(&set, &coeffs).unwrap();
        let um = u.matrix();
        let unitarity = max_abs_diff(&(um.adjoint() * um), &CMatrix::identity(um.nrows(), um.ncols()));
        prop_assert!(unitarity < 1e-10);
        for s in set.operators() {
            let conj = u.like(um * s.matrix() * um.adjoint(), "U S U†").unwrap();
            prop_assert!(set.span_residual(&conj).unwrap() < 1e-8);
        }
    }
}
