mod common;

use isodec::analysis::{decomposable_vector, is_decomposable, kernel};
use isodec::catalog;
use isodec::flatten::{exterior_derivative, poincare_homotopy, restrict_split};
use isodec::isotropic::{complement_n_isotropic, verify_complement, ComplementMethod};
use isodec::linalg::{self, Mat};
use isodec::poly::PolyForm;
use isodec::rational::q;
use isodec::search::{random_unimodular, rng, SearchBudget};
use isodec::{AlternatingForm, Subspace, Vector};
use proptest::prelude::*;

fn form_strategy(d: usize, k: usize) -> impl Strategy<Value = AlternatingForm> {
    let n = isodec::exterior::binomial(d, k);
    prop::collection::vec(-3i64..=3, n).prop_map(move |cs| {
        let tuples = isodec::exterior::subsets(d, k);
        tuples
            .into_iter()
            .zip(cs)
            .fold(AlternatingForm::zero(d, k), |acc, (t, c)| {
                &acc + &AlternatingForm::monomial(d, &t.indices(), q(c)).unwrap()
            })
    })
}

fn vector_strategy(d: usize) -> impl Strategy<Value = Vector> {
    prop::collection::vec(-3i64..=3, d).prop_map(|xs| Vector::from_ints(&xs))
}

fn matrix_strategy(rows: usize, cols: usize) -> impl Strategy<Value = Mat> {
    prop::collection::vec(prop::collection::vec(-2i64..=2, cols), rows)
        .prop_map(|m| m.into_iter().map(|r| r.into_iter().map(q).collect()).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wedge_is_graded_commutative(a in form_strategy(5, 2), b in form_strategy(5, 1)) {
        prop_assert_eq!(a.wedge(&b).unwrap(), b.wedge(&a).unwrap());
        let c = b.clone();
        prop_assert_eq!(b.wedge(&c).unwrap(), AlternatingForm::zero(5, 2));
    }

    #[test]
    fn contraction_is_an_antiderivation(
        a in form_strategy(5, 2),
        b in form_strategy(5, 2),
        v in vector_strategy(5),
    ) {
        let lhs = a.wedge(&b).unwrap().contract(&v).unwrap();
        let rhs = &a.contract(&v).unwrap().wedge(&b).unwrap() + &a.wedge(&b.contract(&v).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn contracting_twice_with_one_vector_vanishes(a in form_strategy(6, 3), v in vector_strategy(6)) {
        prop_assert!(a.contract(&v).unwrap().contract(&v).unwrap().is_zero());
    }

    #[test]
    fn pullback_is_functorial(
        w in form_strategy(4, 2),
        a in matrix_strategy(4, 4),
        b in matrix_strategy(4, 3),
    ) {
        let step = w.pullback(&a, 4).unwrap().pullback(&b, 3).unwrap();
        let direct = w.pullback(&linalg::mat_mul(&a, &b), 3).unwrap();
        prop_assert_eq!(step, direct);
    }

    #[test]
    fn kernel_vectors_contract_to_zero(w in form_strategy(5, 3)) {
        for v in kernel(&w).unwrap().basis_vectors() {
            prop_assert!(w.contract(&v).unwrap().is_zero());
        }
    }

    #[test]
    fn products_of_covectors_are_decomposable(
        a in vector_strategy(5),
        b in vector_strategy(5),
        c in vector_strategy(5),
    ) {
        let f = AlternatingForm::one_form(&a.coords)
            .wedge(&AlternatingForm::one_form(&b.coords)).unwrap()
            .wedge(&AlternatingForm::one_form(&c.coords)).unwrap();
        prop_assert!(is_decomposable(&f).decomposable);
    }

    #[test]
    fn decomposability_survives_unimodular_changes(seed in 0u64..1000) {
        let entry = catalog::omega0(1, 2).unwrap();
        let d = entry.form.dimension();
        let m = random_unimodular(&mut rng(seed), d, 2);
        let moved = entry.form.pullback(&m, d).unwrap();
        let inv = linalg::inverse(&m).unwrap();
        for v in entry.l.basis_vectors() {
            let w = Vector::new(linalg::mat_vec(&inv, &v.coords));
            prop_assert!(decomposable_vector(&w, &moved).unwrap());
        }
    }

    #[test]
    fn complements_verify_after_unimodular_changes(seed in 0u64..1000) {
        let entry = catalog::omega0(2, 1).unwrap();
        let d = entry.form.dimension();
        let m = random_unimodular(&mut rng(seed), d, 2);
        let inv = linalg::inverse(&m).unwrap();
        let moved = entry.form.pullback(&m, d).unwrap();
        let l_rows: Vec<Vector> = entry
            .l
            .basis_vectors()
            .iter()
            .map(|v| Vector::new(linalg::mat_vec(&inv, &v.coords)))
            .collect();
        let l = Subspace::span(d, &l_rows).unwrap();
        let out = complement_n_isotropic(&moved, &l, None, ComplementMethod::Auto, &SearchBudget::with_seed(seed)).unwrap();
        let again = verify_complement(&moved, &l, &out.f_basis, None).unwrap();
        prop_assert!(again.all_hold());
    }

    #[test]
    fn homotopy_inverts_d_on_vertically_exact_forms(seed in 0u64..500, k in 0usize..3) {
        let mut r = rng(seed);
        let s = common::split(2, 4);
        let all: Vec<usize> = (0..4).collect();
        let mut theta = PolyForm::zero(4, k);
        for t in isodec::exterior::subsets(4, k) {
            if t.mask() & s.y_mask() != 0 {
                theta.add_term(t, common::random_poly_in(&mut r, 4, &all, 3, 2));
            }
        }
        let omega = exterior_derivative(&theta);
        prop_assert!(restrict_split(&omega, &s).unwrap().1.is_zero());
        let primitive = poincare_homotopy(&omega, &s).unwrap();
        prop_assert_eq!(exterior_derivative(&primitive), omega);
    }
}
