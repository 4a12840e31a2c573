use proptest::prelude::*;
use qmc_core::linalg::{c64, max_abs_diff, min_hermitian_eigenvalue, ComplexMatrix};
use qmc_core::random::{random_channel_kraus, random_cp_kraus, random_density};
use qmc_core::superop::{kraus_to_matrix_rep, real_matrix, SuperOp};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_cp(r: &mut ChaCha8Rng, d: usize) -> SuperOp {
    let count = r.random_range(1..=3);
    SuperOp::from_kraus(random_cp_kraus(r, d, count)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn composition_multiplies_representations(seed in any::<u64>(), d in 2usize..=4) {
        let mut r = rng(seed);
        let e = random_cp(&mut r, d);
        let f = random_cp(&mut r, d);
        let composed = e.compose(&f).unwrap();
        let from_kraus = kraus_to_matrix_rep(composed.kraus().unwrap()).unwrap();
        prop_assert!(max_abs_diff(&from_kraus, &(e.matrix_rep() * f.matrix_rep())) < 1e-10);
    }

    #[test]
    fn trace_operator_is_linear(seed in any::<u64>(), d in 1usize..=4) {
        let mut r = rng(seed);
        let e = random_cp(&mut r, d);
        let f = random_cp(&mut r, d);
        let sum = e.add(&f).unwrap().trace_operator().into_matrix();
        let parts = e.trace_operator().into_matrix() + f.trace_operator().matrix();
        prop_assert!(max_abs_diff(&sum, &parts) < 1e-12);
    }

    #[test]
    fn trace_operators_of_cp_maps_are_psd(seed in any::<u64>(), d in 1usize..=4) {
        let mut r = rng(seed);
        let e = random_cp(&mut r, d);
        prop_assert!(e.trace_operator().min_eigenvalue() >= -1e-10);
        prop_assert!(e.is_completely_positive(1e-9));
        let count = r.random_range(1..=4);
        let channel = SuperOp::from_kraus(random_channel_kraus(&mut r, d, count)).unwrap();
        let id = ComplexMatrix::identity(d, d);
        prop_assert!(max_abs_diff(channel.trace_operator().matrix(), &id) < 1e-10);
    }

    #[test]
    fn orders_are_reflexive_and_symmetric(seed in any::<u64>(), d in 1usize..=4) {
        let mut r = rng(seed);
        let e = random_cp(&mut r, d);
        let f = random_cp(&mut r, d);
        prop_assert!(e.leq_trace(&e, 1e-9));
        prop_assert!(e.eqsim(&e, 0.0));
        prop_assert_eq!(e.eqsim(&f, 1e-3), f.eqsim(&e, 1e-3));
    }

    #[test]
    fn trace_order_is_transitive_on_exact_inputs(a in 0u32..=16, b in 0u32..=16, c in 0u32..=16) {
        // Dyadic multiples of the identity have exactly representable trace operators.
        let op = |k: u32| SuperOp::identity(2).scale(f64::from(k) / 16.0).unwrap();
        let (x, y, z) = (op(a), op(b), op(c));
        if x.leq_trace(&y, 0.0) && y.leq_trace(&z, 0.0) {
            prop_assert!(x.leq_trace(&z, 0.0));
        }
    }

    #[test]
    fn right_application_preserves_order(seed in any::<u64>(), d in 1usize..=4) {
        let mut r = rng(seed);
        let e = random_cp(&mut r, d);
        let f = e.add(&random_cp(&mut r, d)).unwrap();
        let g = random_cp(&mut r, d);
        prop_assert!(e.leq_trace(&f, 1e-9));
        prop_assert!(e.compose(&g).unwrap().leq_trace(&f.compose(&g).unwrap(), 1e-9));
    }

    #[test]
    fn apply_agrees_with_kraus_sum(seed in any::<u64>(), d in 1usize..=4) {
        let mut r = rng(seed);
        let e = random_cp(&mut r, d);
        let rho = random_density(&mut r, d);
        let via_rep = e.apply(&rho).unwrap();
        let via_kraus = e.apply_kraus(&rho).unwrap();
        prop_assert!(max_abs_diff(&via_rep, &via_kraus) < 1e-10);
        // tr(E(ρ)) = tr(T_E ρ)
        let tr = via_rep.trace().re;
        prop_assert!((tr - e.trace_operator().expectation(&rho)).abs() < 1e-10);
    }
}

#[test]
fn transpose_is_not_completely_positive() {
    let mut rep = ComplexMatrix::zeros(4, 4);
    for (i, j) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
        rep[(i, j)] = c64(1.0, 0.0);
    }
    let transpose = SuperOp::from_matrix_rep(2, rep).unwrap();
    assert!(!transpose.is_completely_positive(1e-9));
    assert!(min_hermitian_eigenvalue(&transpose.choi()) < -0.5);
}

#[test]
fn dephasing_sums_to_identity() {
    let e0 = SuperOp::from_kraus(vec![real_matrix(2, &[1.0, 0.0, 0.0, 0.0])]).unwrap();
    let e1 = SuperOp::from_kraus(vec![real_matrix(2, &[0.0, 0.0, 0.0, 1.0])]).unwrap();
    assert!(e0.add(&e1).unwrap().eqsim(&SuperOp::identity(2), 0.0));
    assert!(!e0.eqsim(&SuperOp::zero(2), 1e-9));
}
