use majorana_core::cascade::{
    biorthogonal_split, born_distribution, exact_cascade_distribution, exact_cascade_distribution_ordered,
    reduced_density, run_cascade,
};
use majorana_core::embedding::{embed_state, outcome_subspace, projection_probability};
use majorana_core::majorana::{constellation_to_state, state_to_constellation, Constellation};
use majorana_core::spin::{wigner_matrix, BlochPoint, EulerAngles, Spin, SpinState};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, TAU};

fn random_state(twice: u32, seed: u64) -> SpinState {
    SpinState::random(Spin::from_twice(twice).unwrap(), &mut ChaCha8Rng::seed_from_u64(seed))
}

fn angles() -> impl Strategy<Value = EulerAngles> {
    (0.0..TAU, 0.0..=PI, 0.0..TAU).prop_map(|(a, b, g)| EulerAngles::new(a, b, g).unwrap())
}

fn direction() -> impl Strategy<Value = BlochPoint> {
    (0.0..TAU, 0.0..=PI).prop_map(|(a, b)| BlochPoint::new(a, b).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wigner_matrix_is_unitary(twice in 1u32..=12, g in angles()) {
        let d = wigner_matrix(Spin::from_twice(twice).unwrap(), &g).into_matrix();
        let n = d.nrows();
        let err = (&d * d.adjoint() - DMatrix::<Complex64>::identity(n, n)).camax();
        prop_assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn state_constellation_state(twice in 1u32..=8, seed in any::<u64>()) {
        let s = random_state(twice, seed);
        let back = constellation_to_state(&state_to_constellation(&s).unwrap()).unwrap();
        prop_assert!(back.ray_equal(&s, 1e-10));
    }

    #[test]
    fn constellation_state_constellation(points in prop::collection::vec(direction(), 1..=8)) {
        let spread = points.iter().enumerate().flat_map(|(i, p)| points[i + 1..].iter().map(move |q| p.angular_distance(q)));
        prop_assume!(spread.fold(f64::INFINITY, f64::min) > 0.05);
        let spin = Spin::from_twice(points.len() as u32).unwrap();
        let c = Constellation::new(spin, points).unwrap();
        let back = state_to_constellation(&constellation_to_state(&c).unwrap()).unwrap();
        let err = back.pairing_error(&c);
        prop_assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn constellation_rotates_with_state(twice in 1u32..=8, seed in any::<u64>(), g in angles()) {
        let s = random_state(twice, seed);
        let rotated = wigner_matrix(s.spin(), &g).apply(&s).unwrap();
        let moved: Vec<_> = state_to_constellation(&s).unwrap().points().iter().map(|p| p.rotated(&g)).collect();
        let want = Constellation::new(s.spin(), moved).unwrap();
        let err = state_to_constellation(&rotated).unwrap().pairing_error(&want);
        prop_assert!(err < 1e-7, "{err}");
    }

    #[test]
    fn outcome_projections_sum_to_one(twice in 1u32..=6, seed in any::<u64>(), dir in direction()) {
        let s = random_state(twice, seed);
        let st = embed_state(&s).unwrap();
        let total: f64 = s
            .spin()
            .magnetic_numbers()
            .map(|mp| projection_probability(&st, &outcome_subspace(s.spin(), mp, &dir).unwrap()).unwrap())
            .sum();
        prop_assert!((total - 1.0).abs() < 1e-10, "{total}");
    }

    #[test]
    fn cascade_law_is_order_free_and_conserved(twice in 1u32..=7, seed in any::<u64>(), dir in direction()) {
        let s = random_state(twice, seed);
        let st = embed_state(&s).unwrap();
        let mut order: Vec<usize> = (0..st.slots()).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed ^ 1));
        let default = exact_cascade_distribution(&st, &dir).unwrap();
        let shuffled = exact_cascade_distribution_ordered(&st, &dir, &order).unwrap();
        prop_assert!(default.max_abs_diff(&shuffled) < 1e-12);
        prop_assert!((default.total() - 1.0).abs() < 1e-12);
        prop_assert!(default.max_abs_diff(&born_distribution(&s, &dir).unwrap()) < 1e-9);
    }

    #[test]
    fn cascade_is_deterministic_per_seed(twice in 1u32..=6, seed in any::<u64>(), dir in direction()) {
        let st = embed_state(&random_state(twice, seed)).unwrap();
        let a = run_cascade(&st, &dir, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let b = run_cascade(&st, &dir, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn symmetric_state_slots_look_alike(twice in 2u32..=8, seed in any::<u64>()) {
        let st = embed_state(&random_state(twice, seed)).unwrap();
        let first = reduced_density(&st, 0).unwrap();
        for slot in 0..st.slots() {
            prop_assert!(reduced_density(&st, slot).unwrap().max_abs_diff(&first) < 1e-12);
            let split = biorthogonal_split(&st, slot).unwrap();
            prop_assert!((split.a_plus.powi(2) + split.a_minus.powi(2) - 1.0).abs() < 1e-12);
        }
    }
}
