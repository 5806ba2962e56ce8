mod common;

use common::{random_sample, rng};
use kir_core::estimators::{d_knn, d_knn_naive, DenominatorFloor};
use kir_core::kernels::median_heuristic_bandwidth;
use kir_core::neighbours::tie_priority;
use kir_core::{KernelSpec, Metric, Points, SampleSet};
use proptest::prelude::*;
use rand::Rng;

#[test]
fn tree_estimator_matches_naive_oracle() {
    let mut r = rng(2024);
    for case in 0..50 {
        let n = r.random_range(8..=200);
        let dx = r.random_range(1..=3);
        let dy = r.random_range(1..=2);
        let grid = case % 3 == 0;
        let k = r.random_range(1..=(n - 2).min(8));
        let sample = random_sample(&mut r, n, dx, dy, grid);
        let ky = if case % 2 == 0 {
            KernelSpec::brownian(dy).unwrap()
        } else {
            let sigma = median_heuristic_bandwidth(sample.y(), Metric::Euclidean).unwrap();
            KernelSpec::gaussian(sigma, dy).unwrap()
        };
        let seed = r.random::<u64>();
        let floor = DenominatorFloor::default();
        let fast = d_knn(&sample, &ky, Metric::Euclidean, k, seed, floor).unwrap();
        let slow = d_knn_naive(&sample, &ky, Metric::Euclidean, k, seed, floor).unwrap();
        assert!(
            (fast.d_hat - slow.d_hat).abs() < 1e-10,
            "case {case}: {} vs {}",
            fast.d_hat,
            slow.d_hat
        );
        for (a, b) in fast.numerators.iter().zip(&slow.numerators) {
            assert!((a - b).abs() < 1e-10, "case {case}");
        }
        assert_eq!(fast.denominators, slow.denominators);
        assert_eq!(fast.dropped_indices, slow.dropped_indices);
    }
}

/// X = 0..4 on a line, Y = (0, 0, 1, 1, 1), Brownian kernel, K = 1.
/// Indices 0 and 1 have zero marginal variance (k(y, 0) = 0) and are
/// dropped; V = 1 for the rest. Working out the leave-one-out neighbours
/// by hand, the only ambiguity is which of two equidistant points a center
/// picks, giving D = 1 − (4 + 8·t1 + 4·t2) / 24.
#[test]
fn hand_computed_line_example() {
    let sample = SampleSet::new(
        Points::scalars(vec![0.0, 1.0, 2.0, 3.0, 4.0]),
        Points::scalars(vec![0.0, 0.0, 1.0, 1.0, 1.0]),
    )
    .unwrap();
    let ky = KernelSpec::brownian(1).unwrap();
    let mut seen = [false; 4];
    for seed in 0..40u64 {
        let t1 = (tie_priority(seed, 1, 2) < tie_priority(seed, 1, 0)) as u8 as f64;
        let t2 = (tie_priority(seed, 2, 1) < tie_priority(seed, 2, 3)) as u8 as f64;
        seen[(2.0 * t1 + t2) as usize] = true;
        let expected = 1.0 - (4.0 + 8.0 * t1 + 4.0 * t2) / 24.0;
        for r in [
            d_knn(&sample, &ky, Metric::Euclidean, 1, seed, DenominatorFloor::default()).unwrap(),
            d_knn_naive(&sample, &ky, Metric::Euclidean, 1, seed, DenominatorFloor::default()).unwrap(),
        ] {
            assert_eq!(r.dropped_indices, vec![0, 1]);
            assert_eq!(r.retained, 3);
            assert!((r.denominators[2] - 1.0).abs() < 1e-15);
            assert!((r.d_hat - expected).abs() < 1e-14, "seed {seed}: {} vs {expected}", r.d_hat);
        }
    }
    assert!(seen.iter().all(|&s| s), "40 seeds should hit every tie pattern");
}

#[test]
fn strict_floor_rejects_dropped_indices() {
    let sample = SampleSet::new(
        Points::scalars(vec![0.0, 1.0, 2.0, 3.0, 4.0]),
        Points::scalars(vec![0.0, 0.0, 1.0, 1.0, 1.0]),
    )
    .unwrap();
    let ky = KernelSpec::brownian(1).unwrap();
    assert!(d_knn(&sample, &ky, Metric::Euclidean, 1, 0, DenominatorFloor::strict(1e-12)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn numerators_nonnegative_and_bounded(seed in any::<u64>(), n in 6usize..60, k in 1usize..4) {
        let mut r = rng(seed);
        let sample = random_sample(&mut r, n, 2, 1, seed % 2 == 0);
        let ky = KernelSpec::gaussian(0.7, 1).unwrap();
        let res = d_knn(&sample, &ky, Metric::Euclidean, k, seed, DenominatorFloor::default()).unwrap();
        prop_assert!(res.numerators.iter().all(|&e| e >= 0.0));
        prop_assert!(res.denominators.iter().all(|&v| v >= -1e-15));
        prop_assert!(res.d_hat <= 1.0);
        prop_assert!((0.0..=1.0).contains(&res.d_hat_clamped));
        let again = d_knn(&sample, &ky, Metric::Euclidean, k, seed, DenominatorFloor::default()).unwrap();
        prop_assert_eq!(res, again);
    }
}
