mod common;

use common::{jacobi_eigenvalues, rng};
use kir_core::kernels::{eval_kernel, gram_matrix, median_heuristic_bandwidth, so3_kernel_of_angle};
use kir_core::simgen::{rotation_r1, rotation_r3};
use kir_core::{KernelSpec, Metric, PointRef, Points, Rotation3};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;
use std::f64::consts::PI;

fn random_rotation(r: &mut impl Rng) -> Rotation3 {
    rotation_r3(r.random_range(-PI..PI))
        .mul(&rotation_r1(r.random_range(-PI..PI)))
        .mul(&rotation_r3(r.random_range(-PI..PI)))
}

#[test]
fn kernels_are_symmetric() {
    let mut r = rng(1);
    let specs = [KernelSpec::gaussian(0.8, 3).unwrap(), KernelSpec::brownian(3).unwrap()];
    for spec in &specs {
        for _ in 0..1000 {
            let a: Vec<f64> = (0..3).map(|_| r.random_range(-3.0..3.0)).collect();
            let b: Vec<f64> = (0..3).map(|_| r.random_range(-3.0..3.0)).collect();
            let ab = eval_kernel(spec, PointRef::Real(&a), PointRef::Real(&b)).unwrap();
            let ba = eval_kernel(spec, PointRef::Real(&b), PointRef::Real(&a)).unwrap();
            assert!((ab - ba).abs() <= 1e-15);
        }
    }
    let so3 = KernelSpec::so3();
    for _ in 0..1000 {
        let (a, b) = (random_rotation(&mut r), random_rotation(&mut r));
        let ab = eval_kernel(&so3, PointRef::Rotation(&a), PointRef::Rotation(&b)).unwrap();
        let ba = eval_kernel(&so3, PointRef::Rotation(&b), PointRef::Rotation(&a)).unwrap();
        assert!((ab - ba).abs() <= 1e-15);
    }
}

#[test]
fn gaussian_gram_is_positive_semidefinite() {
    let mut r = rng(2);
    for _ in 0..20 {
        let data: Vec<f64> = (0..40).map(|_| r.random_range(-2.0..2.0)).collect();
        let p = Points::real(2, data).unwrap();
        let g = gram_matrix(&KernelSpec::gaussian(r.random_range(0.1..3.0), 2).unwrap(), &p).unwrap();
        let dense: Vec<Vec<f64>> = (0..20).map(|i| g.row(i).to_vec()).collect();
        let min = jacobi_eigenvalues(&dense).into_iter().fold(f64::INFINITY, f64::min);
        assert!(min >= -1e-10, "{min}");
    }
}

#[test]
fn so3_kernel_near_singular_angles() {
    for theta in [1e-8, PI - 1e-8] {
        assert!((so3_kernel_of_angle(theta) - PI * PI / 8.0).abs() < 1e-6);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn median_is_order_invariant(seed in any::<u64>(), n in 2usize..40) {
        let mut r = rng(seed);
        let data: Vec<f64> = (0..2 * n).map(|_| r.random_range(-5.0..5.0)).collect();
        let p = Points::real(2, data).unwrap();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut r);
        let a = median_heuristic_bandwidth(&p, Metric::Euclidean).unwrap();
        let b = median_heuristic_bandwidth(&p.permuted(&perm), Metric::Euclidean).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn gaussian_values_in_unit_interval(a in -10.0f64..10.0, b in -10.0f64..10.0, s in 0.01f64..10.0) {
        let k = eval_kernel(&KernelSpec::gaussian(s, 1).unwrap(), PointRef::Real(&[a]), PointRef::Real(&[b])).unwrap();
        prop_assert!((0.0..=1.0).contains(&k));
    }

    #[test]
    fn so3_kernel_depends_on_relative_rotation(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b, g) = (random_rotation(&mut r), random_rotation(&mut r), random_rotation(&mut r));
        let so3 = KernelSpec::so3();
        let k1 = eval_kernel(&so3, PointRef::Rotation(&a), PointRef::Rotation(&b)).unwrap();
        let (ga, gb) = (g.mul(&a), g.mul(&b));
        let k2 = eval_kernel(&so3, PointRef::Rotation(&ga), PointRef::Rotation(&gb)).unwrap();
        prop_assert!((k1 - k2).abs() < 1e-6);
        prop_assert!(k1 >= 0.0 && k1 <= PI * PI / 8.0 + 1e-9);
    }
}
