use super::{DenominatorFloor, EstimatorResult, Method, MethodParameter};
use crate::error::{Error, Result};
use crate::kernels::{KernelSpec, Metric};
use crate::neighbours::{brute_force_k_nearest, build_vp_tree, NeighbourTable};
use crate::sample::SampleSet;

/// Largest sample accepted by [`d_knn_naive`].
pub const NAIVE_GUARD: usize = 500;

fn check_knn_inputs(sample: &SampleSet, kernel_y: &KernelSpec, metric_x: Metric, k: usize) -> Result<()> {
    kernel_y.check_points(sample.y())?;
    metric_x.check_points(sample.x())?;
    let n = sample.n();
    if k == 0 {
        return Err(Error::InvalidParameter("K must be at least 1".into()));
    }
    if n < k + 2 {
        return Err(Error::InsufficientPoints {
            needed: k + 2,
            available: n,
        });
    }
    Ok(())
}

/// `k_Y(Y_a, Y_i)` for all `a`.
fn kernel_column(sample: &SampleSet, kernel_y: &KernelSpec, i: usize, out: &mut [f64]) {
    let yi = sample.y().get(i);
    for (a, slot) in out.iter_mut().enumerate() {
        *slot = kernel_y.eval_unchecked(sample.y().get(a), yi);
    }
}

/// `V_{n,i}` from a kernel column, leaving out the diagonal term.
fn marginal_variance(col: &[f64], i: usize) -> f64 {
    let m = (col.len() - 1) as f64;
    let (mut s1, mut s2) = (0.0, 0.0);
    for (j, &v) in col.iter().enumerate() {
        if j != i {
            s1 += v;
            s2 += v * v;
        }
    }
    s2 / m - (s1 / m) * (s1 / m)
}

/// Per-index numerators and denominators of the nearest-neighbour estimator.
///
/// The neighbour set of `X_j` with `X_i` removed is the first `K` entries of
/// `X_j`'s `(K+1)`-nearest-neighbour list after deleting `i`; because the
/// tie-break order is fixed per center this equals a fresh `K`-NN query that
/// excludes `{i, j}`.
pub fn knn_moments(
    sample: &SampleSet,
    kernel_y: &KernelSpec,
    metric_x: Metric,
    k: usize,
    seed: u64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    check_knn_inputs(sample, kernel_y, metric_x, k)?;
    let n = sample.n();
    let tree = build_vp_tree(sample.x(), metric_x, seed)?;
    let table = NeighbourTable::build(&tree, k + 1, seed)?;
    let scale = 1.0 / (2.0 * k as f64 * (n - 1) as f64);

    let mut numerators = Vec::with_capacity(n);
    let mut denominators = Vec::with_capacity(n);
    let mut col = vec![0.0; n];
    for i in 0..n {
        kernel_column(sample, kernel_y, i, &mut col);
        let mut e = 0.0;
        for j in (0..n).filter(|&j| j != i) {
            let kj = col[j];
            for l in table.neighbours_without(j, i, k) {
                let diff = kj - col[l];
                e += diff * diff;
            }
        }
        numerators.push(e * scale);
        denominators.push(marginal_variance(&col, i));
    }
    Ok((numerators, denominators))
}

/// Nearest-neighbour estimate of `D(Y, X)` with `K` neighbours.
pub fn d_knn(
    sample: &SampleSet,
    kernel_y: &KernelSpec,
    metric_x: Metric,
    k: usize,
    seed: u64,
    floor: DenominatorFloor,
) -> Result<EstimatorResult> {
    let (e, v) = knn_moments(sample, kernel_y, metric_x, k, seed)?;
    EstimatorResult::from_moments(Method::Knn, MethodParameter::K(k), e, v, floor)
}

/// Reference implementation of [`d_knn`]: a fresh brute-force neighbour
/// sort for every `(i, j)` pair. Cubic in `n`, so capped at [`NAIVE_GUARD`].
pub fn d_knn_naive(
    sample: &SampleSet,
    kernel_y: &KernelSpec,
    metric_x: Metric,
    k: usize,
    seed: u64,
    floor: DenominatorFloor,
) -> Result<EstimatorResult> {
    let n = sample.n();
    if n > NAIVE_GUARD {
        return Err(Error::GuardExceeded {
            n,
            limit: NAIVE_GUARD,
        });
    }
    check_knn_inputs(sample, kernel_y, metric_x, k)?;
    let y = sample.y();
    let ky = |a: usize, b: usize| kernel_y.eval_unchecked(y.get(a), y.get(b));
    let mut numerators = Vec::with_capacity(n);
    let mut denominators = Vec::with_capacity(n);
    for i in 0..n {
        let mut e = 0.0;
        let (mut s1, mut s2) = (0.0, 0.0);
        for j in (0..n).filter(|&j| j != i) {
            let nbrs = brute_force_k_nearest(sample.x(), metric_x, j, &[i], k, seed)?;
            let kji = ky(j, i);
            for l in nbrs {
                let diff = kji - ky(l, i);
                e += diff * diff;
            }
            s1 += kji;
            s2 += kji * kji;
        }
        let m = (n - 1) as f64;
        numerators.push(e / (2.0 * k as f64 * m));
        denominators.push(s2 / m - (s1 / m) * (s1 / m));
    }
    EstimatorResult::from_moments(Method::KnnNaive, MethodParameter::K(k), numerators, denominators, floor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{median_heuristic_bandwidth, KernelSpec};
    use crate::sample::Points;

    fn sample(x: &[f64], y: &[f64]) -> SampleSet {
        SampleSet::new(Points::scalars(x.to_vec()), Points::scalars(y.to_vec())).unwrap()
    }

    #[test]
    fn constant_y_is_degenerate() {
        let s = sample(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0], &[2.0; 6]);
        let k = KernelSpec::gaussian(1.0, 1).unwrap();
        let r = d_knn(&s, &k, Metric::Euclidean, 1, 0, DenominatorFloor::default());
        assert!(matches!(r, Err(Error::DegenerateVariance { dropped: 6, n: 6 })));
        let r = d_knn_naive(&s, &k, Metric::Euclidean, 1, 0, DenominatorFloor::default());
        assert!(matches!(r, Err(Error::DegenerateVariance { .. })));
    }

    #[test]
    fn too_few_points() {
        let s = sample(&[0.0, 1.0, 2.0], &[0.0, 1.0, 2.0]);
        let k = KernelSpec::brownian(1).unwrap();
        let r = d_knn(&s, &k, Metric::Euclidean, 2, 0, DenominatorFloor::default());
        assert!(matches!(r, Err(Error::InsufficientPoints { .. })));
        let r = d_knn(&s, &k, Metric::Euclidean, 0, 0, DenominatorFloor::default());
        assert!(matches!(r, Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn naive_guard() {
        let v: Vec<f64> = (0..501).map(|i| i as f64).collect();
        let s = sample(&v, &v);
        let k = KernelSpec::brownian(1).unwrap();
        let r = d_knn_naive(&s, &k, Metric::Euclidean, 1, 0, DenominatorFloor::default());
        assert!(matches!(r, Err(Error::GuardExceeded { n: 501, limit: 500 })));
    }

    #[test]
    fn identity_beats_shuffles() {
        let v: Vec<f64> = (1..=6).map(|i| i as f64).collect();
        let s = sample(&v, &v);
        let sigma = median_heuristic_bandwidth(s.y(), Metric::Euclidean).unwrap();
        let k = KernelSpec::gaussian(sigma, 1).unwrap();
        let floor = DenominatorFloor::default();
        let fast = d_knn(&s, &k, Metric::Euclidean, 1, 3, floor).unwrap();
        let slow = d_knn_naive(&s, &k, Metric::Euclidean, 1, 3, floor).unwrap();
        assert!((fast.d_hat - slow.d_hat).abs() <= 1e-10);

        use rand::seq::SliceRandom;
        let mut rng = crate::rng::rng_from_seed(99);
        let mut total = 0.0;
        for _ in 0..50 {
            let mut y = v.clone();
            y.shuffle(&mut rng);
            let sh = sample(&v, &y);
            total += d_knn(&sh, &k, Metric::Euclidean, 1, 3, floor).unwrap().d_hat;
        }
        assert!(fast.d_hat > total / 50.0, "{} vs {}", fast.d_hat, total / 50.0);
    }
}
