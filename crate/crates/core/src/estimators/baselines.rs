use super::{knn_moments, rkhs_moments, DenominatorFloor, Method, MethodParameter};
use crate::error::{Error, Result};
use crate::kernels::{KernelSpec, Metric};
use crate::neighbours::tie_priority;
use crate::sample::SampleSet;
use serde::Serialize;

/// Chatterjee's rank coefficient `ξ_n(X, Y)` for scalar `X` and `Y`.
///
/// Pairs are sorted by `X`; ties in `X` are ordered by a seeded random
/// priority. With `r_i = #{j : Y_j ≤ Y_(i)}` and `l_i = #{j : Y_j ≥ Y_(i)}`
/// the value is `1 − n Σ|r_{i+1} − r_i| / (2 Σ l_i (n − l_i))`, which
/// reduces to `1 − 3 Σ|r_{i+1} − r_i| / (n² − 1)` when `Y` has no ties.
pub fn xi_n(sample: &SampleSet, tie_seed: u64) -> Result<f64> {
    let (x, y) = match (sample.x().as_scalars(), sample.y().as_scalars()) {
        (Some(x), Some(y)) => (x, y),
        _ => return Err(Error::NotScalar),
    };
    let n = x.len();
    if n < 2 {
        return Err(Error::InsufficientPoints {
            needed: 2,
            available: n,
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        x[a].total_cmp(&x[b])
            .then_with(|| tie_priority(tie_seed, usize::MAX, a).cmp(&tie_priority(tie_seed, usize::MAX, b)))
    });

    let mut sorted_y = y.to_vec();
    sorted_y.sort_by(f64::total_cmp);
    // r = #{Y_j ≤ v}, l = #{Y_j ≥ v}
    let count_le = |v: f64| sorted_y.partition_point(|&w| w <= v) as f64;
    let count_ge = |v: f64| (n - sorted_y.partition_point(|&w| w < v)) as f64;

    let ranks: Vec<f64> = order.iter().map(|&i| count_le(y[i])).collect();
    let gaps: f64 = ranks.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
    let nf = n as f64;
    let denom: f64 = y.iter().map(|&v| {
        let l = count_ge(v);
        l * (nf - l)
    }).sum();
    if denom <= 0.0 {
        return Err(Error::DegenerateVariance { dropped: n, n });
    }
    Ok(1.0 - nf * gaps / (2.0 * denom))
}

/// Ratio-of-sums measure `η̂ = 1 − Σ_i E_{n,i} / Σ_i V_{n,i}` built from the
/// same per-index moments as the `D` estimators.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EtaResult {
    pub method: Method,
    pub parameter: MethodParameter,
    pub eta: f64,
    pub eta_clamped: f64,
}

fn eta_from_moments(
    method: Method,
    parameter: MethodParameter,
    e: &[f64],
    v: &[f64],
    floor: DenominatorFloor,
) -> Result<EtaResult> {
    let sum_v: f64 = v.iter().sum();
    if !(sum_v > floor.value) {
        return Err(Error::DegenerateVariance {
            dropped: v.len(),
            n: v.len(),
        });
    }
    let eta = 1.0 - e.iter().sum::<f64>() / sum_v;
    Ok(EtaResult {
        method,
        parameter,
        eta,
        eta_clamped: eta.clamp(0.0, 1.0),
    })
}

pub fn eta_knn(
    sample: &SampleSet,
    kernel_y: &KernelSpec,
    metric_x: Metric,
    k: usize,
    seed: u64,
    floor: DenominatorFloor,
) -> Result<EtaResult> {
    let (e, v) = knn_moments(sample, kernel_y, metric_x, k, seed)?;
    eta_from_moments(Method::Knn, MethodParameter::K(k), &e, &v, floor)
}

pub fn eta_rkhs(
    sample: &SampleSet,
    kernel_x: &KernelSpec,
    kernel_y: &KernelSpec,
    epsilon: f64,
    floor: DenominatorFloor,
) -> Result<EtaResult> {
    let (e, v) = rkhs_moments(sample, kernel_x, kernel_y, epsilon)?;
    eta_from_moments(Method::Rkhs, MethodParameter::Epsilon(epsilon), &e, &v, floor)
}
