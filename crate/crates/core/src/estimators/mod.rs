//! Estimators of the kernel integrated R² and the baseline measures.
//!
//! Both estimators of `D(Y, X)` produce, for every sample index `i`, a
//! numerator `E_{n,i}` (expected conditional variance of `k(Y, Y_i)`) and a
//! denominator `V_{n,i}` (marginal variance of `k(Y, Y_i)`), and return
//! `1 − mean_i E_{n,i} / V_{n,i}`.

mod baselines;
mod knn;
mod rkhs;

pub use baselines::{eta_knn, eta_rkhs, xi_n, EtaResult};
pub use knn::{d_knn, d_knn_naive, knn_moments, NAIVE_GUARD};
pub use rkhs::{d_rkhs, rkhs_moments};

use crate::error::{Error, Result};
use crate::kernels::{KernelChoice, Metric};
use crate::sample::SampleSet;
use serde::{Deserialize, Serialize};

pub const DEFAULT_K: usize = 5;
pub const DEFAULT_EPSILON: f64 = 1e-4;
pub const DEFAULT_DENOMINATOR_FLOOR: f64 = 1e-12;

/// Handling of per-index denominators `V_{n,i} ≤ value`.
///
/// By default such indices are dropped and listed in
/// [`EstimatorResult::dropped_indices`]; in strict mode any such index is an
/// error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DenominatorFloor {
    pub value: f64,
    pub strict: bool,
}

impl Default for DenominatorFloor {
    fn default() -> Self {
        DenominatorFloor {
            value: DEFAULT_DENOMINATOR_FLOOR,
            strict: false,
        }
    }
}

impl DenominatorFloor {
    pub fn new(value: f64) -> Self {
        DenominatorFloor { value, strict: false }
    }

    pub fn strict(value: f64) -> Self {
        DenominatorFloor { value, strict: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Knn,
    KnnNaive,
    Rkhs,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodParameter {
    K(usize),
    Epsilon(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimatorResult {
    pub method: Method,
    pub parameter: MethodParameter,
    pub n: usize,
    /// Number of indices entering the average.
    pub retained: usize,
    pub d_hat: f64,
    pub d_hat_clamped: f64,
    pub numerators: Vec<f64>,
    pub denominators: Vec<f64>,
    pub dropped_indices: Vec<usize>,
}

impl EstimatorResult {
    pub(crate) fn from_moments(
        method: Method,
        parameter: MethodParameter,
        numerators: Vec<f64>,
        denominators: Vec<f64>,
        floor: DenominatorFloor,
    ) -> Result<Self> {
        let n = numerators.len();
        let dropped_indices: Vec<usize> = denominators
            .iter()
            .enumerate()
            .filter(|(_, &v)| !(v > floor.value))
            .map(|(i, _)| i)
            .collect();
        let retained = n - dropped_indices.len();
        if retained == 0 || (floor.strict && !dropped_indices.is_empty()) {
            return Err(Error::DegenerateVariance {
                dropped: dropped_indices.len(),
                n,
            });
        }
        let sum: f64 = numerators
            .iter()
            .zip(&denominators)
            .filter(|(_, &v)| v > floor.value)
            .map(|(e, v)| e / v)
            .sum();
        let d_hat = 1.0 - sum / retained as f64;
        Ok(EstimatorResult {
            method,
            parameter,
            n,
            retained,
            d_hat,
            d_hat_clamped: d_hat.clamp(0.0, 1.0),
            numerators,
            denominators,
            dropped_indices,
        })
    }
}

/// A scalar dependence statistic that can be recomputed on permuted data.
///
/// Kernel choices are resolved on each sample they are applied to, so a
/// median-heuristic bandwidth is recomputed per dataset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "statistic", rename_all = "snake_case")]
pub enum Statistic {
    DKnn { k: usize, kernel_y: KernelChoice },
    DRkhs { epsilon: f64, kernel_x: KernelChoice, kernel_y: KernelChoice },
    Xi,
    EtaKnn { k: usize, kernel_y: KernelChoice },
    EtaRkhs { epsilon: f64, kernel_x: KernelChoice, kernel_y: KernelChoice },
}

impl Statistic {
    pub fn id(&self) -> &'static str {
        match self {
            Statistic::DKnn { .. } => "d_knn",
            Statistic::DRkhs { .. } => "d_rkhs",
            Statistic::Xi => "xi",
            Statistic::EtaKnn { .. } => "eta_knn",
            Statistic::EtaRkhs { .. } => "eta_rkhs",
        }
    }

    /// Raw (unclamped) value on `sample`. `seed` drives tie-breaking.
    pub fn evaluate(&self, sample: &SampleSet, seed: u64) -> Result<f64> {
        let floor = DenominatorFloor::default();
        let metric = Metric::for_kind(sample.x().kind());
        match *self {
            Statistic::DKnn { k, kernel_y } => {
                let ky = kernel_y.resolve(sample.y())?;
                Ok(d_knn(sample, &ky, metric, k, seed, floor)?.d_hat)
            }
            Statistic::DRkhs {
                epsilon,
                kernel_x,
                kernel_y,
            } => {
                let kx = kernel_x.resolve(sample.x())?;
                let ky = kernel_y.resolve(sample.y())?;
                Ok(d_rkhs(sample, &kx, &ky, epsilon, floor)?.d_hat)
            }
            Statistic::Xi => xi_n(sample, seed),
            Statistic::EtaKnn { k, kernel_y } => {
                let ky = kernel_y.resolve(sample.y())?;
                Ok(eta_knn(sample, &ky, metric, k, seed, floor)?.eta)
            }
            Statistic::EtaRkhs {
                epsilon,
                kernel_x,
                kernel_y,
            } => {
                let kx = kernel_x.resolve(sample.x())?;
                let ky = kernel_y.resolve(sample.y())?;
                Ok(eta_rkhs(sample, &kx, &ky, epsilon, floor)?.eta)
            }
        }
    }
}
