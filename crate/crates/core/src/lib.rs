//! Kernel integrated R² dependence measure.
//!
//! `D(Y, X)` averages, over the marginal law of `Y`, the fraction of the
//! variance of the kernel feature `k(Y, y)` explained by `X`. It is 0 exactly
//! when `X` and `Y` are independent and 1 exactly when `Y` is a measurable
//! function of `X`.
//!
//! The crate provides two sample estimators ([`estimators::d_knn`] on a
//! metric space, [`estimators::d_rkhs`] via conditional mean embeddings),
//! Chatterjee's `ξ_n` and ratio-of-sums `η` baselines, exact population values
//! for discrete joints ([`oracle`]), permutation tests ([`permtest`]) and the
//! synthetic scenarios used to measure power ([`simgen`]).

pub mod dataio;
pub mod error;
pub mod estimators;
pub mod kernels;
pub mod linalg;
pub mod neighbours;
pub mod oracle;
pub mod permtest;
pub mod rng;
pub mod sample;
pub mod simgen;

pub use error::{Error, Result};
pub use estimators::{DenominatorFloor, EstimatorResult, Statistic};
pub use kernels::{Bandwidth, KernelChoice, KernelSpec, Metric};
pub use sample::{PointKind, PointRef, Points, Rotation3, SampleSet};
