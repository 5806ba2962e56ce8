//! Kernels, metrics, bandwidth selection and Gram matrices.
//!
//! Three families are supported:
//!
//! * Gaussian, `exp(-‖a − b‖² / (2σ²))` with `σ` in units of input distance;
//! * Brownian, `‖a‖ + ‖b‖ − ‖a − b‖` (Euclidean norms, so it covers `ℝ^d`);
//! * the SO(3) kernel `πθ(π − θ) / (8 sin θ)` of the geodesic angle `θ`.

use crate::error::{Error, Result};
use crate::linalg::SymmetricMatrix;
use crate::sample::{PointKind, PointRef, Points, Rotation3};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Below this distance from 0 or π the SO(3) kernel returns its limit π²/8.
pub const SO3_SINGULAR_CUTOFF: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum KernelFamily {
    Gaussian { bandwidth: f64 },
    Brownian,
    So3Rotation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub family: KernelFamily,
    pub input_kind: PointKind,
}

impl KernelSpec {
    pub fn gaussian(bandwidth: f64, dim: usize) -> Result<Self> {
        Self::new(KernelFamily::Gaussian { bandwidth }, PointKind::RealVector(dim))
    }

    pub fn brownian(dim: usize) -> Result<Self> {
        Self::new(KernelFamily::Brownian, PointKind::RealVector(dim))
    }

    pub fn so3() -> Self {
        KernelSpec {
            family: KernelFamily::So3Rotation,
            input_kind: PointKind::Rotation3,
        }
    }

    pub fn new(family: KernelFamily, input_kind: PointKind) -> Result<Self> {
        match (family, input_kind) {
            (KernelFamily::Gaussian { bandwidth }, PointKind::RealVector(d)) => {
                if !(bandwidth > 0.0 && bandwidth.is_finite()) {
                    return Err(Error::InvalidKernel(format!(
                        "Gaussian bandwidth must be positive and finite, got {bandwidth}"
                    )));
                }
                if d == 0 {
                    return Err(Error::InvalidKernel("zero-dimensional input".into()));
                }
            }
            (KernelFamily::Brownian, PointKind::RealVector(d)) if d > 0 => {}
            (KernelFamily::So3Rotation, PointKind::Rotation3) => {}
            (family, kind) => {
                return Err(Error::InvalidKernel(format!(
                    "kernel {family:?} cannot act on {kind:?}"
                )))
            }
        }
        Ok(KernelSpec { family, input_kind })
    }

    /// Checks that every point of `points` is a valid input.
    pub fn check_points(&self, points: &Points) -> Result<()> {
        if points.kind() != self.input_kind {
            return Err(Error::DimensionMismatch {
                expected: format!("{:?}", self.input_kind),
                found: format!("{:?}", points.kind()),
            });
        }
        Ok(())
    }

    /// Kernel value without shape checks. Callers must have validated both
    /// points against `input_kind`.
    #[inline]
    pub fn eval_unchecked(&self, a: PointRef<'_>, b: PointRef<'_>) -> f64 {
        match (self.family, a, b) {
            (KernelFamily::Gaussian { bandwidth }, PointRef::Real(a), PointRef::Real(b)) => {
                (squared_distance(a, b) * (-1.0 / (2.0 * bandwidth * bandwidth))).exp()
            }
            (KernelFamily::Brownian, PointRef::Real(a), PointRef::Real(b)) => {
                norm(a) + norm(b) - squared_distance(a, b).sqrt()
            }
            (KernelFamily::So3Rotation, PointRef::Rotation(a), PointRef::Rotation(b)) => {
                so3_kernel_of_angle(angle_unchecked(a, b))
            }
            _ => unreachable!("kernel evaluated on unchecked point kinds"),
        }
    }
}

/// `k(a, b)` for `spec`, with shape checks on both points.
pub fn eval_kernel(spec: &KernelSpec, a: PointRef<'_>, b: PointRef<'_>) -> Result<f64> {
    for p in [a, b] {
        if p.kind() != spec.input_kind {
            return Err(Error::DimensionMismatch {
                expected: format!("{:?}", spec.input_kind),
                found: format!("{:?}", p.kind()),
            });
        }
    }
    Ok(spec.eval_unchecked(a, b))
}

#[inline]
fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[inline]
fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[inline]
fn angle_unchecked(a: &Rotation3, b: &Rotation3) -> f64 {
    ((a.trace_against(b) - 1.0) / 2.0).clamp(-1.0, 1.0).acos()
}

/// Geodesic angle θ ∈ [0, π] between two rotations: `cos θ = (Tr(BᵀA) − 1)/2`.
///
/// Both arguments are [`Rotation3`] values, which are validated on
/// construction, so this cannot fail.
pub fn so3_geodesic_angle(a: &Rotation3, b: &Rotation3) -> f64 {
    angle_unchecked(a, b)
}

/// `πθ(π − θ) / (8 sin θ)`, continued by its limit π²/8 at both endpoints.
pub fn so3_kernel_of_angle(theta: f64) -> f64 {
    if theta < SO3_SINGULAR_CUTOFF || PI - theta < SO3_SINGULAR_CUTOFF {
        PI * PI / 8.0
    } else {
        PI * theta * (PI - theta) / (8.0 * theta.sin())
    }
}

/// Distance used for neighbour search and the median heuristic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Euclidean,
    So3Geodesic,
}

impl Metric {
    pub fn for_kind(kind: PointKind) -> Metric {
        match kind {
            PointKind::RealVector(_) => Metric::Euclidean,
            PointKind::Rotation3 => Metric::So3Geodesic,
        }
    }

    pub fn check_points(&self, points: &Points) -> Result<()> {
        match (self, points.kind()) {
            (Metric::Euclidean, PointKind::RealVector(_)) => Ok(()),
            (Metric::So3Geodesic, PointKind::Rotation3) => Ok(()),
            (m, k) => Err(Error::DimensionMismatch {
                expected: format!("points for metric {m:?}"),
                found: format!("{k:?}"),
            }),
        }
    }

    #[inline]
    pub fn distance(&self, a: PointRef<'_>, b: PointRef<'_>) -> f64 {
        match (self, a, b) {
            (Metric::Euclidean, PointRef::Real(a), PointRef::Real(b)) => {
                squared_distance(a, b).sqrt()
            }
            (Metric::So3Geodesic, PointRef::Rotation(a), PointRef::Rotation(b)) => {
                angle_unchecked(a, b)
            }
            _ => unreachable!("metric applied to unchecked point kinds"),
        }
    }
}

/// Median of all pairwise distances `{d(p_i, p_j) : i < j}`.
///
/// For an even number of pairs the two middle values are averaged. When more
/// than half of the pairs coincide the median is zero, which is not a usable
/// bandwidth; the median of the strictly positive distances is returned
/// instead.
pub fn median_heuristic_bandwidth(points: &Points, metric: Metric) -> Result<f64> {
    metric.check_points(points)?;
    let n = points.len();
    if n < 2 {
        return Err(Error::DegenerateSample(
            "median heuristic needs at least two points".into(),
        ));
    }
    // Euclidean medians are taken on squared distances (same order) and
    // square-rooted at the end.
    let squared = matches!((metric, points), (Metric::Euclidean, Points::Real { .. }));
    let mut dists = Vec::with_capacity(n * (n - 1) / 2);
    match points {
        Points::Real { dim, data } if squared => {
            for (i, a) in data.chunks_exact(*dim).enumerate() {
                for b in data[(i + 1) * dim..].chunks_exact(*dim) {
                    dists.push(squared_distance(a, b));
                }
            }
        }
        _ => {
            for i in 0..n {
                let pi = points.get(i);
                for j in (i + 1)..n {
                    dists.push(metric.distance(pi, points.get(j)));
                }
            }
        }
    }
    let med = median_in_place(&mut dists, squared);
    if med > 0.0 {
        return Ok(med);
    }
    dists.retain(|&d| d > 0.0);
    if dists.is_empty() {
        return Err(Error::DegenerateSample("all pairwise distances are zero".into()));
    }
    Ok(median_in_place(&mut dists, squared))
}

/// Median of `values`, or of their square roots when `squared`.
fn median_in_place(values: &mut [f64], squared: bool) -> f64 {
    let root = |v: f64| if squared { v.sqrt() } else { v };
    let len = values.len();
    let mid = len / 2;
    let (lower, upper, _) = values.select_nth_unstable_by(mid, f64::total_cmp);
    let upper = root(*upper);
    if len % 2 == 1 {
        upper
    } else {
        let lower_max = root(lower.iter().copied().fold(f64::NEG_INFINITY, f64::max));
        0.5 * (lower_max + upper)
    }
}

/// Gram matrix `[k(p_i, p_j)]`.
pub fn gram_matrix(spec: &KernelSpec, points: &Points) -> Result<SymmetricMatrix> {
    spec.check_points(points)?;
    let n = points.len();
    if n == 0 {
        return Err(Error::EmptySample);
    }
    let mut data = vec![0.0; n * n];
    match (spec.family, points) {
        (KernelFamily::Gaussian { bandwidth }, Points::Real { dim, data: coords }) => {
            let scale = -1.0 / (2.0 * bandwidth * bandwidth);
            let rows: Vec<&[f64]> = coords.chunks_exact(*dim).collect();
            for i in 0..n {
                for j in i..n {
                    let v = (squared_distance(rows[i], rows[j]) * scale).exp();
                    data[i * n + j] = v;
                    data[j * n + i] = v;
                }
            }
        }
        _ => {
            for i in 0..n {
                let pi = points.get(i);
                for j in i..n {
                    let v = spec.eval_unchecked(pi, points.get(j));
                    data[i * n + j] = v;
                    data[j * n + i] = v;
                }
            }
        }
    }
    Ok(SymmetricMatrix::from_symmetric_unchecked(n, data))
}

/// How a kernel is chosen before the data is seen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum KernelChoice {
    Gaussian { bandwidth: Bandwidth },
    Brownian,
    So3Rotation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bandwidth {
    Median,
    Fixed(f64),
}

impl KernelChoice {
    pub fn gaussian_median() -> Self {
        KernelChoice::Gaussian {
            bandwidth: Bandwidth::Median,
        }
    }

    /// Resolves the choice against the points it will act on (the median
    /// heuristic is computed on these points alone).
    pub fn resolve(&self, points: &Points) -> Result<KernelSpec> {
        let kind = points.kind();
        let spec = match (*self, kind) {
            (KernelChoice::Gaussian { bandwidth }, PointKind::RealVector(d)) => {
                let sigma = match bandwidth {
                    Bandwidth::Fixed(s) => s,
                    Bandwidth::Median => median_heuristic_bandwidth(points, Metric::Euclidean)?,
                };
                KernelSpec::gaussian(sigma, d)?
            }
            (KernelChoice::Brownian, PointKind::RealVector(d)) => KernelSpec::brownian(d)?,
            (KernelChoice::So3Rotation, PointKind::Rotation3) => KernelSpec::so3(),
            (choice, kind) => {
                return Err(Error::InvalidKernel(format!(
                    "kernel {choice:?} cannot act on {kind:?}"
                )))
            }
        };
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simgen::rotation_r3;

    fn s(v: f64) -> Vec<f64> {
        vec![v]
    }

    #[test]
    fn gaussian_identity() {
        let k = KernelSpec::gaussian(1.0, 1).unwrap();
        let v = eval_kernel(&k, PointRef::Real(&s(0.0)), PointRef::Real(&s(0.0))).unwrap();
        assert_eq!(v, 1.0);
    }

    #[test]
    fn brownian_diagonal() {
        let k = KernelSpec::brownian(1).unwrap();
        let v = eval_kernel(&k, PointRef::Real(&s(3.0)), PointRef::Real(&s(3.0))).unwrap();
        assert_eq!(v, 6.0);
        let v = eval_kernel(&k, PointRef::Real(&s(-3.0)), PointRef::Real(&s(-3.0))).unwrap();
        assert_eq!(v, 6.0);
    }

    #[test]
    fn so3_quarter_turn() {
        let b = rotation_r3(PI / 2.0);
        let theta = so3_geodesic_angle(&Rotation3::IDENTITY, &b);
        assert!((theta - PI / 2.0).abs() < 1e-12);
        let k = KernelSpec::so3();
        let v = eval_kernel(
            &k,
            PointRef::Rotation(&Rotation3::IDENTITY),
            PointRef::Rotation(&b),
        )
        .unwrap();
        // π·(π/2)·(π/2) / (8·sin(π/2))
        let expected = PI.powi(3) / 32.0;
        assert!((v - expected).abs() < 1e-12, "{v} vs {expected}");
    }

    #[test]
    fn so3_angles() {
        let i = Rotation3::IDENTITY;
        assert_eq!(so3_geodesic_angle(&i, &i), 0.0);
        assert!((so3_geodesic_angle(&i, &rotation_r3(PI)) - PI).abs() < 1e-7);
        let a = rotation_r3(0.3);
        let b = rotation_r3(1.0);
        assert!((so3_geodesic_angle(&a, &b) - 0.7).abs() < 1e-12);
    }

    #[test]
    fn so3_kernel_limits() {
        let limit = PI * PI / 8.0;
        assert!((so3_kernel_of_angle(1e-8) - limit).abs() < 1e-6);
        assert!((so3_kernel_of_angle(PI - 1e-8) - limit).abs() < 1e-6);
        // just outside the cutoff the direct formula is used and agrees
        assert!((so3_kernel_of_angle(2e-7) - limit).abs() < 1e-6);
        assert!((so3_kernel_of_angle(PI - 2e-7) - limit).abs() < 1e-6);
    }

    #[test]
    fn shape_errors() {
        let k = KernelSpec::gaussian(1.0, 2).unwrap();
        let r = eval_kernel(&k, PointRef::Real(&[0.0]), PointRef::Real(&[0.0, 1.0]));
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
        let r = eval_kernel(
            &k,
            PointRef::Rotation(&Rotation3::IDENTITY),
            PointRef::Real(&[0.0, 1.0]),
        );
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
        assert!(KernelSpec::gaussian(0.0, 1).is_err());
        assert!(KernelSpec::gaussian(f64::NAN, 1).is_err());
        assert!(KernelSpec::new(KernelFamily::So3Rotation, PointKind::RealVector(9)).is_err());
        assert!(KernelSpec::new(KernelFamily::Brownian, PointKind::Rotation3).is_err());
    }

    #[test]
    fn median_examples() {
        let m = |v: Vec<f64>| median_heuristic_bandwidth(&Points::scalars(v), Metric::Euclidean);
        assert_eq!(m(vec![0.0, 1.0, 2.0]).unwrap(), 1.0);
        assert_eq!(m(vec![0.0, 4.0]).unwrap(), 4.0);
        assert_eq!(m(vec![0.0, 1.0, 3.0, 6.0]).unwrap(), 3.0);
        assert_eq!(m(vec![6.0, 0.0, 3.0, 1.0]).unwrap(), 3.0);
        assert!(matches!(m(vec![2.0, 2.0, 2.0]), Err(Error::DegenerateSample(_))));
        assert!(matches!(m(vec![2.0]), Err(Error::DegenerateSample(_))));
        // five coincident points and one outlier: 10 zero pairs out of 15
        assert_eq!(m(vec![0.0, 0.0, 0.0, 0.0, 0.0, 5.0]).unwrap(), 5.0);
    }

    #[test]
    fn gram_examples() {
        let g = gram_matrix(&KernelSpec::gaussian(1.0, 1).unwrap(), &Points::scalars(vec![0.0]))
            .unwrap();
        assert_eq!(g.get(0, 0), 1.0);
        let g = gram_matrix(&KernelSpec::brownian(1).unwrap(), &Points::scalars(vec![1.0, 2.0]))
            .unwrap();
        assert_eq!(g.row_major(), &[2.0, 2.0, 2.0, 4.0]);
    }

    #[test]
    fn resolve_rejects_mismatch() {
        let pts = Points::scalars(vec![0.0, 1.0]);
        assert!(KernelChoice::So3Rotation.resolve(&pts).is_err());
        let spec = KernelChoice::gaussian_median().resolve(&pts).unwrap();
        assert_eq!(spec.family, KernelFamily::Gaussian { bandwidth: 1.0 });
    }
}
