//! Points and paired samples.
//!
//! A side of a sample is either a block of real vectors of a fixed dimension
//! (stored flat, row per point) or a list of 3×3 rotation matrices.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Tolerance for the orthogonality and determinant checks on [`Rotation3`].
pub const ROTATION_TOLERANCE: f64 = 1e-9;

/// A 3×3 rotation matrix in row-major order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation3 {
    m: [f64; 9],
}

impl Rotation3 {
    pub const IDENTITY: Rotation3 = Rotation3 {
        m: [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
    };

    /// Validates `RᵀR = I` and `det R = 1` within [`ROTATION_TOLERANCE`].
    pub fn new(entries: [f64; 9]) -> Result<Self> {
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidRotation("non-finite entry".into()));
        }
        let r = Rotation3 { m: entries };
        let dev = r.orthogonality_defect();
        if dev > ROTATION_TOLERANCE {
            return Err(Error::InvalidRotation(format!(
                "max |RᵀR - I| = {dev:e} exceeds {ROTATION_TOLERANCE:e}"
            )));
        }
        let det = r.determinant();
        if (det - 1.0).abs() > ROTATION_TOLERANCE {
            return Err(Error::InvalidRotation(format!("determinant {det} is not +1")));
        }
        Ok(r)
    }

    pub fn from_slice(entries: &[f64]) -> Result<Self> {
        let arr: [f64; 9] = entries.try_into().map_err(|_| Error::DimensionMismatch {
            expected: "9 rotation entries".into(),
            found: format!("{} entries", entries.len()),
        })?;
        Self::new(arr)
    }

    pub fn entries(&self) -> &[f64; 9] {
        &self.m
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.m[3 * row + col]
    }

    pub fn transpose(&self) -> Rotation3 {
        let m = &self.m;
        Rotation3 {
            m: [m[0], m[3], m[6], m[1], m[4], m[7], m[2], m[5], m[8]],
        }
    }

    /// Matrix product `self · other`. Closed on SO(3), so no re-validation.
    pub fn mul(&self, other: &Rotation3) -> Rotation3 {
        let mut out = [0.0; 9];
        for r in 0..3 {
            for c in 0..3 {
                out[3 * r + c] = (0..3).map(|k| self.get(r, k) * other.get(k, c)).sum();
            }
        }
        Rotation3 { m: out }
    }

    pub fn apply(&self, v: [f64; 3]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (r, o) in out.iter_mut().enumerate() {
            *o = (0..3).map(|k| self.get(r, k) * v[k]).sum();
        }
        out
    }

    pub fn determinant(&self) -> f64 {
        let m = &self.m;
        m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6])
            + m[2] * (m[3] * m[7] - m[4] * m[6])
    }

    /// max |(RᵀR − I)_{ij}|
    pub fn orthogonality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let dot: f64 = (0..3).map(|k| self.get(k, i) * self.get(k, j)).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    /// `Tr(Bᵀ A)` with `A = self`, i.e. the Frobenius inner product.
    #[inline]
    pub fn trace_against(&self, other: &Rotation3) -> f64 {
        self.m.iter().zip(other.m.iter()).map(|(a, b)| a * b).sum()
    }
}

/// The kind of points on one side of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointKind {
    RealVector(usize),
    Rotation3,
}

/// Borrowed view of a single point.
#[derive(Debug, Clone, Copy)]
pub enum PointRef<'a> {
    Real(&'a [f64]),
    Rotation(&'a Rotation3),
}

impl PointRef<'_> {
    pub fn kind(&self) -> PointKind {
        match self {
            PointRef::Real(v) => PointKind::RealVector(v.len()),
            PointRef::Rotation(_) => PointKind::Rotation3,
        }
    }
}

impl std::fmt::Display for PointRef<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PointRef::Real(v) if v.len() == 1 => write!(f, "{}", v[0]),
            PointRef::Real(v) => write!(f, "{v:?}"),
            PointRef::Rotation(r) => write!(f, "{:?}", r.entries()),
        }
    }
}

/// One side of a sample: `n` points of a common kind.
#[derive(Debug, Clone, PartialEq)]
pub enum Points {
    Real { dim: usize, data: Vec<f64> },
    Rotations(Vec<Rotation3>),
}

impl Points {
    /// Real vectors from a flat row-major buffer.
    pub fn real(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("point dimension must be positive".into()));
        }
        if data.len() % dim != 0 {
            return Err(Error::DimensionMismatch {
                expected: format!("a multiple of {dim} values"),
                found: format!("{} values", data.len()),
            });
        }
        Ok(Points::Real { dim, data })
    }

    pub fn scalars(values: Vec<f64>) -> Self {
        Points::Real { dim: 1, data: values }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map(Vec::len).ok_or(Error::EmptySample)?;
        let mut data = Vec::with_capacity(dim * rows.len());
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: format!("dimension {dim}"),
                    found: format!("dimension {}", row.len()),
                });
            }
            data.extend_from_slice(row);
        }
        Points::real(dim, data)
    }

    pub fn rotations(r: Vec<Rotation3>) -> Self {
        Points::Rotations(r)
    }

    pub fn len(&self) -> usize {
        match self {
            Points::Real { dim, data } => data.len() / dim,
            Points::Rotations(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn kind(&self) -> PointKind {
        match self {
            Points::Real { dim, .. } => PointKind::RealVector(*dim),
            Points::Rotations(_) => PointKind::Rotation3,
        }
    }

    #[inline]
    pub fn get(&self, i: usize) -> PointRef<'_> {
        match self {
            Points::Real { dim, data } => PointRef::Real(&data[i * dim..(i + 1) * dim]),
            Points::Rotations(r) => PointRef::Rotation(&r[i]),
        }
    }

    /// Values of a scalar side, or `None` for vectors and rotations.
    pub fn as_scalars(&self) -> Option<&[f64]> {
        match self {
            Points::Real { dim: 1, data } => Some(data),
            _ => None,
        }
    }

    /// New point list whose `i`-th entry is `self[perm[i]]`.
    pub fn permuted(&self, perm: &[usize]) -> Points {
        match self {
            Points::Real { dim, data } => {
                let mut out = Vec::with_capacity(data.len());
                for &p in perm {
                    out.extend_from_slice(&data[p * dim..(p + 1) * dim]);
                }
                Points::Real { dim: *dim, data: out }
            }
            Points::Rotations(r) => Points::Rotations(perm.iter().map(|&p| r[p]).collect()),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = PointRef<'_>> + '_ {
        (0..self.len()).map(move |i| self.get(i))
    }
}

/// Paired observations `(X_i, Y_i)`, `i = 0..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    x: Points,
    y: Points,
}

impl SampleSet {
    pub fn new(x: Points, y: Points) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} y points", x.len()),
                found: format!("{} y points", y.len()),
            });
        }
        if x.is_empty() {
            return Err(Error::EmptySample);
        }
        Ok(SampleSet { x, y })
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn x(&self) -> &Points {
        &self.x
    }

    pub fn y(&self) -> &Points {
        &self.y
    }

    /// Same Y, X rows rearranged so that row `i` carries `X[perm[i]]`.
    pub fn with_permuted_x(&self, perm: &[usize]) -> SampleSet {
        SampleSet {
            x: self.x.permuted(perm),
            y: self.y.clone(),
        }
    }

    /// Both sides rearranged by the same permutation.
    pub fn permuted_rows(&self, perm: &[usize]) -> SampleSet {
        SampleSet {
            x: self.x.permuted(perm),
            y: self.y.permuted(perm),
        }
    }

    pub fn into_parts(self) -> (Points, Points) {
        (self.x, self.y)
    }
}
