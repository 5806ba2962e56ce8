//! Dense symmetric linear algebra for the RKHS estimator.
//!
//! Matrices are stored row-major. Factorizations go through `faer`'s LLᵀ
//! (Cholesky) decomposition run sequentially, so results do not depend on the
//! number of worker threads.

use crate::error::{Error, Result};
use faer::linalg::solvers::Solve;
use faer::{Mat, MatRef, Side};

/// Maximum allowed `|A_ij − A_ji|` when constructing a [`SymmetricMatrix`].
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: format!("{} entries", n * n),
                found: format!("{} entries", data.len()),
            });
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let d = (data[i * n + j] - data[j * n + i]).abs();
                if !(d <= SYMMETRY_TOLERANCE) {
                    return Err(Error::InvalidParameter(format!(
                        "matrix is not symmetric at ({i}, {j}): deviation {d:e}"
                    )));
                }
            }
        }
        Ok(SymmetricMatrix { n, data })
    }

    /// Caller guarantees `data` is an exactly symmetric `n × n` row-major array.
    pub(crate) fn from_symmetric_unchecked(n: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), n * n);
        SymmetricMatrix { n, data }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = f(i, j);
            }
        }
        Self::from_row_major(n, data)
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        SymmetricMatrix { n, data }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn row_major(&self) -> &[f64] {
        &self.data
    }

    pub fn as_faer(&self) -> MatRef<'_, f64> {
        MatRef::from_row_major_slice(&self.data, self.n, self.n)
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).iter().sum()).collect()
    }

    /// `A · v`
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.n).all(|i| ((i + 1)..self.n).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= tol))
    }
}

/// `H K H` with `H = I − (1/n) 1 1ᵀ`, computed as
/// `K_ij − r_i − r_j + g` (row means `r`, grand mean `g`).
pub fn center_gram(k: &SymmetricMatrix) -> SymmetricMatrix {
    let n = k.n;
    let nf = n as f64;
    let means: Vec<f64> = k.row_sums().into_iter().map(|s| s / nf).collect();
    let grand = means.iter().sum::<f64>() / nf;
    let mut data = Vec::with_capacity(n * n);
    for i in 0..n {
        let row = k.row(i);
        // (m_i + m_j) is commutative, so entry (j, i) rounds identically
        data.extend((0..n).map(|j| row[j] - (means[i] + means[j]) + grand));
    }
    SymmetricMatrix { n, data }
}

/// Entrywise product `A ∘ B`.
pub fn hadamard(a: &SymmetricMatrix, b: &SymmetricMatrix) -> Result<SymmetricMatrix> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch {
            expected: format!("order {}", a.n),
            found: format!("order {}", b.n),
        });
    }
    let data = a.data.iter().zip(&b.data).map(|(x, y)| x * y).collect();
    Ok(SymmetricMatrix { n: a.n, data })
}

/// Cholesky factor of `K + ridge · I`, reusable across right-hand sides.
pub struct RidgeFactor {
    llt: faer::linalg::solvers::Llt<f64>,
    n: usize,
    /// Diagonal jitter added on the retry, zero if the first attempt worked.
    pub jitter: f64,
}

impl std::fmt::Debug for RidgeFactor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RidgeFactor")
            .field("n", &self.n)
            .field("jitter", &self.jitter)
            .finish()
    }
}

impl RidgeFactor {
    /// Factorizes `K + ridge · I`. If the factorization fails, one retry is
    /// made with `1e-10 · trace(K)/n` added to the diagonal; a second failure
    /// is reported as [`Error::NotPositiveDefinite`].
    pub fn new(k: &SymmetricMatrix, ridge: f64) -> Result<Self> {
        if !(ridge > 0.0 && ridge.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "ridge must be positive and finite, got {ridge}"
            )));
        }
        let n = k.n;
        let factor = |shift: f64| {
            // column-major fill; reading (j, i) keeps the row-major source contiguous
            let a = Mat::from_fn(n, n, |i, j| {
                let v = k.get(j, i);
                if i == j {
                    v + shift
                } else {
                    v
                }
            });
            a.llt(Side::Lower)
        };
        match factor(ridge) {
            Ok(llt) => Ok(RidgeFactor { llt, n, jitter: 0.0 }),
            Err(_) => {
                let jitter = 1e-10 * (k.trace() / n as f64).abs().max(f64::MIN_POSITIVE);
                match factor(ridge + jitter) {
                    Ok(llt) => Ok(RidgeFactor { llt, n, jitter }),
                    Err(faer::linalg::cholesky::llt::factor::LltError::NonPositivePivot {
                        index,
                    }) => Err(Error::NotPositiveDefinite { pivot: index }),
                }
            }
        }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn solve_vec(&self, rhs: &[f64]) -> Vec<f64> {
        assert_eq!(rhs.len(), self.n);
        let b = MatRef::from_column_major_slice(rhs, self.n, 1);
        let x = self.llt.solve(b);
        (0..self.n).map(|i| x[(i, 0)]).collect()
    }

    pub fn solve_mat(&self, rhs: MatRef<'_, f64>) -> Mat<f64> {
        assert_eq!(rhs.nrows(), self.n);
        self.llt.solve(rhs)
    }
}

/// `(K + ridge · I)⁻¹ rhs` for a vector right-hand side.
pub fn ridge_solve(k: &SymmetricMatrix, ridge: f64, rhs: &[f64]) -> Result<Vec<f64>> {
    check_rhs(k.n, rhs.len())?;
    Ok(RidgeFactor::new(k, ridge)?.solve_vec(rhs))
}

/// `(K + ridge · I)⁻¹ rhs` for a matrix right-hand side.
pub fn ridge_solve_matrix(k: &SymmetricMatrix, ridge: f64, rhs: MatRef<'_, f64>) -> Result<Mat<f64>> {
    check_rhs(k.n, rhs.nrows())?;
    Ok(RidgeFactor::new(k, ridge)?.solve_mat(rhs))
}

fn check_rhs(n: usize, rows: usize) -> Result<()> {
    if n != rows {
        return Err(Error::DimensionMismatch {
            expected: format!("{n} rows"),
            found: format!("{rows} rows"),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(n: usize, v: &[f64]) -> SymmetricMatrix {
        SymmetricMatrix::from_row_major(n, v.to_vec()).unwrap()
    }

    #[test]
    fn center_constant_is_zero() {
        let k = SymmetricMatrix::from_fn(4, |_, _| 1.0).unwrap();
        assert!(center_gram(&k).max_abs() < 1e-15);
    }

    #[test]
    fn center_identity_2x2() {
        let c = center_gram(&SymmetricMatrix::identity(2));
        assert_eq!(c.row_major(), &[0.5, -0.5, -0.5, 0.5]);
    }

    #[test]
    fn center_is_idempotent() {
        let k = SymmetricMatrix::from_fn(6, |i, j| ((i * j) as f64).cos() + (i + j) as f64).unwrap();
        let once = center_gram(&k);
        let twice = center_gram(&once);
        for (a, b) in once.row_major().iter().zip(twice.row_major()) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn hadamard_examples() {
        let a = m(2, &[1.0, 2.0, 2.0, 3.0]);
        let b = m(2, &[4.0, 5.0, 5.0, 6.0]);
        assert_eq!(hadamard(&a, &b).unwrap().row_major(), &[4.0, 10.0, 10.0, 18.0]);
        assert_eq!(
            hadamard(&a, &SymmetricMatrix::identity(2)).unwrap().row_major(),
            &[1.0, 0.0, 0.0, 3.0]
        );
        let ones = SymmetricMatrix::from_fn(2, |_, _| 1.0).unwrap();
        assert_eq!(hadamard(&a, &ones).unwrap(), a);
        assert!(hadamard(&a, &SymmetricMatrix::identity(3)).is_err());
    }

    #[test]
    fn ridge_examples() {
        let zero = m(2, &[0.0; 4]);
        let x = ridge_solve(&zero, 2.0, &[4.0, 6.0]).unwrap();
        assert!((x[0] - 2.0).abs() < 1e-14 && (x[1] - 3.0).abs() < 1e-14);
        let x = ridge_solve(&SymmetricMatrix::identity(5), 1.0, &[1.0; 5]).unwrap();
        assert!(x.iter().all(|v| (v - 0.5).abs() < 1e-15));
        assert!(ridge_solve(&zero, 0.0, &[1.0, 1.0]).is_err());
        assert!(ridge_solve(&zero, 1.0, &[1.0]).is_err());
    }

    #[test]
    fn asymmetric_rejected() {
        assert!(SymmetricMatrix::from_row_major(2, vec![1.0, 2.0, 2.1, 1.0]).is_err());
    }

    #[test]
    fn indefinite_fails_loudly() {
        // eigenvalues 3 and -1; ridge 0.5 leaves it indefinite
        let k = m(2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(
            RidgeFactor::new(&k, 0.5),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }
}
