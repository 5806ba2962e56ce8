use super::{DenominatorFloor, EstimatorResult, Method, MethodParameter};
use crate::error::{Error, Result};
use crate::kernels::{gram_matrix, KernelSpec};
use crate::linalg::{center_gram, RidgeFactor};
use crate::sample::SampleSet;

/// Per-index numerators and denominators of the RKHS estimator.
///
/// With `A = K̃_X + nε I` and `S = K̃_X A⁻¹`, the smoother is computed as
/// `S = I − nε A⁻¹` (the two factors commute), and `M = K_Y S` as
/// `K_Y − nε (A⁻¹ K_Y)ᵀ`. One Cholesky factorization of `A` and one
/// solve against `K_Y` cover all `n` indices. Only the diagonal of `M Mᵀ`
/// is needed, i.e. squared row norms of `M`.
pub fn rkhs_moments(
    sample: &SampleSet,
    kernel_x: &KernelSpec,
    kernel_y: &KernelSpec,
    epsilon: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be positive and finite, got {epsilon}"
        )));
    }
    let n = sample.n();
    if n < 3 {
        return Err(Error::InsufficientPoints {
            needed: 3,
            available: n,
        });
    }
    let nf = n as f64;
    let ridge = nf * epsilon;

    let k_y = gram_matrix(kernel_y, sample.y())?;
    let centered = center_gram(&gram_matrix(kernel_x, sample.x())?);
    let factor = RidgeFactor::new(&centered, ridge)?;
    // A⁻¹ K_Y, column-major: column i is A⁻¹ (K_Y e_i).
    let solved = factor.solve_mat(k_y.as_faer());
    let s_one: Vec<f64> = factor
        .solve_vec(&vec![1.0; n])
        .into_iter()
        .map(|w| 1.0 - ridge * w)
        .collect();

    let mut numerators = Vec::with_capacity(n);
    let mut denominators = Vec::with_capacity(n);
    for i in 0..n {
        let row = k_y.row(i);
        let solved_col = solved.col_as_slice(i);
        // (K_Y∘K_Y)1, (K_Y∘K_Y)S1, K_Y1, M1 and ‖M_i‖², entry i.
        let (mut sq, mut sq_s, mut row_sum, mut m_one, mut m_norm) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for j in 0..n {
            let kij = row[j];
            let m_ij = kij - ridge * solved_col[j];
            sq += kij * kij;
            sq_s += kij * kij * s_one[j];
            row_sum += kij;
            m_one += kij * s_one[j];
            m_norm += m_ij * m_ij;
        }
        let e = (sq + sq_s - row_sum * row_sum / nf - 2.0 / nf * row_sum * m_one - m_norm) / nf;
        let v = sq / nf - (row_sum / nf) * (row_sum / nf);
        numerators.push(e);
        denominators.push(v);
    }
    Ok((numerators, denominators))
}

/// RKHS (conditional mean embedding) estimate of `D(Y, X)` with
/// regularization `ε`.
pub fn d_rkhs(
    sample: &SampleSet,
    kernel_x: &KernelSpec,
    kernel_y: &KernelSpec,
    epsilon: f64,
    floor: DenominatorFloor,
) -> Result<EstimatorResult> {
    let (e, v) = rkhs_moments(sample, kernel_x, kernel_y, epsilon)?;
    EstimatorResult::from_moments(Method::Rkhs, MethodParameter::Epsilon(epsilon), e, v, floor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::Points;

    #[test]
    fn constant_y_is_degenerate() {
        let s = SampleSet::new(
            Points::scalars(vec![0.0, 1.0, 2.0, 3.0]),
            Points::scalars(vec![5.0; 4]),
        )
        .unwrap();
        let k = KernelSpec::gaussian(1.0, 1).unwrap();
        let r = d_rkhs(&s, &k, &k, 0.1, DenominatorFloor::default());
        assert!(matches!(r, Err(Error::DegenerateVariance { .. })));
    }

    #[test]
    fn rejects_bad_epsilon() {
        let s = SampleSet::new(
            Points::scalars(vec![0.0, 1.0, 2.0]),
            Points::scalars(vec![0.0, 1.0, 2.0]),
        )
        .unwrap();
        let k = KernelSpec::gaussian(1.0, 1).unwrap();
        assert!(d_rkhs(&s, &k, &k, 0.0, DenominatorFloor::default()).is_err());
        assert!(d_rkhs(&s, &k, &k, f64::INFINITY, DenominatorFloor::default()).is_err());
    }

    #[test]
    fn huge_ridge_kills_dependence() {
        let x: Vec<f64> = (0..30).map(|i| (i as f64 * 0.37).sin()).collect();
        let y: Vec<f64> = x.iter().map(|v| v * v).collect();
        let s = SampleSet::new(Points::scalars(x), Points::scalars(y)).unwrap();
        let k = KernelSpec::gaussian(0.5, 1).unwrap();
        let r = d_rkhs(&s, &k, &k, 1e9, DenominatorFloor::default()).unwrap();
        assert!(r.d_hat.abs() <= 1e-3);
        for (e, v) in r.numerators.iter().zip(&r.denominators) {
            assert!((e - v).abs() <= 1e-9 * (1.0 + v.abs()));
        }
    }
}
