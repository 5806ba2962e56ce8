#![allow(dead_code)]

use kir_core::{Points, SampleSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Real-valued sample with `dx`- and `dy`-dimensional coordinates. When
/// `grid` is set, X coordinates are small integers so distance ties are common.
pub fn random_sample(r: &mut ChaCha8Rng, n: usize, dx: usize, dy: usize, grid: bool) -> SampleSet {
    let x: Vec<f64> = (0..n * dx)
        .map(|_| if grid { r.random_range(0..4) as f64 } else { r.random_range(-1.0..1.0) })
        .collect();
    let y: Vec<f64> = (0..n)
        .flat_map(|i| {
            let base = x[i * dx];
            (0..dy)
                .map(|_| base * base + r.random_range(-0.5..0.5))
                .collect::<Vec<_>>()
        })
        .collect();
    SampleSet::new(Points::real(dx, x).unwrap(), Points::real(dy, y).unwrap()).unwrap()
}

pub fn rows(p: &Points) -> Vec<Vec<f64>> {
    match p {
        Points::Real { dim, data } => data.chunks(*dim).map(|c| c.to_vec()).collect(),
        Points::Rotations(r) => r.iter().map(|m| m.entries().to_vec()).collect(),
    }
}

pub fn gaussian(a: &[f64], b: &[f64], sigma: f64) -> f64 {
    let d2: f64 = a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum();
    (-d2 / (2.0 * sigma * sigma)).exp()
}

pub fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let (n, m, p) = (a.len(), b.len(), b[0].len());
    let mut out = vec![vec![0.0; p]; n];
    for i in 0..n {
        for k in 0..m {
            for j in 0..p {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

/// Gauss-Jordan inverse with partial pivoting.
pub fn invert(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut aug: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&p, &q| aug[p][col].abs().total_cmp(&aug[q][col].abs()))
            .unwrap();
        aug.swap(col, pivot);
        let d = aug[col][col];
        assert!(d.abs() > 1e-300, "singular matrix");
        for v in aug[col].iter_mut() {
            *v /= d;
        }
        for r in 0..n {
            if r != col {
                let f = aug[r][col];
                if f != 0.0 {
                    for c in 0..2 * n {
                        aug[r][c] -= f * aug[col][c];
                    }
                }
            }
        }
    }
    aug.into_iter().map(|r| r[n..].to_vec()).collect()
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
pub fn jacobi_eigenvalues(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let mut m = a.to_vec();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i][j] * m[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    (0..n).map(|i| m[i][i]).collect()
}

/// Literal dense evaluation: K̃ = H K_X H, M = K_Y K̃ (K̃ + nεI)⁻¹ with an
/// explicit Gauss-Jordan inverse, then the per-index quadratic forms.
pub fn explicit_rkhs_moments(x: &[Vec<f64>], y: &[Vec<f64>], sx: f64, sy: f64, eps: f64) -> (Vec<f64>, Vec<f64>) {
    let n = x.len();
    let nf = n as f64;
    let kx: Vec<Vec<f64>> = x.iter().map(|a| x.iter().map(|b| gaussian(a, b, sx)).collect()).collect();
    let ky: Vec<Vec<f64>> = y.iter().map(|a| y.iter().map(|b| gaussian(a, b, sy)).collect()).collect();
    let h: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 - 1.0 / nf } else { -1.0 / nf }).collect())
        .collect();
    let kt = matmul(&matmul(&h, &kx), &h);
    let mut a = kt.clone();
    for (i, row) in a.iter_mut().enumerate() {
        row[i] += nf * eps;
    }
    let s = matmul(&kt, &invert(&a));
    let m = matmul(&ky, &s);
    let ky2: Vec<Vec<f64>> = ky.iter().map(|r| r.iter().map(|v| v * v).collect()).collect();
    let ones: Vec<Vec<f64>> = vec![vec![1.0]; n];
    let ky2_1 = matmul(&ky2, &ones);
    let ky2_s1 = matmul(&ky2, &matmul(&s, &ones));
    let ky_1 = matmul(&ky, &ones);
    let m_1 = matmul(&m, &ones);
    let mt: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| m[j][i]).collect()).collect();
    let mmt = matmul(&m, &mt);
    let mut e = Vec::new();
    let mut v = Vec::new();
    for i in 0..n {
        let term = ky2_1[i][0] + ky2_s1[i][0]
            - ky_1[i][0] * ky_1[i][0] / nf
            - 2.0 / nf * ky_1[i][0] * m_1[i][0]
            - mmt[i][i];
        e.push(term / nf);
        v.push(ky2_1[i][0] / nf - (ky_1[i][0] / nf).powi(2));
    }
    (e, v)
}
