//! Synthetic scenarios.
//!
//! All generators draw from a `ChaCha8Rng` seeded with the given seed,
//! consuming variates point by point in a fixed order, and turn uniforms
//! into normals with [`standard_normal`].

use crate::error::{Error, Result};
use crate::rng::{open_uniform, rng_from_seed, standard_normal};
use crate::sample::{Points, Rotation3, SampleSet};
use serde::{Deserialize, Serialize};

/// Rotation by `angle` about the x-axis (in the y–z plane).
pub fn rotation_r1(angle: f64) -> Rotation3 {
    let (s, c) = angle.sin_cos();
    Rotation3::new([1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c]).expect("valid rotation")
}

/// Rotation by `angle` about the z-axis (in the x–y plane).
pub fn rotation_r3(angle: f64) -> Rotation3 {
    let (s, c) = angle.sin_cos();
    Rotation3::new([c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0]).expect("valid rotation")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Heteroscedastic,
    So3,
    SyntheticSong,
}

impl std::str::FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "heteroscedastic" => Ok(Scenario::Heteroscedastic),
            "so3" => Ok(Scenario::So3),
            "synthetic-song" | "synthetic_song" => Ok(Scenario::SyntheticSong),
            other => Err(Error::InvalidParameter(format!("unknown scenario {other:?}"))),
        }
    }
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::Heteroscedastic => "heteroscedastic",
            Scenario::So3 => "so3",
            Scenario::SyntheticSong => "synthetic-song",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub n: usize,
    pub lambda: f64,
    pub seed: u64,
}

impl ScenarioConfig {
    pub fn generate(&self) -> Result<SampleSet> {
        generate(self.scenario, self.n, self.lambda, self.seed)
    }
}

/// Draws a dataset from `scenario`. `lambda` is ignored by the synthetic
/// regression scenario.
pub fn generate(scenario: Scenario, n: usize, lambda: f64, seed: u64) -> Result<SampleSet> {
    match scenario {
        Scenario::Heteroscedastic => gen_heteroscedastic(n, lambda, seed),
        Scenario::So3 => gen_so3(n, lambda, seed),
        Scenario::SyntheticSong => gen_synthetic_song(n, seed),
    }
}

fn check(n: usize, lambda: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::EmptySample);
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidParameter(format!("lambda must lie in [0, 1], got {lambda}")));
    }
    Ok(())
}

/// `X ~ U[−1, 1]`, `Y = 3(σ(X)(1 − λ) + λ) ε` with `σ(X) = 1{|X| ≤ 0.5}`.
pub fn gen_heteroscedastic(n: usize, lambda: f64, seed: u64) -> Result<SampleSet> {
    check(n, lambda)?;
    let mut rng = rng_from_seed(seed);
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for _ in 0..n {
        let x = 2.0 * open_uniform(&mut rng) - 1.0;
        let eps = standard_normal(&mut rng);
        let sigma = if x.abs() <= 0.5 { 1.0 } else { 0.0 };
        xs.push(x);
        ys.push(3.0 * (sigma * (1.0 - lambda) + lambda) * eps);
    }
    SampleSet::new(Points::scalars(xs), Points::scalars(ys))
}

/// `X ~ N(0, I₃)`, `Y = R₁(X₁ + λε₁) R₃(X₂X₃ + λε₂)`.
pub fn gen_so3(n: usize, lambda: f64, seed: u64) -> Result<SampleSet> {
    check(n, lambda)?;
    let mut rng = rng_from_seed(seed);
    let mut xs = Vec::with_capacity(3 * n);
    let mut ys = Vec::with_capacity(n);
    for _ in 0..n {
        let x = [
            standard_normal(&mut rng),
            standard_normal(&mut rng),
            standard_normal(&mut rng),
        ];
        let e1 = standard_normal(&mut rng);
        let e2 = standard_normal(&mut rng);
        xs.extend_from_slice(&x);
        ys.push(so3_response(x, lambda * e1, lambda * e2));
    }
    SampleSet::new(Points::real(3, xs)?, Points::rotations(ys))
}

/// `R₁(x₁ + noise₁) R₃(x₂x₃ + noise₂)`
pub fn so3_response(x: [f64; 3], noise1: f64, noise2: f64) -> Rotation3 {
    rotation_r1(x[0] + noise1).mul(&rotation_r3(x[1] * x[2] + noise2))
}

pub const SONG_DIM: usize = 90;
pub const SONG_ACTIVE: usize = 5;

/// `X ~ N(0, I₉₀)`, `Y = Σ_{j<5} sin(X_j) + 0.5 ε`, then `Y` is standardized
/// to mean 0 and (population) variance 1.
pub fn gen_synthetic_song(n: usize, seed: u64) -> Result<SampleSet> {
    check(n, 0.0)?;
    let mut rng = rng_from_seed(seed);
    let mut xs = Vec::with_capacity(SONG_DIM * n);
    let mut ys = Vec::with_capacity(n);
    for _ in 0..n {
        let start = xs.len();
        for _ in 0..SONG_DIM {
            xs.push(standard_normal(&mut rng));
        }
        let eps = standard_normal(&mut rng);
        ys.push(song_response(&xs[start..start + SONG_DIM], eps));
    }
    crate::dataio::standardize_in_place(&mut ys, "y")?;
    SampleSet::new(Points::real(SONG_DIM, xs)?, Points::scalars(ys))
}

/// Unstandardized response of the synthetic regression scenario.
pub fn song_response(x: &[f64], eps: f64) -> f64 {
    x[..SONG_ACTIVE].iter().map(|v| v.sin()).sum::<f64>() + 0.5 * eps
}
