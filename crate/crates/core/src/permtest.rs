//! Permutation independence tests and Monte Carlo power estimation.
//!
//! Permutation `b` of a test seeded with `seed` shuffles the X rows with a
//! generator seeded by `tagged_seed(seed, "perm", b)`; Y stays fixed. Every
//! permutation and replicate owns its stream, so results are identical for
//! any number of worker threads.

use crate::error::{Error, Result};
use crate::rng::{rng_from_seed, tagged_seed};
use crate::sample::SampleSet;
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::Serialize;

/// A statistic as seen by the test harness.
pub type StatisticFn<'a> = dyn Fn(&SampleSet) -> Result<f64> + Sync + 'a;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PermutationTestResult {
    pub observed_stat: f64,
    pub permutation_stats: Vec<f64>,
    /// `(1 + #{b : T_b ≥ T_obs}) / (1 + B)`
    pub p_value: f64,
    pub permutations: usize,
    pub seed: u64,
}

pub fn p_value(observed: f64, permuted: &[f64]) -> f64 {
    let exceed = permuted.iter().filter(|&&t| t >= observed).count();
    (1 + exceed) as f64 / (1 + permuted.len()) as f64
}

/// X-row permutation number `b` of a test seeded with `seed`.
pub fn permutation(n: usize, seed: u64, b: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng_from_seed(tagged_seed(seed, "perm", b as u64)));
    idx
}

pub fn permutation_test(
    statistic: &StatisticFn<'_>,
    sample: &SampleSet,
    permutations: usize,
    seed: u64,
) -> Result<PermutationTestResult> {
    Ok(permutation_test_many(&[statistic], sample, permutations, seed)?
        .pop()
        .expect("one statistic"))
}

/// Tests several statistics against the same set of permutations.
pub fn permutation_test_many(
    statistics: &[&StatisticFn<'_>],
    sample: &SampleSet,
    permutations: usize,
    seed: u64,
) -> Result<Vec<PermutationTestResult>> {
    if permutations == 0 {
        return Err(Error::InvalidParameter("need at least one permutation".into()));
    }
    let observed = statistics
        .iter()
        .map(|s| s(sample))
        .collect::<Result<Vec<f64>>>()?;
    let n = sample.n();
    let per_perm: Vec<Vec<f64>> = (0..permutations)
        .into_par_iter()
        .map(|b| {
            let permuted = sample.with_permuted_x(&permutation(n, seed, b));
            statistics.iter().map(|s| s(&permuted)).collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    Ok(observed
        .iter()
        .enumerate()
        .map(|(s, &obs)| {
            let stats: Vec<f64> = per_perm.iter().map(|row| row[s]).collect();
            PermutationTestResult {
                observed_stat: obs,
                p_value: p_value(obs, &stats),
                permutation_stats: stats,
                permutations,
                seed,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerEstimate {
    pub scenario: String,
    pub statistic: String,
    pub n: usize,
    pub lambda: f64,
    pub alpha: f64,
    pub replications: usize,
    pub rejections: usize,
    pub power: f64,
    pub standard_error: f64,
}

impl PowerEstimate {
    fn new(scenario: &str, statistic: &str, n: usize, lambda: f64, alpha: f64, p_values: &[f64]) -> Self {
        let replications = p_values.len();
        let rejections = p_values.iter().filter(|&&p| p <= alpha).count();
        let power = rejections as f64 / replications as f64;
        PowerEstimate {
            scenario: scenario.to_string(),
            statistic: statistic.to_string(),
            n,
            lambda,
            alpha,
            replications,
            rejections,
            power,
            standard_error: (power * (1.0 - power) / replications as f64).sqrt(),
        }
    }
}

/// Draws a dataset of size `n` at noise level `lambda` from a seed.
pub type ScenarioFn<'a> = dyn Fn(usize, f64, u64) -> Result<SampleSet> + Sync + 'a;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerDesign {
    pub n: usize,
    pub lambda: f64,
    pub replications: usize,
    pub permutations: usize,
    pub alpha: f64,
    pub seed: u64,
}

impl PowerDesign {
    fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidParameter(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if self.replications == 0 || self.permutations == 0 {
            return Err(Error::InvalidParameter(
                "replications and permutations must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Per-replicate p-values, `[replicate][statistic]`.
pub fn replicate_p_values(
    scenario: &ScenarioFn<'_>,
    statistics: &[&StatisticFn<'_>],
    design: &PowerDesign,
) -> Result<Vec<Vec<f64>>> {
    design.validate()?;
    (0..design.replications)
        .into_par_iter()
        .map(|r| {
            let r = r as u64;
            let data = scenario(design.n, design.lambda, tagged_seed(design.seed, "data", r))?;
            let tests = permutation_test_many(
                statistics,
                &data,
                design.permutations,
                tagged_seed(design.seed, "test", r),
            )?;
            Ok(tests.iter().map(|t| t.p_value).collect())
        })
        .collect()
}

/// Power of each named statistic: the fraction of replicates with
/// `p ≤ alpha`. All statistics see the same datasets and permutations.
pub fn power_estimate(
    scenario_name: &str,
    scenario: &ScenarioFn<'_>,
    statistics: &[(&str, &StatisticFn<'_>)],
    design: &PowerDesign,
) -> Result<Vec<PowerEstimate>> {
    let fns: Vec<&StatisticFn<'_>> = statistics.iter().map(|(_, f)| *f).collect();
    let p = replicate_p_values(scenario, &fns, design)?;
    Ok(statistics
        .iter()
        .enumerate()
        .map(|(s, (name, _))| {
            let ps: Vec<f64> = p.iter().map(|row| row[s]).collect();
            PowerEstimate::new(scenario_name, name, design.n, design.lambda, design.alpha, &ps)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::Points;

    fn toy() -> SampleSet {
        SampleSet::new(
            Points::scalars((0..10).map(|i| i as f64).collect()),
            Points::scalars((0..10).map(|i| (i * i) as f64).collect()),
        )
        .unwrap()
    }

    #[test]
    fn constant_statistic_gives_one() {
        let r = permutation_test(&|_: &SampleSet| Ok(0.3), &toy(), 20, 1).unwrap();
        assert_eq!(r.p_value, 1.0);
        assert_eq!(r.permutation_stats.len(), 20);
    }

    #[test]
    fn add_one_formula() {
        assert_eq!(p_value(1.0, &[0.5]), 0.5);
        assert_eq!(p_value(1.0, &[1.0]), 1.0);
        assert_eq!(p_value(1.0, &[0.0, 2.0, 0.1]), 0.5);
    }

    #[test]
    fn permutations_are_reproducible() {
        assert_eq!(permutation(30, 5, 2), permutation(30, 5, 2));
        assert_ne!(permutation(30, 5, 2), permutation(30, 5, 3));
        let mut p = permutation(30, 5, 2);
        p.sort();
        assert_eq!(p, (0..30).collect::<Vec<_>>());
    }

    #[test]
    fn errors_propagate() {
        let failing = |s: &SampleSet| {
            if s.x().as_scalars().unwrap()[0] == 0.0 {
                Ok(1.0)
            } else {
                Err(Error::NotScalar)
            }
        };
        assert!(permutation_test(&failing, &toy(), 50, 0).is_err());
        assert!(permutation_test(&|_: &SampleSet| Ok(0.0), &toy(), 0, 0).is_err());
    }

    #[test]
    fn single_replicate_power_is_binary() {
        let scen = |n: usize, lambda: f64, seed: u64| crate::simgen::gen_heteroscedastic(n, lambda, seed);
        let stat = |s: &SampleSet| crate::estimators::xi_n(s, 0);
        let design = PowerDesign {
            n: 30,
            lambda: 0.0,
            replications: 1,
            permutations: 19,
            alpha: 0.05,
            seed: 3,
        };
        let est = power_estimate("heteroscedastic", &scen, &[("xi", &stat)], &design).unwrap();
        assert!(est[0].power == 0.0 || est[0].power == 1.0);
        let bad = PowerDesign { alpha: 1.0, ..design };
        assert!(power_estimate("h", &scen, &[("xi", &stat)], &bad).is_err());
    }
}
