//! Subcommand runners. Each returns a report that embeds its resolved
//! configuration.

use crate::args::Format;
use crate::config::{MethodName, RunConfig};
use kir_core::dataio::load_csv;
use kir_core::estimators::{d_knn, d_rkhs, eta_knn, eta_rkhs, xi_n, DenominatorFloor, EstimatorResult};
use kir_core::oracle::{
    population_d_alt_discrete, population_d_discrete, population_eta_discrete, DiscreteJoint,
};
use kir_core::permtest::{
    permutation_test_many, power_estimate, PermutationTestResult, PowerDesign, PowerEstimate,
    StatisticFn,
};
use kir_core::rng::tagged_seed;
use kir_core::simgen;
use kir_core::{Error, KernelChoice, KernelSpec, Metric, PointKind, Result, SampleSet};
use serde::Serialize;
use std::hint::black_box;
use std::time::Instant;

/// Seed of the scenario draw used by `estimate` and `test`.
pub fn data_seed(seed: u64) -> u64 {
    tagged_seed(seed, "data", 0)
}

fn load_sample(config: &RunConfig) -> Result<SampleSet> {
    if let (Some(path), Some(opts)) = (&config.input, &config.csv) {
        return load_csv(path, opts);
    }
    let scenario = config
        .scenario
        .ok_or_else(|| Error::InvalidParameter("no data source".into()))?;
    simgen::generate(scenario, config.n_grid[0], config.lambda_grid[0], data_seed(config.seed))
}

#[derive(Debug, Clone, Serialize)]
pub struct EstimateReport {
    pub config: RunConfig,
    pub n: usize,
    pub method: MethodName,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value_clamped: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel_x: Option<KernelSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel_y: Option<KernelSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<EstimatorResult>,
}

fn resolve(choice: Option<KernelChoice>, points: &kir_core::Points) -> Result<KernelSpec> {
    choice.unwrap_or_else(KernelChoice::gaussian_median).resolve(points)
}

pub fn run_estimate(config: &RunConfig) -> Result<EstimateReport> {
    let sample = load_sample(config)?;
    estimate_on(config, &sample)
}

pub fn estimate_on(config: &RunConfig, sample: &SampleSet) -> Result<EstimateReport> {
    let method = config.methods[0];
    let metric = Metric::for_kind(sample.x().kind());
    let floor = DenominatorFloor::default();
    let k = config.k.unwrap_or_default();
    let eps = config.epsilon.unwrap_or_default();
    let mut report = EstimateReport {
        config: config.clone(),
        n: sample.n(),
        method,
        value: f64::NAN,
        value_clamped: None,
        kernel_x: None,
        kernel_y: None,
        result: None,
    };
    match method {
        MethodName::Xi => report.value = xi_n(sample, config.seed)?,
        MethodName::Knn | MethodName::EtaKnn => {
            let ky = resolve(config.kernel_y, sample.y())?;
            report.kernel_y = Some(ky);
            if method == MethodName::Knn {
                let r = d_knn(sample, &ky, metric, k, config.seed, floor)?;
                report.value = r.d_hat;
                report.value_clamped = Some(r.d_hat_clamped);
                report.result = Some(r);
            } else {
                let r = eta_knn(sample, &ky, metric, k, config.seed, floor)?;
                report.value = r.eta;
                report.value_clamped = Some(r.eta_clamped);
            }
        }
        MethodName::Rkhs | MethodName::EtaRkhs => {
            let kx = resolve(config.kernel_x, sample.x())?;
            let ky = resolve(config.kernel_y, sample.y())?;
            report.kernel_x = Some(kx);
            report.kernel_y = Some(ky);
            if method == MethodName::Rkhs {
                let r = d_rkhs(sample, &kx, &ky, eps, floor)?;
                report.value = r.d_hat;
                report.value_clamped = Some(r.d_hat_clamped);
                report.result = Some(r);
            } else {
                let r = eta_rkhs(sample, &kx, &ky, eps, floor)?;
                report.value = r.eta;
                report.value_clamped = Some(r.eta_clamped);
            }
        }
    }
    Ok(report)
}

type BoxedStatistic = Box<StatisticFn<'static>>;

fn statistic_fns(config: &RunConfig) -> Vec<(MethodName, BoxedStatistic)> {
    config
        .methods
        .iter()
        .map(|&m| {
            let stat = config.statistic(m);
            let seed = config.seed;
            let f: BoxedStatistic = Box::new(move |s: &SampleSet| stat.evaluate(s, seed));
            (m, f)
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct TestEntry {
    pub method: MethodName,
    #[serde(flatten)]
    pub result: PermutationTestResult,
}

#[derive(Debug, Clone, Serialize)]
pub struct TestReport {
    pub config: RunConfig,
    pub n: usize,
    pub tests: Vec<TestEntry>,
}

pub fn run_test(config: &RunConfig) -> Result<TestReport> {
    let sample = load_sample(config)?;
    let fns = statistic_fns(config);
    let refs: Vec<&StatisticFn<'_>> = fns.iter().map(|(_, f)| f.as_ref()).collect();
    let results = permutation_test_many(
        &refs,
        &sample,
        config.permutations.unwrap_or_default(),
        config.seed,
    )?;
    Ok(TestReport {
        config: config.clone(),
        n: sample.n(),
        tests: fns
            .iter()
            .zip(results)
            .map(|((m, _), result)| TestEntry { method: *m, result })
            .collect(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PowerReport {
    pub config: RunConfig,
    pub estimates: Vec<PowerEstimate>,
}

pub fn run_power(config: &RunConfig) -> Result<PowerReport> {
    let scenario = config
        .scenario
        .ok_or_else(|| Error::InvalidParameter("power needs --scenario".into()))?;
    let fns = statistic_fns(config);
    let named: Vec<(&str, &StatisticFn<'_>)> =
        fns.iter().map(|(m, f)| (m.name(), f.as_ref())).collect();
    let generate = move |n: usize, lambda: f64, seed: u64| simgen::generate(scenario, n, lambda, seed);
    let mut estimates = Vec::new();
    for &lambda in &config.lambda_grid {
        let design = PowerDesign {
            n: config.n_grid[0],
            lambda,
            replications: config.replications.unwrap_or_default(),
            permutations: config.permutations.unwrap_or_default(),
            alpha: config.alpha.unwrap_or_default(),
            seed: config.seed,
        };
        estimates.extend(power_estimate(scenario.name(), &generate, &named, &design)?);
    }
    Ok(PowerReport {
        config: config.clone(),
        estimates,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BenchPoint {
    pub n: usize,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchSeries {
    pub method: MethodName,
    pub points: Vec<BenchPoint>,
    /// Least-squares slope of log(seconds) on log(n).
    pub slope: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub config: RunConfig,
    pub repetitions: usize,
    pub series: Vec<BenchSeries>,
}

pub const BENCH_REPETITIONS: usize = 3;

pub fn log_log_slope(points: &[BenchPoint]) -> f64 {
    let xs: Vec<f64> = points.iter().map(|p| (p.n as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.seconds.max(1e-12).ln()).collect();
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Shortest wall time of one timed batch.
pub const BENCH_MIN_BATCH_SECONDS: f64 = 0.05;

/// One warm-up call per sample size, then [`BENCH_REPETITIONS`] timed rounds
/// over the whole grid. Each repetition times a batch of calls lasting at
/// least [`BENCH_MIN_BATCH_SECONDS`] and records the per-call time; each size
/// keeps its fastest repetition. Interleaving the rounds spreads slow periods
/// of a shared host across all sizes.
pub fn run_bench(config: &RunConfig) -> Result<BenchReport> {
    let scenario = config
        .scenario
        .ok_or_else(|| Error::InvalidParameter("bench needs --scenario".into()))?;
    let lambda = config.lambda_grid.first().copied().unwrap_or(0.0);
    let samples = config
        .n_grid
        .iter()
        .map(|&n| simgen::generate(scenario, n, lambda, tagged_seed(config.seed, "bench", n as u64)))
        .collect::<Result<Vec<_>>>()?;
    let fns = statistic_fns(config);
    let mut series = Vec::new();
    for (method, f) in &fns {
        let mut batch = Vec::with_capacity(samples.len());
        for sample in &samples {
            let start = Instant::now();
            black_box(f(sample)?);
            let warm = start.elapsed().as_secs_f64().max(1e-9);
            batch.push((BENCH_MIN_BATCH_SECONDS / warm).ceil().max(1.0) as usize);
        }
        let mut best = vec![f64::INFINITY; samples.len()];
        for _ in 0..BENCH_REPETITIONS {
            for ((slot, sample), &calls) in best.iter_mut().zip(&samples).zip(&batch) {
                let start = Instant::now();
                for _ in 0..calls {
                    black_box(f(black_box(sample))?);
                }
                *slot = slot.min(start.elapsed().as_secs_f64() / calls as f64);
            }
        }
        let points: Vec<BenchPoint> = config
            .n_grid
            .iter()
            .zip(best)
            .map(|(&n, seconds)| BenchPoint { n, seconds })
            .collect();
        series.push(BenchSeries {
            method: *method,
            slope: log_log_slope(&points),
            points,
        });
    }
    Ok(BenchReport {
        config: config.clone(),
        repetitions: BENCH_REPETITIONS,
        series,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub config: RunConfig,
    pub kernel_y: KernelSpec,
    pub nx: usize,
    pub ny: usize,
    pub d: f64,
    pub d_alt: f64,
    pub eta: f64,
}

pub fn run_oracle(config: &RunConfig) -> Result<OracleReport> {
    let path = config
        .input
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("oracle needs --input".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let joint = DiscreteJoint::from_json(&text)?;
    let choice = config.kernel_y.unwrap_or(match joint.y_points().kind() {
        PointKind::Rotation3 => KernelChoice::So3Rotation,
        PointKind::RealVector(_) => KernelChoice::Brownian,
    });
    let ky = choice.resolve(joint.y_points())?;
    Ok(OracleReport {
        config: config.clone(),
        kernel_y: ky,
        nx: joint.nx(),
        ny: joint.ny(),
        d: population_d_discrete(&joint, &ky)?,
        d_alt: population_d_alt_discrete(&joint, &ky)?,
        eta: population_eta_discrete(&joint, &ky)?,
    })
}

pub fn to_json<T: Serialize>(report: &T) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
    s.push('\n');
    s
}

pub fn power_csv(report: &PowerReport) -> String {
    let mut s = String::from("lambda,statistic,power,se\n");
    for e in &report.estimates {
        s.push_str(&format!("{},{},{},{}\n", e.lambda, e.statistic, e.power, e.standard_error));
    }
    s
}

pub fn bench_csv(report: &BenchReport) -> String {
    let mut s = String::from("method,n,seconds\n");
    for series in &report.series {
        for p in &series.points {
            s.push_str(&format!("{},{},{}\n", series.method.name(), p.n, p.seconds));
        }
    }
    s
}

/// Runs the configured subcommand and renders its report.
pub fn execute(config: &RunConfig) -> Result<String> {
    use crate::config::Subcommand::*;
    Ok(match config.subcommand {
        Estimate => to_json(&run_estimate(config)?),
        Test => to_json(&run_test(config)?),
        Power => {
            let r = run_power(config)?;
            match config.format {
                Format::Json => to_json(&r),
                Format::Csv => power_csv(&r),
            }
        }
        Bench => {
            let r = run_bench(config)?;
            match config.format {
                Format::Json => to_json(&r),
                Format::Csv => bench_csv(&r),
            }
        }
        Oracle => to_json(&run_oracle(config)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<BenchPoint> = [100usize, 200, 400]
            .iter()
            .map(|&n| BenchPoint { n, seconds: 3e-9 * (n as f64).powi(2) })
            .collect();
        assert!((log_log_slope(&pts) - 2.0).abs() < 1e-12);
    }
}
