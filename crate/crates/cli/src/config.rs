//! Validated, fully resolved run configuration.

use crate::args::{Command, Flags, Format, YKindArg};
use crate::values::{parse_bandwidth, parse_kernel, parse_lambda_grid, parse_n_grid};
use kir_core::dataio::{CsvOptions, YKind};
use kir_core::estimators::{Statistic, DEFAULT_EPSILON, DEFAULT_K};
use kir_core::simgen::Scenario;
use kir_core::{Bandwidth, Error, KernelChoice, Result};
use serde::Serialize;
use std::path::PathBuf;
use std::str::FromStr;

pub const DEFAULT_PERMUTATIONS: usize = 200;
pub const DEFAULT_REPLICATIONS: usize = 100;
pub const DEFAULT_ALPHA: f64 = 0.05;
pub const DEFAULT_N: usize = 100;
pub const DEFAULT_POWER_GRID: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];
pub const KNN_BENCH_GRID: [usize; 3] = [500, 1000, 2000];
pub const RKHS_BENCH_GRID: [usize; 3] = [200, 400, 800];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Subcommand {
    Estimate,
    Test,
    Power,
    Bench,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodName {
    Knn,
    Rkhs,
    Xi,
    EtaKnn,
    EtaRkhs,
}

impl FromStr for MethodName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "knn" => Ok(MethodName::Knn),
            "rkhs" => Ok(MethodName::Rkhs),
            "xi" => Ok(MethodName::Xi),
            "eta-knn" => Ok(MethodName::EtaKnn),
            "eta-rkhs" => Ok(MethodName::EtaRkhs),
            other => Err(Error::InvalidParameter(format!(
                "unknown method {other:?} (expected knn, rkhs, xi, eta-knn or eta-rkhs)"
            ))),
        }
    }
}

impl MethodName {
    pub fn name(&self) -> &'static str {
        match self {
            MethodName::Knn => "knn",
            MethodName::Rkhs => "rkhs",
            MethodName::Xi => "xi",
            MethodName::EtaKnn => "eta-knn",
            MethodName::EtaRkhs => "eta-rkhs",
        }
    }

    fn uses_kernel_x(&self) -> bool {
        matches!(self, MethodName::Rkhs | MethodName::EtaRkhs)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<CsvOptions>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<Scenario>,
    /// Scenario sample sizes; more than one only for `bench`.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub n_grid: Vec<usize>,
    /// Scenario noise levels; more than one only for `power`.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub lambda_grid: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub methods: Vec<MethodName>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel_x: Option<KernelChoice>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel_y: Option<KernelChoice>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub permutations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replications: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub seed: u64,
    #[serde(skip)]
    pub output: Option<PathBuf>,
    pub format: Format,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

fn allowed_flags(sub: Subcommand) -> &'static [&'static str] {
    const ESTIMATE: &[&str] = &[
        "input", "scenario", "x-cols", "y-cols", "y-kind", "standardize", "n", "lambda", "method",
        "kernel-x", "kernel-y", "bandwidth", "k", "epsilon", "seed", "output", "format",
    ];
    const TEST: &[&str] = &[
        "input", "scenario", "x-cols", "y-cols", "y-kind", "standardize", "n", "lambda", "method",
        "kernel-x", "kernel-y", "bandwidth", "k", "epsilon", "permutations", "seed", "output",
        "format",
    ];
    const POWER: &[&str] = &[
        "scenario", "n", "lambda", "lambda-grid", "method", "kernel-x", "kernel-y", "bandwidth",
        "k", "epsilon", "permutations", "replications", "alpha", "seed", "output", "format",
    ];
    const BENCH: &[&str] = &[
        "scenario", "n", "lambda", "method", "kernel-x", "kernel-y", "bandwidth", "k", "epsilon",
        "seed", "output", "format",
    ];
    const ORACLE: &[&str] = &["input", "kernel-y", "bandwidth", "output", "format"];
    match sub {
        Subcommand::Estimate => ESTIMATE,
        Subcommand::Test => TEST,
        Subcommand::Power => POWER,
        Subcommand::Bench => BENCH,
        Subcommand::Oracle => ORACLE,
    }
}

fn check_lambda(v: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(invalid(format!("lambda must lie in [0, 1], got {v}")))
    }
}

impl RunConfig {
    pub fn from_command(command: &Command) -> Result<Self> {
        let (sub, flags) = match command {
            Command::Estimate(f) => (Subcommand::Estimate, f),
            Command::Test(f) => (Subcommand::Test, f),
            Command::Power(f) => (Subcommand::Power, f),
            Command::Bench(f) => (Subcommand::Bench, f),
            Command::Oracle(f) => (Subcommand::Oracle, f),
        };
        Self::from_flags(sub, flags)
    }

    pub fn from_flags(sub: Subcommand, f: &Flags) -> Result<Self> {
        let allowed = allowed_flags(sub);
        if let Some(bad) = f.present().into_iter().find(|p| !allowed.contains(p)) {
            return Err(invalid(format!(
                "--{bad} is not accepted by the {} subcommand",
                format!("{sub:?}").to_lowercase()
            )));
        }
        let format = f.format.unwrap_or_default();
        if format == Format::Csv && !matches!(sub, Subcommand::Power | Subcommand::Bench) {
            return Err(invalid("csv output is only available for power and bench"));
        }
        let bandwidth = match &f.bandwidth {
            Some(b) => parse_bandwidth(b)?,
            None => Bandwidth::Median,
        };
        let mut config = RunConfig {
            subcommand: sub,
            input: None,
            csv: None,
            scenario: None,
            n_grid: Vec::new(),
            lambda_grid: Vec::new(),
            methods: Vec::new(),
            kernel_x: None,
            kernel_y: None,
            k: None,
            epsilon: None,
            permutations: None,
            replications: None,
            alpha: None,
            seed: f.seed.unwrap_or(0),
            output: f.output.clone(),
            format,
        };

        if sub == Subcommand::Oracle {
            config.input = Some(
                f.input
                    .clone()
                    .ok_or_else(|| invalid("oracle needs --input <joint.json>"))?,
            );
            if let Some(name) = &f.kernel_y {
                let choice = parse_kernel(name, bandwidth)?;
                if choice == (KernelChoice::Gaussian { bandwidth: Bandwidth::Median }) {
                    return Err(invalid(
                        "the median heuristic is undefined for a population; pass --bandwidth <value>",
                    ));
                }
                config.kernel_y = Some(choice);
            } else if let Bandwidth::Fixed(_) = bandwidth {
                config.kernel_y = Some(KernelChoice::Gaussian { bandwidth });
            }
            return Ok(config);
        }

        // data source
        let y_is_rotation;
        let x_dim;
        match (&f.input, &f.scenario) {
            (Some(_), Some(_)) => return Err(invalid("give exactly one of --input and --scenario")),
            (None, None) if matches!(sub, Subcommand::Estimate | Subcommand::Test) => {
                return Err(invalid("give exactly one of --input and --scenario"))
            }
            (Some(path), None) => {
                if f.n.is_some() || f.lambda.is_some() {
                    return Err(invalid("--n and --lambda only apply to --scenario"));
                }
                let y_kind = match f.y_kind {
                    Some(YKindArg::So3) => YKind::So3,
                    _ => YKind::Real,
                };
                y_is_rotation = y_kind == YKind::So3;
                x_dim = f.x_cols.len().max(1);
                config.input = Some(path.clone());
                config.csv = Some(CsvOptions {
                    x_columns: f.x_cols.clone(),
                    y_columns: f.y_cols.clone(),
                    y_kind,
                    standardize: f.standardize,
                });
            }
            (None, scenario) => {
                if !f.x_cols.is_empty() || !f.y_cols.is_empty() || f.y_kind.is_some() || f.standardize {
                    return Err(invalid(
                        "--x-cols, --y-cols, --y-kind and --standardize only apply to --input",
                    ));
                }
                let scenario: Scenario = match scenario {
                    Some(s) => s.parse()?,
                    None => Scenario::Heteroscedastic,
                };
                y_is_rotation = scenario == Scenario::So3;
                x_dim = match scenario {
                    Scenario::Heteroscedastic => 1,
                    Scenario::So3 => 3,
                    Scenario::SyntheticSong => kir_core::simgen::SONG_DIM,
                };
                config.scenario = Some(scenario);
            }
        }

        // methods
        let methods = if f.method.is_empty() {
            vec![MethodName::Knn]
        } else {
            f.method
                .iter()
                .map(|m| m.parse())
                .collect::<Result<Vec<MethodName>>>()?
        };
        for (i, m) in methods.iter().enumerate() {
            if methods[..i].contains(m) {
                return Err(invalid(format!("method {} listed twice", m.name())));
            }
        }
        if sub == Subcommand::Estimate && methods.len() != 1 {
            return Err(invalid("estimate takes a single --method"));
        }
        if methods.contains(&MethodName::Xi) && (y_is_rotation || x_dim != 1 || f.y_cols.len() > 1) {
            return Err(invalid("xi needs one real X column and one real Y column"));
        }
        if sub == Subcommand::Bench && methods.contains(&MethodName::Xi) {
            return Err(invalid("bench covers knn, rkhs, eta-knn and eta-rkhs"));
        }

        // kernels
        let kernel_y = match &f.kernel_y {
            Some(name) => parse_kernel(name, bandwidth)?,
            None if y_is_rotation => KernelChoice::So3Rotation,
            None => KernelChoice::Gaussian { bandwidth },
        };
        if (kernel_y == KernelChoice::So3Rotation) != y_is_rotation {
            return Err(invalid(if y_is_rotation {
                "rotation-valued Y needs --kernel-y so3"
            } else {
                "--kernel-y so3 needs rotation-valued Y"
            }));
        }
        let kernel_x = match &f.kernel_x {
            Some(name) => parse_kernel(name, bandwidth)?,
            None => KernelChoice::Gaussian { bandwidth },
        };
        if kernel_x == KernelChoice::So3Rotation {
            return Err(invalid("X is real-valued; --kernel-x must be gaussian or brownian"));
        }
        let any_y_kernel = methods.iter().any(|m| *m != MethodName::Xi);
        if any_y_kernel {
            config.kernel_y = Some(kernel_y);
        }
        if methods.iter().any(|m| m.uses_kernel_x()) {
            config.kernel_x = Some(kernel_x);
        }
        if methods.iter().any(|m| matches!(m, MethodName::Knn | MethodName::EtaKnn)) {
            let k = f.k.unwrap_or(DEFAULT_K);
            if k == 0 {
                return Err(invalid("--k must be at least 1"));
            }
            config.k = Some(k);
        }
        if methods.iter().any(|m| m.uses_kernel_x()) {
            let eps = f.epsilon.unwrap_or(DEFAULT_EPSILON);
            if !(eps.is_finite() && eps > 0.0) {
                return Err(invalid(format!("--epsilon must be positive and finite, got {eps}")));
            }
            config.epsilon = Some(eps);
        }
        config.methods = methods;

        // sizes and noise levels
        if config.scenario.is_some() {
            let sizes = match &f.n {
                Some(text) => parse_n_grid(text)?,
                None if sub == Subcommand::Bench => {
                    if config.methods.iter().all(|m| m.uses_kernel_x()) {
                        RKHS_BENCH_GRID.to_vec()
                    } else {
                        KNN_BENCH_GRID.to_vec()
                    }
                }
                None => vec![DEFAULT_N],
            };
            if sub == Subcommand::Bench && sizes.len() < 2 {
                return Err(invalid("bench needs at least two sample sizes in --n"));
            }
            if sub != Subcommand::Bench && sizes.len() != 1 {
                return Err(invalid("--n takes a single sample size here"));
            }
            config.n_grid = sizes;
            config.lambda_grid = match (f.lambda, &f.lambda_grid) {
                (Some(_), Some(_)) => return Err(invalid("give at most one of --lambda and --lambda-grid")),
                (Some(l), None) => vec![check_lambda(l)?],
                (None, Some(g)) => parse_lambda_grid(g)?,
                (None, None) if sub == Subcommand::Power => DEFAULT_POWER_GRID.to_vec(),
                (None, None) => vec![0.0],
            };
        }

        if matches!(sub, Subcommand::Test | Subcommand::Power) {
            let b = f.permutations.unwrap_or(DEFAULT_PERMUTATIONS);
            if b == 0 {
                return Err(invalid("--permutations must be at least 1"));
            }
            config.permutations = Some(b);
        }
        if sub == Subcommand::Power {
            let r = f.replications.unwrap_or(DEFAULT_REPLICATIONS);
            if r == 0 {
                return Err(invalid("--replications must be at least 1"));
            }
            let alpha = f.alpha.unwrap_or(DEFAULT_ALPHA);
            if !(alpha > 0.0 && alpha < 1.0) {
                return Err(invalid(format!("--alpha must lie in (0, 1), got {alpha}")));
            }
            config.replications = Some(r);
            config.alpha = Some(alpha);
        }
        Ok(config)
    }

    /// The statistic computed by `method` under this configuration.
    pub fn statistic(&self, method: MethodName) -> Statistic {
        let k = self.k.unwrap_or(DEFAULT_K);
        let epsilon = self.epsilon.unwrap_or(DEFAULT_EPSILON);
        let kernel_x = self.kernel_x.unwrap_or_else(KernelChoice::gaussian_median);
        let kernel_y = self.kernel_y.unwrap_or_else(KernelChoice::gaussian_median);
        match method {
            MethodName::Knn => Statistic::DKnn { k, kernel_y },
            MethodName::Rkhs => Statistic::DRkhs { epsilon, kernel_x, kernel_y },
            MethodName::Xi => Statistic::Xi,
            MethodName::EtaKnn => Statistic::EtaKnn { k, kernel_y },
            MethodName::EtaRkhs => Statistic::EtaRkhs { epsilon, kernel_x, kernel_y },
        }
    }
}
