use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "kir", version, about = "Kernel integrated R² dependence estimation and testing")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate a dependence measure on one dataset
    Estimate(Flags),
    /// Permutation test of independence
    Test(Flags),
    /// Monte Carlo power over a noise-level grid
    Power(Flags),
    /// Wall-time scaling of the estimators
    Bench(Flags),
    /// Exact population values for a discrete joint (JSON)
    Oracle(Flags),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum YKindArg {
    Real,
    So3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Input file (CSV data, or a JSON joint for `oracle`)
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Synthetic scenario: heteroscedastic, so3 or synthetic-song
    #[arg(long)]
    pub scenario: Option<String>,
    /// X columns (names or 0-based indices), comma separated
    #[arg(long = "x-cols", value_delimiter = ',')]
    pub x_cols: Vec<String>,
    /// Y columns (names or 0-based indices), comma separated
    #[arg(long = "y-cols", value_delimiter = ',')]
    pub y_cols: Vec<String>,
    #[arg(long = "y-kind", value_enum)]
    pub y_kind: Option<YKindArg>,
    /// knn, rkhs, xi, eta-knn or eta-rkhs; comma separated where several are allowed
    #[arg(long, value_delimiter = ',')]
    pub method: Vec<String>,
    /// gaussian, brownian or so3
    #[arg(long = "kernel-x")]
    pub kernel_x: Option<String>,
    /// gaussian, brownian or so3
    #[arg(long = "kernel-y")]
    pub kernel_y: Option<String>,
    /// `median` or a positive number
    #[arg(long)]
    pub bandwidth: Option<String>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub permutations: Option<usize>,
    #[arg(long)]
    pub replications: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    /// Comma-separated noise levels
    #[arg(long = "lambda-grid")]
    pub lambda_grid: Option<String>,
    /// Sample size; a comma-separated grid for `bench`
    #[arg(long)]
    pub n: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Rescale real columns to mean 0, variance 1
    #[arg(long)]
    pub standardize: bool,
    /// Report path (default: standard output)
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

impl Flags {
    /// Long names of the flags that were given.
    pub fn present(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        let mut mark = |on: bool, name: &'static str| {
            if on {
                out.push(name)
            }
        };
        mark(self.input.is_some(), "input");
        mark(self.scenario.is_some(), "scenario");
        mark(!self.x_cols.is_empty(), "x-cols");
        mark(!self.y_cols.is_empty(), "y-cols");
        mark(self.y_kind.is_some(), "y-kind");
        mark(!self.method.is_empty(), "method");
        mark(self.kernel_x.is_some(), "kernel-x");
        mark(self.kernel_y.is_some(), "kernel-y");
        mark(self.bandwidth.is_some(), "bandwidth");
        mark(self.k.is_some(), "k");
        mark(self.epsilon.is_some(), "epsilon");
        mark(self.permutations.is_some(), "permutations");
        mark(self.replications.is_some(), "replications");
        mark(self.alpha.is_some(), "alpha");
        mark(self.lambda.is_some(), "lambda");
        mark(self.lambda_grid.is_some(), "lambda-grid");
        mark(self.n.is_some(), "n");
        mark(self.seed.is_some(), "seed");
        mark(self.standardize, "standardize");
        mark(self.output.is_some(), "output");
        mark(self.format.is_some(), "format");
        out
    }
}
