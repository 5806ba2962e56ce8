//! Command-line front end for the kernel integrated R² estimators.

pub mod args;
pub mod config;
pub mod run;
pub mod values;

use serde::Serialize;
use std::io::Write;

pub use args::{Cli, Command, Flags, Format};
pub use config::{MethodName, RunConfig, Subcommand};

/// A failure reported on standard error as `{"error": {"kind", "message"}}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub kind: String,
    pub message: String,
    pub exit_code: u8,
}

impl CliError {
    /// Rejected before any work was done.
    pub fn usage(kind: &str, message: impl Into<String>) -> Self {
        CliError {
            kind: kind.to_string(),
            message: message.into(),
            exit_code: 2,
        }
    }

    pub fn runtime(err: kir_core::Error) -> Self {
        CliError {
            kind: err.kind().to_string(),
            message: err.to_string(),
            exit_code: 1,
        }
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Body<'a> {
            kind: &'a str,
            message: &'a str,
        }
        #[derive(Serialize)]
        struct Wrapper<'a> {
            error: Body<'a>,
        }
        serde_json::to_string(&Wrapper {
            error: Body {
                kind: &self.kind,
                message: &self.message,
            },
        })
        .expect("error serializes")
    }
}

/// Validates, runs and writes the report to `--output` or standard output.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let config =
        RunConfig::from_command(&cli.command).map_err(|e| CliError::usage(e.kind(), e.to_string()))?;
    let text = run::execute(&config).map_err(CliError::runtime)?;
    let written = match &config.output {
        Some(path) => std::fs::write(path, text.as_bytes())
            .map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| e.to_string()),
    };
    written.map_err(|m| CliError::runtime(kir_core::Error::Io(m)))
}
