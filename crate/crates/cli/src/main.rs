use clap::error::ErrorKind;
use clap::Parser;
use kir_cli::{Cli, CliError};
use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let err = CliError::usage("UsageError", e.render().to_string().trim());
            eprintln!("{}", err.to_json());
            return ExitCode::from(err.exit_code);
        }
    };
    match kir_cli::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", err.to_json());
            ExitCode::from(err.exit_code)
        }
    }
}
