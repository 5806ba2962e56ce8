#![no_main]

use clap::Parser;
use kir_cli::{Cli, RunConfig};
use libfuzzer_sys::fuzz_target;

// Whitespace-separated argv after the program name.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let argv = std::iter::once("kir").chain(text.split_whitespace());
    if let Ok(cli) = Cli::try_parse_from(argv) {
        let _ = RunConfig::from_command(&cli.command);
    }
});
