#![no_main]

use kir_cli::values::{parse_bandwidth, parse_kernel, parse_lambda_grid, parse_n_grid};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(grid) = parse_lambda_grid(text) {
        assert!(grid.iter().all(|l| (0.0..=1.0).contains(l)));
    }
    if let Ok(ns) = parse_n_grid(text) {
        assert!(!ns.is_empty());
    }
    if let Ok(bw) = parse_bandwidth(text) {
        let _ = parse_kernel("gaussian", bw);
    }
    if let Ok(bw) = parse_bandwidth("median") {
        let _ = parse_kernel(text, bw);
    }
});
