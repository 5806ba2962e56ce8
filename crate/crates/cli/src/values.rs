//! Parsers for flag values that clap cannot type directly.

use kir_core::{Bandwidth, Error, KernelChoice, Result};

/// `median` or a positive bandwidth.
pub fn parse_bandwidth(text: &str) -> Result<Bandwidth> {
    let t = text.trim();
    if t.eq_ignore_ascii_case("median") {
        return Ok(Bandwidth::Median);
    }
    match t.parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(Bandwidth::Fixed(v)),
        _ => Err(Error::InvalidParameter(format!(
            "bandwidth must be `median` or a positive number, got {text:?}"
        ))),
    }
}

/// Comma-separated noise levels, each in `[0, 1]`.
pub fn parse_lambda_grid(text: &str) -> Result<Vec<f64>> {
    let mut grid = Vec::new();
    for part in text.split(',') {
        let v = part.trim().parse::<f64>().map_err(|_| {
            Error::InvalidParameter(format!("bad lambda {:?} in grid {text:?}", part.trim()))
        })?;
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidParameter(format!("lambda must lie in [0, 1], got {v}")));
        }
        grid.push(v);
    }
    Ok(grid)
}

/// Comma-separated positive sample sizes.
pub fn parse_n_grid(text: &str) -> Result<Vec<usize>> {
    let mut grid = Vec::new();
    for part in text.split(',') {
        match part.trim().parse::<usize>() {
            Ok(n) if n > 0 => grid.push(n),
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "bad sample size {:?} in {text:?}",
                    part.trim()
                )))
            }
        }
    }
    Ok(grid)
}

/// `gaussian`, `brownian` or `so3`. The bandwidth only applies to `gaussian`.
pub fn parse_kernel(text: &str, bandwidth: Bandwidth) -> Result<KernelChoice> {
    match text.trim().to_ascii_lowercase().as_str() {
        "gaussian" | "rbf" => Ok(KernelChoice::Gaussian { bandwidth }),
        "brownian" | "distance" => Ok(KernelChoice::Brownian),
        "so3" | "so3-rotation" => Ok(KernelChoice::So3Rotation),
        _ => Err(Error::InvalidParameter(format!("unknown kernel {text:?}"))),
    }
}
