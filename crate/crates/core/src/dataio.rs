//! CSV ingestion and export of paired samples.
//!
//! Input is UTF-8, comma-delimited, with a header row and `.` as decimal
//! separator. Rows are numbered as file lines, so the first data row is row 2.

use crate::error::{Error, Result};
use crate::sample::{PointKind, Points, Rotation3, SampleSet};
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum YKind {
    #[default]
    Real,
    So3,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CsvOptions {
    /// Header names or 0-based indices. Empty selects the first column.
    pub x_columns: Vec<String>,
    /// Header names or 0-based indices. Empty selects the column after the
    /// last X column (nine columns for rotations).
    pub y_columns: Vec<String>,
    pub y_kind: YKind,
    /// Rescale every real column to mean 0 and population variance 1.
    pub standardize: bool,
}

pub fn load_csv(path: impl AsRef<Path>, options: &CsvOptions) -> Result<SampleSet> {
    let file = std::fs::File::open(path.as_ref())
        .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    parse_csv(file, options)
}

fn resolve_column(headers: &csv::StringRecord, sel: &str) -> Result<usize> {
    let sel = sel.trim();
    if let Some(i) = headers.iter().position(|h| h.trim() == sel) {
        return Ok(i);
    }
    match sel.parse::<usize>() {
        Ok(i) if i < headers.len() => Ok(i),
        _ => Err(Error::Parse {
            row: 1,
            column: sel.to_string(),
            message: "no such column in header".into(),
        }),
    }
}

fn parse_cell(raw: &str, row: usize, column: &str) -> Result<f64> {
    let cell = raw.trim();
    if cell.is_empty() || cell.eq_ignore_ascii_case("na") || cell.eq_ignore_ascii_case("nan") {
        return Err(Error::MissingValue {
            row,
            column: column.to_string(),
        });
    }
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::Parse {
            row,
            column: column.to_string(),
            message: format!("not a finite number: {cell:?}"),
        }),
    }
}

pub fn parse_csv(reader: impl Read, options: &CsvOptions) -> Result<SampleSet> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(reader);
    let headers = rdr.headers().map_err(csv_error)?.clone();
    if headers.is_empty() {
        return Err(Error::Parse {
            row: 1,
            column: String::new(),
            message: "empty header".into(),
        });
    }
    let x_idx: Vec<usize> = if options.x_columns.is_empty() {
        vec![0]
    } else {
        options.x_columns.iter().map(|s| resolve_column(&headers, s)).collect::<Result<_>>()?
    };
    let y_width = match options.y_kind {
        YKind::Real => 1,
        YKind::So3 => 9,
    };
    let y_idx: Vec<usize> = if options.y_columns.is_empty() {
        let start = x_idx.iter().max().map_or(0, |m| m + 1);
        (start..start + y_width).collect()
    } else {
        options.y_columns.iter().map(|s| resolve_column(&headers, s)).collect::<Result<_>>()?
    };
    if let Some(&bad) = y_idx.iter().find(|&&i| i >= headers.len()) {
        return Err(Error::Parse {
            row: 1,
            column: bad.to_string(),
            message: "no such column in header".into(),
        });
    }
    if options.y_kind == YKind::So3 && y_idx.len() != 9 {
        return Err(Error::DimensionMismatch {
            expected: "9 rotation columns".into(),
            found: format!("{} columns", y_idx.len()),
        });
    }
    let name = |i: usize| headers.get(i).unwrap_or("").trim().to_string();

    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut rotations = Vec::new();
    let mut record = csv::StringRecord::new();
    let mut row = 1;
    while rdr.read_record(&mut record).map_err(csv_error)? {
        row += 1;
        for &i in &x_idx {
            xs.push(parse_cell(&record[i], row, &name(i))?);
        }
        let yv = y_idx
            .iter()
            .map(|&i| parse_cell(&record[i], row, &name(i)))
            .collect::<Result<Vec<f64>>>()?;
        match options.y_kind {
            YKind::Real => ys.extend(yv),
            YKind::So3 => rotations.push(Rotation3::from_slice(&yv).map_err(|e| Error::Parse {
                row,
                column: "y".into(),
                message: e.to_string(),
            })?),
        }
    }
    if row == 1 {
        return Err(Error::EmptySample);
    }
    let dx = x_idx.len();
    if options.standardize {
        standardize_columns(&mut xs, dx, &x_idx.iter().map(|&i| name(i)).collect::<Vec<_>>())?;
        if options.y_kind == YKind::Real {
            standardize_columns(&mut ys, y_idx.len(), &y_idx.iter().map(|&i| name(i)).collect::<Vec<_>>())?;
        }
    }
    let x = Points::real(dx, xs)?;
    let y = match options.y_kind {
        YKind::Real => Points::real(y_idx.len(), ys)?,
        YKind::So3 => Points::rotations(rotations),
    };
    SampleSet::new(x, y)
}

fn csv_error(e: csv::Error) -> Error {
    let row = e.position().map_or(0, |p| p.line() as usize);
    Error::Parse {
        row,
        column: String::new(),
        message: e.to_string(),
    }
}

fn standardize_columns(data: &mut [f64], width: usize, names: &[String]) -> Result<()> {
    for (c, name) in names.iter().enumerate() {
        let mut col: Vec<f64> = data.iter().skip(c).step_by(width).copied().collect();
        standardize_in_place(&mut col, name)?;
        for (slot, v) in data.iter_mut().skip(c).step_by(width).zip(col) {
            *slot = v;
        }
    }
    Ok(())
}

/// Rescales to mean 0 and population (1/n) variance 1.
pub fn standardize_in_place(values: &mut [f64], name: &str) -> Result<()> {
    let n = values.len() as f64;
    let first = values.first().copied().unwrap_or(0.0);
    if values.iter().all(|&v| v == first) {
        return Err(Error::ConstantColumn(name.to_string()));
    }
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let sd = var.sqrt();
    if !(sd > 0.0) {
        return Err(Error::ConstantColumn(name.to_string()));
    }
    for v in values.iter_mut() {
        *v = (*v - mean) / sd;
    }
    Ok(())
}

/// Writes `sample` with header `x0,…,y0,…`; rotations as nine row-major
/// columns. Values use the shortest representation that parses back exactly.
pub fn write_csv(sample: &SampleSet, writer: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let width = |kind: PointKind| match kind {
        PointKind::RealVector(d) => d,
        PointKind::Rotation3 => 9,
    };
    let (dx, dy) = (width(sample.x().kind()), width(sample.y().kind()));
    let header: Vec<String> = (0..dx)
        .map(|i| format!("x{i}"))
        .chain((0..dy).map(|i| format!("y{i}")))
        .collect();
    w.write_record(&header).map_err(|e| Error::Io(e.to_string()))?;
    let values = |p: crate::sample::PointRef<'_>| -> Vec<String> {
        match p {
            crate::sample::PointRef::Real(v) => v.iter().map(|x| x.to_string()).collect(),
            crate::sample::PointRef::Rotation(r) => r.entries().iter().map(|x| x.to_string()).collect(),
        }
    };
    for i in 0..sample.n() {
        let mut rec = values(sample.x().get(i));
        rec.extend(values(sample.y().get(i)));
        w.write_record(&rec).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}
