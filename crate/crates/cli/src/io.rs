//! File formats: point CSV, signed-stream CSV, sparse-vector text, and
//! model JSON.
//!
//! Point CSV holds one point per row with `d` decimal columns and no header
//! by default. Signed-stream CSV appends a sign column (+1/-1). Floats are
//! written in Rust's shortest round-trip form, so re-reading reproduces the
//! exact in-memory values. Sparse vectors are one line per vector with
//! space-separated `id:value` entries (an empty line is the zero vector).

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use thinning::cdf::CdfModel;
use thinning::pipeline::SignedItem;
use thinning::sparse::SparseVector;
use thinning::walk::Sign;
use thinning::Point;

use crate::CliError;

pub fn read_points(path: &Path, header: bool) -> Result<Vec<Point>, CliError> {
    let file =
        fs::File::open(path).map_err(|e| CliError::io(format!("open {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| CliError::io(format!("read {}: {e}", path.display())))?;
        if (header && lineno == 0) || line.trim().is_empty() {
            continue;
        }
        let point: Point = line
            .split(',')
            .map(|field| {
                field.trim().parse::<f64>().map_err(|e| {
                    CliError::parse(format!(
                        "{}:{}: bad float {field:?}: {e}",
                        path.display(),
                        lineno + 1
                    ))
                })
            })
            .collect::<Result<_, _>>()?;
        out.push(point);
    }
    Ok(out)
}

pub fn write_points(path: &Path, points: &[Point], header: bool) -> Result<(), CliError> {
    let mut out = String::new();
    if header {
        let d = points.first().map_or(0, Vec::len);
        let cols: Vec<String> = (0..d).map(|a| format!("x{a}")).collect();
        out.push_str(&cols.join(","));
        out.push('\n');
    }
    for p in points {
        let row: Vec<String> = p.iter().map(f64::to_string).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| CliError::io(format!("write {}: {e}", path.display())))
}

pub fn write_points_json(path: &Path, points: &[Point]) -> Result<(), CliError> {
    let body = serde_json::to_string(points)
        .map_err(|e| CliError::parse(format!("serialize points: {e}")))?;
    fs::write(path, body).map_err(|e| CliError::io(format!("write {}: {e}", path.display())))
}

/// Signed-stream CSV: `d` coordinate columns then a +1/-1 column.
pub fn read_signed_stream(path: &Path, header: bool) -> Result<Vec<SignedItem>, CliError> {
    let rows = read_points(path, header)?;
    rows.into_iter()
        .enumerate()
        .map(|(i, mut row)| {
            let sign_field = row.pop().ok_or_else(|| {
                CliError::parse(format!(
                    "{}: row {} has no sign column",
                    path.display(),
                    i + 1
                ))
            })?;
            let sign = Sign::from_i8(sign_field as i8)
                .filter(|_| sign_field == 1.0 || sign_field == -1.0)
                .ok_or_else(|| {
                    CliError::parse(format!(
                        "{}: row {}: sign must be +1 or -1, got {sign_field}",
                        path.display(),
                        i + 1
                    ))
                })?;
            Ok(SignedItem { point: row, sign })
        })
        .collect()
}

pub fn write_signed_stream(path: &Path, stream: &[SignedItem]) -> Result<(), CliError> {
    let mut out = String::new();
    for item in stream {
        let mut row: Vec<String> = item.point.iter().map(f64::to_string).collect();
        row.push(item.sign.as_i8().to_string());
        out.push_str(&row.join(","));
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| CliError::io(format!("write {}: {e}", path.display())))
}

/// One sparse vector per line, `id:value` entries separated by spaces.
pub fn read_sparse_vectors(path: &Path) -> Result<Vec<SparseVector>, CliError> {
    let file =
        fs::File::open(path).map_err(|e| CliError::io(format!("open {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| CliError::io(format!("read {}: {e}", path.display())))?;
        let mut entries = Vec::new();
        for tok in line.split_whitespace() {
            let (id, value) = tok.split_once(':').ok_or_else(|| {
                CliError::parse(format!(
                    "{}:{}: expected id:value, got {tok:?}",
                    path.display(),
                    lineno + 1
                ))
            })?;
            let id: u64 = id.parse().map_err(|e| {
                CliError::parse(format!(
                    "{}:{}: bad id {id:?}: {e}",
                    path.display(),
                    lineno + 1
                ))
            })?;
            let value: f64 = value.parse().map_err(|e| {
                CliError::parse(format!(
                    "{}:{}: bad value {value:?}: {e}",
                    path.display(),
                    lineno + 1
                ))
            })?;
            entries.push((id, value));
        }
        out.push(SparseVector::from_entries(entries));
    }
    Ok(out)
}

/// Per-axis marginal models: a JSON array of CdfModel objects.
pub fn read_models(path: &Path) -> Result<Vec<CdfModel>, CliError> {
    let body = fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("open {}: {e}", path.display())))?;
    let raw: Vec<CdfModel> = serde_json::from_str(&body)
        .map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
    raw.into_iter()
        .map(|m| m.validated().map_err(CliError::from))
        .collect()
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut body = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::parse(format!("serialize: {e}")))?;
    body.push('\n');
    fs::write(path, body).map_err(|e| CliError::io(format!("write {}: {e}", path.display())))
}

pub fn write_decisions_csv(path: &Path, kept: &[bool]) -> Result<(), CliError> {
    let mut out = String::from("index,kept\n");
    for (i, k) in kept.iter().enumerate() {
        out.push_str(&format!("{i},{}\n", u8::from(*k)));
    }
    fs::write(path, out).map_err(|e| CliError::io(format!("write {}: {e}", path.display())))
}

pub fn write_signs_csv(path: &Path, signs: &[Sign]) -> Result<(), CliError> {
    let mut file = fs::File::create(path)
        .map_err(|e| CliError::io(format!("create {}: {e}", path.display())))?;
    for s in signs {
        writeln!(file, "{}", s.as_i8())
            .map_err(|e| CliError::io(format!("write {}: {e}", path.display())))?;
    }
    Ok(())
}
