//! Text serializations: benchmark CSV tables, DOT graphs, matrix CSV files
//! and penalty curves.

use std::fmt::Write as _;

use nalgebra::DMatrix;

use super::bench::{BenchmarkRow, GridEntry};
use super::HarnessError;

/// Fixed-point rendering with 5 significant digits (`0.18501`, `1.5232`).
pub fn sig5(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0.0000".to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (4 - magnitude).max(0) as usize;
    let rendered = format!("{x:.decimals$}");
    // Rounding can carry into a new leading digit (9.99996 -> 10.0000).
    let rounded: f64 = rendered.parse().unwrap_or(x);
    if rounded.abs() >= 10f64.powi(magnitude + 1) && decimals > 0 {
        let decimals = decimals - 1;
        format!("{x:.decimals$}")
    } else {
        rendered
    }
}

const HEADER: &str = "scenario,method,potential,hyperparameters,rmse,accuracy,f1,time_s,realizations,failures";
const HEADER_NO_TIME: &str = "scenario,method,potential,hyperparameters,rmse,accuracy,f1,realizations,failures";

fn sorted(rows: &[BenchmarkRow]) -> Vec<&BenchmarkRow> {
    let mut v: Vec<_> = rows.iter().collect();
    v.sort_by(|a, b| a.scenario.cmp(&b.scenario).then(a.method.cmp(&b.method)));
    v
}

fn write_rows(rows: &[BenchmarkRow], with_time: bool) -> String {
    let mut out = String::new();
    out.push_str(if with_time { HEADER } else { HEADER_NO_TIME });
    out.push('\n');
    for r in sorted(rows) {
        let _ = write!(
            out,
            "{},{},{},{},{},{},{}",
            r.scenario,
            r.method,
            r.potential,
            r.hyperparameters,
            sig5(r.rmse),
            sig5(r.accuracy),
            sig5(r.f1)
        );
        if with_time {
            let _ = write!(out, ",{}", sig5(r.time_s));
        }
        let _ = writeln!(out, ",{},{}", r.realizations, r.failures);
    }
    out
}

/// Table with RMSE, accuracy, F1 and mean wall time per method, ordered by
/// (scenario, method).
pub fn export_csv(rows: &[BenchmarkRow]) -> String {
    write_rows(rows, true)
}

/// Same table without the wall-time column; byte-identical across runs
/// with the same configuration and seed.
pub fn export_metrics_csv(rows: &[BenchmarkRow]) -> String {
    write_rows(rows, false)
}

/// Per-tuple tuning results.
pub fn export_grid_csv(entries: &[GridEntry]) -> String {
    let mut out = String::from("method,hyperparameters,rmse,selected\n");
    for e in entries {
        let _ = writeln!(out, "{},{},{},{}", e.method, e.hyperparameters, sig5(e.rmse), u8::from(e.selected));
    }
    out
}

/// Directed graph with one node per state index (1-based) and an edge
/// `j -> i` labelled with `A_ij` for every `|A_ij| > threshold`.
pub fn export_dot(a: &DMatrix<f64>, threshold: f64, name: &str) -> String {
    let n = a.nrows();
    let mut out = String::new();
    let _ = writeln!(out, "digraph \"{}\" {{", name.replace('"', "'"));
    for i in 1..=n {
        let _ = writeln!(out, "  {i};");
    }
    for j in 0..a.ncols() {
        for i in 0..n {
            let w = a[(i, j)];
            if w.abs() > threshold {
                let _ = writeln!(out, "  {} -> {} [label=\"{}\"];", j + 1, i + 1, w);
            }
        }
    }
    out.push_str("}\n");
    out
}

/// Comma-separated rows, one matrix row per line, shortest round-trip
/// formatting.
pub fn write_matrix_csv(a: &DMatrix<f64>) -> String {
    let mut out = String::new();
    for i in 0..a.nrows() {
        let row: Vec<String> = (0..a.ncols()).map(|j| format!("{}", a[(i, j)])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Parses a matrix written as CSV rows. Blank lines and `#` comments are
/// skipped; all rows must have the same length.
pub fn parse_matrix_csv(text: &str) -> Result<DMatrix<f64>, HarnessError> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split(',')
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .map_err(|_| HarnessError::Config(format!("line {}: bad number '{}'", lineno + 1, f.trim())))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(HarnessError::Config(format!(
                    "line {}: expected {} columns, found {}",
                    lineno + 1,
                    first.len(),
                    row.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(HarnessError::Config("empty matrix file".into()));
    }
    let ncols = rows[0].len();
    Ok(DMatrix::from_row_iterator(rows.len(), ncols, rows.into_iter().flatten()))
}

/// `u,value` rows of a penalty curve.
pub fn export_curve_csv(points: &[(f64, f64)]) -> String {
    let mut out = String::from("u,value\n");
    for (u, v) in points {
        let _ = writeln!(out, "{u},{v}");
    }
    out
}
