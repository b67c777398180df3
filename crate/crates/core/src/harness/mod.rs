//! Experiment harness behind the `graphit` binary: scenario files,
//! Monte-Carlo benchmarks, grid search and text exports.

pub mod bench;
pub mod config;
pub mod export;

use std::fs;
use std::path::Path;

use thiserror::Error;

pub use bench::{grid_search, realization, run_benchmark, BenchmarkOutput, BenchmarkRow, GridEntry, GridResult};
pub use config::{HyperParams, Method, MethodSpec, Scenario};
pub use export::{export_csv, export_dot, export_metrics_csv, parse_matrix_csv, write_matrix_csv};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Numerical(#[from] crate::Error),
    #[error("{0}: every grid point failed")]
    GridFailed(Method),
    #[error("{0}: every realization failed")]
    AllRealizationsFailed(Method),
}

impl HarnessError {
    /// Process exit code: 1 for configuration problems, 2 for numerical
    /// failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Numerical(e) if e.is_numerical() => 2,
            HarnessError::GridFailed(_) | HarnessError::AllRealizationsFailed(_) => 2,
            _ => 1,
        }
    }
}

/// Writes the outputs of [`run_benchmark`] into `dir`:
///
/// * `benchmark.csv`: full table including mean wall time,
/// * `metrics.csv`: the same table without timings (reproducible bytes),
/// * `tuning.csv`: per-tuple grid-search RMSE, when any method was tuned,
/// * `graph_true.dot`, `graph_<method>.dot`: graphs of realization 0,
/// * `a_true.csv`, `a_<method>.csv`: the corresponding matrices.
pub fn write_benchmark_outputs(output: &BenchmarkOutput, threshold: f64, dir: &Path) -> Result<(), HarnessError> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("benchmark.csv"), export_csv(&output.rows))?;
    fs::write(dir.join("metrics.csv"), export_metrics_csv(&output.rows))?;
    if !output.tuning.is_empty() {
        fs::write(dir.join("tuning.csv"), export::export_grid_csv(&output.tuning))?;
    }
    fs::write(dir.join("graph_true.dot"), export_dot(&output.example.a_true, threshold, "true"))?;
    fs::write(dir.join("a_true.csv"), write_matrix_csv(&output.example.a_true))?;
    for (method, a) in &output.example.estimates {
        fs::write(dir.join(format!("graph_{method}.dot")), export_dot(a, threshold, method.name()))?;
        fs::write(dir.join(format!("a_{method}.csv")), write_matrix_csv(a))?;
    }
    Ok(())
}
