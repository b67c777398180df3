//! Runs a scenario file through the benchmark harness and prints the table.
//!
//!     cargo run --release --example benchmark -- configs/nx8_s4.toml 10
//!
//! The optional second argument overrides the number of realizations.

use graphit::harness::{export_csv, run_benchmark, HarnessError, Scenario};

fn main() -> Result<(), HarnessError> {
    let mut args = std::env::args().skip(1);
    let path = args.next().unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/smoke.toml").into());
    let mut sc = Scenario::from_file(path.as_ref())?;
    if let Some(r) = args.next() {
        sc.realizations = r.parse().map_err(|_| HarnessError::Config(format!("bad realization count '{r}'")))?;
    }

    let out = run_benchmark(&sc)?;
    for e in out.tuning.iter().filter(|e| e.selected) {
        eprintln!("tuned {}: {}", e.method, e.hyperparameters);
    }
    print!("{}", export_csv(&out.rows));
    Ok(())
}
