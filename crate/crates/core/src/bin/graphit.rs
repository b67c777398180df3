use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use graphit::harness::{self, export, HarnessError, Method, Scenario};
use graphit::penalties::{linspace, Family, Potential};

#[derive(Parser)]
#[command(name = "graphit", version, about = "Sparse transition-matrix estimation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte-Carlo benchmark of the configured estimators.
    Bench {
        config: PathBuf,
        /// Directory for CSV/DOT outputs; the table goes to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        realizations: Option<usize>,
        /// Worker threads (0 = all cores).
        #[arg(long)]
        threads: Option<usize>,
        /// Edge detection threshold.
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Grid search on the tuning realization; prints per-tuple RMSE.
    Grid {
        config: PathBuf,
        /// Restrict to one method (graphit or graphem).
        #[arg(long)]
        method: Option<Method>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Penalty curve u, rho(|u|) as CSV.
    Curve {
        family: Family,
        gamma: f64,
        /// lambda, or a for scad; unused for l1.
        shape: Option<f64>,
        #[arg(long, default_value_t = -3.0, allow_hyphen_values = true)]
        min: f64,
        #[arg(long, default_value_t = 3.0, allow_hyphen_values = true)]
        max: f64,
        #[arg(long, default_value_t = 601)]
        points: usize,
    },
    /// DOT graph of a matrix stored as CSV rows.
    ExportDot {
        matrix: PathBuf,
        threshold: f64,
        #[arg(long, default_value = "A")]
        name: String,
    },
}

fn load(config: &Path, seed: Option<u64>, realizations: Option<usize>, threads: Option<usize>) -> Result<Scenario, HarnessError> {
    let mut sc = Scenario::from_file(config)?;
    if let Some(s) = seed {
        sc.master_seed = s;
    }
    if let Some(r) = realizations {
        sc.realizations = r;
    }
    if let Some(t) = threads {
        sc.threads = t;
    }
    sc.validate()?;
    Ok(sc)
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::Bench { config, out, seed, realizations, threads, threshold } => {
            let mut sc = load(&config, seed, realizations, threads)?;
            if let Some(t) = threshold {
                sc.threshold = t;
                sc.validate()?;
            }
            let output = harness::run_benchmark(&sc)?;
            if output.warnings > 0 {
                eprintln!("warning: {} estimator runs failed and were excluded", output.warnings);
            }
            match out {
                Some(dir) => harness::write_benchmark_outputs(&output, sc.threshold, &dir)?,
                None => print!("{}", harness::export_csv(&output.rows)),
            }
            if let Some(row) = output.rows.iter().find(|r| r.realizations == 0) {
                return Err(HarnessError::AllRealizationsFailed(row.method));
            }
        }
        Command::Grid { config, method, seed, threads } => {
            let sc = load(&config, seed, None, threads)?;
            let mut entries = Vec::new();
            for spec in sc.methods.iter().filter(|s| s.family.is_some()) {
                if method.is_some_and(|m| m != spec.method) {
                    continue;
                }
                let result = harness::grid_search(&sc, spec.method, &spec.grid)?;
                eprintln!("{}: best {}", spec.method, result.best.render(spec.family));
                entries.extend(result.entries);
            }
            print!("{}", export::export_grid_csv(&entries));
        }
        Command::Curve { family, gamma, shape, min, max, points } => {
            if family != Family::L1 && shape.is_none() {
                return Err(HarnessError::Config(format!("{family} needs a shape parameter")));
            }
            let p = Potential::new(family, gamma, shape.unwrap_or(0.0))?;
            print!("{}", export::export_curve_csv(&p.curve(&linspace(min, max, points))));
        }
        Command::ExportDot { matrix, threshold, name } => {
            let text = std::fs::read_to_string(&matrix)
                .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", matrix.display())))?;
            let a = export::parse_matrix_csv(&text)?;
            if a.nrows() != a.ncols() {
                return Err(HarnessError::Config(format!("matrix must be square, got {}x{}", a.nrows(), a.ncols())));
            }
            print!("{}", export::export_dot(&a, threshold, &name));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    // Usage errors exit with 1; clap would use 2, which is reserved for
    // numerical failures.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
