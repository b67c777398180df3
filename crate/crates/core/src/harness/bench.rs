//! Seeded Monte-Carlo benchmarks and single-realization grid search.
//!
//! Realization `i` of a scenario with master seed `m` uses the seed
//! `derive_seed(m, Realization, i)`; within a realization the true matrix
//! and the trajectory come from the `Transition` and `Trajectory` sub-streams
//! of that seed. Tuning uses `derive_seed(m, Tuning, 0)`. Results are
//! gathered by realization index and reduced sequentially, so the output
//! does not depend on the number of worker threads.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::config::{HyperParams, Method, MethodSpec, Scenario};
use super::HarnessError;
use crate::algorithms::{default_init, graphem, graphit, mlem};
use crate::metrics::{accuracy, edge_confusion, f1, rmse};
use crate::model::{generate_sparse_a, simulate};
use crate::rng::{derive_seed, Stream};

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkRow {
    pub scenario: String,
    pub method: Method,
    /// Penalty family name, `none` for MLEM.
    pub potential: String,
    pub hyperparameters: String,
    pub rmse: f64,
    pub accuracy: f64,
    pub f1: f64,
    /// Mean wall time of one estimation, seconds.
    pub time_s: f64,
    /// Realizations that completed.
    pub realizations: usize,
    /// Realizations where the estimator failed; excluded from the means.
    pub failures: usize,
}

/// Ground truth and data of one realization.
#[derive(Debug, Clone)]
pub struct Realization {
    pub a_true: DMatrix<f64>,
    pub observations: Vec<DVector<f64>>,
}

#[derive(Debug, Clone)]
pub struct MethodOutcome {
    pub a_hat: DMatrix<f64>,
    pub rmse: f64,
    pub accuracy: f64,
    pub f1: f64,
    pub time_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridEntry {
    pub method: Method,
    pub params: HyperParams,
    pub hyperparameters: String,
    /// `inf` when the estimator failed on this tuple.
    pub rmse: f64,
    pub selected: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridResult {
    pub best: HyperParams,
    pub entries: Vec<GridEntry>,
}

/// Estimates from realization 0, kept for graph exports.
#[derive(Debug, Clone)]
pub struct ExampleRun {
    pub a_true: DMatrix<f64>,
    pub estimates: Vec<(Method, DMatrix<f64>)>,
}

#[derive(Debug, Clone)]
pub struct BenchmarkOutput {
    pub rows: Vec<BenchmarkRow>,
    pub tuning: Vec<GridEntry>,
    pub example: ExampleRun,
    /// Failed (realization, method) pairs.
    pub warnings: usize,
}

pub fn realization(scenario: &Scenario, seed: u64) -> crate::Result<Realization> {
    let a_true = generate_sparse_a(
        scenario.nx,
        scenario.support,
        scenario.true_norm,
        derive_seed(seed, Stream::Transition, 0),
    )?;
    let params = scenario.known_params().with_transition(a_true.clone());
    let traj = simulate(&params, scenario.steps, derive_seed(seed, Stream::Trajectory, 0))?;
    Ok(Realization { a_true, observations: traj.observations })
}

/// Runs one estimator from the default initialization and scores it.
pub fn run_method(
    scenario: &Scenario,
    spec: &MethodSpec,
    hp: Option<&HyperParams>,
    data: &Realization,
) -> crate::Result<MethodOutcome> {
    let potential = match hp {
        Some(hp) => spec.potential(hp)?,
        None => None,
    };
    let cfg = scenario.estimator_config(potential);
    let known = scenario.known_params();
    let a0 = default_init(scenario.nx);
    let start = Instant::now();
    let result = match spec.method {
        Method::Graphit => graphit(&data.observations, &known, &a0, &cfg)?,
        Method::Graphem => graphem(&data.observations, &known, &a0, &cfg)?,
        Method::Mlem => mlem(&data.observations, &known, &a0, &cfg)?,
    };
    let time_s = start.elapsed().as_secs_f64();
    let confusion = edge_confusion(&result.a_hat, &data.a_true, scenario.threshold)?;
    Ok(MethodOutcome {
        rmse: rmse(&result.a_hat, &data.a_true)?,
        accuracy: accuracy(&confusion),
        f1: f1(&confusion),
        time_s,
        a_hat: result.a_hat,
    })
}

fn in_pool<T: Send>(threads: usize, job: impl FnOnce() -> T + Send) -> Result<T, HarnessError> {
    if threads == 0 {
        return Ok(job());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| HarnessError::Config(format!("cannot build thread pool: {e}")))?;
    Ok(pool.install(job))
}

/// Evaluates every tuple of `grid` on the tuning realization and returns the
/// one with the lowest RMSE; ties go to the earliest tuple.
pub fn grid_search(scenario: &Scenario, method: Method, grid: &[HyperParams]) -> Result<GridResult, HarnessError> {
    if grid.is_empty() {
        return Err(HarnessError::Config("empty hyperparameter grid".into()));
    }
    let spec = scenario
        .method(method)
        .filter(|s| s.family.is_some())
        .ok_or_else(|| HarnessError::Config(format!("{method} has no tunable penalty in this scenario")))?;
    let data = realization(scenario, derive_seed(scenario.master_seed, Stream::Tuning, 0))?;
    let scores: Vec<f64> = in_pool(scenario.threads, || {
        grid.par_iter()
            .map(|hp| run_method(scenario, spec, Some(hp), &data).map_or(f64::INFINITY, |o| o.rmse))
            .collect()
    })?;

    let mut best: Option<usize> = None;
    for (i, &s) in scores.iter().enumerate() {
        if s.is_finite() && best.is_none_or(|b| s < scores[b]) {
            best = Some(i);
        }
    }
    let best = best.ok_or(HarnessError::GridFailed(method))?;
    let entries = grid
        .iter()
        .zip(&scores)
        .enumerate()
        .map(|(i, (hp, &rmse))| GridEntry {
            method,
            params: *hp,
            hyperparameters: hp.render(spec.family),
            rmse,
            selected: i == best,
        })
        .collect();
    Ok(GridResult { best: grid[best], entries })
}

/// Tunes (if needed) and runs every configured method over all realizations.
pub fn run_benchmark(scenario: &Scenario) -> Result<BenchmarkOutput, HarnessError> {
    scenario.validate()?;

    let mut tuning = Vec::new();
    let mut chosen: Vec<(MethodSpec, Option<HyperParams>)> = Vec::new();
    for spec in &scenario.methods {
        let hp = if spec.needs_tuning() {
            let g = grid_search(scenario, spec.method, &spec.grid)?;
            tuning.extend(g.entries);
            Some(g.best)
        } else {
            spec.grid.first().copied()
        };
        chosen.push((spec.clone(), hp));
    }

    let per_realization: Vec<crate::Result<Vec<crate::Result<MethodOutcome>>>> = in_pool(scenario.threads, || {
        (0..scenario.realizations)
            .into_par_iter()
            .map(|i| {
                let data = realization(scenario, derive_seed(scenario.master_seed, Stream::Realization, i as u64))?;
                Ok(chosen
                    .iter()
                    .map(|(spec, hp)| run_method(scenario, spec, hp.as_ref(), &data))
                    .collect())
            })
            .collect()
    })?;
    let per_realization = per_realization.into_iter().collect::<crate::Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    let mut warnings = 0;
    for (m, (spec, hp)) in chosen.iter().enumerate() {
        let (mut sums, mut ok, mut failed) = ([0.0; 4], 0usize, 0usize);
        for outcomes in &per_realization {
            match &outcomes[m] {
                Ok(o) => {
                    sums[0] += o.rmse;
                    sums[1] += o.accuracy;
                    sums[2] += o.f1;
                    sums[3] += o.time_s;
                    ok += 1;
                }
                Err(_) => failed += 1,
            }
        }
        warnings += failed;
        let mean = |s: f64| if ok == 0 { f64::NAN } else { s / ok as f64 };
        rows.push(BenchmarkRow {
            scenario: scenario.name.clone(),
            method: spec.method,
            potential: spec.family.map_or("none".to_string(), |f| f.name().to_string()),
            hyperparameters: hp.map_or("-".to_string(), |h| h.render(spec.family)),
            rmse: mean(sums[0]),
            accuracy: mean(sums[1]),
            f1: mean(sums[2]),
            time_s: mean(sums[3]),
            realizations: ok,
            failures: failed,
        });
    }

    let first = &per_realization[0];
    let example = ExampleRun {
        a_true: realization(scenario, derive_seed(scenario.master_seed, Stream::Realization, 0))?.a_true,
        estimates: chosen
            .iter()
            .zip(first)
            .filter_map(|((spec, _), o)| o.as_ref().ok().map(|o| (spec.method, o.a_hat.clone())))
            .collect(),
    };

    Ok(BenchmarkOutput { rows, tuning, example, warnings })
}
