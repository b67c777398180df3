//! Estimates a sparse 8x8 transition matrix with GraphIT, GraphEM and MLEM
//! from one simulated trajectory and reports the recovery metrics.

use graphit::metrics::{accuracy, edge_confusion, f1, rmse, DEFAULT_THRESHOLD};
use graphit::{default_init, generate_sparse_a, graphem, graphit, mlem, simulate, EstimatorConfig, KnownParams, Potential};

fn main() -> graphit::Result<()> {
    let n = 8;
    let known = KnownParams::isotropic(n, 0.1, 0.1, 1e-4);
    let a_true = generate_sparse_a(n, 4, 0.9, 11)?;
    let traj = simulate(&known.with_transition(a_true.clone()), 1000, 12)?;
    let a0 = default_init(n);

    let runs = [
        ("graphit", graphit(&traj.observations, &known, &a0, &EstimatorConfig::with_potential(Potential::log_sum(40.0, 0.1)?))?),
        ("graphem", graphem(&traj.observations, &known, &a0, &EstimatorConfig::with_potential(Potential::l1(40.0)?))?),
        ("mlem", mlem(&traj.observations, &known, &a0, &EstimatorConfig::default())?),
    ];

    println!("{:<8} {:>8} {:>8} {:>8} {:>6}", "method", "rmse", "acc", "f1", "outer");
    for (name, r) in &runs {
        let c = edge_confusion(&r.a_hat, &a_true, DEFAULT_THRESHOLD)?;
        println!(
            "{name:<8} {:>8.4} {:>8.4} {:>8.4} {:>6}",
            rmse(&r.a_hat, &a_true)?,
            accuracy(&c),
            f1(&c),
            r.outer_iterations
        );
    }
    let trace = &runs[0].1.objective_trace;
    println!("graphit objective: {:.3} -> {:.3}", trace[0], trace[trace.len() - 1]);
    Ok(())
}
