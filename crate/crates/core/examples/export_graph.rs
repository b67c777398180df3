//! Writes the DOT graph of a true matrix next to its GraphIT estimate.
//! Render with `dot -Tsvg`.

use graphit::harness::export_dot;
use graphit::{default_init, generate_sparse_a, graphit, simulate, EstimatorConfig, KnownParams, Potential};

fn main() -> graphit::Result<()> {
    let n = 6;
    let known = KnownParams::isotropic(n, 0.1, 0.1, 1e-4);
    let a_true = generate_sparse_a(n, 5, 0.9, 5)?;
    let traj = simulate(&known.with_transition(a_true.clone()), 1000, 6)?;
    let cfg = EstimatorConfig::with_potential(Potential::log_sum(40.0, 0.1)?);
    let est = graphit(&traj.observations, &known, &default_init(n), &cfg)?;

    print!("{}", export_dot(&a_true, 1e-10, "true"));
    print!("{}", export_dot(&est.a_hat, 1e-10, "graphit"));
    Ok(())
}
