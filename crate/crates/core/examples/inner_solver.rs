//! One M-step by hand: smooth with the current estimate, build the EM
//! statistics and solve the weighted-l1 subproblem with Douglas-Rachford.

use graphit::kalman::filter_and_smooth;
use graphit::solver::{surrogate_value, DrConfig};
use graphit::{compute_stats, default_init, douglas_rachford, generate_sparse_a, simulate, KnownParams, Potential};

fn main() -> graphit::Result<()> {
    let n = 6;
    let known = KnownParams::isotropic(n, 0.1, 0.1, 1e-4);
    let a_true = generate_sparse_a(n, 6, 0.9, 21)?;
    let traj = simulate(&known.with_transition(a_true), 500, 22)?;

    let a_prev = default_init(n);
    let (_, smoother) = filter_and_smooth(&known.with_transition(a_prev.clone()), &traj.observations)?;
    let stats = compute_stats(&smoother)?;
    let omega = Potential::log_sum(30.0, 0.1)?.weight_matrix(&a_prev);

    let report = douglas_rachford(&stats, &known.q, &omega, &a_prev, &DrConfig::default())?;
    println!(
        "iterations {}  converged {}  step {:.3e}  residual {:.2e}",
        report.iterations, report.converged, report.effective_step, report.final_residual
    );
    println!("surrogate at A_prev: {:.4}", surrogate_value(&a_prev, &stats, &known.q, &omega)?);
    println!("surrogate at A_new:  {:.4}", surrogate_value(&report.minimizer, &stats, &known.q, &omega)?);
    println!("A_new:{:.3}", report.minimizer);
    Ok(())
}
