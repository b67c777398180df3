//! Filters and smooths a simulated trajectory with the true transition
//! matrix, then compares the state errors of both passes.

use graphit::kalman::filter_and_smooth;
use graphit::{generate_sparse_a, simulate, KnownParams};

fn mse(est: &[nalgebra::DVector<f64>], truth: &[nalgebra::DVector<f64>]) -> f64 {
    est.iter().zip(truth).map(|(e, t)| (e - t).norm_squared()).sum::<f64>() / est.len() as f64
}

fn main() -> graphit::Result<()> {
    let n = 5;
    let a = generate_sparse_a(n, 7, 0.9, 3)?;
    // Noisy observations so that smoothing has something to do.
    let params = KnownParams::isotropic(n, 0.1, 0.3, 1e-4).with_transition(a);
    let traj = simulate(&params, 500, 4)?;

    let (filter, smoother) = filter_and_smooth(&params, &traj.observations)?;
    println!("negative log-likelihood: {:.4}", filter.neg_log_lik);
    println!("raw observation MSE:     {:.5}", mse(&traj.observations, &traj.states[1..]));
    println!("filtered MSE:            {:.5}", mse(&filter.filtered_means[1..], &traj.states[1..]));
    println!("smoothed MSE:            {:.5}", mse(&smoother.smoothed_means[1..], &traj.states[1..]));
    Ok(())
}
