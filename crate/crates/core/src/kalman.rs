//! Exact Kalman filter and Rauch-Tung-Striebel smoother.
//!
//! The filter also evaluates the negative log-likelihood of the observations
//! through the prediction-error decomposition
//! `sum_k ½ log|2π S_k| + ½ z_kᵀ S_k⁻¹ z_k`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{self, chol_condition_estimate, chol_log_det, symmetrize};
use crate::model::ModelParams;

/// Condition-number guard on the predictive covariances `S_k`.
pub const MAX_CONDITION: f64 = 1e12;

/// Per-step filter output for `k = 1..K`.
#[derive(Debug, Clone)]
pub struct FilterRun {
    pub filtered_means: Vec<DVector<f64>>,
    pub filtered_covs: Vec<DMatrix<f64>>,
    /// Innovations `z_k = y_k - H A mu_{k-1}`.
    pub residuals: Vec<DVector<f64>>,
    /// Innovation covariances `S_k`.
    pub predictive_covs: Vec<DMatrix<f64>>,
    pub neg_log_lik: f64,
}

impl FilterRun {
    pub fn steps(&self) -> usize {
        self.filtered_means.len()
    }
}

/// Smoothed moments for `k = 0..K` and the backward gains `G_0..G_{K-1}`.
#[derive(Debug, Clone)]
pub struct SmootherRun {
    pub smoothed_means: Vec<DVector<f64>>,
    pub smoothed_covs: Vec<DMatrix<f64>>,
    pub gains: Vec<DMatrix<f64>>,
}

impl SmootherRun {
    pub fn steps(&self) -> usize {
        self.gains.len()
    }
}

fn check_observations(params: &ModelParams, observations: &[DVector<f64>]) -> Result<()> {
    if observations.is_empty() {
        return Err(Error::InvalidArgument("no observations".into()));
    }
    let ny = params.obs_dim();
    if let Some(y) = observations.iter().find(|y| y.len() != ny) {
        return Err(Error::mismatch("observation", (y.len(), 1), "H", params.h.shape()));
    }
    Ok(())
}

/// Runs the filter forward from `(mu0, Sigma0)` over `y_1..y_K`.
pub fn kalman_filter(params: &ModelParams, observations: &[DVector<f64>]) -> Result<FilterRun> {
    params.check_dimensions()?;
    check_observations(params, observations)?;

    let nx = params.state_dim();
    let steps = observations.len();
    let eye = DMatrix::<f64>::identity(nx, nx);
    let at = params.a.transpose();
    let ht = params.h.transpose();

    let mut run = FilterRun {
        filtered_means: Vec::with_capacity(steps),
        filtered_covs: Vec::with_capacity(steps),
        residuals: Vec::with_capacity(steps),
        predictive_covs: Vec::with_capacity(steps),
        neg_log_lik: 0.0,
    };

    let mut mean = params.mu0.clone();
    let mut cov = params.sigma0.clone();
    let log_2pi = (2.0 * PI).ln();

    for (idx, y) in observations.iter().enumerate() {
        let step = idx + 1;
        let m_pred = &params.a * &mean;
        let mut p_pred = &params.a * &cov * &at + &params.q;
        symmetrize(&mut p_pred);

        let z = y - &params.h * &m_pred;
        let hp = &params.h * &p_pred;
        let mut s = &hp * &ht + &params.r;
        symmetrize(&mut s);

        let chol = linalg::cholesky(&s)
            .ok_or(Error::SingularPredictiveCovariance { step, condition: f64::INFINITY })?;
        let condition = chol_condition_estimate(&chol);
        if !(condition <= MAX_CONDITION) {
            return Err(Error::SingularPredictiveCovariance { step, condition });
        }

        // Kᵀ = S⁻¹ H P⁻
        let gain = chol.solve(&hp).transpose();
        let sinv_z = chol.solve(&z);
        run.neg_log_lik += 0.5 * (z.len() as f64 * log_2pi + chol_log_det(&chol)) + 0.5 * z.dot(&sinv_z);

        mean = &m_pred + &gain * &z;
        // Joseph form: (I - KH) P⁻ (I - KH)ᵀ + K R Kᵀ
        let ikh = &eye - &gain * &params.h;
        cov = &ikh * &p_pred * ikh.transpose() + &gain * &params.r * gain.transpose();
        symmetrize(&mut cov);

        run.filtered_means.push(mean.clone());
        run.filtered_covs.push(cov.clone());
        run.residuals.push(z);
        run.predictive_covs.push(s);
    }
    Ok(run)
}

/// Backward RTS pass. `G_k = Σ_k Aᵀ (A Σ_k Aᵀ + Q)⁻¹` for `k = 0..K-1`,
/// where `Σ_0 = Sigma0`; the recursion is carried down to `k = 0`.
pub fn rts_smoother(params: &ModelParams, filter: &FilterRun) -> Result<SmootherRun> {
    params.check_dimensions()?;
    let steps = filter.steps();
    if steps == 0 {
        return Err(Error::InvalidArgument("empty filter run".into()));
    }
    let at = params.a.transpose();

    // Index 0 holds the prior (mu0, Sigma0), index k the filtered moments.
    let mean_at = |k: usize| if k == 0 { &params.mu0 } else { &filter.filtered_means[k - 1] };
    let cov_at = |k: usize| if k == 0 { &params.sigma0 } else { &filter.filtered_covs[k - 1] };

    let mut means = vec![DVector::zeros(0); steps + 1];
    let mut covs = vec![DMatrix::zeros(0, 0); steps + 1];
    let mut gains = vec![DMatrix::zeros(0, 0); steps];
    means[steps] = mean_at(steps).clone();
    covs[steps] = cov_at(steps).clone();

    for k in (0..steps).rev() {
        let cov_k = cov_at(k);
        let a_cov = &params.a * cov_k;
        let mut p_pred = &a_cov * &at + &params.q;
        symmetrize(&mut p_pred);
        let chol = linalg::cholesky(&p_pred).ok_or(Error::SingularStateCovariance { step: k + 1 })?;
        // Gᵀ = P⁻⁻¹ A Σ_k
        let gain = chol.solve(&a_cov).transpose();

        let mean = mean_at(k) + &gain * (&means[k + 1] - &params.a * mean_at(k));
        let mut cov = cov_k + &gain * (&covs[k + 1] - &p_pred) * gain.transpose();
        symmetrize(&mut cov);

        means[k] = mean;
        covs[k] = cov;
        gains[k] = gain;
    }

    Ok(SmootherRun { smoothed_means: means, smoothed_covs: covs, gains })
}

/// Filter then smoother at the same parameters.
pub fn filter_and_smooth(params: &ModelParams, observations: &[DVector<f64>]) -> Result<(FilterRun, SmootherRun)> {
    let filter = kalman_filter(params, observations)?;
    let smoother = rts_smoother(params, &filter)?;
    Ok((filter, smoother))
}
