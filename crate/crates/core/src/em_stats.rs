//! EM sufficient statistics and the quadratic majorant of the negative
//! log-likelihood in the transition matrix.
//!
//! Given smoother output at an anchor `A'`:
//!
//! ```text
//! Psi   = sum_{k=1..K} Σˢ_k     + μˢ_k μˢ_kᵀ
//! Phi   = sum_{k=1..K} Σˢ_{k-1} + μˢ_{k-1} μˢ_{k-1}ᵀ
//! Delta = sum_{k=1..K} Σˢ_k Gᵀ_{k-1} + μˢ_k μˢ_{k-1}ᵀ
//! ```
//!
//! and, up to a constant independent of `A`,
//! `L_{1:K}(A) <= ½ tr(Q⁻¹ (Psi - Delta Aᵀ - A Deltaᵀ + A Phi Aᵀ))`
//! with equality at `A = A'`.
//!
//! The constant term inside the trace is the state second moment `Psi`.

use nalgebra::{Cholesky, DMatrix, Dyn};

use crate::error::{Error, Result};
use crate::kalman::SmootherRun;
use crate::linalg::{self, symmetrize};

#[derive(Debug, Clone, PartialEq)]
pub struct EmStats {
    pub psi: DMatrix<f64>,
    pub phi: DMatrix<f64>,
    pub delta: DMatrix<f64>,
}

impl EmStats {
    pub fn dim(&self) -> usize {
        self.phi.nrows()
    }
}

pub fn compute_stats(smoother: &SmootherRun) -> Result<EmStats> {
    let steps = smoother.steps();
    if steps == 0 || smoother.smoothed_means.len() != steps + 1 || smoother.smoothed_covs.len() != steps + 1 {
        return Err(Error::InvalidArgument(
            "smoother run must contain k = 0..K moments and K gains".into(),
        ));
    }
    let n = smoother.smoothed_means[0].len();
    let mut psi = DMatrix::zeros(n, n);
    let mut phi = DMatrix::zeros(n, n);
    let mut delta = DMatrix::zeros(n, n);
    for k in 1..=steps {
        let m = &smoother.smoothed_means[k];
        let m_prev = &smoother.smoothed_means[k - 1];
        psi += &smoother.smoothed_covs[k] + m * m.transpose();
        phi += &smoother.smoothed_covs[k - 1] + m_prev * m_prev.transpose();
        delta += &smoother.smoothed_covs[k] * smoother.gains[k - 1].transpose() + m * m_prev.transpose();
    }
    symmetrize(&mut phi);
    Ok(EmStats { psi, phi, delta })
}

/// Cholesky factor of a state-noise covariance, reused across many
/// evaluations of [`q_quadratic`].
pub(crate) fn q_factor(q: &DMatrix<f64>) -> Result<Cholesky<f64, Dyn>> {
    linalg::cholesky(q).ok_or(Error::NotPositiveDefinite { matrix: "Q" })
}

pub(crate) fn q_quadratic_with(a: &DMatrix<f64>, stats: &EmStats, q_chol: &Cholesky<f64, Dyn>) -> f64 {
    let da = &stats.delta * a.transpose();
    let inner = &stats.psi - &da - da.transpose() + a * &stats.phi * a.transpose();
    0.5 * q_chol.solve(&inner).trace()
}

/// `½ tr(Q⁻¹ (Psi - Delta Aᵀ - A Deltaᵀ + A Phi Aᵀ))`.
pub fn q_quadratic(a: &DMatrix<f64>, stats: &EmStats, q: &DMatrix<f64>) -> Result<f64> {
    let n = stats.dim();
    if a.shape() != (n, n) {
        return Err(Error::mismatch("A", a.shape(), "Phi", stats.phi.shape()));
    }
    if q.shape() != (n, n) {
        return Err(Error::mismatch("Q", q.shape(), "Phi", stats.phi.shape()));
    }
    Ok(q_quadratic_with(a, stats, &q_factor(q)?))
}

/// Gradient of [`q_quadratic`] with respect to `A`: `Q⁻¹ (A Phi - Delta)`.
pub fn q_gradient(a: &DMatrix<f64>, stats: &EmStats, q: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    Ok(q_factor(q)?.solve(&(a * &stats.phi - &stats.delta)))
}
