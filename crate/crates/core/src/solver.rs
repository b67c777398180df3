//! Douglas-Rachford splitting for the inner convex problem
//!
//! ```text
//! minimize_A  ½ tr(Q⁻¹ (Psi - Delta Aᵀ - A Deltaᵀ + A Phi Aᵀ)) + ‖Ω ⊙ A‖₁
//! ```
//!
//! The quadratic's proximal map reduces to the Sylvester-type system
//! `A Phi + Q A / t = Delta + Q V / t`, which is solved exactly in the joint
//! eigenbasis of `Q` and `Phi`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::em_stats::{q_factor, q_quadratic_with, EmStats};
use crate::error::{Error, Result};
use crate::linalg;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrConfig {
    /// Proximal scale. With `normalize_step` the scale actually used is
    /// `step / sqrt(h_min h_max)`, where `h` ranges over the eigenvalues of
    /// the quadratic's Hessian `Q⁻¹ ⊗ Phi`.
    pub step: f64,
    /// Relaxation in `(0, 2)`; 1 is plain DR.
    pub relaxation: f64,
    /// Relative change tolerance on consecutive primal iterates.
    pub tol: f64,
    pub max_iter: usize,
    pub normalize_step: bool,
}

impl Default for DrConfig {
    fn default() -> Self {
        DrConfig { step: 1.0, relaxation: 1.0, tol: 1e-6, max_iter: 1000, normalize_step: true }
    }
}

impl DrConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::InvalidArgument(format!("DR step must be positive, got {}", self.step)));
        }
        if !(self.relaxation > 0.0 && self.relaxation < 2.0) {
            return Err(Error::InvalidArgument(format!(
                "DR relaxation must lie in (0, 2), got {}",
                self.relaxation
            )));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument(format!("DR tolerance must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidArgument("DR max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverReport {
    pub minimizer: DMatrix<f64>,
    pub iterations: usize,
    /// `‖x_n - x_{n-1}‖_F` at the last iteration.
    pub final_residual: f64,
    pub converged: bool,
    /// Proximal scale used by the iteration.
    pub effective_step: f64,
    /// The DR output scored worse than the starting point and was discarded.
    pub fell_back: bool,
}

/// Elementwise soft-thresholding `sign(V) max(|V| - t Ω, 0)`.
pub fn prox_weighted_l1(v: &DMatrix<f64>, omega: &DMatrix<f64>, step: f64) -> DMatrix<f64> {
    v.zip_map(omega, |x, w| {
        let shrunk = x.abs() - step * w;
        if shrunk > 0.0 {
            shrunk.copysign(x)
        } else {
            0.0
        }
    })
}

/// Precomputed proximal map of the EM quadratic.
///
/// With `Q = U diag(λ) Uᵀ` and `Phi = W diag(μ) Wᵀ`, the solution of
/// `A Phi + Q A / t = Delta + Q V / t` is `A = U B Wᵀ` where
/// `B_ij = [Uᵀ (Delta + Q V / t) W]_ij / (μ_j + λ_i / t)`.
/// For isotropic `Q = σ² I` the left rotation is skipped.
#[derive(Debug, Clone)]
pub struct QuadraticProx {
    q: DMatrix<f64>,
    delta: DMatrix<f64>,
    q_basis: Option<DMatrix<f64>>,
    q_eigs: DVector<f64>,
    phi_basis: DMatrix<f64>,
    phi_eigs: DVector<f64>,
    isotropic: Option<f64>,
}

impl QuadraticProx {
    pub fn new(stats: &EmStats, q: &DMatrix<f64>) -> Result<Self> {
        let n = stats.dim();
        if q.shape() != (n, n) {
            return Err(Error::mismatch("Q", q.shape(), "Phi", stats.phi.shape()));
        }
        let phi_eig = SymmetricEigen::new(stats.phi.clone());
        let isotropic = linalg::isotropic_scale(q, 1e-14);
        let (q_basis, q_eigs) = match isotropic {
            Some(s) if s > 0.0 => (None, DVector::from_element(n, s)),
            Some(_) => return Err(Error::NotPositiveDefinite { matrix: "Q" }),
            None => {
                let e = SymmetricEigen::new(q.clone());
                if e.eigenvalues.iter().any(|&l| l <= 0.0) {
                    return Err(Error::NotPositiveDefinite { matrix: "Q" });
                }
                (Some(e.eigenvectors), e.eigenvalues)
            }
        };
        Ok(QuadraticProx {
            q: q.clone(),
            delta: stats.delta.clone(),
            q_basis,
            q_eigs,
            // Phi is PSD; clip round-off negatives.
            phi_eigs: phi_eig.eigenvalues.map(|m| m.max(0.0)),
            phi_basis: phi_eig.eigenvectors,
            isotropic: isotropic.filter(|s| *s > 0.0),
        })
    }

    /// `sqrt(h_min h_max)` over the Hessian eigenvalues `μ_j / λ_i`, with
    /// `h_min` floored at `1e-8 h_max` when `Phi` is (near) singular.
    pub fn geometric_curvature(&self) -> f64 {
        let phi_max = self.phi_eigs.max();
        let phi_min = self.phi_eigs.min().max(1e-8 * phi_max);
        let h_max = phi_max / self.q_eigs.min();
        let h_min = phi_min / self.q_eigs.max();
        (h_min * h_max).sqrt()
    }

    pub fn apply(&self, v: &DMatrix<f64>, step: f64) -> DMatrix<f64> {
        let rhs = match self.isotropic {
            Some(s) => &self.delta + v * (s / step),
            None => &self.delta + &self.q * v / step,
        };
        let rotated = match &self.q_basis {
            Some(u) => u.transpose() * rhs * &self.phi_basis,
            None => rhs * &self.phi_basis,
        };
        let mut b = rotated;
        for j in 0..b.ncols() {
            for i in 0..b.nrows() {
                b[(i, j)] /= self.phi_eigs[j] + self.q_eigs[i] / step;
            }
        }
        match &self.q_basis {
            Some(u) => u * b * self.phi_basis.transpose(),
            None => b * self.phi_basis.transpose(),
        }
    }
}

/// Proximal map of the EM quadratic at scale `step`.
pub fn prox_quadratic(v: &DMatrix<f64>, stats: &EmStats, q: &DMatrix<f64>, step: f64) -> Result<DMatrix<f64>> {
    if !(step > 0.0) {
        return Err(Error::InvalidArgument(format!("prox step must be positive, got {step}")));
    }
    Ok(QuadraticProx::new(stats, q)?.apply(v, step))
}

/// Inner objective `q_quadratic(A) + ‖Omega ⊙ A‖₁`.
pub fn surrogate_value(a: &DMatrix<f64>, stats: &EmStats, q: &DMatrix<f64>, omega: &DMatrix<f64>) -> Result<f64> {
    let chol = q_factor(q)?;
    Ok(q_quadratic_with(a, stats, &chol) + weighted_l1(a, omega))
}

fn weighted_l1(a: &DMatrix<f64>, omega: &DMatrix<f64>) -> f64 {
    a.zip_map(omega, |x, w| (x * w).abs()).sum()
}

/// Minimizes the EM quadratic plus `‖Ω ⊙ A‖₁` starting from `a_init`.
///
/// Iterates `x = prox_l1(z)`, `z += ρ (prox_quad(2x - z) - x)` and stops when
/// `‖x_n - x_{n-1}‖_F <= tol (1 + ‖x_{n-1}‖_F)` and the fixed-point residual
/// `‖prox_quad(2x - z) - x‖_F` meets the same bound. If the final iterate scores
/// worse than `a_init` on the inner objective, `a_init` is returned instead.
pub fn douglas_rachford(
    stats: &EmStats,
    q: &DMatrix<f64>,
    omega: &DMatrix<f64>,
    a_init: &DMatrix<f64>,
    cfg: &DrConfig,
) -> Result<SolverReport> {
    cfg.validate()?;
    let n = stats.dim();
    if omega.shape() != (n, n) {
        return Err(Error::mismatch("Omega", omega.shape(), "Phi", stats.phi.shape()));
    }
    if a_init.shape() != (n, n) {
        return Err(Error::mismatch("A_init", a_init.shape(), "Phi", stats.phi.shape()));
    }
    if omega.iter().any(|w| !(*w >= 0.0)) {
        return Err(Error::InvalidArgument("weights must be nonnegative".into()));
    }
    let prox = QuadraticProx::new(stats, q)?;
    let step = if cfg.normalize_step {
        let curvature = prox.geometric_curvature();
        if curvature > 0.0 && curvature.is_finite() {
            cfg.step / curvature
        } else {
            cfg.step
        }
    } else {
        cfg.step
    };
    let chol = q_factor(q)?;
    let objective = |a: &DMatrix<f64>| q_quadratic_with(a, stats, &chol) + weighted_l1(a, omega);

    let mut z = a_init.clone();
    let mut x_prev = prox_weighted_l1(&z, omega, step);
    let mut residual = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;
    for _ in 0..cfg.max_iter {
        iterations += 1;
        let y = prox.apply(&(&x_prev * 2.0 - &z), step);
        let gap = y - &x_prev;
        let fixed_point = gap.norm();
        z += gap * cfg.relaxation;
        let x = prox_weighted_l1(&z, omega, step);
        residual = (&x - &x_prev).norm();
        let bound = cfg.tol * (1.0 + x_prev.norm());
        x_prev = x;
        if residual <= bound && fixed_point <= bound {
            converged = true;
            break;
        }
    }

    let fell_back = objective(&x_prev) > objective(a_init);
    let minimizer = if fell_back { a_init.clone() } else { x_prev };
    Ok(SolverReport { minimizer, iterations, final_residual: residual, converged, effective_step: step, fell_back })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m1(v: f64) -> DMatrix<f64> {
        DMatrix::from_element(1, 1, v)
    }

    #[test]
    fn soft_threshold_cases() {
        assert_eq!(prox_weighted_l1(&m1(2.0), &m1(0.5), 1.0), m1(1.5));
        assert_eq!(prox_weighted_l1(&m1(-2.0), &m1(0.25), 2.0), m1(-1.5));
        assert_eq!(prox_weighted_l1(&m1(0.3), &m1(0.5), 1.0), m1(0.0));
        let v = DMatrix::from_row_slice(2, 2, &[1.0, -2.0, 3.0, 0.0]);
        assert_eq!(prox_weighted_l1(&v, &DMatrix::zeros(2, 2), 1.0), v);
    }

    #[test]
    fn quadratic_prox_scalar() {
        let st = EmStats { psi: DMatrix::identity(2, 2), phi: DMatrix::identity(2, 2), delta: DMatrix::zeros(2, 2) };
        let v = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, -4.0, 0.5]);
        let a = prox_quadratic(&v, &st, &DMatrix::identity(2, 2), 1.0).unwrap();
        assert!((a - &v / 2.0).amax() < 1e-15);
    }

    #[test]
    fn quadratic_prox_vanishing_step() {
        let st = EmStats {
            psi: DMatrix::identity(2, 2),
            phi: DMatrix::from_row_slice(2, 2, &[3.0, 1.0, 1.0, 2.0]),
            delta: DMatrix::from_row_slice(2, 2, &[0.4, -1.0, 2.0, 0.1]),
        };
        let v = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, -4.0, 0.5]);
        let a = prox_quadratic(&v, &st, &DMatrix::identity(2, 2), 1e-8).unwrap();
        assert!((a - v).amax() < 1e-6);
    }

    #[test]
    fn unpenalized_minimum() {
        let phi = DMatrix::from_row_slice(3, 3, &[2.0, 0.3, 0.1, 0.3, 1.5, -0.2, 0.1, -0.2, 1.0]);
        let st = EmStats { psi: DMatrix::identity(3, 3), phi: phi.clone(), delta: phi };
        let cfg = DrConfig { tol: 1e-12, max_iter: 10_000, ..DrConfig::default() };
        let r = douglas_rachford(&st, &DMatrix::identity(3, 3), &DMatrix::zeros(3, 3), &DMatrix::zeros(3, 3), &cfg)
            .unwrap();
        assert!(r.converged);
        assert!((r.minimizer - DMatrix::<f64>::identity(3, 3)).amax() < 1e-9);
    }

    #[test]
    fn scalar_lasso() {
        let st = EmStats { psi: m1(1.0), phi: m1(1.0), delta: m1(1.0) };
        let cfg = DrConfig { tol: 1e-12, ..DrConfig::default() };
        let r = douglas_rachford(&st, &m1(1.0), &m1(0.4), &m1(0.0), &cfg).unwrap();
        assert!((r.minimizer[(0, 0)] - 0.6).abs() < 1e-10);
    }

    #[test]
    fn invalid_configs_rejected() {
        let base = DrConfig::default();
        for cfg in [
            DrConfig { step: 0.0, ..base },
            DrConfig { relaxation: 2.0, ..base },
            DrConfig { tol: 0.0, ..base },
            DrConfig { max_iter: 0, ..base },
        ] {
            assert!(cfg.validate().is_err());
        }
        let st = EmStats { psi: m1(1.0), phi: m1(1.0), delta: m1(1.0) };
        assert!(douglas_rachford(&st, &m1(1.0), &m1(-0.1), &m1(0.0), &base).is_err());
    }

    #[test]
    fn falls_back_when_budget_too_small() {
        // One DR sweep from the exact minimizer's neighbourhood cannot beat
        // a starting point that is already optimal.
        let st = EmStats { psi: m1(1.0), phi: m1(1.0), delta: m1(1.0) };
        let cfg = DrConfig { max_iter: 1, step: 50.0, ..DrConfig::default() };
        let r = douglas_rachford(&st, &m1(1.0), &m1(0.4), &m1(0.6), &cfg).unwrap();
        let start = surrogate_value(&m1(0.6), &st, &m1(1.0), &m1(0.4)).unwrap();
        let end = surrogate_value(&r.minimizer, &st, &m1(1.0), &m1(0.4)).unwrap();
        assert!(end <= start);
    }
}
