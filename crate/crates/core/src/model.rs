//! Linear-Gaussian state-space model: parameters, validation, simulation
//! and the random sparse transition matrices used in benchmarks.
//!
//! ```text
//! x_k = A x_{k-1} + q_k,   q_k ~ N(0, Q)
//! y_k = H x_k     + r_k,   r_k ~ N(0, R)
//! x_0 ~ N(mu0, Sigma0)
//! ```

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::seq::index;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg;
use crate::rng::{rng_from_seed, Rng};

/// Absolute symmetry tolerance for the covariance inputs (scaled by the
/// largest entry when that exceeds one).
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Spectral norm of generated ground-truth transition matrices.
pub const DEFAULT_TRUE_NORM: f64 = 0.9;

/// Everything in the model except the transition matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct KnownParams {
    pub h: DMatrix<f64>,
    pub q: DMatrix<f64>,
    pub r: DMatrix<f64>,
    pub mu0: DVector<f64>,
    pub sigma0: DMatrix<f64>,
}

/// Full parameter set `(A, H, Q, R, mu0, Sigma0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub a: DMatrix<f64>,
    pub h: DMatrix<f64>,
    pub q: DMatrix<f64>,
    pub r: DMatrix<f64>,
    pub mu0: DVector<f64>,
    pub sigma0: DMatrix<f64>,
}

/// A simulated run: `states` holds `x_0..x_K`, `observations` holds `y_1..y_K`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub states: Vec<DVector<f64>>,
    pub observations: Vec<DVector<f64>>,
}

impl Trajectory {
    pub fn steps(&self) -> usize {
        self.observations.len()
    }
}

impl KnownParams {
    /// `H = I`, `Q = σ_Q² I`, `R = σ_R² I`, `Sigma0 = σ_0² I`, `mu0 = 0`.
    pub fn isotropic(n: usize, sigma_q: f64, sigma_r: f64, sigma_0: f64) -> Self {
        let eye = DMatrix::<f64>::identity(n, n);
        KnownParams {
            h: eye.clone(),
            q: &eye * sigma_q.powi(2),
            r: &eye * sigma_r.powi(2),
            mu0: DVector::zeros(n),
            sigma0: &eye * sigma_0.powi(2),
        }
    }

    pub fn state_dim(&self) -> usize {
        self.q.nrows()
    }

    pub fn obs_dim(&self) -> usize {
        self.r.nrows()
    }

    /// Attaches a transition matrix without validating anything.
    pub fn with_transition(&self, a: DMatrix<f64>) -> ModelParams {
        ModelParams {
            a,
            h: self.h.clone(),
            q: self.q.clone(),
            r: self.r.clone(),
            mu0: self.mu0.clone(),
            sigma0: self.sigma0.clone(),
        }
    }
}

impl ModelParams {
    /// Builds and validates a parameter set.
    pub fn new(
        a: DMatrix<f64>,
        h: DMatrix<f64>,
        q: DMatrix<f64>,
        r: DMatrix<f64>,
        mu0: DVector<f64>,
        sigma0: DMatrix<f64>,
    ) -> Result<Self> {
        validate(ModelParams { a, h, q, r, mu0, sigma0 })
    }

    pub fn state_dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn obs_dim(&self) -> usize {
        self.h.nrows()
    }

    pub fn known(&self) -> KnownParams {
        KnownParams {
            h: self.h.clone(),
            q: self.q.clone(),
            r: self.r.clone(),
            mu0: self.mu0.clone(),
            sigma0: self.sigma0.clone(),
        }
    }

    /// Shape checks only; covariances may be singular.
    pub fn check_dimensions(&self) -> Result<()> {
        let nx = self.a.nrows();
        let shape = |m: &DMatrix<f64>| m.shape();
        if self.a.ncols() != nx {
            return Err(Error::mismatch("A rows", (nx, nx), "A", shape(&self.a)));
        }
        if self.h.ncols() != nx {
            return Err(Error::mismatch("H", shape(&self.h), "A", shape(&self.a)));
        }
        let ny = self.h.nrows();
        if self.q.shape() != (nx, nx) {
            return Err(Error::mismatch("Q", shape(&self.q), "A", shape(&self.a)));
        }
        if self.r.shape() != (ny, ny) {
            return Err(Error::mismatch("R", shape(&self.r), "H", shape(&self.h)));
        }
        if self.mu0.len() != nx {
            return Err(Error::mismatch("mu0", (self.mu0.len(), 1), "A", shape(&self.a)));
        }
        if self.sigma0.shape() != (nx, nx) {
            return Err(Error::mismatch("Sigma0", shape(&self.sigma0), "A", shape(&self.a)));
        }
        Ok(())
    }
}

fn check_covariance(m: &DMatrix<f64>, name: &'static str) -> Result<()> {
    let scale = m.amax().max(1.0);
    let asym = linalg::asymmetry(m);
    if asym > SYMMETRY_TOL * scale {
        return Err(Error::NotSymmetric { matrix: name, asymmetry: asym });
    }
    if linalg::cholesky(m).is_none() {
        return Err(Error::NotPositiveDefinite { matrix: name });
    }
    Ok(())
}

/// Checks dimensional consistency and that `Q`, `R`, `Sigma0` are symmetric
/// positive definite.
pub fn validate(params: ModelParams) -> Result<ModelParams> {
    params.check_dimensions()?;
    check_covariance(&params.q, "Q")?;
    check_covariance(&params.r, "R")?;
    check_covariance(&params.sigma0, "Sigma0")?;
    Ok(params)
}

fn sample_standard(rng: &mut Rng, n: usize) -> DVector<f64> {
    DVector::from_iterator(n, (0..n).map(|_| StandardNormal.sample(rng)))
}

/// Draws a trajectory of `steps` transitions. Gaussian noise is generated as
/// `L z` with `L` the Cholesky factor of the covariance and `z` standard
/// normal from a ChaCha8 stream seeded by `seed`.
pub fn simulate(params: &ModelParams, steps: usize, seed: u64) -> Result<Trajectory> {
    if steps == 0 {
        return Err(Error::InvalidArgument("simulation needs at least one step".into()));
    }
    let params = validate(params.clone())?;
    let chol = |m: &DMatrix<f64>, name| {
        linalg::cholesky(m)
            .map(|c| c.l())
            .ok_or(Error::NotPositiveDefinite { matrix: name })
    };
    let l0 = chol(&params.sigma0, "Sigma0")?;
    let lq = chol(&params.q, "Q")?;
    let lr = chol(&params.r, "R")?;
    let nx = params.state_dim();
    let ny = params.obs_dim();

    let mut rng = rng_from_seed(seed);
    let mut states = Vec::with_capacity(steps + 1);
    let mut observations = Vec::with_capacity(steps);
    let x0 = &params.mu0 + &l0 * sample_standard(&mut rng, nx);
    states.push(x0);
    for k in 1..=steps {
        let x = &params.a * &states[k - 1] + &lq * sample_standard(&mut rng, nx);
        let y = &params.h * &x + &lr * sample_standard(&mut rng, ny);
        states.push(x);
        observations.push(y);
    }
    Ok(Trajectory { states, observations })
}

/// Deterministic propagation `x_0 = mu0`, `x_k = A x_{k-1}`, `y_k = H x_k`.
/// Only dimensions are checked, so zero covariances are allowed.
pub fn simulate_noiseless(params: &ModelParams, steps: usize) -> Result<Trajectory> {
    if steps == 0 {
        return Err(Error::InvalidArgument("simulation needs at least one step".into()));
    }
    params.check_dimensions()?;
    let mut states = vec![params.mu0.clone()];
    let mut observations = Vec::with_capacity(steps);
    for k in 1..=steps {
        let x = &params.a * &states[k - 1];
        observations.push(&params.h * &x);
        states.push(x);
    }
    Ok(Trajectory { states, observations })
}

/// Result of [`spectral_norm`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralNorm {
    pub value: f64,
    /// False when the eigen-solver hit its iteration cap and `value` is the
    /// best power-iteration estimate.
    pub converged: bool,
}

const EIGEN_MAX_ITER: usize = 10_000;
const POWER_MAX_ITER: usize = 100_000;

/// Largest singular value, computed as the square root of the top eigenvalue
/// of the Gram matrix `MᵀM`.
pub fn spectral_norm(m: &DMatrix<f64>) -> SpectralNorm {
    if m.is_empty() {
        return SpectralNorm { value: 0.0, converged: true };
    }
    let gram = m.transpose() * m;
    match SymmetricEigen::try_new(gram.clone(), f64::EPSILON, EIGEN_MAX_ITER) {
        Some(eig) => {
            let top = eig.eigenvalues.iter().cloned().fold(0.0_f64, f64::max);
            SpectralNorm { value: top.max(0.0).sqrt(), converged: true }
        }
        None => SpectralNorm { value: power_iteration(&gram), converged: false },
    }
}

fn power_iteration(gram: &DMatrix<f64>) -> f64 {
    let n = gram.nrows();
    let mut v = DVector::from_element(n, 1.0 / (n as f64).sqrt());
    let mut lambda = 0.0;
    for _ in 0..POWER_MAX_ITER {
        let w = gram * &v;
        let norm = w.norm();
        if norm == 0.0 {
            return 0.0;
        }
        let next = v.dot(&w);
        v = w / norm;
        if (next - lambda).abs() <= 1e-15 * next.abs() {
            lambda = next;
            break;
        }
        lambda = next;
    }
    lambda.max(0.0).sqrt()
}

/// Rescales `m` so that its spectral norm equals `target`.
pub fn rescale_to_norm(m: &DMatrix<f64>, target: f64) -> DMatrix<f64> {
    let norm = spectral_norm(m).value;
    if norm == 0.0 {
        return m.clone();
    }
    m * (target / norm)
}

/// Random `n x n` matrix with exactly `support` nonzero entries at uniformly
/// drawn distinct positions (diagonal included), i.i.d. standard normal
/// values, jointly rescaled to spectral norm `target_norm`.
pub fn generate_sparse_a(n: usize, support: usize, target_norm: f64, seed: u64) -> Result<DMatrix<f64>> {
    if n == 0 {
        return Err(Error::InvalidArgument("dimension must be positive".into()));
    }
    if support == 0 || support > n * n {
        return Err(Error::InvalidArgument(format!(
            "support size {support} outside 1..={}",
            n * n
        )));
    }
    if !(target_norm > 0.0 && target_norm < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "target spectral norm {target_norm} must lie in (0, 1)"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let positions = index::sample(&mut rng, n * n, support);
    let mut a = DMatrix::zeros(n, n);
    for pos in positions.iter() {
        // Row-major position index.
        let mut value: f64 = StandardNormal.sample(&mut rng);
        while value == 0.0 {
            value = StandardNormal.sample(&mut rng);
        }
        a[(pos / n, pos % n)] = value;
    }
    Ok(rescale_to_norm(&a, target_norm))
}
