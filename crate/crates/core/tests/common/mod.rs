//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use graphit::em_stats::EmStats;
use graphit::rng::rng_from_seed;
use graphit::ModelParams;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    rng_from_seed(seed)
}

pub fn gaussian_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DMatrix<f64> {
    DMatrix::from_fn(r, c, |_, _| StandardNormal.sample(rng))
}

pub fn gaussian_vector(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| StandardNormal.sample(rng))
}

/// `B Bᵀ / n + floor I`.
pub fn random_spd(rng: &mut ChaCha8Rng, n: usize, floor: f64) -> DMatrix<f64> {
    let b = gaussian_matrix(rng, n, n);
    &b * b.transpose() / n as f64 + DMatrix::identity(n, n) * floor
}

/// Random model with a stable transition, a general observation matrix and
/// non-isotropic covariances.
pub fn random_model(rng: &mut ChaCha8Rng, nx: usize, ny: usize) -> ModelParams {
    let mut a = gaussian_matrix(rng, nx, nx);
    let s = a.singular_values().max();
    a *= rng.random_range(0.3..1.1) / s;
    ModelParams {
        a,
        h: gaussian_matrix(rng, ny, nx),
        q: random_spd(rng, nx, 0.1),
        r: random_spd(rng, ny, 0.2),
        mu0: gaussian_vector(rng, nx),
        sigma0: random_spd(rng, nx, 0.1),
    }
}

/// Mean and covariance of the stacked vector `(x_0, ..., x_K, y_1, ..., y_K)`,
/// assembled from the linear map that sends `(x_0, w_1..w_K, v_1..v_K)` to it.
pub fn joint_moments(p: &ModelParams, steps: usize) -> (DVector<f64>, DMatrix<f64>) {
    let (n, m) = (p.a.nrows(), p.h.nrows());
    let sx = n * (steps + 1);
    let dim = sx + m * steps;
    // Sources: x_0 (n), w_1..w_K (n each), v_1..v_K (m each).
    let mut map = DMatrix::zeros(dim, dim);
    let mut src_cov = DMatrix::zeros(dim, dim);
    src_cov.view_mut((0, 0), (n, n)).copy_from(&p.sigma0);
    for k in 1..=steps {
        src_cov.view_mut((n * k, n * k), (n, n)).copy_from(&p.q);
        let o = sx + m * (k - 1);
        src_cov.view_mut((o, o), (m, m)).copy_from(&p.r);
    }
    let mut src_mean = DVector::zeros(dim);
    src_mean.rows_mut(0, n).copy_from(&p.mu0);

    // x_k = A^k x_0 + sum_{j<=k} A^{k-j} w_j
    let mut powers = vec![DMatrix::identity(n, n)];
    for k in 1..=steps {
        powers.push(&p.a * &powers[k - 1]);
    }
    for k in 0..=steps {
        for j in 0..=k {
            map.view_mut((n * k, n * j), (n, n)).copy_from(&powers[k - j]);
        }
    }
    // y_k = H x_k + v_k
    for k in 1..=steps {
        let row = sx + m * (k - 1);
        let xk = map.rows(n * k, n).clone_owned();
        map.view_mut((row, 0), (m, dim)).copy_from(&(&p.h * xk));
        for i in 0..m {
            map[(row + i, row + i)] += 1.0;
        }
    }
    let mean = &map * src_mean;
    let cov = &map * src_cov * map.transpose();
    (mean, cov)
}

/// `-log p(y_1..y_K)` from the dense joint covariance of the observations.
pub fn dense_neg_log_lik(p: &ModelParams, obs: &[DVector<f64>]) -> f64 {
    let (n, m, steps) = (p.a.nrows(), p.h.nrows(), obs.len());
    let (mean, cov) = joint_moments(p, steps);
    let sx = n * (steps + 1);
    let my = mean.rows(sx, m * steps).clone_owned();
    let cyy = cov.view((sx, sx), (m * steps, m * steps)).clone_owned();
    let y = DVector::from_iterator(m * steps, obs.iter().flat_map(|v| v.iter().copied()));
    let r = y - my;
    let lu = cyy.clone().lu();
    let det = lu.determinant();
    let quad = r.dot(&lu.solve(&r).unwrap());
    0.5 * ((2.0 * std::f64::consts::PI).ln() * (m * steps) as f64 + det.ln()) + 0.5 * quad
}

/// Posterior mean and covariance of `(x_0..x_K)` given all observations.
pub fn conditioned_states(p: &ModelParams, obs: &[DVector<f64>]) -> (DVector<f64>, DMatrix<f64>) {
    let (n, m, steps) = (p.a.nrows(), p.h.nrows(), obs.len());
    let (mean, cov) = joint_moments(p, steps);
    let sx = n * (steps + 1);
    let sy = m * steps;
    let cxx = cov.view((0, 0), (sx, sx)).clone_owned();
    let cxy = cov.view((0, sx), (sx, sy)).clone_owned();
    let cyy = cov.view((sx, sx), (sy, sy)).clone_owned();
    let y = DVector::from_iterator(sy, obs.iter().flat_map(|v| v.iter().copied()));
    let inv = cyy.try_inverse().unwrap();
    let gain = &cxy * inv;
    let post_mean = mean.rows(0, sx) + &gain * (y - mean.rows(sx, sy));
    let post_cov = cxx - &gain * cxy.transpose();
    (post_mean, post_cov)
}

/// EM statistics straight from the posterior second moments of the states.
pub fn conditioned_stats(p: &ModelParams, obs: &[DVector<f64>]) -> EmStats {
    let n = p.a.nrows();
    let (mu, cov) = conditioned_states(p, obs);
    let second = |i: usize, j: usize| {
        cov.view((n * i, n * j), (n, n)).clone_owned() + mu.rows(n * i, n) * mu.rows(n * j, n).transpose()
    };
    let mut stats = EmStats { psi: DMatrix::zeros(n, n), phi: DMatrix::zeros(n, n), delta: DMatrix::zeros(n, n) };
    for k in 1..=obs.len() {
        stats.psi += second(k, k);
        stats.phi += second(k - 1, k - 1);
        stats.delta += second(k, k - 1);
    }
    stats
}

/// Random surrogate data: well-conditioned `Phi`, matching `Delta`, SPD `Q`.
pub fn random_surrogate(rng: &mut ChaCha8Rng, n: usize) -> (EmStats, DMatrix<f64>) {
    let phi = random_spd(rng, n, 0.5);
    let delta = gaussian_matrix(rng, n, n) * 0.5 * &phi;
    let psi = random_spd(rng, n, 1.0);
    let q = random_spd(rng, n, 0.3);
    (EmStats { psi, phi, delta }, q)
}

fn soft(v: &DMatrix<f64>, t: &DMatrix<f64>) -> DMatrix<f64> {
    v.zip_map(t, |x, w| x.signum() * (x.abs() - w).max(0.0))
}

/// Proximal gradient on `½tr(Q⁻¹(Ψ - ΔAᵀ - AΔᵀ + AΦAᵀ)) + ‖Ω ⊙ A‖₁` with step
/// `1/L`, run until the iterate stops moving.
pub fn forward_backward(stats: &EmStats, q: &DMatrix<f64>, omega: &DMatrix<f64>) -> DMatrix<f64> {
    let q_inv = q.clone().try_inverse().unwrap();
    let lip = q_inv.symmetric_eigenvalues().max() * stats.phi.symmetric_eigenvalues().max();
    let t = 1.0 / lip;
    let mut a = DMatrix::zeros(stats.phi.nrows(), stats.phi.nrows());
    for _ in 0..2_000_000 {
        let grad = &q_inv * (&a * &stats.phi - &stats.delta);
        let next = soft(&(&a - grad * t), &(omega * t));
        let moved = (&next - &a).norm();
        a = next;
        if moved < 1e-15 {
            break;
        }
    }
    a
}

/// Minimizer of `t|u| + ½(u - v)²`: a dense grid search brackets it, then
/// bisection on the sign of the subgradient refines it to machine precision.
pub fn scalar_l1_prox_by_search(v: f64, t: f64) -> f64 {
    let f = |u: f64| t * u.abs() + 0.5 * (u - v).powi(2);
    let (lo, hi) = (v.min(0.0) - 1.0, v.max(0.0) + 1.0);
    let grid = 20_001;
    let h = (hi - lo) / (grid - 1) as f64;
    let best = (0..grid).map(|i| lo + h * i as f64).fold(lo, |b, u| if f(u) < f(b) { u } else { b });
    let (mut a, mut b) = (best - h, best + h);
    if a <= 0.0 && b >= 0.0 {
        // 0 is optimal iff the subdifferential [-t - v, t - v] contains 0.
        if v.abs() <= t {
            return 0.0;
        }
        if v > 0.0 { a = 0.0 } else { b = 0.0 }
    }
    let slope = |u: f64| t * u.signum() + u - v;
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if slope(mid) > 0.0 { b = mid } else { a = mid }
    }
    0.5 * (a + b)
}
