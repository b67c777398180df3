//! Small dense linear-algebra helpers shared by the filter, the EM
//! statistics and the inner solver.

use nalgebra::{Cholesky, DMatrix, Dyn};

/// Largest absolute entry of `M - Mᵀ`.
pub fn asymmetry(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// In-place `(M + Mᵀ) / 2`.
pub fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
}

pub fn cholesky(m: &DMatrix<f64>) -> Option<Cholesky<f64, Dyn>> {
    Cholesky::new(m.clone())
}

/// `log det` from a Cholesky factor.
pub fn chol_log_det(chol: &Cholesky<f64, Dyn>) -> f64 {
    2.0 * chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>()
}

/// Cheap lower bound on the 2-norm condition number from the Cholesky diagonal.
pub fn chol_condition_estimate(chol: &Cholesky<f64, Dyn>) -> f64 {
    let diag = chol.l_dirty().diagonal();
    let (lo, hi) = diag
        .iter()
        .fold((f64::INFINITY, 0.0_f64), |(lo, hi), &d| (lo.min(d), hi.max(d)));
    (hi / lo).powi(2)
}

pub fn frobenius(m: &DMatrix<f64>) -> f64 {
    m.norm()
}

/// True when `m` equals `s * I` for some scalar `s` (entries compared exactly
/// up to `tol` relative to the diagonal).
pub fn isotropic_scale(m: &DMatrix<f64>, tol: f64) -> Option<f64> {
    let n = m.nrows();
    if n == 0 || m.ncols() != n {
        return None;
    }
    let s = m[(0, 0)];
    let scale = s.abs().max(f64::MIN_POSITIVE);
    for i in 0..n {
        for j in 0..n {
            let expected = if i == j { s } else { 0.0 };
            if (m[(i, j)] - expected).abs() > tol * scale {
                return None;
            }
        }
    }
    Some(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_det_of_diagonal() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 3.0]));
        let c = cholesky(&m).unwrap();
        assert!((chol_log_det(&c) - 6.0_f64.ln()).abs() < 1e-14);
        assert!((chol_condition_estimate(&c) - 1.5).abs() < 1e-14);
    }

    #[test]
    fn isotropic_detection() {
        let m = DMatrix::<f64>::identity(3, 3) * 0.01;
        assert_eq!(isotropic_scale(&m, 1e-12), Some(0.01));
        let mut n = m.clone();
        n[(0, 1)] = 1e-3;
        assert_eq!(isotropic_scale(&n, 1e-12), None);
    }
}
