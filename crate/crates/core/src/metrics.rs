//! Recovery metrics against a known transition matrix.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Default edge-detection threshold on `|A_ij|`.
pub const DEFAULT_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EdgeConfusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

impl EdgeConfusion {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }
}

fn same_shape(a_hat: &DMatrix<f64>, a_true: &DMatrix<f64>) -> Result<()> {
    if a_hat.shape() != a_true.shape() {
        return Err(Error::mismatch("A_hat", a_hat.shape(), "A_true", a_true.shape()));
    }
    Ok(())
}

/// Relative Frobenius error `‖A_hat - A_true‖_F / ‖A_true‖_F`.
pub fn rmse(a_hat: &DMatrix<f64>, a_true: &DMatrix<f64>) -> Result<f64> {
    same_shape(a_hat, a_true)?;
    let denom = a_true.norm();
    if denom == 0.0 {
        return Err(Error::InvalidArgument("relative error undefined for a zero reference matrix".into()));
    }
    Ok((a_hat - a_true).norm() / denom)
}

/// Counts over all entries, treating `|A_ij| > threshold` as an edge.
pub fn edge_confusion(a_hat: &DMatrix<f64>, a_true: &DMatrix<f64>, threshold: f64) -> Result<EdgeConfusion> {
    same_shape(a_hat, a_true)?;
    if !(threshold >= 0.0) {
        return Err(Error::InvalidArgument(format!("threshold must be nonnegative, got {threshold}")));
    }
    let mut c = EdgeConfusion::default();
    for (h, t) in a_hat.iter().zip(a_true.iter()) {
        match (h.abs() > threshold, t.abs() > threshold) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, false) => c.tn += 1,
            (false, true) => c.fn_ += 1,
        }
    }
    Ok(c)
}

pub fn accuracy(c: &EdgeConfusion) -> f64 {
    match c.total() {
        0 => 0.0,
        n => (c.tp + c.tn) as f64 / n as f64,
    }
}

/// `2tp / (2tp + fp + fn)`, and 0 when nothing was predicted or present.
pub fn f1(c: &EdgeConfusion) -> f64 {
    let denom = 2 * c.tp + c.fp + c.fn_;
    if denom == 0 {
        0.0
    } else {
        (2 * c.tp) as f64 / denom as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;

    #[test]
    fn rmse_cases() {
        let a = DMatrix::from_row_slice(2, 2, &[0.5, 0.0, -0.3, 0.2]);
        assert_eq!(rmse(&a, &a).unwrap(), 0.0);
        assert!((rmse(&DMatrix::zeros(2, 2), &a).unwrap() - 1.0).abs() < 1e-15);
        let eye = DMatrix::<f64>::identity(2, 2);
        let hat = DMatrix::from_diagonal(&DVector::from_vec(vec![1.1, 0.9]));
        assert!((rmse(&hat, &eye).unwrap() - 0.1).abs() < 1e-14);
        assert!(rmse(&a, &DMatrix::zeros(2, 2)).is_err());
        assert!(rmse(&a, &DMatrix::zeros(3, 3)).is_err());
    }

    #[test]
    fn confusion_enumeration() {
        let t = DMatrix::from_row_slice(2, 2, &[0.5, 0.0, 0.0, 0.5]);
        let h = DMatrix::from_row_slice(2, 2, &[0.4, 0.2, 0.0, 0.45]);
        let c = edge_confusion(&h, &t, DEFAULT_THRESHOLD).unwrap();
        assert_eq!(c, EdgeConfusion { tp: 2, fp: 1, tn: 1, fn_: 0 });
        assert_eq!(accuracy(&c), 0.75);
        assert_eq!(f1(&c), 0.8);
    }

    #[test]
    fn degenerate_scores() {
        let t = DMatrix::from_row_slice(2, 2, &[0.5, 0.0, 0.0, -0.5]);
        let perfect = edge_confusion(&t, &t, DEFAULT_THRESHOLD).unwrap();
        assert_eq!((perfect.fp, perfect.fn_), (0, 0));
        assert_eq!(accuracy(&perfect), 1.0);
        assert_eq!(f1(&perfect), 1.0);

        let zero = edge_confusion(&DMatrix::zeros(2, 2), &t, DEFAULT_THRESHOLD).unwrap();
        assert_eq!((zero.tp, zero.fn_), (0, 2));

        let wrong = edge_confusion(&DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]), &t, 0.0).unwrap();
        assert_eq!(accuracy(&wrong), 0.0);
        assert_eq!(f1(&EdgeConfusion { tp: 0, fp: 0, tn: 4, fn_: 0 }), 0.0);
    }
}
