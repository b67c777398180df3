use thiserror::Error;

/// Errors raised by the estimation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch between {left} ({left_shape}) and {right} ({right_shape})")]
    DimensionMismatch {
        left: &'static str,
        left_shape: String,
        right: &'static str,
        right_shape: String,
    },

    #[error("{matrix} is not symmetric (max asymmetry {asymmetry:.3e})")]
    NotSymmetric { matrix: &'static str, asymmetry: f64 },

    #[error("{matrix} is not positive definite")]
    NotPositiveDefinite { matrix: &'static str },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("singular predictive covariance at step {step} (condition estimate {condition:.3e})")]
    SingularPredictiveCovariance { step: usize, condition: f64 },

    #[error("singular predicted state covariance at step {step}")]
    SingularStateCovariance { step: usize },

    #[error("singular smoothed second moment (Phi) at outer iteration {iteration}")]
    SingularPhi { iteration: usize },

    #[error("estimation failed at outer iteration {iteration}: {source}")]
    Estimation {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn mismatch(
        left: &'static str,
        left_shape: (usize, usize),
        right: &'static str,
        right_shape: (usize, usize),
    ) -> Self {
        Error::DimensionMismatch {
            left,
            left_shape: format!("{}x{}", left_shape.0, left_shape.1),
            right,
            right_shape: format!("{}x{}", right_shape.0, right_shape.1),
        }
    }

    /// True for failures of the numerical pipeline (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SingularPredictiveCovariance { .. }
                | Error::SingularStateCovariance { .. }
                | Error::SingularPhi { .. }
                | Error::Estimation { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
