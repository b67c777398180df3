//! Sparse transition-matrix estimation for linear-Gaussian state-space
//! models.
//!
//! The crate provides exact Kalman filtering and RTS smoothing, the EM
//! quadratic majorant of the likelihood, a family of non-convex sparsity
//! penalties, a Douglas-Rachford inner solver and three estimators built on
//! top of them:
//!
//! * [`graphit`]: majorization-minimization with iteratively reweighted ℓ1
//!   majorants of a non-convex potential,
//! * [`graphem`]: the ℓ1-penalized special case,
//! * [`mlem`]: unpenalized EM.
//!
//! The [`harness`] module runs seeded Monte-Carlo benchmarks and grid
//! searches and serializes results as CSV and DOT.

pub mod algorithms;
pub mod em_stats;
pub mod error;
pub mod harness;
pub mod kalman;
pub mod linalg;
pub mod metrics;
pub mod model;
pub mod penalties;
pub mod rng;
pub mod solver;

pub use algorithms::{default_init, graphem, graphit, mlem, objective, EstimatorConfig, EstimatorResult, StopReason};
pub use em_stats::{compute_stats, q_quadratic, EmStats};
pub use error::{Error, Result};
pub use kalman::{kalman_filter, rts_smoother, FilterRun, SmootherRun};
pub use model::{generate_sparse_a, simulate, spectral_norm, KnownParams, ModelParams, Trajectory};
pub use penalties::{Family, Potential};
pub use solver::{douglas_rachford, DrConfig, SolverReport};
