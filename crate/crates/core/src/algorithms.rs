//! Outer majorization-minimization loops: GraphIT, GraphEM and MLEM.
//!
//! Each outer iteration runs the Kalman filter and RTS smoother at the
//! current iterate, builds the EM quadratic majorant of the negative
//! log-likelihood and, for the penalized estimators, the reweighted ℓ1
//! majorant of the penalty. The minimization step is a Douglas-Rachford
//! solve (GraphIT, GraphEM) or the closed form `Delta Phi⁻¹` (MLEM).

use nalgebra::{DMatrix, DVector};

use crate::em_stats::{compute_stats, EmStats};
use crate::error::{Error, Result};
use crate::kalman::{filter_and_smooth, kalman_filter};
use crate::linalg;
use crate::model::{rescale_to_norm, KnownParams};
use crate::penalties::Potential;
use crate::solver::{douglas_rachford, DrConfig};

/// Spectral norm of the default starting matrix.
pub const INIT_NORM: f64 = 0.99;

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorConfig {
    /// Penalty; required by GraphIT and GraphEM, ignored by MLEM.
    pub potential: Option<Potential>,
    /// Relative-change precision of the outer loop.
    pub epsilon: f64,
    pub max_outer: usize,
    pub dr: DrConfig,
    /// Evaluate the objective at the final iterate (one extra filter pass).
    pub track_objective: bool,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig { potential: None, epsilon: 1e-3, max_outer: 50, dr: DrConfig::default(), track_objective: true }
    }
}

impl EstimatorConfig {
    pub fn with_potential(potential: Potential) -> Self {
        EstimatorConfig { potential: Some(potential), ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidArgument(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if self.max_outer == 0 {
            return Err(Error::InvalidArgument("max_outer must be at least 1".into()));
        }
        self.dr.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Precision,
    Cap,
}

#[derive(Debug, Clone)]
pub struct EstimatorResult {
    pub a_hat: DMatrix<f64>,
    /// `L(A^(0)), L(A^(1)), ...`; the last entry is missing when
    /// `track_objective` is off.
    pub objective_trace: Vec<f64>,
    /// `A^(1), A^(2), ...`
    pub iterates: Vec<DMatrix<f64>>,
    pub outer_iterations: usize,
    pub stopped_by: StopReason,
    pub inner_iterations: usize,
    /// Outer steps whose inner solve hit its iteration cap.
    pub inner_unconverged: usize,
    /// Outer steps where the inner solve was rejected in favour of the anchor.
    pub inner_fallbacks: usize,
}

/// `A_ij = 0.1^|i-j|` rescaled to spectral norm 0.99.
pub fn default_init(n: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |i, j| 0.1_f64.powi((i as i32 - j as i32).abs()));
    rescale_to_norm(&a, INIT_NORM)
}

/// Penalized negative log-posterior `sum ρ(|A_ij|) + L_{1:K}(A)`; without a
/// potential this is the negative log-likelihood alone.
pub fn objective(
    a: &DMatrix<f64>,
    known: &KnownParams,
    observations: &[DVector<f64>],
    potential: Option<&Potential>,
) -> Result<f64> {
    let run = kalman_filter(&known.with_transition(a.clone()), observations)?;
    Ok(run.neg_log_lik + potential.map_or(0.0, |p| p.penalty_value(a)))
}

/// Closed-form EM update `Delta Phi⁻¹`.
pub fn mlem_step(stats: &EmStats) -> Option<DMatrix<f64>> {
    let chol = linalg::cholesky(&stats.phi)?;
    Some(chol.solve(&stats.delta.transpose()).transpose())
}

enum MStep {
    Reweighted(Potential),
    MaximumLikelihood,
}

fn check_inputs(known: &KnownParams, observations: &[DVector<f64>], a0: &DMatrix<f64>, cfg: &EstimatorConfig) -> Result<()> {
    cfg.validate()?;
    let n = known.state_dim();
    if a0.shape() != (n, n) {
        return Err(Error::mismatch("A0", a0.shape(), "Q", known.q.shape()));
    }
    crate::model::validate(known.with_transition(a0.clone()))?;
    if observations.is_empty() {
        return Err(Error::InvalidArgument("no observations".into()));
    }
    Ok(())
}

fn run_mm(
    observations: &[DVector<f64>],
    known: &KnownParams,
    a0: &DMatrix<f64>,
    cfg: &EstimatorConfig,
    step: MStep,
) -> Result<EstimatorResult> {
    check_inputs(known, observations, a0, cfg)?;
    let potential = match &step {
        MStep::Reweighted(p) => Some(*p),
        MStep::MaximumLikelihood => None,
    };
    let penalty = |a: &DMatrix<f64>| potential.map_or(0.0, |p| p.penalty_value(a));
    let wrap = |iteration: usize| move |e: Error| Error::Estimation { iteration, source: Box::new(e) };

    let mut a = a0.clone();
    let mut result = EstimatorResult {
        a_hat: a0.clone(),
        objective_trace: Vec::new(),
        iterates: Vec::new(),
        outer_iterations: 0,
        stopped_by: StopReason::Cap,
        inner_iterations: 0,
        inner_unconverged: 0,
        inner_fallbacks: 0,
    };

    for iteration in 1..=cfg.max_outer {
        // Majorization at A^(i-1).
        let (filter, smoother) = filter_and_smooth(&known.with_transition(a.clone()), observations).map_err(wrap(iteration))?;
        result.objective_trace.push(filter.neg_log_lik + penalty(&a));
        let stats = compute_stats(&smoother).map_err(wrap(iteration))?;

        // Minimization.
        let next = match &step {
            MStep::Reweighted(p) => {
                let omega = p.weight_matrix(&a);
                let report = douglas_rachford(&stats, &known.q, &omega, &a, &cfg.dr).map_err(wrap(iteration))?;
                result.inner_iterations += report.iterations;
                result.inner_unconverged += usize::from(!report.converged);
                result.inner_fallbacks += usize::from(report.fell_back);
                report.minimizer
            }
            MStep::MaximumLikelihood => mlem_step(&stats).ok_or(Error::SingularPhi { iteration })?,
        };

        result.outer_iterations = iteration;
        let change = (&next - &a).norm();
        let scale = a.norm();
        result.iterates.push(next.clone());
        a = next;
        if change <= cfg.epsilon * scale {
            result.stopped_by = StopReason::Precision;
            break;
        }
    }

    if cfg.track_objective {
        let last = objective(&a, known, observations, potential.as_ref()).map_err(wrap(result.outer_iterations + 1))?;
        result.objective_trace.push(last);
    }
    result.a_hat = a;
    Ok(result)
}

/// GraphIT: EM majorization of the likelihood combined with iteratively
/// reweighted ℓ1 majorization of the potential in `cfg.potential`.
pub fn graphit(
    observations: &[DVector<f64>],
    known: &KnownParams,
    a0: &DMatrix<f64>,
    cfg: &EstimatorConfig,
) -> Result<EstimatorResult> {
    let potential = cfg
        .potential
        .ok_or_else(|| Error::InvalidArgument("GraphIT needs a penalty potential".into()))?;
    run_mm(observations, known, a0, cfg, MStep::Reweighted(potential))
}

/// GraphEM: the ℓ1 special case. Only `gamma` of `cfg.potential` is used.
pub fn graphem(
    observations: &[DVector<f64>],
    known: &KnownParams,
    a0: &DMatrix<f64>,
    cfg: &EstimatorConfig,
) -> Result<EstimatorResult> {
    let gamma = cfg
        .potential
        .map(|p| p.gamma())
        .ok_or_else(|| Error::InvalidArgument("GraphEM needs an l1 weight gamma".into()))?;
    run_mm(observations, known, a0, cfg, MStep::Reweighted(Potential::l1(gamma)?))
}

/// Unpenalized EM (maximum likelihood).
pub fn mlem(
    observations: &[DVector<f64>],
    known: &KnownParams,
    a0: &DMatrix<f64>,
    cfg: &EstimatorConfig,
) -> Result<EstimatorResult> {
    run_mm(observations, known, a0, cfg, MStep::MaximumLikelihood)
}
