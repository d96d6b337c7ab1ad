//! Evidence estimators.
//!
//! Seven routes to the same integral: naive prior averaging, importance
//! sampling, the ordered-uniform trapezoid rule, the general sorted-sample
//! Riemann sum, quantile importance sampling, nested sampling, and the
//! geometric vertical-likelihood ladder. Everything accumulates in the log
//! domain and lands in a [`LogEvidenceEstimate`].

mod mc;
mod nested;
mod qis;
mod riemann;
mod vertical;

pub use mc::{importance_sampling, naive_mc, IsEstimates};
pub use nested::{nested_sampling, NestedRun};
pub use qis::{exp_grid_quadrature, qis, qis_bounds, OrderedOrdinates};
pub use riemann::{philippe_riemann, yakowitz_unit};
pub use vertical::{vertical_geometric, LorenzPoint, VerticalRun};

use serde::Serialize;
use thiserror::Error;

use crate::models::ModelError;
use crate::special::LogValue;

#[derive(Debug, Error)]
pub enum EstimatorError {
    #[error("invalid budget: {0}")]
    InvalidBudget(String),
    #[error("estimator requires a 1-dimensional model, got dim {0}")]
    DimensionMismatch(usize),
    #[error("model does not expose an evaluable prior density")]
    MissingDensity,
    #[error("estimator requires a model with a U(0,1) prior")]
    RequiresUnitUniformPrior,
    #[error("all importance weights are zero")]
    AllWeightsZero,
    #[error("estimate carries no quadrature grid, bounds unavailable")]
    MissingGrid,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Quadrature rule applied on a volume grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GridRule {
    /// Rectangle rule: ordinate at the inner grid point, weight = gap above.
    Simple,
    /// Trapezoid rule: averaged cell-edge ordinates.
    Trapezoid,
}

/// Sample counts behind one estimate.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct Budget {
    /// Draws taken from the (possibly constrained) prior.
    pub prior_draws: usize,
    /// Grid, live, or ladder points.
    pub grid_points: usize,
    /// Iterations actually run (nested sampling and ladder construction).
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SeedInfo {
    pub seed: u64,
    pub stream_id: u64,
}

impl SeedInfo {
    pub(crate) fn of(stream: &crate::rng::SeededStream) -> Self {
        SeedInfo { seed: stream.seed(), stream_id: stream.stream_id() }
    }
}

/// Deterministic lower/upper envelope around a quadrature estimate.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LogBounds {
    pub log_lower: f64,
    pub log_upper: f64,
}

/// One estimator run, in the log domain.
#[derive(Debug, Clone, Serialize)]
pub struct LogEvidenceEstimate {
    pub log_z: LogValue,
    pub estimator: &'static str,
    pub budget: Budget,
    /// Riemann-sum envelope where the rule admits one; when present,
    /// `log_lower <= log_z <= log_upper`.
    pub bounds: Option<LogBounds>,
    pub seed: SeedInfo,
    pub warning: Option<String>,
}

impl LogEvidenceEstimate {
    pub(crate) fn new(
        log_z: f64,
        estimator: &'static str,
        budget: Budget,
        seed: SeedInfo,
    ) -> Self {
        LogEvidenceEstimate {
            log_z: LogValue::from_ln(log_z),
            estimator,
            budget,
            bounds: None,
            seed,
            warning: None,
        }
    }
}
