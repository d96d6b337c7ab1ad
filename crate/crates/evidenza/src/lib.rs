//! Evidence (marginal likelihood) estimation toolkit.
//!
//! The crate bundles a set of Monte Carlo evidence estimators — naive
//! averaging, importance sampling, ordered-sample Riemann sums, quantile
//! importance sampling, nested sampling and geometric vertical-likelihood
//! ladders — behind a single [`models::TargetModel`] interface, together
//! with closed-form benchmark models and a replication harness that
//! measures RMSE/MAPE against analytic truth.
//!
//! All likelihood and evidence values are carried in the log domain
//! ([`special::LogValue`]); linear-scale numbers appear only in reports.

pub mod bench;
pub mod cli;
pub mod estimators;
pub mod models;
pub mod rng;
pub mod special;
