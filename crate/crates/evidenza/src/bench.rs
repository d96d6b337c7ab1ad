//! Replication engine: run R independent replicates of an estimator/model
//! pair, score them against analytic truth, fit convergence slopes.
//!
//! Replicate j always runs on `SeededStream::new(master_seed, j)`, so the
//! per-replicate values are identical whether the work is distributed across
//! threads or run serially, and a fixed config reproduces its report
//! bit for bit.

use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::estimators::{
    exp_grid_quadrature, naive_mc, nested_sampling, philippe_riemann, qis, vertical_geometric,
    EstimatorError, GridRule, LogEvidenceEstimate,
};
use crate::models::{model_by_id, TargetModel};
use crate::rng::SeededStream;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("unknown model id '{0}' (known: beta33, expratio, gaussgauss, mvt)")]
    UnknownModel(String),
    #[error("unknown estimator id '{0}'")]
    UnknownEstimator(String),
    #[error("replicate count must be >= 1")]
    ZeroReplicates,
    #[error("convergence grid needs >= 3 strictly increasing entries")]
    GridTooSmall,
    #[error("ordering check needs >= 2 reports")]
    NeedTwoReports,
    #[error("ordering check got reports for different models: {0} vs {1}")]
    MismatchedModel(String, String),
    #[error("ordering check needs rmse/mape on every report (model without truth?)")]
    MissingErrorStats,
    #[error("ordering check needs a qis report")]
    QisAbsent,
    #[error(transparent)]
    Estimator(#[from] EstimatorError),
}

/// Output format for reports written by the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format '{other}' (csv or json)")),
        }
    }
}

/// Everything a run needs; the CLI's `--config` JSON uses exactly these
/// field names.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub model_id: String,
    pub estimator_id: String,
    /// Prior-draw budget (QIS pool, per-level ladder draws, nested max_iter).
    pub m: usize,
    /// Grid/draw budget (uniform grid points, naive and Riemann draws,
    /// ladder levels).
    pub n: usize,
    /// Live points for nested sampling.
    pub n_live: usize,
    /// Geometric ladder ratio.
    pub q: f64,
    /// Nested-sampling stop threshold.
    pub epsilon: f64,
    pub replicates: usize,
    pub seed: u64,
    pub output_format: OutputFormat,
    pub output_path: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Benchmark defaults: the m = 1000, n = n_live = 20, q = 0.9 table
    /// configuration with 100 replicates.
    pub fn new(model_id: &str, estimator_id: &str) -> Self {
        ExperimentConfig {
            model_id: model_id.to_string(),
            estimator_id: estimator_id.to_string(),
            m: 1000,
            n: 20,
            n_live: 20,
            q: 0.9,
            epsilon: 1e-4,
            replicates: 100,
            seed: 0,
            output_format: OutputFormat::Csv,
            output_path: None,
        }
    }
}

/// Estimator registry for the CLI and the replication engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorId {
    Naive,
    Yakowitz,
    Philippe,
    PhilippeNorm,
    Qis,
    QisSimple,
    NestedRect,
    NestedRiemann,
    Vertical,
    VerticalAsymp,
    ExpGridRect,
    ExpGridRiemann,
}

impl EstimatorId {
    pub const ALL_IDS: &'static [&'static str] = &[
        "naive",
        "yakowitz",
        "philippe",
        "philippe-norm",
        "qis",
        "qis-simple",
        "nested-rect",
        "nested-riemann",
        "vertical",
        "vertical-asymp",
        "expgrid-rect",
        "expgrid-riemann",
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EstimatorId::Naive => "naive",
            EstimatorId::Yakowitz => "yakowitz",
            EstimatorId::Philippe => "philippe",
            EstimatorId::PhilippeNorm => "philippe-norm",
            EstimatorId::Qis => "qis",
            EstimatorId::QisSimple => "qis-simple",
            EstimatorId::NestedRect => "nested-rect",
            EstimatorId::NestedRiemann => "nested-riemann",
            EstimatorId::Vertical => "vertical",
            EstimatorId::VerticalAsymp => "vertical-asymp",
            EstimatorId::ExpGridRect => "expgrid-rect",
            EstimatorId::ExpGridRiemann => "expgrid-riemann",
        }
    }
}

impl FromStr for EstimatorId {
    type Err = BenchError;
    fn from_str(s: &str) -> Result<Self, BenchError> {
        Ok(match s {
            "naive" => EstimatorId::Naive,
            "yakowitz" => EstimatorId::Yakowitz,
            "philippe" => EstimatorId::Philippe,
            "philippe-norm" => EstimatorId::PhilippeNorm,
            "qis" => EstimatorId::Qis,
            "qis-simple" => EstimatorId::QisSimple,
            "nested-rect" => EstimatorId::NestedRect,
            "nested-riemann" => EstimatorId::NestedRiemann,
            "vertical" => EstimatorId::Vertical,
            "vertical-asymp" => EstimatorId::VerticalAsymp,
            "expgrid-rect" => EstimatorId::ExpGridRect,
            "expgrid-riemann" => EstimatorId::ExpGridRiemann,
            other => return Err(BenchError::UnknownEstimator(other.to_string())),
        })
    }
}

impl std::fmt::Display for EstimatorId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Run one estimator on one stream with the config's budgets.
///
/// Budget mapping: `naive`, `yakowitz`, `philippe*` consume `n` draws;
/// `qis*` uses the (m, n) pool/grid pair; `nested-*` uses `n_live` live
/// points with `m` as the iteration cap; `vertical*` builds `n` levels from
/// `m` draws each; `expgrid-*` reads an m-sample quantile function on the
/// e^{-i/n} grid.
pub fn run_estimator(
    model: &dyn TargetModel,
    id: EstimatorId,
    config: &ExperimentConfig,
    stream: &mut SeededStream,
) -> Result<LogEvidenceEstimate, EstimatorError> {
    match id {
        EstimatorId::Naive => naive_mc(model, config.n, stream),
        EstimatorId::Yakowitz => {
            if !model.unit_uniform_prior() || model.dim() != 1 {
                return Err(EstimatorError::RequiresUnitUniformPrior);
            }
            yakowitz_on_model(model, config.n, stream)
        }
        EstimatorId::Philippe => philippe_riemann(model, config.n, stream, false),
        EstimatorId::PhilippeNorm => philippe_riemann(model, config.n, stream, true),
        EstimatorId::Qis => qis(model, config.m, config.n, stream, GridRule::Trapezoid),
        EstimatorId::QisSimple => qis(model, config.m, config.n, stream, GridRule::Simple),
        EstimatorId::NestedRect => {
            nested_sampling(model, config.n_live, config.epsilon, config.m, stream, GridRule::Simple)
                .map(|run| run.estimate)
        }
        EstimatorId::NestedRiemann => nested_sampling(
            model,
            config.n_live,
            config.epsilon,
            config.m,
            stream,
            GridRule::Trapezoid,
        )
        .map(|run| run.estimate),
        EstimatorId::Vertical => {
            vertical_geometric(model, config.q, config.n, config.m, stream).map(|run| run.simple)
        }
        EstimatorId::VerticalAsymp => vertical_geometric(model, config.q, config.n, config.m, stream)
            .map(|run| run.asymptotic),
        EstimatorId::ExpGridRect => {
            exp_grid_quadrature(model, config.m, config.n, stream, GridRule::Simple)
        }
        EstimatorId::ExpGridRiemann => {
            exp_grid_quadrature(model, config.m, config.n, stream, GridRule::Trapezoid)
        }
    }
}

fn yakowitz_on_model(
    model: &dyn TargetModel,
    n: usize,
    stream: &mut SeededStream,
) -> Result<LogEvidenceEstimate, EstimatorError> {
    crate::estimators::yakowitz_unit(|u| model.log_likelihood(&[u]), n, stream)
}

#[derive(Debug, Clone, Serialize)]
pub struct ReplicateValue {
    pub index: usize,
    pub log_z: f64,
    pub z: f64,
    pub abs_rel_err: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReplicationReport {
    pub estimator_id: String,
    pub model_id: String,
    pub m: usize,
    pub n: usize,
    pub n_live: usize,
    pub replicates: usize,
    pub master_seed: u64,
    /// Linear-scale truth, where the model provides one.
    pub truth_z: Option<f64>,
    /// Linear-scale mean of the replicate estimates.
    pub mean_z: f64,
    pub rmse: Option<f64>,
    pub mape: Option<f64>,
    pub values: Vec<ReplicateValue>,
}

/// RMSE and MAPE on the linear scale, matching how benchmark tables are
/// reported even though all internals are logs.
pub(crate) fn summary_stats(values: &[f64], truth: Option<f64>) -> (f64, Option<f64>, Option<f64>) {
    let r = values.len() as f64;
    let mean = values.iter().sum::<f64>() / r;
    match truth {
        Some(z) => {
            let mse = values.iter().map(|v| (v - z) * (v - z)).sum::<f64>() / r;
            let mape = values.iter().map(|v| ((v - z) / z).abs()).sum::<f64>() / r;
            (mean, Some(mse.sqrt()), Some(mape))
        }
        None => (mean, None, None),
    }
}

/// Run `config.replicates` independent replicates in parallel (streams are
/// indexed by replicate number, so scheduling cannot change the report).
pub fn replicate(config: &ExperimentConfig) -> Result<ReplicationReport, BenchError> {
    let model =
        model_by_id(&config.model_id).ok_or_else(|| BenchError::UnknownModel(config.model_id.clone()))?;
    replicate_with_model(model.as_ref(), config)
}

/// Same as [`replicate`] for a caller-supplied model (custom parameters or
/// models outside the registry).
pub fn replicate_with_model(
    model: &dyn TargetModel,
    config: &ExperimentConfig,
) -> Result<ReplicationReport, BenchError> {
    if config.replicates == 0 {
        return Err(BenchError::ZeroReplicates);
    }
    let id: EstimatorId = config.estimator_id.parse()?;

    let estimates: Vec<LogEvidenceEstimate> = (0..config.replicates)
        .into_par_iter()
        .map(|j| {
            let mut stream = SeededStream::new(config.seed, j as u64);
            run_estimator(model, id, config, &mut stream)
        })
        .collect::<Result<_, _>>()?;

    Ok(assemble_report(model, config, id, &estimates))
}

fn assemble_report(
    model: &dyn TargetModel,
    config: &ExperimentConfig,
    id: EstimatorId,
    estimates: &[LogEvidenceEstimate],
) -> ReplicationReport {
    let truth_z = model.analytic_log_evidence().map(|t| t.linear());
    let linear: Vec<f64> = estimates.iter().map(|e| e.log_z.linear()).collect();
    let (mean_z, rmse, mape) = summary_stats(&linear, truth_z);
    let values = estimates
        .iter()
        .enumerate()
        .map(|(index, e)| ReplicateValue {
            index,
            log_z: e.log_z.ln(),
            z: e.log_z.linear(),
            abs_rel_err: truth_z.map(|z| ((e.log_z.linear() - z) / z).abs()),
        })
        .collect();
    ReplicationReport {
        estimator_id: id.to_string(),
        model_id: model.id().to_string(),
        m: config.m,
        n: config.n,
        n_live: config.n_live,
        replicates: config.replicates,
        master_seed: config.seed,
        truth_z,
        mean_z,
        rmse,
        mape,
        values,
    }
}

/// Least-squares slope of log RMSE against log n over a budget grid.
#[derive(Debug, Clone, Serialize)]
pub struct SlopeFit {
    pub grid: Vec<usize>,
    pub rmse: Vec<f64>,
    pub fit: FitOutcome,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FitOutcome {
    Fitted { slope: f64, std_error: f64 },
    /// Some grid point had zero RMSE (an exact estimator); no slope exists.
    Degenerate,
}

/// Replicate the config at each grid value (the grid drives every budget
/// knob: m, n and n_live) and fit log rmse ~ log n.
pub fn slope_fit(config: &ExperimentConfig, n_grid: &[usize]) -> Result<SlopeFit, BenchError> {
    let model =
        model_by_id(&config.model_id).ok_or_else(|| BenchError::UnknownModel(config.model_id.clone()))?;
    slope_fit_with_model(model.as_ref(), config, n_grid)
}

pub fn slope_fit_with_model(
    model: &dyn TargetModel,
    config: &ExperimentConfig,
    n_grid: &[usize],
) -> Result<SlopeFit, BenchError> {
    if n_grid.len() < 3 || n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(BenchError::GridTooSmall);
    }
    let mut rmse = Vec::with_capacity(n_grid.len());
    for &g in n_grid {
        let mut cfg = config.clone();
        cfg.m = g;
        cfg.n = g;
        cfg.n_live = g;
        let report = replicate_with_model(model, &cfg)?;
        rmse.push(report.rmse.expect("slope_fit requires a model with analytic truth"));
    }
    let fit = fit_log_log(n_grid, &rmse);
    Ok(SlopeFit { grid: n_grid.to_vec(), rmse, fit })
}

fn fit_log_log(grid: &[usize], rmse: &[f64]) -> FitOutcome {
    if rmse.iter().any(|&r| r <= 0.0) {
        return FitOutcome::Degenerate;
    }
    let xs: Vec<f64> = grid.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = rmse.iter().map(|&r| r.ln()).collect();
    let k = xs.len() as f64;
    let x_bar = xs.iter().sum::<f64>() / k;
    let y_bar = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - x_bar) * (x - x_bar)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - x_bar) * (y - y_bar)).sum();
    let slope = sxy / sxx;
    let intercept = y_bar - slope * x_bar;
    let ss_resid: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let var = ss_resid / (k - 2.0);
    FitOutcome::Fitted { slope, std_error: (var / sxx).sqrt() }
}

/// True iff the QIS report has strictly the smallest RMSE and MAPE.
pub fn ordering_check(reports: &[ReplicationReport]) -> Result<bool, BenchError> {
    if reports.len() < 2 {
        return Err(BenchError::NeedTwoReports);
    }
    let model = &reports[0].model_id;
    for r in reports {
        if &r.model_id != model {
            return Err(BenchError::MismatchedModel(model.clone(), r.model_id.clone()));
        }
        if r.rmse.is_none() || r.mape.is_none() {
            return Err(BenchError::MissingErrorStats);
        }
    }
    let qis = reports
        .iter()
        .find(|r| r.estimator_id == "qis")
        .ok_or(BenchError::QisAbsent)?;
    let ok = reports.iter().filter(|r| r.estimator_id != "qis").all(|r| {
        qis.rmse.unwrap() < r.rmse.unwrap() && qis.mape.unwrap() < r.mape.unwrap()
    });
    Ok(ok)
}
