//! The pluggable target-model interface and the built-in benchmark models,
//! each with an analytic truth.
//!
//! A model owns everything an estimator needs: a prior sampler, a
//! log-likelihood, an exact constrained prior sampler (draws conditioned on
//! the likelihood exceeding a contour), and — where available — the survival
//! function of the likelihood ordinate and a closed-form evidence value.
//! Likelihoods are handled as logs end to end; at d = 50 the linear-scale
//! ordinates underflow doubles.

use thiserror::Error;

use crate::rng::{RngError, SeededStream};
use crate::special::{self, LogValue};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("constraint log L > {log_y} is empty (above the likelihood maximum)")]
    EmptyConstraint { log_y: f64 },
    #[error("constrained sampler failed: {0}")]
    Sampler(#[from] RngError),
}

/// Where a model's reference evidence value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TruthProvenance {
    /// Computed from a closed form at construction time.
    Analytic,
    /// Quoted from published results rather than computed here.
    PaperQuoted,
}

#[derive(Debug, Clone, Copy)]
pub struct ModelTruth {
    pub log_z: LogValue,
    pub provenance: TruthProvenance,
}

/// A Bayesian benchmark problem: prior plus likelihood over R^dim.
///
/// Constrained samplers are exact (inverse-CDF or geometric), not MCMC, so
/// estimator error is never confounded with sampler error. Implementations
/// must guarantee `log_likelihood(constrained_prior_sample(s, y)) > y` up to
/// roundoff; samplers draw from an externally owned [`SeededStream`] and the
/// models themselves are immutable and shareable.
pub trait TargetModel: Send + Sync {
    fn id(&self) -> &'static str;

    fn dim(&self) -> usize;

    fn prior_sample(&self, stream: &mut SeededStream) -> Vec<f64>;

    /// Log of the likelihood ordinate Y = L(X).
    fn log_likelihood(&self, point: &[f64]) -> f64;

    /// Draw from the prior conditioned on `log_likelihood(x) > log_y`.
    fn constrained_prior_sample(
        &self,
        stream: &mut SeededStream,
        log_y: f64,
    ) -> Result<Vec<f64>, ModelError>;

    fn truth(&self) -> Option<ModelTruth> {
        None
    }

    fn analytic_log_evidence(&self) -> Option<LogValue> {
        self.truth().map(|t| t.log_z)
    }

    /// The volume variable Z(y): prior probability that the log-likelihood
    /// ordinate exceeds `log_y`. Nonincreasing in `log_y`, 1 at -inf.
    fn log_survival(&self, _log_y: f64) -> Option<f64> {
        None
    }

    /// Log prior density at a point, where the density is evaluable.
    fn log_prior_density(&self, _point: &[f64]) -> Option<f64> {
        None
    }

    /// True when the prior is U(0,1) on a 1-d space, which lets the
    /// ordered-uniform trapezoid estimator consume the likelihood directly.
    fn unit_uniform_prior(&self) -> bool {
        false
    }
}

// Constrained draws must beat the contour; verified on every draw in debug
// and test builds. The slack absorbs roundoff when the contour closes in on
// the likelihood maximum.
#[cfg(debug_assertions)]
fn debug_check_constraint(model: &dyn TargetModel, x: &[f64], log_y: f64) {
    if log_y > f64::NEG_INFINITY {
        let ll = model.log_likelihood(x);
        debug_assert!(
            ll > log_y - 1e-9 * (1.0 + log_y.abs()),
            "constrained draw violates contour: log L = {ll} <= {log_y}"
        );
    }
}

#[cfg(not(debug_assertions))]
fn debug_check_constraint(_model: &dyn TargetModel, _x: &[f64], _log_y: f64) {}

// ---------------------------------------------------------------------------
// Beta(3,3) normalizing constant: uniform prior on (0,1), L(u) = u^2 (1-u)^2
// ---------------------------------------------------------------------------

pub struct BetaIntegrand {
    log_z: f64,
}

pub fn beta_integrand_model() -> BetaIntegrand {
    BetaIntegrand { log_z: -(30.0f64.ln()) }
}

impl TargetModel for BetaIntegrand {
    fn id(&self) -> &'static str {
        "beta33"
    }

    fn dim(&self) -> usize {
        1
    }

    fn prior_sample(&self, stream: &mut SeededStream) -> Vec<f64> {
        vec![stream.uniform01()]
    }

    fn log_likelihood(&self, point: &[f64]) -> f64 {
        let u = point[0];
        if u <= 0.0 || u >= 1.0 {
            return f64::NEG_INFINITY;
        }
        2.0 * (u.ln() + (1.0 - u).ln())
    }

    fn constrained_prior_sample(
        &self,
        stream: &mut SeededStream,
        log_y: f64,
    ) -> Result<Vec<f64>, ModelError> {
        // u^2(1-u)^2 > y  <=>  u(1-u) > sqrt(y)
        let t = (0.5 * log_y).exp();
        let disc = 1.0 - 4.0 * t;
        if disc <= 0.0 {
            return Err(ModelError::EmptyConstraint { log_y });
        }
        let half = 0.5 * disc.sqrt();
        let u = (0.5 - half) + stream.uniform01() * disc.sqrt();
        let x = vec![u];
        debug_check_constraint(self, &x, log_y);
        Ok(x)
    }

    fn truth(&self) -> Option<ModelTruth> {
        Some(ModelTruth {
            log_z: LogValue::from_ln(self.log_z),
            provenance: TruthProvenance::Analytic,
        })
    }

    fn log_prior_density(&self, point: &[f64]) -> Option<f64> {
        let u = point[0];
        Some(if (0.0..1.0).contains(&u) { 0.0 } else { f64::NEG_INFINITY })
    }

    fn unit_uniform_prior(&self) -> bool {
        true
    }
}

// ---------------------------------------------------------------------------
// Exp(1) prior with L(x) = 1/(1+x); Z = e E1(1)
// ---------------------------------------------------------------------------

pub struct ExpRatio {
    log_z: f64,
}

pub fn exp_ratio_model() -> ExpRatio {
    let e1 = special::exp_integral_e1(1.0).expect("E1(1) is well-defined");
    ExpRatio { log_z: 1.0 + e1.ln() }
}

impl TargetModel for ExpRatio {
    fn id(&self) -> &'static str {
        "expratio"
    }

    fn dim(&self) -> usize {
        1
    }

    fn prior_sample(&self, stream: &mut SeededStream) -> Vec<f64> {
        vec![stream.exponential1()]
    }

    fn log_likelihood(&self, point: &[f64]) -> f64 {
        -point[0].ln_1p()
    }

    fn constrained_prior_sample(
        &self,
        stream: &mut SeededStream,
        log_y: f64,
    ) -> Result<Vec<f64>, ModelError> {
        // L(x) > y  <=>  x < 1/y - 1; Exp(1) truncated to [0, c)
        if log_y >= 0.0 {
            return Err(ModelError::EmptyConstraint { log_y });
        }
        let u = stream.uniform01();
        let x = if log_y == f64::NEG_INFINITY {
            -(u.ln())
        } else {
            let c = (-log_y).exp_m1();
            let mass = -(-c).exp_m1(); // 1 - e^{-c}
            -(-u * mass).ln_1p()
        };
        let x = vec![x];
        debug_check_constraint(self, &x, log_y);
        Ok(x)
    }

    fn truth(&self) -> Option<ModelTruth> {
        Some(ModelTruth {
            log_z: LogValue::from_ln(self.log_z),
            provenance: TruthProvenance::Analytic,
        })
    }

    fn log_survival(&self, log_y: f64) -> Option<f64> {
        if log_y >= 0.0 {
            return Some(0.0);
        }
        if log_y == f64::NEG_INFINITY {
            return Some(1.0);
        }
        let c = (-log_y).exp_m1();
        Some(-(-c).exp_m1())
    }

    fn log_prior_density(&self, point: &[f64]) -> Option<f64> {
        let x = point[0];
        Some(if x >= 0.0 { -x } else { f64::NEG_INFINITY })
    }
}

// ---------------------------------------------------------------------------
// Gaussian likelihood x Gaussian prior; Z = phi(mu1 | mu2, sqrt(s1^2+s2^2))
// ---------------------------------------------------------------------------

pub struct GaussGauss {
    mu_like: f64,
    sigma_like: f64,
    mu_prior: f64,
    sigma_prior: f64,
    // log of the likelihood's normalizer 1/(sqrt(2 pi) sigma_like), which is
    // also the log of the likelihood maximum
    log_like_max: f64,
    log_z: f64,
}

pub fn gauss_gauss_model(mu1: f64, sigma1: f64, mu2: f64, sigma2: f64) -> GaussGauss {
    assert!(sigma1 > 0.0 && sigma2 > 0.0, "sigmas must be positive");
    let var = sigma1 * sigma1 + sigma2 * sigma2;
    let log_z = -0.5 * special::LN_2PI - 0.5 * var.ln() - (mu1 - mu2) * (mu1 - mu2) / (2.0 * var);
    GaussGauss {
        mu_like: mu1,
        sigma_like: sigma1,
        mu_prior: mu2,
        sigma_prior: sigma2,
        log_like_max: -0.5 * special::LN_2PI - sigma1.ln(),
        log_z,
    }
}

impl GaussGauss {
    // Half-width (in likelihood sigmas) of the contour {L > y}.
    fn zeta(&self, log_y: f64) -> Option<f64> {
        if log_y >= self.log_like_max {
            return None;
        }
        Some((2.0 * (self.log_like_max - log_y)).sqrt())
    }
}

impl TargetModel for GaussGauss {
    fn id(&self) -> &'static str {
        "gaussgauss"
    }

    fn dim(&self) -> usize {
        1
    }

    fn prior_sample(&self, stream: &mut SeededStream) -> Vec<f64> {
        vec![self.mu_prior + self.sigma_prior * stream.std_normal()]
    }

    fn log_likelihood(&self, point: &[f64]) -> f64 {
        let z = (point[0] - self.mu_like) / self.sigma_like;
        self.log_like_max - 0.5 * z * z
    }

    fn constrained_prior_sample(
        &self,
        stream: &mut SeededStream,
        log_y: f64,
    ) -> Result<Vec<f64>, ModelError> {
        let zeta = self
            .zeta(log_y)
            .ok_or(ModelError::EmptyConstraint { log_y })?;
        let (lo, hi) = if zeta.is_infinite() {
            (f64::NEG_INFINITY, f64::INFINITY)
        } else {
            (
                self.mu_like - self.sigma_like * zeta,
                self.mu_like + self.sigma_like * zeta,
            )
        };
        let x = stream.truncated_normal(self.mu_prior, self.sigma_prior, lo, hi)?;
        let x = vec![x];
        debug_check_constraint(self, &x, log_y);
        Ok(x)
    }

    fn truth(&self) -> Option<ModelTruth> {
        Some(ModelTruth {
            log_z: LogValue::from_ln(self.log_z),
            provenance: TruthProvenance::Analytic,
        })
    }

    fn log_survival(&self, log_y: f64) -> Option<f64> {
        let Some(zeta) = self.zeta(log_y) else {
            return Some(0.0);
        };
        if zeta.is_infinite() {
            return Some(1.0);
        }
        let hi = (self.mu_like + self.sigma_like * zeta - self.mu_prior) / self.sigma_prior;
        let lo = (self.mu_like - self.sigma_like * zeta - self.mu_prior) / self.sigma_prior;
        Some(special::std_normal_cdf(hi) - special::std_normal_cdf(lo))
    }

    fn log_prior_density(&self, point: &[f64]) -> Option<f64> {
        let z = (point[0] - self.mu_prior) / self.sigma_prior;
        Some(-0.5 * special::LN_2PI - self.sigma_prior.ln() - 0.5 * z * z)
    }
}

// ---------------------------------------------------------------------------
// Multivariate t kernel likelihood with N(0, tau^-1 I) prior;
// Z = s^a U(a, b, s), a = (nu+d)/2, b = nu/2 + 1, s = nu tau / 2
// ---------------------------------------------------------------------------

pub struct MvtGauss {
    d: usize,
    nu: f64,
    tau: f64,
    half_expo: f64, // (nu + d) / 2
    truth: Option<ModelTruth>,
}

pub fn mvt_gauss_model(d: usize, nu: f64, tau: f64) -> MvtGauss {
    assert!(d >= 1, "dimension must be >= 1");
    assert!(nu > 0.0 && tau > 0.0, "nu and tau must be positive");
    let a = 0.5 * (nu + d as f64);
    let b = 0.5 * nu + 1.0;
    let s = 0.5 * nu * tau;
    let truth = special::kummer_u(a, b, s).ok().map(|u| ModelTruth {
        log_z: LogValue::from_ln(a * s.ln() + u.ln()),
        provenance: TruthProvenance::Analytic,
    });
    MvtGauss { d, nu, tau, half_expo: a, truth }
}

impl MvtGauss {
    // L(x) > y  <=>  |x|^2 < nu (y^{-1/a} - 1)
    fn r2_cap(&self, log_y: f64) -> Option<f64> {
        if log_y >= 0.0 {
            return None;
        }
        if log_y == f64::NEG_INFINITY {
            return Some(f64::INFINITY);
        }
        Some(self.nu * (-log_y / self.half_expo).exp_m1())
    }
}

impl TargetModel for MvtGauss {
    fn id(&self) -> &'static str {
        "mvt"
    }

    fn dim(&self) -> usize {
        self.d
    }

    fn prior_sample(&self, stream: &mut SeededStream) -> Vec<f64> {
        let scale = 1.0 / self.tau.sqrt();
        (0..self.d).map(|_| scale * stream.std_normal()).collect()
    }

    fn log_likelihood(&self, point: &[f64]) -> f64 {
        let r2: f64 = point.iter().map(|x| x * x).sum();
        -self.half_expo * (r2 / self.nu).ln_1p()
    }

    fn constrained_prior_sample(
        &self,
        stream: &mut SeededStream,
        log_y: f64,
    ) -> Result<Vec<f64>, ModelError> {
        let r2_max = self
            .r2_cap(log_y)
            .ok_or(ModelError::EmptyConstraint { log_y })?;
        let x = stream.gaussian_in_ball(self.d, self.tau, r2_max)?;
        debug_check_constraint(self, &x, log_y);
        Ok(x)
    }

    fn truth(&self) -> Option<ModelTruth> {
        self.truth
    }

    fn log_survival(&self, log_y: f64) -> Option<f64> {
        let Some(r2_max) = self.r2_cap(log_y) else {
            return Some(0.0);
        };
        if r2_max.is_infinite() {
            return Some(1.0);
        }
        Some(
            special::reg_lower_gamma(0.5 * self.d as f64, 0.5 * self.tau * r2_max)
                .expect("valid incomplete-gamma arguments"),
        )
    }

    fn log_prior_density(&self, point: &[f64]) -> Option<f64> {
        let r2: f64 = point.iter().map(|x| x * x).sum();
        let d = self.d as f64;
        Some(0.5 * d * (self.tau.ln() - special::LN_2PI) - 0.5 * self.tau * r2)
    }
}

// ---------------------------------------------------------------------------
// Flat likelihood over a uniform prior; every estimator must recover c
// exactly. Used by the exactness tests.
// ---------------------------------------------------------------------------

pub struct ConstantLikelihood {
    log_c: f64,
}

pub fn constant_model(log_c: f64) -> ConstantLikelihood {
    ConstantLikelihood { log_c }
}

impl TargetModel for ConstantLikelihood {
    fn id(&self) -> &'static str {
        "constant"
    }

    fn dim(&self) -> usize {
        1
    }

    fn prior_sample(&self, stream: &mut SeededStream) -> Vec<f64> {
        vec![stream.uniform01()]
    }

    fn log_likelihood(&self, _point: &[f64]) -> f64 {
        self.log_c
    }

    fn constrained_prior_sample(
        &self,
        stream: &mut SeededStream,
        log_y: f64,
    ) -> Result<Vec<f64>, ModelError> {
        if log_y >= self.log_c {
            return Err(ModelError::EmptyConstraint { log_y });
        }
        Ok(self.prior_sample(stream))
    }

    fn truth(&self) -> Option<ModelTruth> {
        Some(ModelTruth {
            log_z: LogValue::from_ln(self.log_c),
            provenance: TruthProvenance::Analytic,
        })
    }

    fn log_survival(&self, log_y: f64) -> Option<f64> {
        Some(if log_y < self.log_c { 1.0 } else { 0.0 })
    }

    fn log_prior_density(&self, point: &[f64]) -> Option<f64> {
        let u = point[0];
        Some(if (0.0..1.0).contains(&u) { 0.0 } else { f64::NEG_INFINITY })
    }

    fn unit_uniform_prior(&self) -> bool {
        true
    }
}

// ---------------------------------------------------------------------------
// Registry
// ---------------------------------------------------------------------------

pub const MODEL_IDS: &[&str] = &["beta33", "expratio", "gaussgauss", "mvt"];

/// Built-in models by string id. `gaussgauss` uses the (2, 1, 0, 1)
/// benchmark parameters; `mvt` is the d = 50, nu = 2, tau = 1 problem.
pub fn model_by_id(id: &str) -> Option<Box<dyn TargetModel>> {
    match id {
        "beta33" => Some(Box::new(beta_integrand_model())),
        "expratio" => Some(Box::new(exp_ratio_model())),
        "gaussgauss" => Some(Box::new(gauss_gauss_model(2.0, 1.0, 0.0, 1.0))),
        "mvt" => Some(Box::new(mvt_gauss_model(50, 2.0, 1.0))),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
        let n = if n % 2 == 0 { n } else { n + 1 };
        let h = (b - a) / n as f64;
        let mut sum = f(a) + f(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            sum += w * f(a + h * i as f64);
        }
        sum * h / 3.0
    }

    // --- beta33 ---------------------------------------------------------

    #[test]
    fn beta33_pointwise_values() {
        let m = beta_integrand_model();
        assert_eq!(m.log_likelihood(&[0.0]), f64::NEG_INFINITY);
        assert_eq!(m.log_likelihood(&[1.0]), f64::NEG_INFINITY);
        let l_half = m.log_likelihood(&[0.5]).exp();
        assert!((l_half - 1.0 / 16.0).abs() < 1e-16);
    }

    #[test]
    fn beta33_truth_is_beta_function() {
        // Beta(3,3) = Gamma(3)^2 / Gamma(6) = 1/30
        let oracle = (statrs::function::gamma::ln_gamma(3.0) * 2.0
            - statrs::function::gamma::ln_gamma(6.0))
        .exp();
        assert!((oracle - 1.0 / 30.0).abs() < 1e-13);
        let m = beta_integrand_model();
        let z = m.analytic_log_evidence().unwrap().linear();
        assert!((z - oracle).abs() < 1e-13);
    }

    #[test]
    fn beta33_constrained_sampler_respects_contour() {
        let m = beta_integrand_model();
        let mut s = SeededStream::new(1, 0);
        let log_y = (0.01f64).ln();
        for _ in 0..1000 {
            let x = m.constrained_prior_sample(&mut s, log_y).unwrap();
            assert!(m.log_likelihood(&x) > log_y);
        }
        // empty above the maximum 1/16
        assert!(matches!(
            m.constrained_prior_sample(&mut s, (0.07f64).ln()),
            Err(ModelError::EmptyConstraint { .. })
        ));
    }

    // --- expratio ---------------------------------------------------------

    #[test]
    fn expratio_truth_and_survival_boundaries() {
        let m = exp_ratio_model();
        let z = m.analytic_log_evidence().unwrap().linear();
        assert!((z - 0.5963474).abs() < 1e-6);

        assert_eq!(m.log_survival(0.0), Some(0.0)); // y = 1
        let near_zero = m.log_survival(-700.0).unwrap();
        assert!((near_zero - 1.0).abs() < 1e-12);
        assert_eq!(m.log_survival(f64::NEG_INFINITY), Some(1.0));
    }

    #[test]
    fn expratio_constrained_draws_are_truncated_exponential() {
        let m = exp_ratio_model();
        let mut s = SeededStream::new(2, 0);
        let y = 0.25f64; // cap c = 3
        let cap = 1.0 / y - 1.0;
        let mut max_seen = 0.0f64;
        for _ in 0..10_000 {
            let x = m.constrained_prior_sample(&mut s, y.ln()).unwrap()[0];
            assert!(x >= 0.0 && x < cap);
            max_seen = max_seen.max(x);
        }
        // draws actually fill the admissible interval
        assert!(max_seen > 0.9 * cap);
        assert!(matches!(
            m.constrained_prior_sample(&mut s, 0.1),
            Err(ModelError::EmptyConstraint { .. })
        ));
    }

    // --- gaussgauss ---------------------------------------------------------

    #[test]
    fn gaussgauss_truth_matches_table_value() {
        let m = gauss_gauss_model(2.0, 1.0, 0.0, 1.0);
        let z = m.analytic_log_evidence().unwrap().linear();
        let closed = 1.0 / (2.0 * std::f64::consts::E * std::f64::consts::PI.sqrt());
        assert!((z - closed).abs() < 1e-15);
        assert!((z - 0.1037769).abs() / 0.1037769 < 1e-6);
    }

    #[test]
    fn gaussgauss_survival_boundaries() {
        let m = gauss_gauss_model(2.0, 1.0, 0.0, 1.0);
        let log_max = -0.5 * special::LN_2PI;
        assert_eq!(m.log_survival(log_max), Some(0.0));
        let deep = m.log_survival(-800.0).unwrap();
        assert!((deep - 1.0).abs() < 1e-10);
        assert_eq!(m.log_survival(f64::NEG_INFINITY), Some(1.0));
    }

    #[test]
    fn gaussgauss_survival_matches_monte_carlo() {
        let m = gauss_gauss_model(2.0, 1.0, 0.0, 1.0);
        let y = 0.2f64;
        let mut s = SeededStream::new(3, 0);
        let n = 1_000_000;
        let hits = (0..n)
            .filter(|_| {
                let x = m.prior_sample(&mut s);
                m.log_likelihood(&x) > y.ln()
            })
            .count();
        let frac = hits as f64 / n as f64;
        let z = m.log_survival(y.ln()).unwrap();
        let sd = (z * (1.0 - z) / n as f64).sqrt();
        assert!((frac - z).abs() < 3.0 * sd, "MC {frac} vs analytic {z}");
    }

    #[test]
    fn gaussgauss_constrained_sampler_and_empty_error() {
        let m = gauss_gauss_model(2.0, 1.0, 0.0, 1.0);
        let mut s = SeededStream::new(4, 0);
        let log_y = (0.2f64).ln();
        for _ in 0..1000 {
            let x = m.constrained_prior_sample(&mut s, log_y).unwrap();
            assert!(m.log_likelihood(&x) > log_y);
        }
        let above_max = -0.5 * special::LN_2PI + 0.1;
        assert!(matches!(
            m.constrained_prior_sample(&mut s, above_max),
            Err(ModelError::EmptyConstraint { .. })
        ));
    }

    // --- mvt ---------------------------------------------------------

    #[test]
    fn mvt_likelihood_peaks_at_origin() {
        let m = mvt_gauss_model(50, 2.0, 1.0);
        assert_eq!(m.log_likelihood(&vec![0.0; 50]), 0.0);
    }

    #[test]
    fn mvt_truth_matches_quoted_value_at_d50() {
        let m = mvt_gauss_model(50, 2.0, 1.0);
        let log_z = m.analytic_log_evidence().unwrap().ln();
        let quoted = 1.95e-29f64.ln();
        assert!(
            (log_z - quoted).abs() < 0.02 * quoted.abs(),
            "log Z = {log_z} vs quoted {quoted}"
        );
    }

    #[test]
    fn mvt_truth_matches_quadrature_at_d1() {
        // 1-d: Z = int (1 + x^2/nu)^{-(nu+1)/2} sqrt(tau/2pi) e^{-tau x^2/2} dx
        let (nu, tau) = (2.0f64, 1.0f64);
        let m = mvt_gauss_model(1, nu, tau);
        let integrand = |x: f64| {
            (1.0 + x * x / nu).powf(-(nu + 1.0) / 2.0)
                * (tau / (2.0 * std::f64::consts::PI)).sqrt()
                * (-0.5 * tau * x * x).exp()
        };
        let oracle = simpson(integrand, -60.0, 60.0, 400_000);
        let z = m.analytic_log_evidence().unwrap().linear();
        assert!(
            ((z - oracle) / oracle).abs() < 1e-6,
            "z = {z} vs quadrature {oracle}"
        );
    }

    #[test]
    fn mvt_constrained_sampler_support() {
        let m = mvt_gauss_model(5, 2.0, 1.0);
        let mut s = SeededStream::new(5, 0);
        let log_y = -5.0;
        for _ in 0..1000 {
            let x = m.constrained_prior_sample(&mut s, log_y).unwrap();
            assert!(m.log_likelihood(&x) > log_y);
        }
        assert!(matches!(
            m.constrained_prior_sample(&mut s, 0.0),
            Err(ModelError::EmptyConstraint { .. })
        ));
    }

    // --- cross-cutting properties ------------------------------------------

    #[test]
    fn constraint_nesting() {
        let m = gauss_gauss_model(2.0, 1.0, 0.0, 1.0);
        let mut s = SeededStream::new(6, 0);
        let (y1, y2) = ((0.05f64).ln(), (0.2f64).ln());
        for _ in 0..1000 {
            let x = m.constrained_prior_sample(&mut s, y2).unwrap();
            assert!(m.log_likelihood(&x) > y1);
        }
    }

    #[test]
    fn lorenz_identity_survival_of_ordinates_is_uniform() {
        // Z(L(X)) ~ U(0,1) for prior draws X (light version; the acceptance
        // suite runs the full 1e5-draw KS check)
        let m = gauss_gauss_model(2.0, 1.0, 0.0, 1.0);
        let mut s = SeededStream::new(7, 0);
        let n = 20_000;
        let mut vals: Vec<f64> = (0..n)
            .map(|_| {
                let x = m.prior_sample(&mut s);
                m.log_survival(m.log_likelihood(&x)).unwrap()
            })
            .collect();
        vals.sort_unstable_by(f64::total_cmp);
        let mut d = 0.0f64;
        for (i, &u) in vals.iter().enumerate() {
            d = d.max(((i + 1) as f64 / n as f64 - u).abs());
            d = d.max((u - i as f64 / n as f64).abs());
        }
        assert!(d < 0.013, "KS statistic {d}");
    }

    #[test]
    fn evidence_identity_integrates_survival() {
        // Z = int_0^inf Z(y) dy, evaluated through substitutions that keep
        // the integrand smooth.
        // expratio: y = 1/(1+x) gives int_0^inf Z(1/(1+x)) / (1+x)^2 dx
        let m = exp_ratio_model();
        let f = |x: f64| {
            let y = 1.0 / (1.0 + x);
            m.log_survival(y.ln()).unwrap() / ((1.0 + x) * (1.0 + x))
        };
        let cut = 2000.0;
        let quad = simpson(f, 0.0, cut, 200_000) + 1.0 / (1.0 + cut);
        let z = m.analytic_log_evidence().unwrap().linear();
        assert!(((quad - z) / z).abs() < 1e-4, "quad {quad} vs truth {z}");

        // gaussgauss: y = Lmax e^{-zeta^2/2} gives
        // int_0^inf Z(y(zeta)) Lmax e^{-zeta^2/2} zeta dzeta
        let m = gauss_gauss_model(2.0, 1.0, 0.0, 1.0);
        let l_max = (-0.5 * special::LN_2PI).exp();
        let g = |zeta: f64| {
            let log_y = -0.5 * special::LN_2PI - 0.5 * zeta * zeta;
            m.log_survival(log_y).unwrap() * l_max * (-0.5 * zeta * zeta).exp() * zeta
        };
        let quad = simpson(g, 0.0, 14.0, 200_000);
        let z = m.analytic_log_evidence().unwrap().linear();
        assert!(((quad - z) / z).abs() < 1e-4, "quad {quad} vs truth {z}");
    }

    #[test]
    fn registry_resolves_known_ids() {
        for id in MODEL_IDS {
            let m = model_by_id(id).unwrap();
            assert_eq!(&m.id(), id);
            assert!(m.analytic_log_evidence().is_some());
        }
        assert!(model_by_id("unknown").is_none());
    }

    #[test]
    fn constant_model_contract() {
        let c = 0.35f64;
        let m = constant_model(c.ln());
        let mut s = SeededStream::new(8, 0);
        assert_eq!(m.log_likelihood(&[0.3]), c.ln());
        assert!(m.constrained_prior_sample(&mut s, c.ln() - 0.1).is_ok());
        assert!(matches!(
            m.constrained_prior_sample(&mut s, c.ln()),
            Err(ModelError::EmptyConstraint { .. })
        ));
        assert_eq!(m.log_survival(c.ln() - 0.1), Some(1.0));
        assert_eq!(m.log_survival(c.ln()), Some(0.0));
    }
}
