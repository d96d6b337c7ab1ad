//! Plain Monte Carlo averaging and importance sampling.

use super::{Budget, EstimatorError, LogEvidenceEstimate, SeedInfo};
use crate::models::TargetModel;
use crate::rng::SeededStream;
use crate::special::{log_mean_exp, log_sum_exp};

/// Average the likelihood over n prior draws: log Z = lse(log L_i) - log n.
pub fn naive_mc(
    model: &dyn TargetModel,
    n: usize,
    stream: &mut SeededStream,
) -> Result<LogEvidenceEstimate, EstimatorError> {
    if n == 0 {
        return Err(EstimatorError::InvalidBudget("naive_mc requires n >= 1".into()));
    }
    let seed = SeedInfo::of(stream);
    let log_l: Vec<f64> = (0..n)
        .map(|_| model.log_likelihood(&model.prior_sample(stream)))
        .collect();
    let log_z = log_mean_exp(&log_l).expect("n >= 1");
    Ok(LogEvidenceEstimate::new(
        log_z,
        "naive",
        Budget { prior_draws: n, ..Budget::default() },
        seed,
    ))
}

/// The two importance-sampling estimates computed from one weighted sample.
#[derive(Debug, Clone)]
pub struct IsEstimates {
    /// (1/n) sum L(x_i) f(x_i) / g(x_i)
    pub standard: LogEvidenceEstimate,
    /// sum l(x_i) w(x_i) / sum w(x_i), invariant to rescaling f
    pub self_normalized: LogEvidenceEstimate,
}

/// Importance sampling of `int L f` with proposal density g.
///
/// All three densities are taken as log values; the proposal sampler draws
/// from g. With `log_f == log_g` and the prior as proposal this reproduces
/// [`naive_mc`] exactly, draw for draw.
pub fn importance_sampling<L, F, G, S>(
    log_l: L,
    log_f: F,
    log_g: G,
    mut proposal_sampler: S,
    n: usize,
    stream: &mut SeededStream,
) -> Result<IsEstimates, EstimatorError>
where
    L: Fn(&[f64]) -> f64,
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> f64,
    S: FnMut(&mut SeededStream) -> Vec<f64>,
{
    if n == 0 {
        return Err(EstimatorError::InvalidBudget(
            "importance_sampling requires n >= 1".into(),
        ));
    }
    let seed = SeedInfo::of(stream);
    let mut log_terms = Vec::with_capacity(n); // l + f - g
    let mut log_weights = Vec::with_capacity(n); // f - g
    for _ in 0..n {
        let x = proposal_sampler(stream);
        let w = log_f(&x) - log_g(&x);
        log_weights.push(w);
        log_terms.push(log_l(&x) + w);
    }
    let log_weight_sum = log_sum_exp(&log_weights).expect("n >= 1");
    if log_weight_sum == f64::NEG_INFINITY {
        return Err(EstimatorError::AllWeightsZero);
    }
    let log_term_sum = log_sum_exp(&log_terms).expect("n >= 1");
    let budget = Budget { prior_draws: n, ..Budget::default() };
    Ok(IsEstimates {
        standard: LogEvidenceEstimate::new(
            log_mean_exp(&log_terms).expect("n >= 1"),
            "importance",
            budget,
            seed,
        ),
        self_normalized: LogEvidenceEstimate::new(
            log_term_sum - log_weight_sum,
            "importance-ratio",
            budget,
            seed,
        ),
    })
}
