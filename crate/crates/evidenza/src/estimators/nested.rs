//! Nested sampling with deterministic volume compression.
//!
//! The live set starts as prior draws; each iteration discards the
//! lowest-likelihood point and replaces it with a constrained prior draw
//! above that contour. Prior volume contracts by t = e^{-1/n_live} per
//! iteration, so the discarded ordinates sit on the geometric grid
//! s_i = t^i and the evidence accumulates as a quadrature over that grid,
//! entirely in the log domain.

use super::{Budget, EstimatorError, GridRule, LogEvidenceEstimate, SeedInfo};
use crate::models::{ModelError, TargetModel};
use crate::rng::SeededStream;
use crate::special::{log_add_exp, log_sum_exp};

#[derive(Debug, Clone)]
pub struct NestedRun {
    pub estimate: LogEvidenceEstimate,
    /// ln of the volume gap assigned to each discarded point
    /// (omega_i = s_{i-1} - s_i).
    pub log_volume_weights: Vec<f64>,
    /// ln of the volume left to the live set when iteration stopped.
    pub log_remaining_volume: f64,
    /// ln of the discarded points' posterior importance weights
    /// p_i = L_i omega_i / Z.
    pub importance_log_weights: Vec<f64>,
    pub iterations: usize,
}

/// Run nested sampling until the live set's best remaining mass drops below
/// `epsilon` of the accumulated evidence (or `max_iter`, flagged in the
/// estimate's warning). The final remainder credits the live set with the
/// leftover volume.
///
/// A constrained draw that reports an empty constraint means the sampler hit
/// a likelihood plateau at the top; iteration stops there and the remainder
/// covers the plateau.
pub fn nested_sampling(
    model: &dyn TargetModel,
    n_live: usize,
    epsilon: f64,
    max_iter: usize,
    stream: &mut SeededStream,
    rule: GridRule,
) -> Result<NestedRun, EstimatorError> {
    if n_live < 2 {
        return Err(EstimatorError::InvalidBudget("nested sampling requires n_live >= 2".into()));
    }
    assert!(epsilon > 0.0, "stopping threshold must be positive");
    let seed = SeedInfo::of(stream);
    let log_eps = epsilon.ln();

    let ln_t = -1.0 / n_live as f64;
    // ln(1 - t) without cancellation
    let ln_gap = (-ln_t.exp_m1()).ln();

    let mut live: Vec<f64> = (0..n_live)
        .map(|_| model.log_likelihood(&model.prior_sample(stream)))
        .collect();

    // Leading trapezoid ordinate: the empirical Lambda(1), i.e. the lowest
    // likelihood seen in the initial live set.
    let mut prev_ordinate = live.iter().cloned().fold(f64::INFINITY, f64::min);

    let mut log_z = f64::NEG_INFINITY;
    let mut discarded: Vec<f64> = Vec::new();
    let mut log_weights: Vec<f64> = Vec::new();
    let mut warning = None;
    let mut iterations = 0usize;

    loop {
        if iterations >= max_iter {
            warning = Some(format!("max_iter {max_iter} reached before the stopping rule"));
            break;
        }
        iterations += 1;
        let i = iterations;

        let (min_idx, log_l_min) = live
            .iter()
            .cloned()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("live set is nonempty");

        // omega_i = t^{i-1} (1 - t), the gap above s_i = t^i
        let log_w = (i - 1) as f64 * ln_t + ln_gap;
        let ordinate = match rule {
            GridRule::Simple => log_l_min,
            GridRule::Trapezoid => {
                log_add_exp(prev_ordinate, log_l_min) - std::f64::consts::LN_2
            }
        };
        log_z = log_add_exp(log_z, log_w + ordinate);
        log_weights.push(log_w);
        discarded.push(log_l_min);
        prev_ordinate = log_l_min;

        // stop once even the best live point cannot move the accumulated
        // evidence by a relative epsilon
        let log_l_best = live.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if log_z > f64::NEG_INFINITY && log_l_best + i as f64 * ln_t <= log_eps + log_z {
            break;
        }

        match model.constrained_prior_sample(stream, log_l_min) {
            Ok(x) => live[min_idx] = model.log_likelihood(&x),
            Err(ModelError::EmptyConstraint { .. }) => break, // plateau reached
            Err(e) => return Err(e.into()),
        }
    }

    // remainder: mean live likelihood times the unconsumed volume t^I
    let log_x_rem = iterations as f64 * ln_t;
    let log_live_mean = log_sum_exp(&live).expect("live set nonempty") - (n_live as f64).ln();
    log_z = log_add_exp(log_z, log_live_mean + log_x_rem);

    let importance_log_weights = discarded
        .iter()
        .zip(log_weights.iter())
        .map(|(&l, &w)| l + w - log_z)
        .collect();

    let mut estimate = LogEvidenceEstimate::new(
        log_z,
        match rule {
            GridRule::Simple => "nested-rect",
            GridRule::Trapezoid => "nested-riemann",
        },
        Budget { prior_draws: n_live + iterations, grid_points: n_live, iterations },
        seed,
    );
    estimate.warning = warning;

    Ok(NestedRun {
        estimate,
        log_volume_weights: log_weights,
        log_remaining_volume: log_x_rem,
        importance_log_weights,
        iterations,
    })
}
