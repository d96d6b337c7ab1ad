//! Vertical-likelihood evidence estimation on a geometric volume ladder.
//!
//! Likelihood contours L_0 = 0 < L_1 < ... < L_N are placed so that
//! Z(L_k) = q^k: each L_{k+1} is the empirical (1-q)-quantile of the
//! likelihood under the prior constrained to L > L_k. Two estimators come
//! out of one ladder, the telescoping sum over contour gaps and the
//! geometric-series form.

use super::{Budget, EstimatorError, LogEvidenceEstimate, SeedInfo};
use crate::models::{ModelError, TargetModel};
use crate::rng::SeededStream;
use crate::special::log_sum_exp;

/// One simulated point of the Lorenz curve: volume s_k = q^k against the
/// contour log-ordinate L_k.
#[derive(Debug, Clone, Copy)]
pub struct LorenzPoint {
    pub level: usize,
    pub volume: f64,
    pub log_ordinate: f64,
}

#[derive(Debug, Clone)]
pub struct VerticalRun {
    /// sum_k q^k (L_k - L_{k-1})
    pub simple: LogEvidenceEstimate,
    /// (1-q) sum_k q^k L_k truncated at N; `bounds` carries the truncation
    /// allowance q^{N+1} L_N valid once the ladder has saturated.
    pub asymptotic: LogEvidenceEstimate,
    pub trace: Vec<LorenzPoint>,
}

/// Build the geometric contour ladder and evaluate both vertical-likelihood
/// estimators.
///
/// A level whose constraint comes back empty means the likelihood has a
/// plateau at its maximum; the remaining levels repeat the last contour,
/// which leaves both sums unchanged. Quantile ties from limited float
/// resolution are bumped by one ulp to keep the ladder strictly ordered.
pub fn vertical_geometric(
    model: &dyn TargetModel,
    q: f64,
    levels: usize,
    m_per_level: usize,
    stream: &mut SeededStream,
) -> Result<VerticalRun, EstimatorError> {
    if !(q > 0.0 && q < 1.0) {
        return Err(EstimatorError::InvalidBudget(format!("q must lie in (0,1), got {q}")));
    }
    if levels == 0 || m_per_level < 2 {
        return Err(EstimatorError::InvalidBudget(
            "vertical_geometric requires levels >= 1 and m_per_level >= 2".into(),
        ));
    }
    let seed = SeedInfo::of(stream);

    // ladder[k] = log L_k, ladder[0] = log 0
    let mut ladder: Vec<f64> = Vec::with_capacity(levels + 1);
    ladder.push(f64::NEG_INFINITY);
    let mut saturated = false;
    let quantile_idx = ((1.0 - q) * m_per_level as f64).ceil().max(1.0) as usize;

    for k in 0..levels {
        let floor = ladder[k];
        if saturated {
            ladder.push(floor);
            continue;
        }
        let mut draws: Vec<f64> = Vec::with_capacity(m_per_level);
        let mut empty = false;
        for _ in 0..m_per_level {
            match model.constrained_prior_sample(stream, floor) {
                Ok(x) => draws.push(model.log_likelihood(&x)),
                Err(ModelError::EmptyConstraint { .. }) => {
                    empty = true;
                    break;
                }
                Err(e) => return Err(e.into()),
            }
        }
        if empty {
            saturated = true;
            ladder.push(floor);
            continue;
        }
        draws.sort_unstable_by(f64::total_cmp);
        let mut next = draws[quantile_idx.min(m_per_level) - 1];
        if next <= floor {
            // float ties at extreme contour depth; the increment is
            // negligible but order must stay strict
            next = next_up(floor);
        }
        ladder.push(next);
    }

    let ln_q = q.ln();

    // simple: sum over ascending gaps, log-domain difference per level
    let mut gap_terms: Vec<f64> = Vec::new();
    for k in 1..=levels {
        let (prev, cur) = (ladder[k - 1], ladder[k]);
        if cur > prev {
            let log_diff = if prev == f64::NEG_INFINITY {
                cur
            } else {
                cur + (-(prev - cur).exp_m1()).ln()
            };
            gap_terms.push(k as f64 * ln_q + log_diff);
        }
    }
    let log_z_simple = if gap_terms.is_empty() {
        f64::NEG_INFINITY
    } else {
        log_sum_exp(&gap_terms).expect("nonempty")
    };

    // asymptotic: (1-q) sum q^k L_k, truncated at N
    let series_terms: Vec<f64> = (1..=levels)
        .map(|k| k as f64 * ln_q + ladder[k])
        .collect();
    let log_z_asym = (1.0 - q).ln() + log_sum_exp(&series_terms).expect("levels >= 1");

    let budget = Budget {
        prior_draws: levels * m_per_level,
        grid_points: levels,
        iterations: levels,
    };
    let simple = LogEvidenceEstimate::new(log_z_simple, "vertical", budget, seed);
    let mut asymptotic = LogEvidenceEstimate::new(log_z_asym, "vertical-asymp", budget, seed);
    // tail allowance for the dropped k > N terms, exact once L_k has
    // saturated at L_N
    let log_tail = (levels + 1) as f64 * ln_q + ladder[levels];
    asymptotic.bounds = Some(super::LogBounds {
        log_lower: log_z_asym,
        log_upper: crate::special::log_add_exp(log_z_asym, log_tail),
    });

    let trace = ladder
        .iter()
        .enumerate()
        .map(|(k, &log_l)| LorenzPoint {
            level: k,
            volume: q.powi(k as i32),
            log_ordinate: log_l,
        })
        .collect();

    Ok(VerticalRun { simple, asymptotic, trace })
}

fn next_up(x: f64) -> f64 {
    if x == f64::NEG_INFINITY {
        return f64::MIN;
    }
    let bits = x.to_bits();
    let next = if x >= 0.0 { bits + 1 } else { bits - 1 };
    f64::from_bits(next)
}
