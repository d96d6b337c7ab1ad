//! Quantile importance sampling: the ordered-uniform trapezoid rule applied
//! to empirical likelihood quantiles.
//!
//! The estimator rests on two facts about the volume variable
//! Z(y) = P(L(X) > y) and its pseudo-inverse Lambda: Z(L(X)) is uniform on
//! (0,1), and Lambda(U) is distributed like the likelihood ordinate. So the
//! evidence integral over R^p collapses to int_0^1 Lambda(s) ds, and a
//! trapezoid rule over sorted uniforms inherits the n^-4 MSE rate wherever
//! Lambda is smooth.

use super::{Budget, EstimatorError, GridRule, LogBounds, LogEvidenceEstimate, SeedInfo};
use crate::models::TargetModel;
use crate::rng::SeededStream;

/// Descending log-likelihood ordinates with the empirical quantile lookup
/// `Lambda(u) = Y_(ceil(m u))`.
///
/// Sorting descending makes the lookup nonincreasing in u with
/// `Lambda(0) = max` and `Lambda(1) = min`, matching the orientation of the
/// volume variable's pseudo-inverse. Ties keep draw order (stable sort).
#[derive(Debug, Clone)]
pub struct OrderedOrdinates {
    log_y_desc: Vec<f64>,
}

impl OrderedOrdinates {
    pub fn from_log_likelihoods(mut log_y: Vec<f64>) -> Self {
        assert!(!log_y.is_empty(), "need at least one ordinate");
        log_y.sort_by(|a, b| b.total_cmp(a));
        OrderedOrdinates { log_y_desc: log_y }
    }

    pub fn len(&self) -> usize {
        self.log_y_desc.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_y_desc.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.log_y_desc[0]
    }

    pub fn min(&self) -> f64 {
        *self.log_y_desc.last().unwrap()
    }

    /// Empirical quantile of the ordinate distribution at volume u.
    pub fn lookup(&self, u: f64) -> f64 {
        let m = self.log_y_desc.len();
        if u <= 0.0 {
            return self.log_y_desc[0];
        }
        if u >= 1.0 {
            return self.log_y_desc[m - 1];
        }
        let idx = (m as f64 * u).ceil() as usize;
        self.log_y_desc[idx.clamp(1, m) - 1]
    }
}

// Quadrature of nonincreasing log ordinates over an ascending volume grid,
// all three sums sharing one max shift. Termwise the rectangle sums bracket
// the trapezoid sum, and IEEE addition is monotone, so the returned
// inequality lower <= trapezoid <= upper holds exactly in floating point.
struct ShiftedSums {
    log_trapezoid: f64,
    log_lower: f64,
    log_upper: f64,
}

fn bracketed_quadrature(grid: &[f64], log_ord: &[f64]) -> ShiftedSums {
    debug_assert_eq!(grid.len(), log_ord.len());
    let shift = log_ord[0];
    if shift == f64::NEG_INFINITY {
        return ShiftedSums {
            log_trapezoid: f64::NEG_INFINITY,
            log_lower: f64::NEG_INFINITY,
            log_upper: f64::NEG_INFINITY,
        };
    }
    let e: Vec<f64> = log_ord.iter().map(|&l| (l - shift).exp()).collect();
    let mut trap = 0.0;
    let mut lower = 0.0;
    let mut upper = 0.0;
    for i in 1..grid.len() {
        let w = grid[i] - grid[i - 1];
        trap += w * (0.5 * (e[i - 1] + e[i]));
        lower += w * e[i];
        upper += w * e[i - 1];
    }
    ShiftedSums {
        log_trapezoid: shift + trap.ln(),
        log_lower: shift + lower.ln(),
        log_upper: shift + upper.ln(),
    }
}

/// Quantile importance sampling.
///
/// Draws m prior samples, sorts their log-likelihoods into an empirical
/// quantile function, reads it at n sorted uniforms augmented with 0 and 1,
/// and applies the chosen quadrature rule in the log domain. Trapezoid runs
/// carry the rectangle-rule envelope in `bounds`; `Lambda(0)` is the maximum
/// sampled ordinate.
pub fn qis(
    model: &dyn TargetModel,
    m: usize,
    n: usize,
    stream: &mut SeededStream,
    rule: GridRule,
) -> Result<LogEvidenceEstimate, EstimatorError> {
    if n == 0 || m < n {
        return Err(EstimatorError::InvalidBudget(format!(
            "qis requires m >= n >= 1, got m={m} n={n}"
        )));
    }
    let seed = SeedInfo::of(stream);
    let log_y: Vec<f64> = (0..m)
        .map(|_| model.log_likelihood(&model.prior_sample(stream)))
        .collect();
    let ordinates = OrderedOrdinates::from_log_likelihoods(log_y);

    let mut grid = Vec::with_capacity(n + 2);
    grid.push(0.0);
    grid.extend(stream.sorted_uniforms(n));
    grid.push(1.0);
    let lambda: Vec<f64> = grid.iter().map(|&u| ordinates.lookup(u)).collect();

    let budget = Budget { prior_draws: m, grid_points: n, iterations: 0 };
    let sums = bracketed_quadrature(&grid, &lambda);
    match rule {
        GridRule::Trapezoid => {
            let mut est = LogEvidenceEstimate::new(sums.log_trapezoid, "qis", budget, seed);
            est.bounds = Some(LogBounds {
                log_lower: sums.log_lower,
                log_upper: sums.log_upper,
            });
            Ok(est)
        }
        GridRule::Simple => {
            // rectangle rule with the gap above each interior point:
            // sum_{i=1..n} (u_(i+1) - u_(i)) Lambda(u_(i)); the leading cell
            // [0, u_(1)) contributes nothing
            let mut sum_terms: Vec<f64> = Vec::with_capacity(n);
            for i in 1..=n {
                let w = grid[i + 1] - grid[i];
                sum_terms.push(w.ln() + lambda[i]);
            }
            let log_z = crate::special::log_sum_exp(&sum_terms).expect("n >= 1");
            Ok(LogEvidenceEstimate::new(log_z, "qis-simple", budget, seed))
        }
    }
}

/// The rectangle-rule envelope of a trapezoid QIS run.
pub fn qis_bounds(estimate: &LogEvidenceEstimate) -> Result<(f64, f64), EstimatorError> {
    estimate
        .bounds
        .map(|b| (b.log_lower, b.log_upper))
        .ok_or(EstimatorError::MissingGrid)
}

/// Quadrature of the empirical quantile function over the deterministic
/// geometric grid s_i = e^{-i/n}, the volume compression nested sampling
/// assumes. Grid cells refine as n grows; the grid is truncated once it
/// reaches volumes below 1e-18, whose contribution is negligible at the
/// benchmark scales.
pub fn exp_grid_quadrature(
    model: &dyn TargetModel,
    m: usize,
    n: usize,
    stream: &mut SeededStream,
    rule: GridRule,
) -> Result<LogEvidenceEstimate, EstimatorError> {
    if m == 0 || n == 0 {
        return Err(EstimatorError::InvalidBudget(
            "exp_grid_quadrature requires m >= 1, n >= 1".into(),
        ));
    }
    let seed = SeedInfo::of(stream);
    let log_y: Vec<f64> = (0..m)
        .map(|_| model.log_likelihood(&model.prior_sample(stream)))
        .collect();
    let ordinates = OrderedOrdinates::from_log_likelihoods(log_y);

    let steps = (n as f64 * 18.0 * std::f64::consts::LN_10).ceil() as usize;
    // ascending volume grid, deepest point first
    let mut grid: Vec<f64> = (0..=steps)
        .rev()
        .map(|i| (-(i as f64) / n as f64).exp())
        .collect();
    grid.dedup();
    let lambda: Vec<f64> = grid.iter().map(|&s| ordinates.lookup(s)).collect();

    let budget = Budget { prior_draws: m, grid_points: n, iterations: 0 };
    let sums = bracketed_quadrature(&grid, &lambda);
    let (log_z, tag) = match rule {
        GridRule::Trapezoid => (sums.log_trapezoid, "expgrid-riemann"),
        // ordinate at the inner (deeper) edge, i.e. the larger likelihood
        GridRule::Simple => (sums.log_upper, "expgrid-rect"),
    };
    Ok(LogEvidenceEstimate::new(log_z, tag, budget, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{constant_model, gauss_gauss_model, TargetModel};

    #[test]
    fn lookup_contract() {
        let ords = OrderedOrdinates::from_log_likelihoods(vec![-3.0, -1.0, -2.0, -4.0]);
        assert_eq!(ords.lookup(0.0), -1.0); // Lambda(0) = max
        assert_eq!(ords.lookup(1.0), -4.0); // Lambda(1) = min
        assert_eq!(ords.lookup(0.25), -1.0); // ceil(4 * 0.25) = 1
        assert_eq!(ords.lookup(0.2500001), -2.0); // ceil -> 2
        assert_eq!(ords.lookup(0.75), -3.0);
        assert_eq!(ords.lookup(0.99), -4.0);
    }

    proptest::proptest! {
        #[test]
        fn lookup_is_nonincreasing(seed in 0u64..1000) {
            let mut s = SeededStream::new(seed, 0);
            let ords = OrderedOrdinates::from_log_likelihoods(
                (0..37).map(|_| s.std_normal()).collect(),
            );
            let mut prev = f64::INFINITY;
            for i in 0..=100 {
                let v = ords.lookup(i as f64 / 100.0);
                proptest::prop_assert!(v <= prev);
                prev = v;
            }
        }
    }

    #[test]
    fn qis_exact_on_constant_likelihood() {
        let c = 0.07f64;
        let m = constant_model(c.ln());
        let mut s = SeededStream::new(1, 0);
        let est = qis(&m, 100, 10, &mut s, GridRule::Trapezoid).unwrap();
        assert!((est.log_z.ln() - c.ln()).abs() < 1e-12);

        // with a constant quantile function the rectangle rules telescope to
        // the same partition of unity: lower = Z = upper
        let (lo, up) = qis_bounds(&est).unwrap();
        assert!((lo - est.log_z.ln()).abs() < 1e-12);
        assert!((up - est.log_z.ln()).abs() < 1e-12);
    }

    #[test]
    fn qis_budget_validation() {
        let m = constant_model(0.0);
        let mut s = SeededStream::new(1, 0);
        assert!(qis(&m, 5, 10, &mut s, GridRule::Trapezoid).is_err());
        assert!(qis(&m, 5, 0, &mut s, GridRule::Trapezoid).is_err());
    }

    #[test]
    fn sandwich_holds_on_every_run() {
        let m = gauss_gauss_model(2.0, 1.0, 0.0, 1.0);
        for rep in 0..200 {
            let mut s = SeededStream::new(23, rep);
            let est = qis(&m, 50, 10, &mut s, GridRule::Trapezoid).unwrap();
            let (lo, up) = qis_bounds(&est).unwrap();
            let z = est.log_z.ln();
            assert!(lo <= z && z <= up, "rep {rep}: {lo} {z} {up}");
        }
    }

    #[test]
    fn simple_rule_carries_no_bounds() {
        let m = gauss_gauss_model(2.0, 1.0, 0.0, 1.0);
        let mut s = SeededStream::new(3, 0);
        let est = qis(&m, 50, 10, &mut s, GridRule::Simple).unwrap();
        assert!(matches!(qis_bounds(&est), Err(EstimatorError::MissingGrid)));
    }

    #[test]
    fn bound_width_shrinks_as_n_doubles() {
        let m = gauss_gauss_model(2.0, 1.0, 0.0, 1.0);
        let median_width = |n: usize| {
            let mut widths: Vec<f64> = (0..100)
                .map(|rep| {
                    let mut s = SeededStream::new(29, rep);
                    let est = qis(&m, 1000, n, &mut s, GridRule::Trapezoid).unwrap();
                    let (lo, up) = qis_bounds(&est).unwrap();
                    up.exp() - lo.exp()
                })
                .collect();
            widths.sort_unstable_by(f64::total_cmp);
            widths[50]
        };
        let w10 = median_width(10);
        let w20 = median_width(20);
        let w40 = median_width(40);
        assert!(w10 > w20 && w20 > w40, "widths {w10} {w20} {w40}");
    }

    #[test]
    fn qis_tracks_the_gauss_gauss_truth() {
        // mean over 100 replicates lands near the analytic value
        let m = gauss_gauss_model(2.0, 1.0, 0.0, 1.0);
        let truth = m.analytic_log_evidence().unwrap().linear();
        let mean: f64 = (0..100)
            .map(|rep| {
                let mut s = SeededStream::new(31, rep);
                qis(&m, 1000, 20, &mut s, GridRule::Trapezoid)
                    .unwrap()
                    .log_z
                    .linear()
            })
            .sum::<f64>()
            / 100.0;
        assert!((mean - truth).abs() / truth < 0.02, "mean {mean} vs {truth}");
    }

    #[test]
    fn exp_grid_spread_decreases_as_grid_refines() {
        let m = gauss_gauss_model(2.0, 1.0, 0.0, 1.0);
        let spread = |n: usize| {
            let vals: Vec<f64> = (0..30)
                .map(|rep| {
                    let mut s = SeededStream::new(37, rep);
                    exp_grid_quadrature(&m, 1000, n, &mut s, GridRule::Simple)
                        .unwrap()
                        .log_z
                        .linear()
                })
                .collect();
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            (vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / vals.len() as f64)
                .sqrt()
        };
        let s200 = spread(200);
        let s400 = spread(400);
        let s800 = spread(800);
        assert!(
            s200 > s400 && s400 > s800,
            "spreads {s200} {s400} {s800} not strictly decreasing"
        );
    }

    #[test]
    fn exp_grid_exact_on_constant_likelihood() {
        let c = 0.125f64;
        let m = constant_model(c.ln());
        let mut s = SeededStream::new(5, 0);
        let est = exp_grid_quadrature(&m, 50, 100, &mut s, GridRule::Trapezoid).unwrap();
        // grid covers [1e-18, 1]; missing mass is c * 1e-18
        assert!((est.log_z.linear() - c).abs() < 1e-15);
    }
}
