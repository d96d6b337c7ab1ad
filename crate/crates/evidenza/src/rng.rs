//! Deterministic, splittable random streams and the elementary samplers the
//! estimators need.
//!
//! Every sampler is inverse-CDF based so a stream replays bit-identically
//! from its `(seed, stream_id)` pair: the draw count per call is fixed, and
//! ChaCha's counter-mode streams guarantee that distinct `stream_id`s from
//! one master seed never overlap.

use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};
use thiserror::Error;

use crate::special;

#[derive(Debug, Error)]
pub enum RngError {
    /// The requested truncation interval carries no representable
    /// probability mass; the caller must reparametrize.
    #[error("truncation interval [{lo}, {hi}] has zero probability mass in double precision")]
    DegenerateInterval { lo: f64, hi: f64 },
    /// Same condition for the ball constraint of [`SeededStream::gaussian_in_ball`].
    #[error("ball constraint |x|^2 <= {r2_max} has zero probability mass in double precision")]
    UnderflowMass { r2_max: f64 },
}

/// A single-owner random stream identified by `(seed, stream_id)`.
///
/// Replicate `j` of an experiment runs on `SeededStream::new(master_seed, j)`;
/// streams can be created on one thread and moved to another.
#[derive(Debug, Clone)]
pub struct SeededStream {
    rng: ChaCha12Rng,
    seed: u64,
    stream_id: u64,
}

impl SeededStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        SeededStream { rng, seed, stream_id }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Uniform draw strictly inside (0,1): 53 random bits centered in their
    /// cell, so 0 and 1 are unreachable and logs/inverse CDFs stay finite.
    pub fn uniform01(&mut self) -> f64 {
        let bits = self.rng.next_u64() >> 11;
        (bits as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0)
    }

    /// `n` uniforms sorted ascending, strictly inside (0,1). Does not include
    /// the augmented endpoints 0 and 1; callers add those. Ties (possible
    /// only through 53-bit collisions) trigger a redraw of the whole batch.
    pub fn sorted_uniforms(&mut self, n: usize) -> Vec<f64> {
        assert!(n >= 1, "sorted_uniforms requires n >= 1");
        loop {
            let mut u: Vec<f64> = (0..n).map(|_| self.uniform01()).collect();
            u.sort_unstable_by(f64::total_cmp);
            if u.windows(2).all(|w| w[0] < w[1]) {
                return u;
            }
        }
    }

    /// Standard normal via the inverse CDF (exactly one uniform per draw).
    pub fn std_normal(&mut self) -> f64 {
        let u = self.uniform01();
        special::std_normal_quantile(u).expect("uniform01 is strictly inside (0,1)")
    }

    /// Unit-rate exponential, -log U.
    pub fn exponential1(&mut self) -> f64 {
        -self.uniform01().ln()
    }

    /// Normal(mu, sigma^2) conditioned on [lo, hi] by inverse CDF.
    ///
    /// When the interval sits in the upper tail the computation switches to
    /// the survival parametrization, which keeps full relative accuracy as
    /// nested sampling drives the constraint deep into the likelihood peak.
    pub fn truncated_normal(
        &mut self,
        mu: f64,
        sigma: f64,
        lo: f64,
        hi: f64,
    ) -> Result<f64, RngError> {
        assert!(sigma > 0.0, "truncated_normal requires sigma > 0");
        assert!(lo < hi, "truncated_normal requires lo < hi");
        let a = (lo - mu) / sigma;
        let b = (hi - mu) / sigma;

        let z = if a >= 0.0 {
            // Entire interval in the upper tail: work with survival values,
            // which are tiny but relatively accurate.
            let sa = 0.5 * special::erfc(a * std::f64::consts::FRAC_1_SQRT_2);
            let sb = if b.is_infinite() {
                0.0
            } else {
                0.5 * special::erfc(b * std::f64::consts::FRAC_1_SQRT_2)
            };
            if sa - sb <= 0.0 || sa == 0.0 {
                return Err(RngError::DegenerateInterval { lo, hi });
            }
            let u = self.uniform01();
            let s = sa * (1.0 - u) + sb * u;
            -special::std_normal_quantile(s).expect("s strictly inside (0,1)")
        } else {
            // Interval reaches the lower half; Phi(a), Phi(b) are accurate
            // there (erfc of a nonnegative argument).
            let pa = if a.is_infinite() { 0.0 } else { special::std_normal_cdf(a) };
            let pb = if b.is_infinite() { 1.0 } else { special::std_normal_cdf(b) };
            if pb - pa <= 0.0 {
                return Err(RngError::DegenerateInterval { lo, hi });
            }
            let u = self.uniform01();
            let p = pa * (1.0 - u) + pb * u;
            special::std_normal_quantile(p).expect("p strictly inside (0,1)")
        };
        Ok((mu + sigma * z).clamp(lo, hi))
    }

    /// Draw X ~ N(0, tau^-1 I_d) conditioned on |X|^2 <= r2_max: uniform
    /// direction from a normalized Gaussian vector, squared radius from a
    /// truncated chi-square inverted through the regularized lower
    /// incomplete gamma.
    pub fn gaussian_in_ball(
        &mut self,
        d: usize,
        tau: f64,
        r2_max: f64,
    ) -> Result<Vec<f64>, RngError> {
        assert!(d >= 1, "gaussian_in_ball requires d >= 1");
        assert!(tau > 0.0, "gaussian_in_ball requires tau > 0");
        assert!(r2_max > 0.0, "gaussian_in_ball requires r2_max > 0");

        let half_d = d as f64 * 0.5;
        let p_cap = if r2_max.is_infinite() {
            1.0
        } else {
            special::reg_lower_gamma(half_d, 0.5 * tau * r2_max)
                .expect("valid incomplete-gamma arguments")
        };
        if p_cap <= 0.0 {
            return Err(RngError::UnderflowMass { r2_max });
        }

        let dir: Vec<f64> = (0..d).map(|_| self.std_normal()).collect();
        let norm = dir.iter().map(|z| z * z).sum::<f64>().sqrt();
        let u = self.uniform01();
        let chi2 = 2.0
            * special::inv_reg_lower_gamma(half_d, u * p_cap)
                .expect("u * p_cap stays inside [0, 1)");
        let mut r2 = chi2 / tau;
        if r2_max.is_finite() {
            // the bisection can overshoot the cap by ~1e-14 relative
            r2 = r2.min(r2_max * (1.0 - 1e-12));
        }
        let scale = r2.sqrt() / norm;
        Ok(dir.into_iter().map(|z| z * scale).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::std_normal_cdf;

    fn ks_uniform(mut sample: Vec<f64>) -> f64 {
        sample.sort_unstable_by(f64::total_cmp);
        let n = sample.len() as f64;
        let mut d = 0.0f64;
        for (i, &u) in sample.iter().enumerate() {
            let hi = (i + 1) as f64 / n - u;
            let lo = u - i as f64 / n;
            d = d.max(hi).max(lo);
        }
        d
    }

    #[test]
    fn identical_seed_and_stream_replays() {
        let mut a = SeededStream::new(1, 0);
        let mut b = SeededStream::new(1, 0);
        for _ in 0..100 {
            assert_eq!(a.uniform01().to_bits(), b.uniform01().to_bits());
        }
    }

    #[test]
    fn distinct_streams_share_no_prefix() {
        let mut a = SeededStream::new(99, 0);
        let mut b = SeededStream::new(99, 1);
        for i in 0..10_000 {
            assert_ne!(a.uniform01(), b.uniform01(), "collision at draw {i}");
        }
    }

    #[test]
    fn uniform01_is_open_interval_and_uniform() {
        let mut s = SeededStream::new(1, 0);
        let first = s.uniform01();
        let second = s.uniform01();
        assert!(first != second);
        let mut draws = vec![first, second];
        draws.extend((0..100_000 - 2).map(|_| s.uniform01()));
        assert!(draws.iter().all(|&u| u > 0.0 && u < 1.0));
        let d = ks_uniform(draws);
        assert!(d < 0.01, "KS statistic {d}");
    }

    #[test]
    fn sorted_uniforms_contract() {
        let mut s = SeededStream::new(7, 3);
        let one = s.sorted_uniforms(1);
        assert!(one[0] > 0.0 && one[0] < 1.0);

        let big = s.sorted_uniforms(1000);
        let mean = big.iter().sum::<f64>() / 1000.0;
        assert!((mean - 0.5).abs() < 0.05);
        assert!(big.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn sorted_uniforms_gaps_partition_unity() {
        let mut s = SeededStream::new(5, 0);
        for _ in 0..50 {
            let u = s.sorted_uniforms(10);
            let mut gaps = vec![u[0]];
            gaps.extend(u.windows(2).map(|w| w[1] - w[0]));
            gaps.push(1.0 - u[9]);
            let total: f64 = gaps.iter().sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn exponential_mean_and_positivity() {
        let mut s = SeededStream::new(11, 0);
        let n = 100_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let x = s.exponential1();
            assert!(x > 0.0);
            sum += x;
        }
        assert!((sum / n as f64 - 1.0).abs() < 0.02);
    }

    #[test]
    fn std_normal_variance() {
        let mut s = SeededStream::new(13, 0);
        let n = 100_000;
        let draws: Vec<f64> = (0..n).map(|_| s.std_normal()).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
        assert!((var - 1.0).abs() < 0.03, "sample variance {var}");
    }

    #[test]
    fn truncated_normal_without_truncation_is_standard_normal() {
        let mut s = SeededStream::new(17, 0);
        let draws: Vec<f64> = (0..10_000)
            .map(|_| {
                s.truncated_normal(0.0, 1.0, f64::NEG_INFINITY, f64::INFINITY)
                    .unwrap()
            })
            .collect();
        let d = ks_uniform(draws.into_iter().map(std_normal_cdf).collect());
        assert!(d < 0.02, "KS statistic {d}");
    }

    #[test]
    fn truncated_normal_support() {
        let mut s = SeededStream::new(19, 0);
        for _ in 0..10_000 {
            let x = s.truncated_normal(0.0, 1.0, 0.0, 1.0).unwrap();
            assert!((0.0..=1.0).contains(&x));
        }
    }

    #[test]
    fn truncated_normal_symmetric_interval_is_balanced() {
        // the constrained prior of a Gaussian-likelihood contour
        let mut s = SeededStream::new(23, 0);
        let zeta = 0.8;
        let n = 10_000;
        let above = (0..n)
            .filter(|_| {
                s.truncated_normal(2.0, 1.0, 2.0 - zeta, 2.0 + zeta).unwrap() > 2.0
            })
            .count();
        let frac = above as f64 / n as f64;
        assert!((frac - 0.5).abs() < 0.02, "P(X > mu) = {frac}");
    }

    #[test]
    fn truncated_normal_deep_tail_stays_in_support() {
        let mut s = SeededStream::new(29, 0);
        for _ in 0..1000 {
            let x = s.truncated_normal(0.0, 1.0, 8.0, 9.0).unwrap();
            assert!((8.0..=9.0).contains(&x));
        }
    }

    #[test]
    fn truncated_normal_degenerate_interval_errors() {
        let mut s = SeededStream::new(31, 0);
        let r = s.truncated_normal(0.0, 1.0, 39.0, 40.0);
        assert!(matches!(r, Err(RngError::DegenerateInterval { .. })));
    }

    #[test]
    fn gaussian_in_ball_unconstrained_moments() {
        let mut s = SeededStream::new(37, 0);
        let (d, tau) = (5usize, 2.0);
        let n = 20_000;
        let mut sum_r2 = 0.0;
        for _ in 0..n {
            let x = s.gaussian_in_ball(d, tau, f64::INFINITY).unwrap();
            sum_r2 += x.iter().map(|v| v * v).sum::<f64>();
        }
        let mean = sum_r2 / n as f64;
        let expect = d as f64 / tau; // E|X|^2 = d/tau
        let sd = (2.0 * d as f64 / (tau * tau) / n as f64).sqrt();
        assert!((mean - expect).abs() < 3.0 * sd, "mean |X|^2 = {mean}");
    }

    #[test]
    fn gaussian_in_ball_support() {
        let mut s = SeededStream::new(41, 0);
        for _ in 0..10_000 {
            let x = s.gaussian_in_ball(3, 1.0, 2.5).unwrap();
            let r2: f64 = x.iter().map(|v| v * v).sum();
            assert!(r2 <= 2.5);
        }
    }

    #[test]
    fn gaussian_in_ball_acceptance_matches_chi2_cdf() {
        // d=2, tau=1: P(|X|^2 <= 1) = P(chi2_2 <= 1) = 1 - e^{-1/2}
        let mut s = SeededStream::new(43, 0);
        let n = 100_000;
        let inside = (0..n)
            .filter(|_| {
                let x = s.gaussian_in_ball(2, 1.0, f64::INFINITY).unwrap();
                x.iter().map(|v| v * v).sum::<f64>() <= 1.0
            })
            .count();
        let frac = inside as f64 / n as f64;
        let p = 1.0 - (-0.5f64).exp();
        let sd = (p * (1.0 - p) / n as f64).sqrt();
        assert!((frac - p).abs() < 3.0 * sd, "fraction {frac} vs {p}");
    }

    #[test]
    fn gaussian_in_ball_underflow_errors() {
        let mut s = SeededStream::new(47, 0);
        // P(chi2_50 <= 1e-30) underflows far below double precision
        let r = s.gaussian_in_ball(50, 1.0, 1e-30);
        assert!(matches!(r, Err(RngError::UnderflowMass { .. })));
    }

    #[test]
    fn streams_are_independent_of_call_pattern() {
        // replicate k's stream does not depend on what other streams drew
        let mut a = SeededStream::new(3, 5);
        let expected: Vec<f64> = (0..10).map(|_| a.uniform01()).collect();
        let mut other = SeededStream::new(3, 4);
        let _ = other.sorted_uniforms(100);
        let mut b = SeededStream::new(3, 5);
        let got: Vec<f64> = (0..10).map(|_| b.uniform01()).collect();
        assert_eq!(expected, got);
    }
}
