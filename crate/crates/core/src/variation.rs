//! Runtime variation: execution times and sporadic inter-arrival times.
//!
//! Execution times follow a normal distribution centred at a fraction of the
//! WCET whose standard deviation puts the WCET at a fixed upper quantile.
//! Samples are rounded to whole ticks and clamped to `[1, wcet]`. Sporadic
//! inter-arrival times are Poisson draws, redrawn until they reach the
//! minimum inter-arrival time.

use rand::Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::time::Tick;

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariationConfig {
    /// Mean execution time as a fraction of WCET.
    pub exec_mean_fraction: f64,
    /// Cumulative probability placed at or below the WCET.
    pub exec_upper_quantile: f64,
    /// Mean sporadic inter-arrival time as a fraction of the period.
    pub sporadic_mean_fraction: f64,
    pub seed: u64,
}

impl Default for VariationConfig {
    fn default() -> Self {
        VariationConfig {
            exec_mean_fraction: 0.80,
            exec_upper_quantile: 0.9999,
            sporadic_mean_fraction: 1.20,
            seed: 0,
        }
    }
}

impl VariationConfig {
    pub fn with_seed(seed: u64) -> Self {
        VariationConfig {
            seed,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.exec_mean_fraction > 0.0 && self.exec_mean_fraction <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "exec_mean_fraction {} outside (0, 1]",
                self.exec_mean_fraction
            )));
        }
        if !(self.exec_upper_quantile > 0.5 && self.exec_upper_quantile < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "exec_upper_quantile {} outside (0.5, 1)",
                self.exec_upper_quantile
            )));
        }
        if !(self.sporadic_mean_fraction >= 1.0 && self.sporadic_mean_fraction.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sporadic_mean_fraction {} below 1",
                self.sporadic_mean_fraction
            )));
        }
        Ok(())
    }

    /// Standard deviation of the execution-time distribution for `wcet`.
    pub fn exec_sigma(&self, wcet: Tick) -> f64 {
        let mean = self.exec_mean_fraction * wcet as f64;
        (wcet as f64 - mean) / inverse_normal_cdf(self.exec_upper_quantile)
    }
}

/// How job execution times and sporadic releases are chosen.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Variation {
    /// Every job runs exactly its WCET; sporadic tasks release every period.
    Deterministic,
    Random(VariationConfig),
}

impl Variation {
    pub fn seed(&self) -> Option<u64> {
        match self {
            Variation::Deterministic => None,
            Variation::Random(cfg) => Some(cfg.seed),
        }
    }
}

/// Unrounded draw from the execution-time normal distribution.
pub fn raw_execution_sample<R: Rng + ?Sized>(wcet: Tick, cfg: &VariationConfig, rng: &mut R) -> f64 {
    let mean = cfg.exec_mean_fraction * wcet as f64;
    let sigma = cfg.exec_sigma(wcet);
    Normal::new(mean, sigma)
        .expect("sigma is finite and non-negative")
        .sample(rng)
}

/// Execution time for one job, in `[1, wcet]`.
pub fn sample_execution_time<R: Rng + ?Sized>(wcet: Tick, cfg: &VariationConfig, rng: &mut R) -> Tick {
    debug_assert!(wcet >= 1);
    let x = raw_execution_sample(wcet, cfg, rng).round();
    if x < 1.0 {
        1
    } else if x >= wcet as f64 {
        wcet
    } else {
        x as Tick
    }
}

/// Inter-arrival time for a sporadic task, never below `period`.
pub fn sample_inter_arrival<R: Rng + ?Sized>(period: Tick, cfg: &VariationConfig, rng: &mut R) -> Tick {
    debug_assert!(period >= 1);
    let poisson = Poisson::new(cfg.sporadic_mean_fraction * period as f64)
        .expect("positive finite Poisson mean");
    loop {
        let x = poisson.sample(rng);
        if x >= period as f64 {
            return x as Tick;
        }
    }
}

/// Standard normal quantile function.
///
/// Acklam's rational approximation; relative error below 1.15e-9 over the
/// open unit interval.
pub fn inverse_normal_cdf(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.02425;

    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use statrs::distribution::{ContinuousCDF, Normal as StatNormal};

    #[test]
    fn quantile_matches_reference_implementation() {
        let reference = StatNormal::new(0.0, 1.0).unwrap();
        for &p in &[1e-6, 0.001, 0.02, 0.3, 0.5, 0.7, 0.975, 0.99, 0.9999, 0.999999] {
            let ours = inverse_normal_cdf(p);
            let theirs = reference.inverse_cdf(p);
            assert!(
                (ours - theirs).abs() <= 1e-8 * theirs.abs().max(1.0),
                "p={p}: {ours} vs {theirs}"
            );
        }
        // round trip through the reference CDF
        let z = inverse_normal_cdf(0.9999);
        assert!((reference.cdf(z) - 0.9999).abs() < 1e-10);
    }

    #[test]
    fn sigma_for_wcet_ten() {
        let cfg = VariationConfig::default();
        let z = inverse_normal_cdf(0.9999);
        assert!((z - 3.719_016_485).abs() < 1e-8);
        assert!((cfg.exec_sigma(10) - 0.5378).abs() < 1e-4);
    }

    #[test]
    fn unit_wcet_always_one() {
        let cfg = VariationConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!((0..10_000).all(|_| sample_execution_time(1, &cfg, &mut rng) == 1));
    }

    #[test]
    fn samples_never_exceed_wcet() {
        let cfg = VariationConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for wcet in [1, 2, 3, 10, 57, 400] {
            for _ in 0..5_000 {
                let e = sample_execution_time(wcet, &cfg, &mut rng);
                assert!((1..=wcet).contains(&e));
            }
        }
    }

    #[test]
    fn inter_arrival_floor() {
        let cfg = VariationConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        assert!((0..20_000).all(|_| sample_inter_arrival(1, &cfg, &mut rng) >= 1));
        assert!((0..20_000).all(|_| sample_inter_arrival(100, &cfg, &mut rng) >= 100));
    }

    #[test]
    fn config_validation() {
        assert!(VariationConfig::default().validate().is_ok());
        let bad = VariationConfig {
            exec_mean_fraction: 1.2,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = VariationConfig {
            sporadic_mean_fraction: 0.9,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }
}
