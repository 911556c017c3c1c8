use alloc::vec::Vec;

use rand_distr::{Distribution, StandardNormal};

use crate::{math, rng};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NormalityVerdict {
    pub statistic: f64,
    pub p_value: f64,
    pub reject: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LillieforsConfig {
    /// Null replicates drawn to estimate the p-value.
    pub replicates: usize,
    pub seed: u64,
}

impl Default for LillieforsConfig {
    fn default() -> Self {
        LillieforsConfig { replicates: 10_000, seed: 0x5eed_1111 }
    }
}

/// Kolmogorov-Smirnov distance between the sample and a normal with the
/// sample's own mean and standard deviation.
pub fn ks_normal_statistic(samples: &[f64]) -> Result<f64> {
    let n = samples.len();
    if n < 5 {
        return Err(Error::TooFewSamples { needed: 5, got: n });
    }
    let mut sorted = samples.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let mean = math::mean(&sorted);
    let sd = math::sample_sd(&sorted, mean);
    if !(sd > 0.0) {
        return Err(Error::ConstantColumn(alloc::string::String::from("sample")));
    }
    Ok(ks_sorted(&sorted, mean, sd))
}

fn ks_sorted(sorted: &[f64], mean: f64, sd: f64) -> f64 {
    let nf = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = math::normal_cdf((x - mean) / sd);
        let above = (i + 1) as f64 / nf - f;
        let below = f - i as f64 / nf;
        d = d.max(above).max(below);
    }
    d
}

/// Monte Carlo null distribution of the Lilliefors statistic for one
/// sample size. The statistic is location/scale free, so one table serves
/// every sample of that size.
#[derive(Debug, Clone, PartialEq)]
pub struct LillieforsNull {
    n: usize,
    sorted_stats: Vec<f64>,
}

impl LillieforsNull {
    pub fn simulate(n: usize, cfg: &LillieforsConfig) -> Result<Self> {
        if n < 5 {
            return Err(Error::TooFewSamples { needed: 5, got: n });
        }
        if cfg.replicates == 0 {
            return Err(Error::InvalidConfig("lilliefors needs at least one replicate".into()));
        }
        let mut buf = alloc::vec![0.0; n];
        let mut sorted_stats: Vec<f64> = (0..cfg.replicates)
            .map(|r| {
                let mut rng = rng::seeded(rng::derive(cfg.seed, r as u64));
                buf.iter_mut().for_each(|x| *x = StandardNormal.sample(&mut rng));
                buf.sort_unstable_by(f64::total_cmp);
                let mean = math::mean(&buf);
                ks_sorted(&buf, mean, math::sample_sd(&buf, mean))
            })
            .collect();
        sorted_stats.sort_unstable_by(f64::total_cmp);
        Ok(LillieforsNull { n, sorted_stats })
    }

    pub fn sample_size(&self) -> usize {
        self.n
    }

    /// `(1 + #{null >= d}) / (replicates + 1)`.
    pub fn p_value(&self, statistic: f64) -> f64 {
        let below = self.sorted_stats.partition_point(|&s| s < statistic);
        let at_or_above = self.sorted_stats.len() - below;
        (1 + at_or_above) as f64 / (self.sorted_stats.len() + 1) as f64
    }

    pub fn test(&self, samples: &[f64], alpha: f64) -> Result<NormalityVerdict> {
        if samples.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: samples.len() });
        }
        let statistic = ks_normal_statistic(samples)?;
        let p_value = self.p_value(statistic);
        Ok(NormalityVerdict { statistic, p_value, reject: p_value < alpha })
    }
}

/// Lilliefors test of normality with estimated mean and variance.
pub fn lilliefors_test(samples: &[f64], alpha: f64, cfg: &LillieforsConfig) -> Result<NormalityVerdict> {
    LillieforsNull::simulate(samples.len(), cfg)?.test(samples, alpha)
}

/// Output of the log gate.
#[derive(Debug, Clone, PartialEq)]
pub struct Gated {
    pub values: Vec<f64>,
    pub applied: bool,
}

/// Replaces a non-negative sample by `ln(1 + x)` when the Lilliefors test
/// rejects normality at `alpha`. Samples the test cannot judge (fewer than
/// five values, or constant) pass through unchanged.
pub fn log_gate(samples: &[f64], alpha: f64, cfg: &LillieforsConfig) -> Result<Gated> {
    check_non_negative(samples)?;
    if samples.len() < 5 {
        return Ok(Gated { values: samples.to_vec(), applied: false });
    }
    log_gate_with(&LillieforsNull::simulate(samples.len(), cfg)?, samples, alpha)
}

/// [`log_gate`] against a precomputed null table.
pub fn log_gate_with(null: &LillieforsNull, samples: &[f64], alpha: f64) -> Result<Gated> {
    check_non_negative(samples)?;
    let reject = match null.test(samples, alpha) {
        Ok(v) => v.reject,
        Err(Error::ConstantColumn(_)) => false,
        Err(e) => return Err(e),
    };
    let values = if reject { samples.iter().map(|&x| math::ln_1p(x)).collect() } else { samples.to_vec() };
    Ok(Gated { values, applied: reject })
}

fn check_non_negative(samples: &[f64]) -> Result<()> {
    match samples.iter().find(|&&x| !(x >= 0.0)) {
        Some(&value) => Err(Error::NegativeValue { context: "log gate input", value }),
        None => Ok(()),
    }
}
