//! Empirical distributions and goodness-of-fit summaries.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Sorted samples of a scalar statistic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalDistribution {
    samples: Vec<f64>,
}

impl EmpiricalDistribution {
    pub fn new(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(invalid("samples", "no samples"));
        }
        if let Some(x) = samples.iter().find(|x| x.is_nan()) {
            return Err(invalid("samples", format!("contains {x}")));
        }
        samples.sort_by(f64::total_cmp);
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn count(&self) -> usize {
        self.samples.len()
    }

    /// Right-continuous empirical CDF `#{x_i <= x} / count`.
    pub fn ecdf(&self, x: f64) -> f64 {
        self.samples.partition_point(|s| *s <= x) as f64 / self.count() as f64
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.count() as f64
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.samples.iter().map(|x| f(*x)).collect())
    }
}

/// Sup-norm distance between the empirical CDF and a continuous `cdf`.
pub fn ks_distance(dist: &EmpiricalDistribution, cdf: impl Fn(f64) -> f64) -> f64 {
    let n = dist.count() as f64;
    dist.samples()
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let f = cdf(*x);
            (((i + 1) as f64 / n) - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

/// Pairs `(x_(i), G⁻¹((i - 1/2) / count))` for a reference quantile function.
pub fn qq_data(dist: &EmpiricalDistribution, quantile: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
    let n = dist.count() as f64;
    dist.samples()
        .iter()
        .enumerate()
        .map(|(i, x)| (*x, quantile((i as f64 + 0.5) / n)))
        .collect()
}

/// Standard Gumbel quantile `-log(-log p)`.
pub fn gumbel_inverse_cdf(p: f64) -> f64 {
    -(-p.ln()).ln()
}

/// Monte Carlo standard error of a proportion.
pub fn proportion_se(p: f64, trials: usize) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}

/// A proportion with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Proportion {
    pub value: f64,
    pub se: f64,
    pub trials: usize,
}

impl Proportion {
    pub fn from_count(hits: usize, trials: usize) -> Self {
        let value = hits as f64 / trials as f64;
        Self {
            value,
            se: proportion_se(value, trials),
            trials,
        }
    }
}
