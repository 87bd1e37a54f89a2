//! Monte Carlo summaries: mergeable mean/variance accumulators and
//! chi-square goodness of fit against an exact law.

use std::collections::BTreeMap;

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::measures::{Atom, DiscreteMeasure};
use crate::rational;

/// Running mean and variance (Welford), mergeable in a fixed order.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MeanAccumulator {
    n: u64,
    mean: f64,
    m2: f64,
}

impl MeanAccumulator {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &MeanAccumulator) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        self.mean += delta * other.n as f64 / n as f64;
        self.m2 += other.m2 + delta * delta * (self.n as f64) * (other.n as f64) / n as f64;
        self.n = n;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.m2 / (self.n - 1) as f64).max(0.0)
        }
    }

    /// Standard error of the mean.
    pub fn stderr(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        (self.variance() / self.n as f64).sqrt()
    }

    pub fn estimate(&self) -> Estimate {
        Estimate { mean: self.mean(), stderr: self.stderr(), n: self.n }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: u64,
}

impl Estimate {
    /// `|mean − target| ≤ z · stderr`; a zero stderr demands exact agreement
    /// up to rounding.
    pub fn within(&self, target: f64, z: f64) -> bool {
        let diff = (self.mean - target).abs();
        if self.stderr == 0.0 {
            diff <= 1e-12
        } else {
            diff <= z * self.stderr
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
    /// Draws that landed outside the support of the exact law.
    pub impossible_draws: u64,
}

impl ChiSquareResult {
    pub fn passes(&self, significance: f64) -> bool {
        self.impossible_draws == 0 && self.p_value >= significance
    }
}

/// Pearson chi-square of observed tuple counts against an exact law.
pub fn chi_square_gof(counts: &BTreeMap<Vec<Atom>, u64>, law: &DiscreteMeasure) -> ChiSquareResult {
    let total: u64 = counts.values().sum();
    let impossible_draws: u64 = counts.iter().filter(|(t, _)| law.weight(t) == rational::zero()).map(|(_, c)| c).sum();
    let n = total as f64;
    let statistic: f64 = law
        .iter()
        .map(|(t, w)| {
            let expected = n * rational::to_f64(w);
            let observed = counts.get(t).copied().unwrap_or(0) as f64;
            (observed - expected).powi(2) / expected
        })
        .sum();
    let df = law.support_len().saturating_sub(1);
    let p_value = if df == 0 {
        1.0
    } else {
        let dist = ChiSquared::new(df as f64).expect("positive degrees of freedom");
        1.0 - dist.cdf(statistic)
    };
    ChiSquareResult { statistic, degrees_of_freedom: df, p_value, impossible_draws }
}

/// Tallies draws of tuples.
pub fn tally<I: IntoIterator<Item = Vec<Atom>>>(draws: I) -> BTreeMap<Vec<Atom>, u64> {
    let mut out = BTreeMap::new();
    for d in draws {
        *out.entry(d).or_insert(0) += 1;
    }
    out
}
