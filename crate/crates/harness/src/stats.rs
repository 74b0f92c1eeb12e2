//! Empirical distribution summaries.

use anyhow::{bail, Result};
use serde::Serialize;

/// Quantile of already sorted data by linear interpolation between order
/// statistics: position `h = (n - 1) p`, value `x[floor h] + (h - floor h)
/// (x[floor h + 1] - x[floor h])`. This is the default estimator of R and
/// NumPy.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of an empty sample");
    assert!((0.0..=1.0).contains(&p), "quantile level {p} outside [0, 1]");
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionSummary {
    #[serde(skip)]
    pub sorted: Vec<f64>,
    pub count: usize,
    pub mean: f64,
    pub median: f64,
    /// The 5th percentile.
    pub p95_likely: f64,
    pub min: f64,
    pub max: f64,
}

impl DistributionSummary {
    pub fn new(samples: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            bail!("cannot summarize an empty sample");
        }
        if let Some(bad) = samples.iter().find(|x| !x.is_finite()) {
            bail!("non-finite sample {bad}");
        }
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mean = sorted.iter().sum::<f64>() / sorted.len() as f64;
        Ok(Self {
            count: sorted.len(),
            mean,
            median: quantile_sorted(&sorted, 0.5),
            p95_likely: quantile_sorted(&sorted, 0.05),
            min: sorted[0],
            max: sorted[sorted.len() - 1],
            sorted,
        })
    }

    pub fn quantile(&self, p: f64) -> f64 {
        quantile_sorted(&self.sorted, p)
    }
}
