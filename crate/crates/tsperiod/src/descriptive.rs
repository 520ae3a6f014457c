//! Summary statistics.

use serde::{Deserialize, Serialize};

use crate::error::{require_len, Result};
use crate::numeric::{mean, quantile_sorted, sorted, t_quantile};
use crate::series::MonthlySeries;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub nobs: usize,
    pub na_count: usize,
    pub minimum: f64,
    pub maximum: f64,
    pub q1: f64,
    pub q3: f64,
    pub mean: f64,
    pub median: f64,
    pub sum: f64,
    pub se_mean: f64,
    pub lcl_mean: f64,
    pub ucl_mean: f64,
    pub variance: f64,
    pub stdev: f64,
    /// `None` when the variance is zero.
    pub skewness: Option<f64>,
    pub kurtosis_excess: Option<f64>,
}

pub fn basic_stats(series: &MonthlySeries) -> Result<SummaryStats> {
    summarize(&series.values)
}

pub fn summarize(x: &[f64]) -> Result<SummaryStats> {
    require_len(x.len(), 2)?;
    let n = x.len() as f64;
    let s = sorted(x);
    let m = mean(x);
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for v in x {
        let d = v - m;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    let variance = m2 / (n - 1.0);
    let stdev = variance.sqrt();
    let (skewness, kurtosis_excess) = if variance > 0.0 {
        // moments normalised by the sample standard deviation
        (
            Some(m3 / n / stdev.powi(3)),
            Some(m4 / n / (variance * variance) - 3.0),
        )
    } else {
        (None, None)
    };
    let se_mean = stdev / n.sqrt();
    let half = t_quantile(0.975, n - 1.0) * se_mean;
    Ok(SummaryStats {
        nobs: x.len(),
        na_count: 0,
        minimum: s[0],
        maximum: s[s.len() - 1],
        q1: quantile_sorted(&s, 0.25),
        q3: quantile_sorted(&s, 0.75),
        mean: m,
        median: quantile_sorted(&s, 0.5),
        sum: x.iter().sum(),
        se_mean,
        lcl_mean: m - half,
        ucl_mean: m + half,
        variance,
        stdev,
        skewness,
        kurtosis_excess,
    })
}
