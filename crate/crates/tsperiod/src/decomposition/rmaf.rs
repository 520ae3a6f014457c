//! Refined moving-average filter: seasonal means around a boundary-aware
//! 2 x period pilot, then a window-optimised moving average for the trend.

use crate::error::Result;
use crate::numeric::{mean, ols};

/// Centered 2 x period (or plain odd) moving average whose kernel is
/// truncated and renormalised near the ends, so every index has a value.
pub fn boundary_ma(x: &[f64], period: usize) -> Vec<f64> {
    let n = x.len();
    let half = period / 2;
    let weights: Vec<f64> = if period % 2 == 0 {
        (0..=period)
            .map(|i| if i == 0 || i == period { 0.5 } else { 1.0 })
            .collect()
    } else {
        vec![1.0; period]
    };
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half).min(n - 1);
            let (mut s, mut w) = (0.0, 0.0);
            for t in lo..=hi {
                let k = t + half - i;
                s += weights[k] * x[t];
                w += weights[k];
            }
            s / w
        })
        .collect()
}

/// Period-position means of `x - pilot`, centered to sum to zero over a cycle
/// and tiled to full length.
pub fn seasonal_profile(x: &[f64], pilot: &[f64], period: usize) -> Vec<f64> {
    let mut sums = vec![0.0; period];
    let mut counts = vec![0.0; period];
    for (i, (a, b)) in x.iter().zip(pilot).enumerate() {
        sums[i % period] += a - b;
        counts[i % period] += 1.0;
    }
    let means: Vec<f64> = sums.iter().zip(&counts).map(|(s, c)| s / c).collect();
    let centre = mean(&means);
    (0..x.len()).map(|i| means[i % period] - centre).collect()
}

/// Moving average of half-width `q`, averaging whatever part of the window
/// lies inside the series.
pub fn truncated_ma(x: &[f64], q: usize) -> Vec<f64> {
    let n = x.len();
    let mut prefix = vec![0.0; n + 1];
    for (i, v) in x.iter().enumerate() {
        prefix[i + 1] = prefix[i] + v;
    }
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(q);
            let hi = (i + q).min(n - 1);
            (prefix[hi + 1] - prefix[lo]) / (hi + 1 - lo) as f64
        })
        .collect()
}

/// Half-width minimising the asymptotic MSE of a uniform-kernel smoother,
/// with curvature and noise taken from a cubic pilot fit.
pub fn plugin_half_width(x: &[f64], period: usize) -> Result<usize> {
    let n = x.len();
    let nf = n as f64;
    let u: Vec<f64> = (1..=n).map(|t| t as f64 / nf).collect();
    let cols = vec![
        vec![1.0; n],
        u.clone(),
        u.iter().map(|v| v * v).collect(),
        u.iter().map(|v| v * v * v).collect(),
    ];
    let fit = ols(&cols, x)?;
    let curvature: f64 = u
        .iter()
        .map(|v| (2.0 * fit.coef[2] + 6.0 * fit.coef[3] * v).powi(2))
        .sum::<f64>()
        / nf;
    let noise = fit.ssr / nf;
    let max_q = (n - 1) / 2;
    let min_q = (period / 2).max(1).min(max_q);
    if !(curvature > 0.0) || !(noise > 0.0) {
        return Ok(if noise > 0.0 { max_q } else { min_q });
    }
    let q = ((4.5 * noise / curvature).powf(0.2) * nf.powf(0.8)).round() as usize;
    Ok(q.clamp(min_q, max_q))
}
