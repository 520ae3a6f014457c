//! Fluctuation-process tests and multiple mean-shift dating for the
//! intercept-only model.

use serde::{Deserialize, Serialize};

use crate::error::{require_len, Error, Result};
use crate::hypothesis::PBound;
use crate::numeric::{brent_root, interp, ln_norm_cdf, mean, norm_cdf, sd};
use crate::series::MonthlySeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProcessType {
    #[serde(rename = "OLS-CUSUM")]
    OlsCusum,
    #[serde(rename = "OLS-MOSUM")]
    OlsMosum,
    #[serde(rename = "Rec-CUSUM")]
    RecCusum,
    #[serde(rename = "Rec-MOSUM")]
    RecMosum,
}

impl ProcessType {
    pub const ALL: [ProcessType; 4] = [
        ProcessType::OlsCusum,
        ProcessType::OlsMosum,
        ProcessType::RecCusum,
        ProcessType::RecMosum,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ProcessType::OlsCusum => "OLS-CUSUM",
            ProcessType::OlsMosum => "OLS-MOSUM",
            ProcessType::RecCusum => "Rec-CUSUM",
            ProcessType::RecMosum => "Rec-MOSUM",
        }
    }

    fn is_mosum(self) -> bool {
        matches!(self, ProcessType::OlsMosum | ProcessType::RecMosum)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfpResult {
    pub process_type: ProcessType,
    pub path: Vec<f64>,
    pub statistic: f64,
    pub p_value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_bound: Option<PBound>,
    pub bandwidth: f64,
}

impl EfpResult {
    /// Sup-functional recomputed from the stored path.
    pub fn statistic_from_path(&self) -> f64 {
        let n = self.path.len().saturating_sub(1).max(1) as f64;
        self.path
            .iter()
            .enumerate()
            .map(|(j, v)| match self.process_type {
                ProcessType::RecCusum => v.abs() / (1.0 + 2.0 * j as f64 / n),
                _ => v.abs(),
            })
            .fold(0.0, f64::max)
    }
}

const MOSUM_H: [f64; 10] = [0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.45, 0.50];
const MOSUM_ALPHA: [f64; 4] = [0.10, 0.05, 0.025, 0.01];

// Upper quantiles (0.90, 0.95, 0.975, 0.99) of sup |B(t+h) - B(t)| by bandwidth,
// simulated on a 2000-point grid with 40000 replications.
const MOSUM_BRIDGE: [[f64; 4]; 10] = [
    [0.7548, 0.8009, 0.8427, 0.8920],
    [0.9824, 1.0516, 1.1137, 1.1856],
    [1.1234, 1.2093, 1.2848, 1.3780],
    [1.2165, 1.3176, 1.4078, 1.5213],
    [1.2840, 1.3930, 1.4913, 1.6020],
    [1.3275, 1.4461, 1.5533, 1.6782],
    [1.3492, 1.4768, 1.5884, 1.7225],
    [1.3619, 1.4947, 1.6155, 1.7627],
    [1.3620, 1.4981, 1.6241, 1.7667],
    [1.3578, 1.4965, 1.6148, 1.7580],
];

// Same for sup |W(t+h) - W(t)| with W standard Brownian motion.
const MOSUM_BM: [[f64; 4]; 10] = [
    [0.7719, 0.8187, 0.8612, 0.9143],
    [1.0259, 1.1008, 1.1672, 1.2484],
    [1.2016, 1.2965, 1.3821, 1.4904],
    [1.3377, 1.4499, 1.5523, 1.6746],
    [1.4483, 1.5743, 1.6925, 1.8236],
    [1.5390, 1.6793, 1.8103, 1.9737],
    [1.6159, 1.7813, 1.9247, 2.0909],
    [1.6785, 1.8581, 2.0151, 2.2011],
    [1.7350, 1.9258, 2.0931, 2.2940],
    [1.7803, 1.9804, 2.1609, 2.3698],
];

fn mosum_p_value(stat: f64, bandwidth: f64, table: &[[f64; 4]; 10]) -> (f64, Option<PBound>) {
    let crit: Vec<f64> = (0..4)
        .map(|c| {
            let col: Vec<f64> = table.iter().map(|r| r[c]).collect();
            interp(bandwidth, &MOSUM_H, &col)
        })
        .collect();
    crate::hypothesis::table_p_value(stat, &crit, &MOSUM_ALPHA)
}

/// P(sup |Brownian bridge| > x).
pub fn bridge_sup_p_value(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let mut p = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * x * x).exp();
        p += if k % 2 == 1 { term } else { -term };
        if term < 1e-300 {
            break;
        }
    }
    (2.0 * p).clamp(0.0, 1.0)
}

/// P(sup |W(t)| / (1 + 2t) > x), the linear-boundary crossing probability.
pub fn rec_cusum_p_value(x: f64) -> f64 {
    (2.0 * (1.0 - norm_cdf(3.0 * x) + (-4.0 * x * x).exp() * norm_cdf(x))).clamp(0.0, 1.0)
}

fn cusum_path(e: &[f64], sigma: f64) -> Vec<f64> {
    let scale = sigma * (e.len() as f64).sqrt();
    std::iter::once(0.0)
        .chain(e.iter().scan(0.0, |s, v| {
            *s += v;
            Some(*s)
        }))
        .map(|s| s / scale)
        .collect()
}

fn mosum_path(e: &[f64], sigma: f64, bandwidth: f64) -> Result<Vec<f64>> {
    let n = e.len();
    let nh = (bandwidth * n as f64).floor() as usize;
    if nh == 0 {
        return Err(Error::Parameter(format!(
            "bandwidth {bandwidth} gives an empty MOSUM window for {n} residuals"
        )));
    }
    let c: Vec<f64> = std::iter::once(0.0)
        .chain(e.iter().scan(0.0, |s, v| {
            *s += v;
            Some(*s)
        }))
        .collect();
    let scale = sigma * (n as f64).sqrt();
    Ok((nh..=n).map(|j| (c[j] - c[j - nh]) / scale).collect())
}

/// Standardized one-step-ahead prediction errors of the running mean.
pub fn recursive_residuals(y: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(y.len().saturating_sub(1));
    let mut sum = y[0];
    for (t, v) in y.iter().enumerate().skip(1) {
        let tf = t as f64;
        out.push((v - sum / tf) * (tf / (tf + 1.0)).sqrt());
        sum += v;
    }
    out
}

pub fn efp_test(series: &MonthlySeries, process: ProcessType, bandwidth: f64) -> Result<EfpResult> {
    efp_values(&series.values, process, bandwidth)
}

pub fn efp_values(y: &[f64], process: ProcessType, bandwidth: f64) -> Result<EfpResult> {
    require_len(y.len(), 40)?;
    if !(bandwidth > 0.0 && bandwidth < 0.5) {
        return Err(Error::Parameter(format!(
            "MOSUM bandwidth {bandwidth} outside (0, 0.5)"
        )));
    }
    let (resid, sigma) = match process {
        ProcessType::OlsCusum | ProcessType::OlsMosum => {
            let m = mean(y);
            let e: Vec<f64> = y.iter().map(|v| v - m).collect();
            let s = sd(y);
            (e, s)
        }
        ProcessType::RecCusum | ProcessType::RecMosum => {
            let w = recursive_residuals(y);
            let s = sd(&w);
            (w, s)
        }
    };
    if !(sigma > 0.0) {
        return Err(Error::Degenerate("fluctuation process of a constant series".into()));
    }
    let path = if process.is_mosum() {
        mosum_path(&resid, sigma, bandwidth)?
    } else {
        cusum_path(&resid, sigma)
    };
    let mut out = EfpResult {
        process_type: process,
        path,
        statistic: 0.0,
        p_value: 1.0,
        p_bound: None,
        bandwidth,
    };
    out.statistic = out.statistic_from_path();
    let (p, bound) = match process {
        ProcessType::OlsCusum => (bridge_sup_p_value(out.statistic), None),
        ProcessType::RecCusum => (rec_cusum_p_value(out.statistic), None),
        ProcessType::OlsMosum => mosum_p_value(out.statistic, bandwidth, &MOSUM_BRIDGE),
        ProcessType::RecMosum => mosum_p_value(out.statistic, bandwidth, &MOSUM_BM),
    };
    out.p_value = p;
    out.p_bound = bound;
    Ok(out)
}

pub fn efp_all(series: &MonthlySeries, bandwidth: f64) -> Result<Vec<EfpResult>> {
    ProcessType::ALL
        .iter()
        .map(|p| efp_test(series, *p, bandwidth))
        .collect()
}

// ------------------------------------------------------------ breakpoints

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BreakInterval {
    pub lower_index: usize,
    pub index: usize,
    pub upper_index: usize,
    pub lower: f64,
    pub point: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BreakpointSet {
    pub chosen_m: usize,
    pub break_indices: Vec<usize>,
    pub break_dates: Vec<f64>,
    pub conf_intervals: Vec<BreakInterval>,
    pub rss_by_m: Vec<f64>,
    pub bic_by_m: Vec<f64>,
    /// Optimal partition for every m, as last indices of all but the final segment.
    pub breaks_by_m: Vec<Vec<usize>>,
    pub min_segment: usize,
}

/// Residual sum of squares of constant-mean segments via prefix sums.
pub struct SegmentCost {
    sum: Vec<f64>,
    sum_sq: Vec<f64>,
}

impl SegmentCost {
    pub fn new(y: &[f64]) -> Self {
        let shift = mean(y);
        let mut sum = vec![0.0; y.len() + 1];
        let mut sum_sq = vec![0.0; y.len() + 1];
        for (i, v) in y.iter().enumerate() {
            let c = v - shift;
            sum[i + 1] = sum[i] + c;
            sum_sq[i + 1] = sum_sq[i] + c * c;
        }
        SegmentCost { sum, sum_sq }
    }

    /// RSS of y[first..=last].
    pub fn rss(&self, first: usize, last: usize) -> f64 {
        let m = (last + 1 - first) as f64;
        let s = self.sum[last + 1] - self.sum[first];
        (self.sum_sq[last + 1] - self.sum_sq[first] - s * s / m).max(0.0)
    }
}

/// BIC of an m-break mean-shift model: m+1 means, m break dates and a variance.
pub fn bic(rss: f64, n: usize, m: usize) -> f64 {
    let nf = n as f64;
    nf * (rss / nf).ln() + nf * (1.0 + (2.0 * std::f64::consts::PI).ln())
        + nf.ln() * (2 * m + 2) as f64
}

/// Exact minimum-RSS partitions for 0..=max_breaks breaks with segments of
/// at least `h` points. Returns (rss, breaks) per m.
pub fn optimal_partitions(y: &[f64], h: usize, max_breaks: usize) -> Result<Vec<(f64, Vec<usize>)>> {
    let n = y.len();
    if h < 2 {
        return Err(Error::Parameter("minimum segment length must be at least 2".into()));
    }
    if (max_breaks + 1) * h > n {
        return Err(Error::Parameter(format!(
            "{max_breaks} breaks with segments of {h} need {} points, have {n}",
            (max_breaks + 1) * h
        )));
    }
    let cost = SegmentCost::new(y);
    let mut dp = vec![vec![f64::INFINITY; n]; max_breaks + 1];
    let mut arg = vec![vec![usize::MAX; n]; max_breaks + 1];
    for j in h - 1..n {
        dp[0][j] = cost.rss(0, j);
    }
    for m in 1..=max_breaks {
        for j in (m + 1) * h - 1..n {
            let mut best = f64::INFINITY;
            let mut best_b = usize::MAX;
            for b in m * h - 1..=j - h {
                let v = dp[m - 1][b] + cost.rss(b + 1, j);
                if v < best {
                    best = v;
                    best_b = b;
                }
            }
            dp[m][j] = best;
            arg[m][j] = best_b;
        }
    }
    Ok((0..=max_breaks)
        .map(|m| {
            let mut breaks = Vec::with_capacity(m);
            let mut j = n - 1;
            for k in (1..=m).rev() {
                let b = arg[k][j];
                breaks.push(b);
                j = b;
            }
            breaks.reverse();
            (dp[m][n - 1], breaks)
        })
        .collect())
}

pub fn breakpoints(series: &MonthlySeries, min_seg_frac: f64, max_breaks: usize) -> Result<BreakpointSet> {
    let y = &series.values;
    if !(min_seg_frac > 0.0 && min_seg_frac < 0.5) {
        return Err(Error::Parameter(format!(
            "minimum segment fraction {min_seg_frac} outside (0, 0.5)"
        )));
    }
    let h = (min_seg_frac * y.len() as f64).floor() as usize;
    if h < 2 {
        return Err(Error::InsufficientData {
            needed: (2.0 / min_seg_frac).ceil() as usize,
            got: y.len(),
        });
    }
    let parts = optimal_partitions(y, h, max_breaks)?;
    let rss_by_m: Vec<f64> = parts.iter().map(|(r, _)| *r).collect();
    let bic_by_m: Vec<f64> = rss_by_m
        .iter()
        .enumerate()
        .map(|(m, r)| bic(*r, y.len(), m))
        .collect();
    let chosen_m = bic_by_m
        .iter()
        .enumerate()
        .fold(0, |best, (m, b)| if *b < bic_by_m[best] { m } else { best });
    let break_indices = parts[chosen_m].1.clone();
    let break_dates = break_indices
        .iter()
        .map(|&b| series.decimal_year(b))
        .collect::<Result<Vec<_>>>()?;
    let mut set = BreakpointSet {
        chosen_m,
        break_indices,
        break_dates,
        conf_intervals: Vec::new(),
        rss_by_m,
        bic_by_m,
        breaks_by_m: parts.into_iter().map(|(_, b)| b).collect(),
        min_segment: h,
    };
    set.conf_intervals = break_confint(series, &set, 0.95)?;
    Ok(set)
}

// ----------------------------------------------------- break-date intervals

/// CDF of the location of the maximum of a two-sided Brownian motion with
/// drift, for the heteroskedastic mean-shift case (`xi` = ratio of regressor
/// second moments, `phi` = ratio of variances after/before the break).
pub fn break_argmax_cdf(x: f64, xi: f64, phi: f64) -> f64 {
    if x < 0.0 {
        argmax_left_tail(-x, xi, phi)
    } else if x > 0.0 {
        1.0 - argmax_left_tail(x * xi * xi / phi, 1.0 / xi, 1.0 / phi)
    } else {
        argmax_left_tail(0.0, xi, phi)
    }
}

fn argmax_left_tail(a: f64, xi: f64, phi: f64) -> f64 {
    let frac = xi / phi;
    let c = phi / xi * (phi + 2.0 * xi) / (phi + xi);
    let k = (phi + 2.0 * xi).powi(2) / ((phi + xi) * xi);
    if a == 0.0 {
        return 0.5 * (k - 2.0 - c);
    }
    let ln2pi = (2.0 * std::f64::consts::PI).ln();
    let first = (0.5 * a.ln() - a / 8.0 - 0.5 * ln2pi).exp();
    let second = c * (frac * (1.0 + frac) * a / 2.0 + ln_norm_cdf(-(0.5 + frac) * a.sqrt())).exp();
    let third = (a / 2.0 - 2.0 + k) * norm_cdf(-a.sqrt() / 2.0);
    -first - second + third
}

/// Per-break confidence intervals from the asymptotic break-date distribution.
pub fn break_confint(series: &MonthlySeries, set: &BreakpointSet, level: f64) -> Result<Vec<BreakInterval>> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::Parameter(format!("confidence level {level} outside (0, 1)")));
    }
    let y = &series.values;
    let alpha = 1.0 - level;
    let mut bounds = vec![0usize];
    bounds.extend(set.break_indices.iter().map(|b| b + 1));
    bounds.push(y.len());
    let mut out = Vec::with_capacity(set.break_indices.len());
    for (i, &b) in set.break_indices.iter().enumerate() {
        let before = &y[bounds[i]..bounds[i + 1]];
        let after = &y[bounds[i + 1]..bounds[i + 2]];
        let delta = mean(after) - mean(before);
        let v1 = crate::numeric::pvariance(before);
        let v2 = crate::numeric::pvariance(after);
        let scale = (mean(before).abs() + mean(after).abs()).max(1.0);
        if delta.abs() <= 1e-12 * scale {
            return Err(Error::Degenerate(format!(
                "no mean shift at break {} (index {b})",
                i + 1
            )));
        }
        let (lo, hi) = if v1 <= 0.0 && v2 <= 0.0 {
            (b, b)
        } else {
            // a noiseless side carries no date uncertainty of its own
            let v1 = v1.max(v2 * 1e-12);
            let v2 = v2.max(v1 * 1e-12);
            let phi = v2 / v1;
            let cdf = |x: f64| break_argmax_cdf(x, 1.0, phi);
            let upper = brent_root(|x| cdf(x) - (1.0 - alpha / 2.0), 1e-9, 1e4, 1e-10)?;
            let lower = brent_root(|x| cdf(x) - alpha / 2.0, -1e4, -1e-9, 1e-10)?;
            let unit = v1 / (delta * delta);
            let up = (upper * unit).ceil() as i64;
            let dn = (lower * unit).floor() as i64;
            let lo = (b as i64 - up).max(0) as usize;
            let hi = ((b as i64 - dn) as usize).min(y.len() - 1);
            (lo, hi)
        };
        out.push(BreakInterval {
            lower_index: lo,
            index: b,
            upper_index: hi,
            lower: series.decimal_year(lo)?,
            point: series.decimal_year(b)?,
            upper: series.decimal_year(hi)?,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn argmax_cdf_is_half_at_zero_when_symmetric() {
        assert!((break_argmax_cdf(0.0, 1.0, 1.0) - 0.5).abs() < 1e-12);
        assert!((break_argmax_cdf(-1e-9, 1.0, 1.0) - 0.5).abs() < 1e-4);
    }

    #[test]
    fn argmax_cdf_is_monotone() {
        let mut prev = 0.0;
        for i in -400..=400 {
            let c = break_argmax_cdf(i as f64 * 0.25, 1.0, 1.7);
            assert!(c >= prev - 1e-12, "at {}", i as f64 * 0.25);
            prev = c;
        }
        assert!(prev > 0.999);
    }

    #[test]
    fn bridge_p_value_limits() {
        assert_eq!(bridge_sup_p_value(0.0), 1.0);
        assert!((bridge_sup_p_value(1.358) - 0.05).abs() < 1e-3);
        assert!(bridge_sup_p_value(4.58) < 2.2e-16);
    }

    #[test]
    fn segment_cost_matches_direct() {
        let y = [1.0, 4.0, 2.0, 8.0, 5.0];
        let c = SegmentCost::new(&y);
        let seg = &y[1..4];
        let m = seg.iter().sum::<f64>() / 3.0;
        let direct: f64 = seg.iter().map(|v| (v - m) * (v - m)).sum();
        assert!((c.rss(1, 3) - direct).abs() < 1e-12);
    }

    #[test]
    fn infeasible_break_count() {
        assert!(optimal_partitions(&[0.0; 50], 10, 5).is_err());
    }
}
