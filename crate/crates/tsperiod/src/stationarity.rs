//! Unit-root tests (ADF, KPSS, Phillips-Perron) and long-memory estimators.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{require_len, Error, Result};
use crate::hypothesis::{table_p_value, PBound};
use crate::numeric::{bartlett_lrv, brent_min, interp, mean, ols, sd};
use crate::series::MonthlySeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Deterministic {
    #[serde(rename = "none")]
    None,
    #[serde(rename = "drift")]
    Drift,
    #[serde(rename = "drift+trend")]
    Trend,
}

impl Deterministic {
    pub const ALL: [Deterministic; 3] = [Deterministic::None, Deterministic::Drift, Deterministic::Trend];

    pub fn label(self) -> &'static str {
        match self {
            Deterministic::None => "none",
            Deterministic::Drift => "drift",
            Deterministic::Trend => "drift+trend",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitRootRow {
    pub deterministic: Deterministic,
    pub lag: usize,
    pub statistic: f64,
    pub p_value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_bound: Option<PBound>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitRootTable {
    pub test_name: String,
    pub rows: Vec<UnitRootRow>,
}

impl UnitRootTable {
    pub fn get(&self, deterministic: Deterministic, lag: usize) -> Option<&UnitRootRow> {
        self.rows
            .iter()
            .find(|r| r.deterministic == deterministic && r.lag == lag)
    }

    /// Rows of one deterministic type in lag order.
    pub fn of_type(&self, deterministic: Deterministic) -> Vec<&UnitRootRow> {
        self.rows
            .iter()
            .filter(|r| r.deterministic == deterministic)
            .collect()
    }
}

// Response-surface tables: sample sizes, then per-quantile rows.
const TABLE_N: [f64; 6] = [25.0, 50.0, 100.0, 250.0, 500.0, 100000.0];
const TABLE_P: [f64; 9] = [0.01, 0.025, 0.05, 0.10, 0.50, 0.90, 0.95, 0.975, 0.99];

type Surface = [[f64; 6]; 9];

const fn flat(v: f64) -> [f64; 6] {
    [v; 6]
}

const ADF_NONE: Surface = [
    [-2.66, -2.62, -2.60, -2.58, -2.58, -2.58],
    [-2.26, -2.25, -2.24, -2.23, -2.23, -2.23],
    flat(-1.95),
    [-1.60, -1.61, -1.61, -1.62, -1.62, -1.62],
    flat(-0.50),
    [0.92, 0.91, 0.90, 0.89, 0.89, 0.89],
    [1.33, 1.31, 1.29, 1.29, 1.28, 1.28],
    [1.70, 1.66, 1.64, 1.63, 1.63, 1.62],
    [2.16, 2.08, 2.03, 2.01, 2.00, 2.00],
];

const ADF_DRIFT: Surface = [
    [-3.75, -3.58, -3.51, -3.46, -3.44, -3.43],
    [-3.33, -3.22, -3.17, -3.14, -3.13, -3.12],
    [-3.00, -2.93, -2.89, -2.88, -2.87, -2.86],
    [-2.63, -2.60, -2.58, -2.57, -2.57, -2.57],
    flat(-1.57),
    [-0.37, -0.40, -0.42, -0.42, -0.43, -0.44],
    [0.00, -0.03, -0.05, -0.06, -0.07, -0.07],
    [0.34, 0.29, 0.26, 0.24, 0.24, 0.23],
    [0.72, 0.66, 0.63, 0.62, 0.61, 0.60],
];

const ADF_TREND: Surface = [
    [-4.38, -4.15, -4.04, -3.99, -3.98, -3.96],
    [-3.95, -3.80, -3.73, -3.69, -3.68, -3.66],
    [-3.60, -3.50, -3.45, -3.43, -3.42, -3.41],
    [-3.24, -3.18, -3.15, -3.13, -3.13, -3.12],
    flat(-2.18),
    [-1.14, -1.19, -1.22, -1.23, -1.24, -1.25],
    [-0.80, -0.87, -0.90, -0.92, -0.93, -0.94],
    [-0.50, -0.58, -0.62, -0.64, -0.65, -0.66],
    [-0.15, -0.24, -0.28, -0.31, -0.32, -0.33],
];

const PP_NONE: Surface = [
    [-11.9, -12.9, -13.3, -13.6, -13.7, -13.8],
    [-9.3, -9.9, -10.2, -10.3, -10.4, -10.5],
    [-7.3, -7.7, -7.9, -8.0, -8.0, -8.1],
    [-5.3, -5.5, -5.6, -5.7, -5.7, -5.7],
    flat(-0.86),
    [1.01, 0.97, 0.95, 0.93, 0.93, 0.93],
    [1.40, 1.35, 1.31, 1.28, 1.28, 1.28],
    [1.79, 1.70, 1.65, 1.62, 1.61, 1.60],
    [2.28, 2.16, 2.09, 2.04, 2.04, 2.03],
];

const PP_DRIFT: Surface = [
    [-17.2, -18.9, -19.8, -20.3, -20.5, -20.7],
    [-14.6, -15.7, -16.3, -16.6, -16.8, -16.9],
    [-12.5, -13.3, -13.7, -14.0, -14.0, -14.1],
    [-10.2, -10.7, -11.0, -11.2, -11.2, -11.3],
    flat(-4.40),
    [-0.76, -0.81, -0.83, -0.84, -0.84, -0.85],
    [0.01, -0.07, -0.10, -0.12, -0.13, -0.13],
    [0.65, 0.53, 0.47, 0.43, 0.42, 0.41],
    [1.40, 1.22, 1.14, 1.09, 1.06, 1.04],
];

const PP_TREND: Surface = [
    [-22.5, -25.7, -27.4, -28.4, -28.9, -29.5],
    [-19.9, -22.4, -23.6, -24.4, -24.8, -25.1],
    [-17.9, -19.8, -20.7, -21.3, -21.5, -21.8],
    [-15.6, -16.8, -17.5, -18.0, -18.1, -18.3],
    flat(-9.05),
    [-3.66, -3.71, -3.74, -3.75, -3.76, -3.77],
    [-2.51, -2.60, -2.62, -2.64, -2.65, -2.66],
    [-1.53, -1.66, -1.73, -1.78, -1.78, -1.79],
    [-0.43, -0.65, -0.75, -0.82, -0.84, -0.87],
];

// Without deterministic terms the partial-sum limit is integrated Brownian motion.
const KPSS_NONE: [f64; 4] = [1.196, 1.656, 2.135, 2.787];
const KPSS_LEVEL: [f64; 4] = [0.347, 0.463, 0.574, 0.739];
const KPSS_TREND: [f64; 4] = [0.119, 0.146, 0.176, 0.216];
const KPSS_P: [f64; 4] = [0.10, 0.05, 0.025, 0.01];

fn surface_p_value(surface: &Surface, n: usize, stat: f64) -> (f64, Option<PBound>) {
    let crit: Vec<f64> = surface
        .iter()
        .map(|row| interp(n as f64, &TABLE_N, row))
        .collect();
    table_p_value(stat, &crit, &TABLE_P)
}

fn check_finite(x: &[f64]) -> Result<()> {
    if x.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Parameter("series contains non-finite values".into()))
    }
}

/// ADF t-statistic for one (type, lag) cell.
pub fn adf_statistic(x: &[f64], deterministic: Deterministic, lag: usize) -> Result<f64> {
    let z: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let n = z.len();
    if n <= lag + 3 {
        return Err(Error::InsufficientData {
            needed: lag + 5,
            got: x.len(),
        });
    }
    let y = z[lag..].to_vec();
    let level = x[lag..n].to_vec();
    let mut cols = Vec::new();
    let j = match deterministic {
        Deterministic::None => 0,
        _ => 1,
    };
    if deterministic != Deterministic::None {
        cols.push(vec![1.0; y.len()]);
    }
    cols.push(level);
    if deterministic == Deterministic::Trend {
        cols.push((lag + 1..=n).map(|t| t as f64).collect());
    }
    for k in 1..=lag {
        cols.push(z[lag - k..n - k].to_vec());
    }
    let fit = ols(&cols, &y).map_err(|e| {
        e.context(format!("ADF regression ({}, lag {lag})", deterministic.label()))
    })?;
    Ok(fit.t_stat(j))
}

pub fn adf_test(series: &MonthlySeries, max_lag: usize) -> Result<UnitRootTable> {
    adf_values(&series.values, max_lag)
}

pub fn adf_values(x: &[f64], max_lag: usize) -> Result<UnitRootTable> {
    check_finite(x)?;
    require_len(x.len(), max_lag + 11)?;
    let n = x.len() - 1;
    let mut rows = Vec::new();
    for det in Deterministic::ALL {
        let surface = match det {
            Deterministic::None => &ADF_NONE,
            Deterministic::Drift => &ADF_DRIFT,
            Deterministic::Trend => &ADF_TREND,
        };
        for lag in 0..=max_lag {
            let stat = adf_statistic(x, det, lag)?;
            let (p, bound) = surface_p_value(surface, n, stat);
            rows.push(UnitRootRow {
                deterministic: det,
                lag,
                statistic: stat,
                p_value: p,
                p_bound: bound,
            });
        }
    }
    Ok(UnitRootTable {
        test_name: "Augmented Dickey-Fuller".into(),
        rows,
    })
}

/// Regress x_t on x_{t-1} plus deterministic terms (t = 2..n).
fn lag1_regression(x: &[f64], det: Deterministic, trend: &[f64]) -> Result<crate::numeric::Ols> {
    let y = x[1..].to_vec();
    let mut cols = Vec::new();
    if det != Deterministic::None {
        cols.push(vec![1.0; y.len()]);
    }
    cols.push(x[..x.len() - 1].to_vec());
    if det == Deterministic::Trend {
        cols.push(trend.to_vec());
    }
    ols(&cols, &y).map_err(|e| e.context(format!("lag-1 regression ({})", det.label())))
}

pub fn kpss_test(series: &MonthlySeries) -> Result<UnitRootTable> {
    kpss_values(&series.values)
}

pub fn kpss_values(x: &[f64]) -> Result<UnitRootTable> {
    check_finite(x)?;
    require_len(x.len(), 30)?;
    let n = x.len() - 1;
    let lag = (3.0 * (n as f64).sqrt() / 13.0) as usize;
    let trend: Vec<f64> = (2..=x.len()).map(|t| t as f64).collect();
    let mut rows = Vec::new();
    for det in Deterministic::ALL {
        let fit = lag1_regression(x, det, &trend)?;
        let e = &fit.resid;
        let lrv = bartlett_lrv(e, lag);
        if !(lrv > 0.0) {
            return Err(Error::Degenerate("KPSS long-run variance is zero".into()));
        }
        let mut s = 0.0;
        let mut ss = 0.0;
        for v in e {
            s += v;
            ss += s * s;
        }
        let stat = ss / ((n * n) as f64 * lrv);
        let crit = match det {
            Deterministic::None => &KPSS_NONE,
            Deterministic::Drift => &KPSS_LEVEL,
            Deterministic::Trend => &KPSS_TREND,
        };
        let (p, bound) = table_p_value(stat, crit, &KPSS_P);
        rows.push(UnitRootRow {
            deterministic: det,
            lag,
            statistic: stat,
            p_value: p,
            p_bound: bound,
        });
    }
    Ok(UnitRootTable {
        test_name: "KPSS".into(),
        rows,
    })
}

pub fn pp_test(series: &MonthlySeries) -> Result<UnitRootTable> {
    pp_values(&series.values)
}

/// Phillips-Perron Z(alpha) with a Bartlett long-run variance.
pub fn pp_values(x: &[f64]) -> Result<UnitRootTable> {
    check_finite(x)?;
    require_len(x.len(), 30)?;
    let n = x.len() - 1;
    let nf = n as f64;
    let lag = (4.0 * (nf / 100.0).powf(0.25)) as usize;
    let trend: Vec<f64> = (1..=n).map(|t| t as f64 - nf / 2.0).collect();
    let mut rows = Vec::new();
    for det in Deterministic::ALL {
        let fit = lag1_regression(x, det, &trend)?;
        let j = if det == Deterministic::None { 0 } else { 1 };
        let gamma0 = fit.ssr / nf;
        let lrv = bartlett_lrv(&fit.resid, lag);
        let stat = nf * (fit.coef[j] - 1.0) - 0.5 * nf * nf * fit.xtx_inv[(j, j)] * (lrv - gamma0);
        let surface = match det {
            Deterministic::None => &PP_NONE,
            Deterministic::Drift => &PP_DRIFT,
            Deterministic::Trend => &PP_TREND,
        };
        let (p, bound) = surface_p_value(surface, n, stat);
        rows.push(UnitRootRow {
            deterministic: det,
            lag,
            statistic: stat,
            p_value: p,
            p_bound: bound,
        });
    }
    Ok(UnitRootTable {
        test_name: "Phillips-Perron".into(),
        rows,
    })
}

// ------------------------------------------------------------- long memory

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LongMemoryEstimates {
    pub gph_d: f64,
    pub bandwidth_m: usize,
    pub rs_simple: f64,
    pub rs_corrected: f64,
    pub rs_empirical: f64,
    pub rs_corrected_empirical: f64,
    pub rs_theoretical: f64,
    pub ml_hurst: f64,
}

pub fn default_gph_bandwidth(n: usize) -> usize {
    (1.0 + (n as f64).powf(0.8)).floor() as usize
}

/// Log-periodogram regression estimate of the fractional order d.
pub fn gph_estimate(x: &[f64], m: Option<usize>) -> Result<(f64, usize)> {
    check_finite(x)?;
    let n = x.len();
    require_len(n, 8)?;
    let m = m.unwrap_or_else(|| default_gph_bandwidth(n));
    if m < 2 || 2 * m >= n {
        return Err(Error::Parameter(format!(
            "GPH bandwidth {m} must satisfy 2 <= m < n/2 (n = {n})"
        )));
    }
    let xc = crate::numeric::demean(x);
    if xc.iter().all(|v| *v == 0.0) {
        return Err(Error::Degenerate("GPH on a constant series".into()));
    }
    let mut regressor = Vec::with_capacity(m);
    let mut log_i = Vec::with_capacity(m);
    for j in 1..=m {
        let lambda = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
        let (mut re, mut im) = (0.0, 0.0);
        for (t, v) in xc.iter().enumerate() {
            let a = lambda * t as f64;
            re += v * a.cos();
            im -= v * a.sin();
        }
        let periodogram = (re * re + im * im) / (2.0 * std::f64::consts::PI * n as f64);
        if !(periodogram > 0.0) {
            return Err(Error::Degenerate(format!("zero periodogram ordinate at j = {j}")));
        }
        log_i.push(periodogram.ln());
        regressor.push((4.0 * (lambda / 2.0).sin().powi(2)).ln());
    }
    let fit = ols(&[vec![1.0; m], regressor], &log_i)?;
    Ok((-fit.coef[1], m))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RescaledRange {
    pub rs_simple: f64,
    pub rs_corrected: f64,
    pub rs_empirical: f64,
    pub rs_corrected_empirical: f64,
    pub rs_theoretical: f64,
    /// Length actually analysed and the block sizes used.
    pub used_length: usize,
    pub block_sizes: Vec<usize>,
}

const MIN_BLOCK: usize = 50;

fn divisors_in(n: usize, lo: usize, hi: usize) -> Vec<usize> {
    (lo..=hi).filter(|d| n % d == 0).collect()
}

fn rescaled_range(block: &[f64]) -> f64 {
    let m = mean(block);
    let mut s = 0.0;
    let (mut lo, mut hi) = (0.0f64, 0.0f64);
    for v in block {
        s += v - m;
        lo = lo.min(s);
        hi = hi.max(s);
    }
    (hi - lo) / sd(block)
}

/// Anis-Lloyd expected R/S with the Peters small-sample factor.
pub fn expected_rs(n: usize) -> f64 {
    let nf = n as f64;
    let sum: f64 = (1..n).map(|i| ((nf - i as f64) / i as f64).sqrt()).sum();
    let ratio = (nf - 0.5) / nf * sum;
    if n > 340 {
        ratio / (0.5 * std::f64::consts::PI * nf).sqrt()
    } else {
        (ln_gamma(0.5 * (nf - 1.0)) - ln_gamma(0.5 * nf)).exp() * ratio
            / std::f64::consts::PI.sqrt()
    }
}

fn slope(x: &[f64], y: &[f64]) -> f64 {
    let mx = mean(x);
    let my = mean(y);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Rescaled-range Hurst exponents over equal non-overlapping blocks.
///
/// The series is trimmed to the length in `[0.99 n, n]` with the most block
/// sizes of at least 50 points; blocks are those divisors up to half the length.
pub fn hurst_rs(x: &[f64]) -> Result<RescaledRange> {
    check_finite(x)?;
    require_len(x.len(), 64)?;
    let mut x = x.to_vec();
    if x.len() % 2 == 1 {
        let k = x.len();
        x.push((x[k - 2] + x[k - 1]) / 2.0);
    }
    if !(sd(&x) > 0.0) {
        return Err(Error::Degenerate("R/S analysis of a constant series".into()));
    }
    let n = x.len();
    let n0 = ((0.99 * n as f64).floor() as usize).min(n - 1);
    let mut used = n0;
    let mut blocks = divisors_in(n0, MIN_BLOCK, n0 / 2);
    for len in n0 + 1..=n {
        let d = divisors_in(len, MIN_BLOCK, len / 2);
        if d.len() > blocks.len() {
            used = len;
            blocks = d;
        }
    }
    if blocks.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 4 * MIN_BLOCK,
            got: n,
        });
    }
    let x = &x[..used];
    let rs_simple = rescaled_range(x).ln() / (used as f64).ln();

    let mut rs = Vec::with_capacity(blocks.len());
    for &b in &blocks {
        let vals: Vec<f64> = x.chunks_exact(b).map(rescaled_range).collect();
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::Degenerate(format!("constant block of size {b}")));
        }
        rs.push(mean(&vals));
    }
    let ers: Vec<f64> = blocks.iter().map(|&b| expected_rs(b)).collect();
    let log_d: Vec<f64> = blocks.iter().map(|&b| (b as f64).log10()).collect();
    let log_rs: Vec<f64> = rs.iter().map(|v| v.log10()).collect();
    let log_ers: Vec<f64> = ers.iter().map(|v| v.log10()).collect();
    let adjusted: Vec<f64> = blocks
        .iter()
        .zip(rs.iter().zip(&ers))
        .map(|(&b, (r, e))| (r - e + (0.5 * std::f64::consts::PI * b as f64).sqrt()).log10())
        .collect();
    let ratio: Vec<f64> = log_rs.iter().zip(&log_ers).map(|(a, b)| a - b).collect();
    Ok(RescaledRange {
        rs_simple,
        rs_corrected: 0.5 + slope(&log_d, &ratio),
        rs_empirical: slope(&log_d, &log_rs),
        rs_corrected_empirical: slope(&log_d, &adjusted),
        rs_theoretical: slope(&log_d, &log_ers),
        used_length: used,
        block_sizes: blocks,
    })
}

/// Negative profile log-likelihood (up to constants) of fractional noise
/// with order `d`, evaluated exactly by Durbin-Levinson.
fn fd_objective(xc: &[f64], d: f64) -> f64 {
    let n = xc.len();
    let mut gamma = vec![0.0; n];
    gamma[0] = (ln_gamma(1.0 - 2.0 * d) - 2.0 * ln_gamma(1.0 - d)).exp();
    for k in 1..n {
        gamma[k] = gamma[k - 1] * (k as f64 - 1.0 + d) / (k as f64 - d);
    }
    let mut phi: Vec<f64> = Vec::with_capacity(n);
    let mut next = Vec::with_capacity(n);
    let mut v = gamma[0];
    let mut sum_scaled = xc[0] * xc[0] / v;
    let mut sum_log_v = v.ln();
    for t in 1..n {
        let acc: f64 = phi.iter().enumerate().map(|(j, p)| p * gamma[t - 1 - j]).sum();
        let a = (gamma[t] - acc) / v;
        next.clear();
        next.extend((0..t - 1).map(|j| phi[j] - a * phi[t - 2 - j]));
        next.push(a);
        std::mem::swap(&mut phi, &mut next);
        v *= 1.0 - a * a;
        let pred: f64 = phi.iter().enumerate().map(|(j, p)| p * xc[t - 1 - j]).sum();
        let e = xc[t] - pred;
        sum_scaled += e * e / v;
        sum_log_v += v.ln();
    }
    n as f64 * (sum_scaled / n as f64).ln() + sum_log_v
}

pub const ML_D_UPPER: f64 = 0.49999;

/// 0.5 plus the maximum-likelihood fractional order of the demeaned series.
pub fn hurst_ml(x: &[f64]) -> Result<f64> {
    check_finite(x)?;
    require_len(x.len(), 100)?;
    let xc = crate::numeric::demean(x);
    if xc.iter().all(|v| *v == 0.0) {
        return Err(Error::Degenerate("ML Hurst of a constant series".into()));
    }
    let (d, f) = brent_min(|d| fd_objective(&xc, d), 0.0, ML_D_UPPER, 1e-6);
    if !f.is_finite() {
        return Err(Error::Numeric("fractional-noise likelihood did not converge".into()));
    }
    Ok(0.5 + d)
}

pub fn long_memory(series: &MonthlySeries) -> Result<LongMemoryEstimates> {
    let x = &series.values;
    let (gph_d, bandwidth_m) = gph_estimate(x, None)?;
    let rs = hurst_rs(x)?;
    Ok(LongMemoryEstimates {
        gph_d,
        bandwidth_m,
        rs_simple: rs.rs_simple,
        rs_corrected: rs.rs_corrected,
        rs_empirical: rs.rs_empirical,
        rs_corrected_empirical: rs.rs_corrected_empirical,
        rs_theoretical: rs.rs_theoretical,
        ml_hurst: hurst_ml(x)?,
    })
}
