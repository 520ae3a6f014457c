//! Normality, seasonality and nonlinearity tests.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{require_len, Error, Result};
use crate::hypothesis::TestResult;
use crate::numeric::{
    ar_yule_walker, chi2_sf, default_ar_order_max, f_sf, ln_norm_cdf, mean, norm_cdf, ols, sd,
    sorted, ArFit,
};
use crate::series::MonthlySeries;

// ---------------------------------------------------------------- normality

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalitySuite {
    pub anderson_darling: TestResult,
    pub cramer_von_mises: TestResult,
    pub lilliefors: TestResult,
}

const NORMAL_NULL: &str = "sample drawn from a normal distribution (mean and sd estimated)";

fn standardized_sorted(x: &[f64]) -> Result<Vec<f64>> {
    require_len(x.len(), 8)?;
    let m = mean(x);
    let s = sd(x);
    if !(s > 0.0) {
        return Err(Error::Degenerate("normality test on a constant series".into()));
    }
    Ok(sorted(x).into_iter().map(|v| (v - m) / s).collect())
}

pub fn anderson_darling(x: &[f64]) -> Result<TestResult> {
    let z = standardized_sorted(x)?;
    let n = z.len();
    let nf = n as f64;
    let h: f64 = (0..n)
        .map(|i| (2.0 * i as f64 + 1.0) * (ln_norm_cdf(z[i]) + ln_norm_cdf(-z[n - 1 - i])))
        .sum();
    let a = -nf - h / nf;
    let aa = (1.0 + 0.75 / nf + 2.25 / (nf * nf)) * a;
    let p = if aa < 0.2 {
        1.0 - (-13.436 + 101.14 * aa - 223.73 * aa * aa).exp()
    } else if aa < 0.34 {
        1.0 - (-8.318 + 42.796 * aa - 59.938 * aa * aa).exp()
    } else if aa < 0.6 {
        (0.9177 - 4.279 * aa - 1.38 * aa * aa).exp()
    } else if aa < 10.0 {
        (1.2937 - 5.709 * aa + 0.0186 * aa * aa).exp()
    } else {
        3.7e-24
    };
    Ok(TestResult::new("Anderson-Darling", a, p, NORMAL_NULL))
}

pub fn cramer_von_mises(x: &[f64]) -> Result<TestResult> {
    let z = standardized_sorted(x)?;
    let nf = z.len() as f64;
    let w = 1.0 / (12.0 * nf)
        + z.iter()
            .enumerate()
            .map(|(i, v)| {
                let d = norm_cdf(*v) - (2.0 * i as f64 + 1.0) / (2.0 * nf);
                d * d
            })
            .sum::<f64>();
    let ww = (1.0 + 0.5 / nf) * w;
    let p = if ww < 0.0275 {
        1.0 - (-13.953 + 775.5 * ww - 12542.61 * ww * ww).exp()
    } else if ww < 0.051 {
        1.0 - (-5.903 + 179.546 * ww - 1515.29 * ww * ww).exp()
    } else if ww < 0.092 {
        (0.886 - 31.62 * ww + 10.897 * ww * ww).exp()
    } else if ww < 1.1 {
        (1.111 - 34.242 * ww + 12.832 * ww * ww).exp()
    } else {
        7.37e-10
    };
    Ok(TestResult::new("Cramer-von Mises", w, p, NORMAL_NULL))
}

pub fn lilliefors(x: &[f64]) -> Result<TestResult> {
    let z = standardized_sorted(x)?;
    let n = z.len();
    let nf = n as f64;
    let mut d_plus: f64 = f64::NEG_INFINITY;
    let mut d_minus: f64 = f64::NEG_INFINITY;
    for (i, v) in z.iter().enumerate() {
        let p = norm_cdf(*v);
        d_plus = d_plus.max((i as f64 + 1.0) / nf - p);
        d_minus = d_minus.max(p - i as f64 / nf);
    }
    let d = d_plus.max(d_minus);
    let (kd, nd) = if n <= 100 {
        (d, nf)
    } else {
        (d * (nf / 100.0).powf(0.49), 100.0)
    };
    let mut p = (-7.01256 * kd * kd * (nd + 2.78019) + 2.99587 * kd * (nd + 2.78019).sqrt()
        - 0.122119
        + 0.974598 / nd.sqrt()
        + 1.67997 / nd)
        .exp();
    if p > 0.1 {
        let kk = (nf.sqrt() - 0.01 + 0.85 / nf.sqrt()) * d;
        let poly = |c: [f64; 5]| c[0] + kk * (c[1] + kk * (c[2] + kk * (c[3] + kk * c[4])));
        p = if kk <= 0.302 {
            1.0
        } else if kk <= 0.5 {
            poly([2.76773, -19.828315, 80.709644, -138.55152, 81.218052])
        } else if kk <= 0.9 {
            poly([-4.901232, 40.662806, -97.490286, 94.029866, -32.355711])
        } else if kk <= 1.31 {
            poly([6.198765, -19.558097, 23.186922, -12.234627, 2.423045])
        } else {
            0.0
        };
    }
    Ok(TestResult::new("Lilliefors (Kolmogorov-Smirnov)", d, p, NORMAL_NULL))
}

pub fn normality_suite(series: &MonthlySeries) -> Result<NormalitySuite> {
    let x = &series.values;
    Ok(NormalitySuite {
        anderson_darling: anderson_darling(x)?,
        cramer_von_mises: cramer_von_mises(x)?,
        lilliefors: lilliefors(x)?,
    })
}

// -------------------------------------------------------------- seasonality

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeasonalitySuite {
    pub qs: TestResult,
    pub friedman: TestResult,
    pub wo: TestResult,
    pub welch: TestResult,
}

const SEASONAL_NULL: &str = "no stable seasonality";

/// Spread below which a (detrended or differenced) series counts as constant.
fn is_flat(x: &[f64], reference: &[f64]) -> bool {
    let scale = reference.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1.0);
    let m = mean(x);
    x.iter().all(|v| (v - m).abs() <= 1e-9 * scale)
}

fn lag_corr(xc: &[f64], denom: f64, k: usize) -> f64 {
    xc[..xc.len() - k]
        .iter()
        .zip(&xc[k..])
        .map(|(a, b)| a * b)
        .sum::<f64>()
        / denom
}

/// QS statistic on `x` as given (no differencing here).
fn qs_statistic(x: &[f64], freq: usize) -> (f64, f64) {
    let n = x.len() as f64;
    let m = mean(x);
    let xc: Vec<f64> = x.iter().map(|v| v - m).collect();
    let denom: f64 = xc.iter().map(|v| v * v).sum();
    if denom <= 0.0 || 2 * freq >= x.len() {
        return (0.0, 1.0);
    }
    let mut r1 = lag_corr(&xc, denom, freq);
    let mut r2 = lag_corr(&xc, denom, 2 * freq);
    if r1 <= 0.0 {
        r1 = 0.0;
        r2 = 0.0;
    }
    r2 = r2.max(0.0);
    let qs = n * (n + 2.0) * (r1 * r1 / (n - freq as f64) + r2 * r2 / (n - 2.0 * freq as f64));
    (qs, chi2_sf(qs, 2.0))
}

fn diff(x: &[f64]) -> Vec<f64> {
    x.windows(2).map(|w| w[1] - w[0]).collect()
}

/// Average ranks (1-based) with ties sharing the mean rank; also returns the
/// tie-correction sum of (t^3 - t).
fn ranks(x: &[f64]) -> (Vec<f64>, f64) {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut r = vec![0.0; x.len()];
    let mut ties = 0.0;
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && x[idx[j + 1]] == x[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            r[k] = avg;
        }
        let t = (j - i + 1) as f64;
        ties += t * t * t - t;
        i = j + 1;
    }
    (r, ties)
}

/// Kruskal-Wallis H across groups given by `labels` in 0..k.
fn kruskal_wallis(x: &[f64], labels: &[usize], k: usize) -> (f64, f64) {
    let n = x.len() as f64;
    let (r, ties) = ranks(x);
    let mut sums = vec![0.0; k];
    let mut counts = vec![0.0; k];
    for (ri, &g) in r.iter().zip(labels) {
        sums[g] += ri;
        counts[g] += 1.0;
    }
    let groups = counts.iter().filter(|c| **c > 0.0).count();
    let h: f64 = sums
        .iter()
        .zip(&counts)
        .filter(|(_, c)| **c > 0.0)
        .map(|(s, c)| s * s / c)
        .sum::<f64>()
        * 12.0
        / (n * (n + 1.0))
        - 3.0 * (n + 1.0);
    let correction = 1.0 - ties / (n * n * n - n);
    if correction <= 0.0 || groups < 2 {
        return (0.0, 1.0);
    }
    let h = h / correction;
    (h, chi2_sf(h, (groups - 1) as f64))
}

/// Centered 2 x freq (or plain odd-length) moving average; `None` where the
/// window does not fit.
pub(crate) fn centered_ma(x: &[f64], freq: usize) -> Vec<Option<f64>> {
    let n = x.len();
    let h = freq / 2;
    let weights: Vec<f64> = if freq % 2 == 0 {
        (0..=freq)
            .map(|i| if i == 0 || i == freq { 0.5 } else { 1.0 } / freq as f64)
            .collect()
    } else {
        vec![1.0 / freq as f64; freq]
    };
    (0..n)
        .map(|i| {
            if i < h || i + h >= n {
                None
            } else {
                Some(weights.iter().enumerate().map(|(j, w)| w * x[i - h + j]).sum())
            }
        })
        .collect()
}

/// (index, detrended value) pairs over the span where the moving average exists.
fn ma_detrended(x: &[f64], freq: usize) -> Vec<(usize, f64)> {
    centered_ma(x, freq)
        .into_iter()
        .enumerate()
        .filter_map(|(i, t)| t.map(|t| (i, x[i] - t)))
        .collect()
}

fn friedman_test(x: &[f64], freq: usize) -> TestResult {
    let dt = ma_detrended(x, freq);
    let values: Vec<f64> = dt.iter().map(|(_, v)| *v).collect();
    let first = dt
        .iter()
        .position(|(i, _)| i % freq == 0)
        .unwrap_or(0);
    let rows: Vec<&[(usize, f64)]> = dt[first..].chunks_exact(freq).collect();
    let b = rows.len() as f64;
    let k = freq as f64;
    let base = TestResult::new("Friedman", 0.0, 1.0, SEASONAL_NULL)
        .with("blocks", b)
        .with("df", k - 1.0);
    if rows.len() < 2 || is_flat(&values, x) {
        return base;
    }
    let mut col_sums = vec![0.0; freq];
    let mut ties = 0.0;
    for row in &rows {
        let vals: Vec<f64> = row.iter().map(|(_, v)| *v).collect();
        let (r, t) = ranks(&vals);
        ties += t;
        for (j, (i, _)) in row.iter().enumerate() {
            col_sums[i % freq] += r[j];
        }
    }
    let ss: f64 = col_sums.iter().map(|s| s * s).sum();
    let q = 12.0 / (b * k * (k + 1.0)) * ss - 3.0 * b * (k + 1.0);
    let correction = 1.0 - ties / (b * (k * k * k - k));
    if correction <= 0.0 {
        return base;
    }
    let q = q / correction;
    TestResult {
        statistic: q,
        p_value: chi2_sf(q, k - 1.0),
        ..base
    }
}

fn welch_anova(x: &[f64], freq: usize) -> TestResult {
    let dt = ma_detrended(x, freq);
    let values: Vec<f64> = dt.iter().map(|(_, v)| *v).collect();
    let base = TestResult::new("Welch", 0.0, 1.0, SEASONAL_NULL).with("df1", freq as f64 - 1.0);
    if is_flat(&values, x) {
        return base;
    }
    let mut groups: Vec<Vec<f64>> = vec![Vec::new(); freq];
    for (i, v) in &dt {
        groups[i % freq].push(*v);
    }
    if groups.iter().any(|g| g.len() < 2) {
        return base;
    }
    let k = freq as f64;
    let ni: Vec<f64> = groups.iter().map(|g| g.len() as f64).collect();
    let mi: Vec<f64> = groups.iter().map(|g| mean(g)).collect();
    let vi: Vec<f64> = groups.iter().map(|g| crate::numeric::variance(g)).collect();
    if vi.iter().any(|v| *v <= 0.0) {
        return base;
    }
    let w: Vec<f64> = ni.iter().zip(&vi).map(|(n, v)| n / v).collect();
    let sw: f64 = w.iter().sum();
    let mw: f64 = w.iter().zip(&mi).map(|(w, m)| w * m).sum::<f64>() / sw;
    let a: f64 = w.iter().zip(&mi).map(|(w, m)| w * (m - mw) * (m - mw)).sum::<f64>() / (k - 1.0);
    let tmp: f64 = w
        .iter()
        .zip(&ni)
        .map(|(w, n)| (1.0 - w / sw).powi(2) / (n - 1.0))
        .sum::<f64>()
        / (k * k - 1.0);
    let f = a / (1.0 + 2.0 * (k - 2.0) * tmp);
    let df2 = 1.0 / (3.0 * tmp);
    TestResult {
        statistic: f,
        p_value: f_sf(f, k - 1.0, df2),
        ..base
    }
    .with("df2", df2)
}

fn qs_test(x: &[f64], freq: usize) -> TestResult {
    let d = diff(x);
    let (qs, p) = if is_flat(&d, x) {
        (0.0, 1.0)
    } else {
        qs_statistic(&d, freq)
    };
    TestResult::new("QS", qs, p, SEASONAL_NULL).with("df", 2.0)
}

/// Combined decision over QS on the differenced series, QS on the residuals
/// of a low-order AR prefilter, and Kruskal-Wallis on those residuals.
fn wo_test(x: &[f64], freq: usize) -> TestResult {
    let d = diff(x);
    let p_qs = qs_test(x, freq).p_value;
    let (p_qs_res, p_kw_res, order) = if is_flat(&d, x) {
        (1.0, 1.0, 0.0)
    } else {
        match ar_yule_walker(&d, Some(5.min(d.len() - 1))) {
            Ok(fit) => {
                let e = fit.residuals(&d);
                let labels: Vec<usize> = (0..e.len())
                    .map(|k| (k + 1 + fit.order) % freq)
                    .collect();
                let (_, pq) = qs_statistic(&e, freq);
                let (_, pk) = kruskal_wallis(&e, &labels, freq);
                (pq, pk, fit.order as f64)
            }
            Err(_) => (1.0, 1.0, 0.0),
        }
    };
    let seasonal = p_qs < 0.01 || p_qs_res < 0.01 || p_kw_res < 0.002;
    // scaled so that p < 0.01 exactly when the combined rule fires
    let p = p_qs.min(p_qs_res).min(p_kw_res * 5.0).min(1.0);
    TestResult::new("WO", if seasonal { 1.0 } else { 0.0 }, p, SEASONAL_NULL)
        .with("p_qs", p_qs)
        .with("p_qs_residual", p_qs_res)
        .with("p_kw_residual", p_kw_res)
        .with("prefilter_order", order)
}

impl SeasonalitySuite {
    /// WO component p-values in reporting order.
    pub fn wo_components(&self) -> [f64; 3] {
        let a = &self.wo.auxiliary;
        [a["p_qs"], a["p_qs_residual"], a["p_kw_residual"]]
    }

    pub fn wo_seasonal(&self) -> bool {
        self.wo.statistic == 1.0
    }
}

pub fn seasonality_suite(series: &MonthlySeries, freq: usize) -> Result<SeasonalitySuite> {
    if freq < 2 {
        return Err(Error::Parameter("seasonal frequency must be at least 2".into()));
    }
    let x = &series.values;
    require_len(x.len(), 3 * freq)?;
    Ok(SeasonalitySuite {
        qs: qs_test(x, freq),
        friedman: friedman_test(x, freq),
        wo: wo_test(x, freq),
        welch: welch_anova(x, freq),
    })
}

// ------------------------------------------------------------- nonlinearity

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonlinearitySuite {
    pub teraesvirta: TestResult,
    pub white_nn: TestResult,
    pub keenan: TestResult,
    pub tsay: TestResult,
    pub mcleod_li: TestResult,
}

const LINEAR_NULL: &str = "linearity in mean";

fn standardize(x: &[f64]) -> Result<Vec<f64>> {
    let m = mean(x);
    let s = sd(x);
    if !(s > 0.0) {
        return Err(Error::Degenerate("nonlinearity test on a constant series".into()));
    }
    Ok(x.iter().map(|v| (v - m) / s).collect())
}

/// Lag-1 linear fit shared by the neural-network tests: (y, y_{t-1}, residuals, ssr0).
fn lag1_fit(z: &[f64]) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>, f64)> {
    let y = z[1..].to_vec();
    let y1 = z[..z.len() - 1].to_vec();
    let fit = ols(&[vec![1.0; y.len()], y1.clone()], &y)?;
    Ok((y, y1, fit.resid, fit.ssr))
}

pub fn teraesvirta(x: &[f64]) -> Result<TestResult> {
    let z = standardize(x)?;
    let (_, y1, u, ssr0) = lag1_fit(&z)?;
    let sq: Vec<f64> = y1.iter().map(|v| v * v).collect();
    let cu: Vec<f64> = y1.iter().map(|v| v * v * v).collect();
    let fit = ols(&[vec![1.0; u.len()], y1, sq, cu], &u)?;
    let stat = z.len() as f64 * (ssr0 / fit.ssr).ln();
    Ok(TestResult::new("Teraesvirta Neural Network", stat, chi2_sf(stat, 2.0), LINEAR_NULL)
        .with("df", 2.0))
}

/// White's neural-network test with `hidden` random logistic units reduced to
/// two principal components.
pub fn white_nn(x: &[f64], seed: u64) -> Result<TestResult> {
    const HIDDEN: usize = 10;
    const QSTAR: usize = 2;
    let z = standardize(x)?;
    let (_, y1, u, ssr0) = lag1_fit(&z)?;
    let m = y1.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gamma: Vec<[f64; 2]> = (0..HIDDEN)
        .map(|_| [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)])
        .collect();
    let mut phantom = DMatrix::<f64>::zeros(m, HIDDEN);
    for (j, g) in gamma.iter().enumerate() {
        for i in 0..m {
            phantom[(i, j)] = 1.0 / (1.0 + (-(g[0] + g[1] * y1[i])).exp());
        }
    }
    for j in 0..HIDDEN {
        let col: Vec<f64> = phantom.column(j).iter().copied().collect();
        let (cm, cs) = (mean(&col), sd(&col));
        for i in 0..m {
            phantom[(i, j)] = if cs > 0.0 { (phantom[(i, j)] - cm) / cs } else { 0.0 };
        }
    }
    let svd = phantom.clone().svd(false, true);
    let vt = svd.v_t.ok_or_else(|| Error::Numeric("SVD failed".into()))?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let mut cols = vec![vec![1.0; m], y1];
    for &c in order.iter().skip(1).take(QSTAR) {
        let axis = vt.row(c).transpose();
        let scores = &phantom * axis;
        cols.push(scores.iter().copied().collect());
    }
    let fit = ols(&cols, &u)?;
    let stat = z.len() as f64 * (ssr0 / fit.ssr).ln();
    Ok(TestResult::new("White Neural Network", stat, chi2_sf(stat, QSTAR as f64), LINEAR_NULL)
        .with("df", QSTAR as f64)
        .with("seed", seed as f64))
}

fn lag_columns(x: &[f64], p: usize) -> Vec<Vec<f64>> {
    (1..=p).map(|j| x[p - j..x.len() - j].to_vec()).collect()
}

pub fn keenan(x: &[f64], fit: &ArFit) -> Result<TestResult> {
    let p = fit.order;
    let n = x.len();
    if p == 0 {
        return Err(Error::Degenerate("Keenan test needs an AR order of at least 1".into()));
    }
    let lags = lag_columns(x, p);
    let e = fit.residuals(x);
    let fitted: Vec<f64> = (p..n).zip(&e).map(|(t, e)| x[t] - e).collect();
    let f2: Vec<f64> = fitted.iter().map(|v| v * v).collect();
    let mut cols = vec![vec![1.0; n - p]];
    cols.extend(lags);
    let xi = ols(&cols, &f2)?.resid;
    let xi_ss: f64 = xi.iter().map(|v| v * v).sum();
    let eta = e.iter().zip(&xi).map(|(a, b)| a * b).sum::<f64>() / xi_ss.sqrt();
    let ee: f64 = e.iter().map(|v| v * v).sum();
    let df2 = n as f64 - 2.0 * p as f64 - 2.0;
    let stat = eta * eta * df2 / (ee - eta * eta);
    Ok(TestResult::new("Keenan", stat, f_sf(stat, 1.0, df2), LINEAR_NULL)
        .with("df1", 1.0)
        .with("df2", df2)
        .with("order", p as f64))
}

pub fn tsay(x: &[f64], order: usize) -> Result<TestResult> {
    let p = order;
    let n = x.len();
    if p == 0 {
        return Err(Error::Degenerate("Tsay test needs an AR order of at least 1".into()));
    }
    let y = x[p..].to_vec();
    let lags = lag_columns(x, p);
    let mut base = vec![vec![1.0; n - p]];
    base.extend(lags.iter().cloned());
    let e = ols(&base, &y)?.resid;
    let mut resid_cols = Vec::new();
    for i in 0..p {
        for j in i..p {
            let prod: Vec<f64> = lags[i].iter().zip(&lags[j]).map(|(a, b)| a * b).collect();
            resid_cols.push(ols(&base, &prod)?.resid);
        }
    }
    let k = resid_cols.len();
    let v = ols(&resid_cols, &e)?.resid;
    let ee: f64 = e.iter().map(|a| a * a).sum();
    let vv: f64 = v.iter().map(|a| a * a).sum();
    let df2 = (n - p) as f64 - p as f64 - k as f64 - 1.0;
    if df2 <= 0.0 {
        return Err(Error::InsufficientData {
            needed: 2 * p + k + 2,
            got: n,
        });
    }
    let stat = ((ee - vv) / k as f64) / (vv / df2);
    Ok(TestResult::new("Tsay", stat, f_sf(stat, k as f64, df2), LINEAR_NULL)
        .with("df1", k as f64)
        .with("df2", df2)
        .with("order", p as f64))
}

pub fn mcleod_li(x: &[f64], fit: &ArFit) -> Result<TestResult> {
    let e2: Vec<f64> = fit.residuals(x).into_iter().map(|v| v * v).collect();
    let m = e2.len();
    let lags = default_ar_order_max(m).min(m - 1);
    let mu = mean(&e2);
    let c: Vec<f64> = e2.iter().map(|v| v - mu).collect();
    let denom: f64 = c.iter().map(|v| v * v).sum();
    if denom <= 0.0 {
        return Err(Error::Degenerate("squared residuals are constant".into()));
    }
    let mf = m as f64;
    let q: f64 = (1..=lags)
        .map(|k| {
            let r = lag_corr(&c, denom, k);
            r * r / (mf - k as f64)
        })
        .sum::<f64>()
        * mf
        * (mf + 2.0);
    Ok(TestResult::new(
        "McLeod-Li",
        q,
        chi2_sf(q, lags as f64),
        "no ARCH effects (squared residuals uncorrelated)",
    )
    .with("lags", lags as f64)
    .with("order", fit.order as f64))
}

pub fn nonlinearity_suite(series: &MonthlySeries, seed: u64) -> Result<NonlinearitySuite> {
    let x = &series.values;
    require_len(x.len(), 50)?;
    let fit = ar_yule_walker(x, None)?;
    if fit.order == 0 {
        return Err(Error::Degenerate("AIC selected an AR(0) model".into()));
    }
    if 2 * fit.order + fit.order * (fit.order + 1) / 2 + 2 >= x.len() {
        return Err(Error::InsufficientData {
            needed: 2 * fit.order + fit.order * (fit.order + 1) / 2 + 2,
            got: x.len(),
        });
    }
    Ok(NonlinearitySuite {
        teraesvirta: teraesvirta(x)?,
        white_nn: white_nn(x, seed)?,
        keenan: keenan(x, &fit)?,
        tsay: tsay(x, fit.order)?,
        mcleod_li: mcleod_li(x, &fit)?,
    })
}
