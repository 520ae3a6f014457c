//! Seasonal-trend decomposition by loess, following the original Fortran
//! routine (non-robust: inner iterations only).

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StlParams {
    pub period: usize,
    pub seasonal_window: usize,
    pub seasonal_degree: usize,
    pub trend_window: usize,
    pub trend_degree: usize,
    pub lowpass_window: usize,
    pub lowpass_degree: usize,
    pub seasonal_jump: usize,
    pub trend_jump: usize,
    pub lowpass_jump: usize,
    pub inner: usize,
}

fn next_odd(x: usize) -> usize {
    if x % 2 == 0 {
        x + 1
    } else {
        x
    }
}

impl StlParams {
    /// Defaults derived from the period and seasonal window.
    pub fn new(period: usize, s_window: usize) -> Self {
        let trend_window = next_odd(
            (1.5 * period as f64 / (1.0 - 1.5 / s_window as f64)).ceil() as usize,
        );
        let lowpass_window = next_odd(period);
        StlParams {
            period,
            seasonal_window: s_window,
            seasonal_degree: 0,
            trend_window,
            trend_degree: 1,
            lowpass_window,
            lowpass_degree: 1,
            seasonal_jump: s_window.div_ceil(10),
            trend_jump: trend_window.div_ceil(10),
            lowpass_jump: lowpass_window.div_ceil(10),
            inner: 2,
        }
    }
}

/// Returns (seasonal, trend).
pub fn stl(y: &[f64], p: &StlParams) -> (Vec<f64>, Vec<f64>) {
    let n = y.len();
    let np = p.period.max(2);
    let ns = next_odd(p.seasonal_window.max(3));
    let nt = next_odd(p.trend_window.max(3));
    let nl = next_odd(p.lowpass_window.max(3));
    let mut trend = vec![0.0; n];
    let mut season = vec![0.0; n];
    let mut detrended = vec![0.0; n];
    let mut cycle = vec![0.0; n + 2 * np];
    let mut lowpass = vec![0.0; n];
    for _ in 0..p.inner {
        for i in 0..n {
            detrended[i] = y[i] - trend[i];
        }
        cycle_subseries(&detrended, np, ns, p.seasonal_degree, p.seasonal_jump, &mut cycle);
        let filtered = low_pass(&cycle, np);
        loess(&filtered, nl, p.lowpass_degree, p.lowpass_jump, &mut lowpass);
        for i in 0..n {
            season[i] = cycle[np + i] - lowpass[i];
            detrended[i] = y[i] - season[i];
        }
        loess(&detrended, nt, p.trend_degree, p.trend_jump, &mut trend);
    }
    (season, trend)
}

/// Local weighted fit at position `xs` (1-based) over points nleft..=nright.
#[allow(clippy::too_many_arguments)]
fn estimate(
    y: &[f64],
    len: usize,
    degree: usize,
    xs: f64,
    nleft: usize,
    nright: usize,
    w: &mut [f64],
) -> Option<f64> {
    let n = y.len();
    let range = n as f64 - 1.0;
    let mut h = (xs - nleft as f64).max(nright as f64 - xs);
    if len > n {
        h += ((len - n) / 2) as f64;
    }
    let h9 = 0.999 * h;
    let h1 = 0.001 * h;
    let mut a = 0.0;
    for j in nleft..=nright {
        w[j - 1] = 0.0;
        let r = (j as f64 - xs).abs();
        if r <= h9 {
            w[j - 1] = if r <= h1 {
                1.0
            } else {
                (1.0 - (r / h).powi(3)).powi(3)
            };
            a += w[j - 1];
        }
    }
    if a <= 0.0 {
        return None;
    }
    for j in nleft..=nright {
        w[j - 1] /= a;
    }
    if h > 0.0 && degree > 0 {
        let a: f64 = (nleft..=nright).map(|j| w[j - 1] * j as f64).sum();
        let c: f64 = (nleft..=nright)
            .map(|j| w[j - 1] * (j as f64 - a).powi(2))
            .sum();
        if c.sqrt() > 0.001 * range {
            let b = (xs - a) / c;
            for j in nleft..=nright {
                w[j - 1] *= b * (j as f64 - a) + 1.0;
            }
        }
    }
    Some((nleft..=nright).map(|j| w[j - 1] * y[j - 1]).sum())
}

/// Loess smoother evaluated every `jump` points with linear interpolation.
fn loess(y: &[f64], len: usize, degree: usize, jump: usize, ys: &mut [f64]) {
    let n = y.len();
    if n < 2 {
        ys[0] = y[0];
        return;
    }
    let mut w = vec![0.0; n];
    let step = jump.min(n - 1).max(1);
    let mut nleft = 1;
    let mut nright = n;
    if len >= n {
        for i in (1..=n).step_by(step) {
            ys[i - 1] = estimate(y, len, degree, i as f64, 1, n, &mut w).unwrap_or(y[i - 1]);
        }
    } else if step == 1 {
        let half = (len + 1) / 2;
        nleft = 1;
        nright = len;
        for i in 1..=n {
            if i > half && nright != n {
                nleft += 1;
                nright += 1;
            }
            ys[i - 1] =
                estimate(y, len, degree, i as f64, nleft, nright, &mut w).unwrap_or(y[i - 1]);
        }
    } else {
        let half = (len + 1) / 2;
        for i in (1..=n).step_by(step) {
            if i < half {
                nleft = 1;
                nright = len;
            } else if i >= n - half + 1 {
                nleft = n - len + 1;
                nright = n;
            } else {
                nleft = i - half + 1;
                nright = len + i - half;
            }
            ys[i - 1] =
                estimate(y, len, degree, i as f64, nleft, nright, &mut w).unwrap_or(y[i - 1]);
        }
    }
    if step != 1 {
        let mut i = 1;
        while i + step <= n {
            let delta = (ys[i + step - 1] - ys[i - 1]) / step as f64;
            for j in i + 1..i + step {
                ys[j - 1] = ys[i - 1] + delta * (j - i) as f64;
            }
            i += step;
        }
        let k = ((n - 1) / step) * step + 1;
        if k != n {
            ys[n - 1] =
                estimate(y, len, degree, n as f64, nleft, nright, &mut w).unwrap_or(y[n - 1]);
            if k != n - 1 {
                let delta = (ys[n - 1] - ys[k - 1]) / (n - k) as f64;
                for j in k + 1..n {
                    ys[j - 1] = ys[k - 1] + delta * (j - k) as f64;
                }
            }
        }
    }
}

/// Smooth each cycle-subseries and extend it by one period at both ends;
/// `season` has length n + 2*np.
fn cycle_subseries(y: &[f64], np: usize, ns: usize, degree: usize, jump: usize, season: &mut [f64]) {
    let n = y.len();
    for j in 1..=np {
        let k = (n - j) / np + 1;
        let sub: Vec<f64> = (0..k).map(|i| y[i * np + j - 1]).collect();
        let mut smooth = vec![0.0; k + 2];
        loess(&sub, ns, degree, jump, &mut smooth[1..=k]);
        let mut w = vec![0.0; k];
        let nright = ns.min(k);
        smooth[0] = estimate(&sub, ns, degree, 0.0, 1, nright, &mut w).unwrap_or(smooth[1]);
        let nleft = if k >= ns { k - ns + 1 } else { 1 };
        smooth[k + 1] =
            estimate(&sub, ns, degree, (k + 1) as f64, nleft, k, &mut w).unwrap_or(smooth[k]);
        for (m, v) in smooth.iter().enumerate() {
            season[m * np + j - 1] = *v;
        }
    }
}

fn moving_average(x: &[f64], len: usize) -> Vec<f64> {
    let out_len = x.len() - len + 1;
    let mut out = Vec::with_capacity(out_len);
    let mut v: f64 = x[..len].iter().sum();
    out.push(v / len as f64);
    for j in 1..out_len {
        v += x[j + len - 1] - x[j - 1];
        out.push(v / len as f64);
    }
    out
}

fn low_pass(x: &[f64], np: usize) -> Vec<f64> {
    let a = moving_average(x, np);
    let b = moving_average(&a, np);
    moving_average(&b, 3)
}
