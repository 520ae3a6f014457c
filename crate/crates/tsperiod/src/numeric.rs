//! Small numerical toolbox shared by the analysis modules.

use nalgebra::{DMatrix, DVector};
use statrs::distribution::{
    ChiSquared, ContinuousCDF, FisherSnedecor, Normal, StudentsT,
};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Sample variance with the n-1 denominator.
pub fn variance(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (x.len() as f64 - 1.0)
}

pub fn sd(x: &[f64]) -> f64 {
    variance(x).sqrt()
}

/// Population variance (1/n).
pub fn pvariance(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / x.len() as f64
}

pub fn demean(x: &[f64]) -> Vec<f64> {
    let m = mean(x);
    x.iter().map(|v| v - m).collect()
}

pub fn sorted(x: &[f64]) -> Vec<f64> {
    let mut s = x.to_vec();
    s.sort_by(|a, b| a.total_cmp(b));
    s
}

/// Continuous quantile with linear interpolation between order statistics
/// (h = (n-1)p).
pub fn quantile_sorted(s: &[f64], p: f64) -> f64 {
    let h = (s.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(s.len() - 1);
    s[lo] + (h - lo as f64) * (s[hi] - s[lo])
}

fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("unit normal")
}

pub fn norm_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

pub fn norm_sf(z: f64) -> f64 {
    norm_cdf(-z)
}

/// log Phi(z), accurate deep into the lower tail.
pub fn ln_norm_cdf(z: f64) -> f64 {
    if z > -30.0 {
        norm_cdf(z).ln()
    } else {
        let z2 = z * z;
        let series = 1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2);
        -0.5 * z2 - (-z).ln() - 0.5 * (2.0 * std::f64::consts::PI).ln() + series.ln()
    }
}

pub fn norm_quantile(p: f64) -> f64 {
    std_normal().inverse_cdf(p)
}

pub fn chi2_sf(x: f64, df: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    ChiSquared::new(df).map(|d| d.sf(x)).unwrap_or(f64::NAN)
}

pub fn f_sf(x: f64, d1: f64, d2: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    FisherSnedecor::new(d1, d2)
        .map(|d| d.sf(x))
        .unwrap_or(f64::NAN)
}

pub fn t_quantile(p: f64, df: f64) -> f64 {
    StudentsT::new(0.0, 1.0, df)
        .map(|d| d.inverse_cdf(p))
        .unwrap_or(f64::NAN)
}

/// Piecewise-linear interpolation with flat extrapolation; `xs` ascending.
pub fn interp(x: f64, xs: &[f64], ys: &[f64]) -> f64 {
    if x <= xs[0] {
        return ys[0];
    }
    let last = xs.len() - 1;
    if x >= xs[last] {
        return ys[last];
    }
    let i = xs.partition_point(|&v| v <= x) - 1;
    let t = (x - xs[i]) / (xs[i + 1] - xs[i]);
    ys[i] + t * (ys[i + 1] - ys[i])
}

#[derive(Debug, Clone)]
pub struct Ols {
    pub coef: Vec<f64>,
    pub resid: Vec<f64>,
    pub ssr: f64,
    pub df_resid: usize,
    pub xtx_inv: DMatrix<f64>,
}

impl Ols {
    pub fn sigma2(&self) -> f64 {
        self.ssr / self.df_resid as f64
    }

    pub fn t_stat(&self, j: usize) -> f64 {
        self.coef[j] / (self.sigma2() * self.xtx_inv[(j, j)]).sqrt()
    }
}

/// Least squares through a Householder QR; `cols` are regressors of equal length.
pub fn ols(cols: &[Vec<f64>], y: &[f64]) -> Result<Ols> {
    let n = y.len();
    let k = cols.len();
    if n <= k {
        return Err(Error::InsufficientData {
            needed: k + 1,
            got: n,
        });
    }
    let x = DMatrix::from_fn(n, k, |i, j| cols[j][i]);
    let qr = x.clone().qr();
    let r = qr.r();
    let scale = r.diagonal().amax().max(1e-300);
    if r.diagonal().iter().any(|d| d.abs() <= 1e-11 * scale) {
        return Err(Error::Numeric("singular design matrix".into()));
    }
    let yv = DVector::from_column_slice(y);
    let qty = qr.q().transpose() * yv;
    let beta = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::Numeric("least squares solve failed".into()))?;
    let fitted = &x * &beta;
    let resid: Vec<f64> = (0..n).map(|i| y[i] - fitted[i]).collect();
    let ssr = resid.iter().map(|e| e * e).sum();
    let r_inv = r
        .try_inverse()
        .ok_or_else(|| Error::Numeric("singular design matrix".into()))?;
    let xtx_inv = &r_inv * r_inv.transpose();
    Ok(Ols {
        coef: beta.iter().copied().collect(),
        resid,
        ssr,
        df_resid: n - k,
        xtx_inv,
    })
}

/// Biased autocovariances gamma_0..gamma_max of the demeaned series.
pub fn acvf(x: &[f64], max_lag: usize) -> Vec<f64> {
    let n = x.len();
    let xc = demean(x);
    (0..=max_lag)
        .map(|k| {
            xc[..n - k]
                .iter()
                .zip(&xc[k..])
                .map(|(a, b)| a * b)
                .sum::<f64>()
                / n as f64
        })
        .collect()
}

/// Bartlett-kernel long-run variance of residuals `e` (assumed mean zero).
pub fn bartlett_lrv(e: &[f64], lag: usize) -> f64 {
    let n = e.len() as f64;
    let mut s = e.iter().map(|v| v * v).sum::<f64>();
    for j in 1..=lag {
        let w = 1.0 - j as f64 / (lag as f64 + 1.0);
        let g: f64 = e[j..].iter().zip(e).map(|(a, b)| a * b).sum();
        s += 2.0 * w * g;
    }
    s / n
}

#[derive(Debug, Clone)]
pub struct ArFit {
    pub order: usize,
    pub coef: Vec<f64>,
    pub mean: f64,
    /// Innovations variance scaled by n/(n - (order+1)).
    pub var_pred: f64,
    pub aic: Vec<f64>,
}

impl ArFit {
    /// One-step residuals for t >= order (length n - order).
    pub fn residuals(&self, x: &[f64]) -> Vec<f64> {
        let p = self.order;
        (p..x.len())
            .map(|t| {
                let pred: f64 = (0..p)
                    .map(|j| self.coef[j] * (x[t - 1 - j] - self.mean))
                    .sum();
                x[t] - self.mean - pred
            })
            .collect()
    }
}

pub fn default_ar_order_max(n: usize) -> usize {
    ((10.0 * (n as f64).log10()).floor() as usize).min(n - 1)
}

/// Yule-Walker AR fit with AIC order selection via Durbin-Levinson.
pub fn ar_yule_walker(x: &[f64], order_max: Option<usize>) -> Result<ArFit> {
    let n = x.len();
    if n < 3 {
        return Err(Error::InsufficientData { needed: 3, got: n });
    }
    let omax = order_max.unwrap_or_else(|| default_ar_order_max(n));
    if omax >= n {
        return Err(Error::InsufficientData {
            needed: omax + 1,
            got: n,
        });
    }
    let r = acvf(x, omax);
    if r[0] <= 0.0 {
        return Err(Error::Degenerate("AR fit on a constant series".into()));
    }
    let mut phi: Vec<f64> = Vec::new();
    let mut v = r[0];
    let mut vs = vec![v];
    let mut phis = vec![phi.clone()];
    for k in 1..=omax {
        let acc: f64 = (0..k - 1).map(|j| phi[j] * r[k - 1 - j]).sum();
        let a = (r[k] - acc) / v;
        let mut next: Vec<f64> = (0..k - 1).map(|j| phi[j] - a * phi[k - 2 - j]).collect();
        next.push(a);
        phi = next;
        v *= 1.0 - a * a;
        vs.push(v);
        phis.push(phi.clone());
    }
    let aic: Vec<f64> = vs
        .iter()
        .enumerate()
        .map(|(k, v)| n as f64 * v.ln() + 2.0 * k as f64)
        .collect();
    let order = aic
        .iter()
        .enumerate()
        .fold(0, |best, (k, a)| if *a < aic[best] { k } else { best });
    Ok(ArFit {
        order,
        coef: phis[order].clone(),
        mean: mean(x),
        var_pred: vs[order] * n as f64 / (n as f64 - (order as f64 + 1.0)),
        aic,
    })
}

/// Brent root finder on a bracketing interval.
pub fn brent_root<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> Result<f64> {
    let mut fa = f(a);
    let mut fb = f(b);
    if fa * fb > 0.0 {
        return Err(Error::Numeric("root not bracketed".into()));
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb * fc > 0.0 {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            if 2.0 * p < (3.0 * xm * q - (tol1 * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
    }
    Err(Error::Numeric("root finder did not converge".into()))
}

/// Brent's derivative-free minimiser on [a, b].
pub fn brent_min<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let golden = 0.5 * (3.0 - 5f64.sqrt());
    let (mut a, mut b) = (a, b);
    let mut x = a + golden * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = f(x);
    let (mut fw, mut fv) = (fx, fx);
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;
    for _ in 0..500 {
        let xm = 0.5 * (a + b);
        let tol1 = f64::EPSILON.sqrt() * x.abs() + tol / 3.0;
        let tol2 = 2.0 * tol1;
        if (x - xm).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut golden_step = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            } else {
                q = -q;
            }
            if p.abs() < (0.5 * q * e).abs() && p > q * (a - x) && p < q * (b - x) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = tol1.copysign(xm - x);
                }
                golden_step = false;
            }
        }
        if golden_step {
            e = if x < xm { b - x } else { a - x };
            d = golden * e;
        }
        let u = if d.abs() >= tol1 { x + d } else { x + tol1.copysign(d) };
        let fu = f(u);
        if fu <= fx {
            if u < x {
                b = x;
            } else {
                a = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    (x, fx)
}
