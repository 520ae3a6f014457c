//! Morlet wavelet power, autoregressive dominant frequency and peak finding.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{require_len, Error, Result};
use crate::numeric::{ar_yule_walker, demean, ols};
use crate::series::MonthlySeries;

const MORLET_OMEGA0: f64 = 6.0;

/// Ratio of Fourier period to wavelet scale for the Morlet mother.
pub fn morlet_fourier_factor() -> f64 {
    4.0 * std::f64::consts::PI / (MORLET_OMEGA0 + (2.0 + MORLET_OMEGA0 * MORLET_OMEGA0).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveletSpectrum {
    /// Fourier periods in units of `dt`'s time unit (years for monthly data).
    pub periods: Vec<f64>,
    pub scales: Vec<f64>,
    pub times: Vec<f64>,
    /// `power[period][time]`, |W|^2 divided by scale.
    pub power: Vec<Vec<f64>>,
    pub avg_power: Vec<f64>,
    /// Cone of influence per time point, as a period.
    pub coi: Vec<f64>,
    pub dt: f64,
    pub dj: f64,
}

impl WaveletSpectrum {
    /// Period of maximal time-averaged power. With the scale-rectified power
    /// a pure tone of period T peaks near 0.9865 T.
    pub fn dominant_period(&self) -> f64 {
        let k = self
            .avg_power
            .iter()
            .enumerate()
            .fold(0, |best, (i, v)| if *v > self.avg_power[best] { i } else { best });
        self.periods[k]
    }

    /// Time-averaged power using only cells outside the cone of influence;
    /// periods with no such cell get NaN.
    pub fn masked_avg_power(&self) -> Vec<f64> {
        self.power
            .iter()
            .zip(&self.periods)
            .map(|(row, p)| {
                let kept: Vec<f64> = row
                    .iter()
                    .zip(&self.coi)
                    .filter(|(_, c)| *p <= **c)
                    .map(|(v, _)| *v)
                    .collect();
                if kept.is_empty() {
                    f64::NAN
                } else {
                    kept.iter().sum::<f64>() / kept.len() as f64
                }
            })
            .collect()
    }

    pub fn matrix_csv(&self, labels: &[String]) -> String {
        let mut out = String::from("period");
        for l in labels {
            out.push(',');
            out.push_str(l);
        }
        out.push('\n');
        for (p, row) in self.periods.iter().zip(&self.power) {
            out.push_str(&p.to_string());
            for v in row {
                out.push(',');
                out.push_str(&v.to_string());
            }
            out.push('\n');
        }
        out
    }

    pub fn avg_power_csv(&self) -> String {
        let mut out = String::from("period,avg_power\n");
        for (p, v) in self.periods.iter().zip(&self.avg_power) {
            out.push_str(&format!("{p},{v}\n"));
        }
        out
    }
}

pub fn morlet_power(series: &MonthlySeries, dt: f64, dj: f64) -> Result<WaveletSpectrum> {
    let mut w = morlet_values(&series.values, dt, dj)?;
    w.times = series.times();
    Ok(w)
}

/// Continuous Morlet transform via FFT on the zero-padded demeaned series.
/// Times are sample offsets times `dt`.
pub fn morlet_values(x: &[f64], dt: f64, dj: f64) -> Result<WaveletSpectrum> {
    if !(dt > 0.0) || !(dj > 0.0) {
        return Err(Error::Parameter(format!("dt ({dt}) and dj ({dj}) must be positive")));
    }
    require_len(x.len(), 32)?;
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Parameter("series contains non-finite values".into()));
    }
    let n = x.len();
    let padded = n.next_power_of_two();
    let ff = morlet_fourier_factor();

    let span = (n as f64 / 2.0).log2();
    let levels = (span / dj + 1e-9).floor() as usize;
    let periods: Vec<f64> = (0..=levels)
        .map(|j| 2.0 * dt * 2f64.powf(j as f64 * dj))
        .collect();
    let scales: Vec<f64> = periods.iter().map(|p| p / ff).collect();

    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(padded);
    let inverse = planner.plan_fft_inverse(padded);
    let mut spectrum: Vec<Complex64> = demean(x)
        .into_iter()
        .map(|v| Complex64::new(v, 0.0))
        .chain(std::iter::repeat(Complex64::new(0.0, 0.0)))
        .take(padded)
        .collect();
    forward.process(&mut spectrum);
    let omega: Vec<f64> = (0..padded)
        .map(|k| {
            let base = 2.0 * std::f64::consts::PI / (padded as f64 * dt);
            if k <= padded / 2 {
                base * k as f64
            } else {
                -base * (padded - k) as f64
            }
        })
        .collect();
    let norm_const = std::f64::consts::PI.powf(-0.25);

    let power: Vec<Vec<f64>> = scales
        .par_iter()
        .map(|&s| {
            let amp = norm_const * (2.0 * std::f64::consts::PI * s / dt).sqrt();
            let mut buf: Vec<Complex64> = spectrum
                .iter()
                .zip(&omega)
                .map(|(c, &w)| {
                    if w > 0.0 {
                        c * (amp * (-0.5 * (s * w - MORLET_OMEGA0).powi(2)).exp())
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
                .collect();
            inverse.process(&mut buf);
            let scale_n = 1.0 / padded as f64;
            buf[..n].iter().map(|c| (c * scale_n).norm_sqr() / s).collect()
        })
        .collect();
    let avg_power = power
        .iter()
        .map(|row| row.iter().sum::<f64>() / n as f64)
        .collect();
    let coi_factor = ff / 2f64.sqrt();
    let coi = (0..n)
        .map(|t| coi_factor * dt * ((t + 1).min(n - t) as f64))
        .collect();
    Ok(WaveletSpectrum {
        periods,
        scales,
        times: (0..n).map(|t| t as f64 * dt).collect(),
        power,
        avg_power,
        coi,
        dt,
        dj,
    })
}

const AR_SPECTRUM_POINTS: usize = 500;

/// Dominant period in samples from the autoregressive spectrum of the
/// linearly detrended series; 1 when no cycle stands out.
pub fn find_frequency(x: &[f64]) -> Result<usize> {
    let n = x.len();
    require_len(n, 50)?;
    if !(crate::numeric::variance(x) > 0.0) {
        return Err(Error::Degenerate("constant series has no spectrum".into()));
    }
    let t: Vec<f64> = (1..=n).map(|v| v as f64).collect();
    let resid = ols(&[vec![1.0; n], t], x)?.resid;
    let fit = ar_yule_walker(&resid, None)
        .map_err(|e| e.context("autoregressive spectrum"))?;
    let freq: Vec<f64> = (0..AR_SPECTRUM_POINTS)
        .map(|i| 0.5 * i as f64 / (AR_SPECTRUM_POINTS - 1) as f64)
        .collect();
    let spec: Vec<f64> = freq
        .iter()
        .map(|f| {
            let mut c = Complex64::new(1.0, 0.0);
            for (k, phi) in fit.coef.iter().enumerate() {
                let a = -2.0 * std::f64::consts::PI * f * (k + 1) as f64;
                c -= Complex64::new(a.cos(), a.sin()) * phi;
            }
            fit.var_pred / c.norm_sqr()
        })
        .collect();
    let argmax = |from: usize| {
        (from..spec.len()).fold(from, |best, i| if spec[i] > spec[best] { i } else { best })
    };
    let top = argmax(0);
    if !(spec[top] > 10.0) {
        return Ok(1);
    }
    let period = if top == 0 {
        match spec.windows(2).position(|w| w[1] > w[0]) {
            Some(j) => {
                let next = argmax(j + 1);
                if next < AR_SPECTRUM_POINTS - 1 {
                    (1.0 / freq[next] + 0.5).floor() as usize
                } else {
                    1
                }
            }
            None => 1,
        }
    } else {
        (1.0 / freq[top] + 0.5).floor() as usize
    };
    Ok(period.clamp(1, (n / 2).max(1)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub value: f64,
    pub index: usize,
    pub left: usize,
    pub right: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakOptions {
    pub npeaks: Option<usize>,
    pub threshold: f64,
    pub min_height: f64,
}

impl Default for PeakOptions {
    fn default() -> Self {
        PeakOptions {
            npeaks: None,
            threshold: 0.0,
            min_height: f64::NEG_INFINITY,
        }
    }
}

/// Local maxima where a run of strict rises meets a run of strict falls.
/// Each peak's extent spans both runs, so its ends are the neighbouring
/// local minima (or series ends).
pub fn find_peaks(values: &[f64], opts: PeakOptions) -> Vec<Peak> {
    let n = values.len();
    if n < 3 {
        return Vec::new();
    }
    let sign: Vec<i8> = values
        .windows(2)
        .map(|w| if w[1] > w[0] { 1 } else if w[1] < w[0] { -1 } else { 0 })
        .collect();
    let mut peaks = Vec::new();
    let mut i = 0;
    while i < sign.len() {
        if sign[i] != 1 {
            i += 1;
            continue;
        }
        let start = i;
        while i < sign.len() && sign[i] == 1 {
            i += 1;
        }
        let top = i;
        while i < sign.len() && sign[i] == -1 {
            i += 1;
        }
        if i == top {
            continue;
        }
        let (left, right) = (start, i);
        let value = values[top];
        let base = values[left].max(values[right]);
        if value >= opts.min_height && value - base >= opts.threshold {
            peaks.push(Peak {
                value,
                index: top,
                left,
                right,
            });
        }
    }
    if let Some(k) = opts.npeaks {
        if k < peaks.len() {
            let mut order: Vec<usize> = (0..peaks.len()).collect();
            order.sort_by(|&a, &b| peaks[b].value.total_cmp(&peaks[a].value).then(a.cmp(&b)));
            let mut keep: Vec<usize> = order.into_iter().take(k).collect();
            keep.sort_unstable();
            peaks = keep.into_iter().map(|i| peaks[i].clone()).collect();
        }
    }
    peaks
}

/// Spacing of the long cycle in a smooth trend: the highest point of each
/// excursion above the trend's mean, and the mean gap between successive ones.
pub fn excursion_maxima(trend: &[f64]) -> Vec<usize> {
    let level = crate::numeric::mean(trend);
    let mut out = Vec::new();
    let mut current: Option<usize> = None;
    for (i, v) in trend.iter().enumerate() {
        if *v > level {
            match current {
                Some(b) if trend[b] >= *v => {}
                _ => current = Some(i),
            }
        } else if let Some(b) = current.take() {
            out.push(b);
        }
    }
    out.extend(current);
    out.retain(|&i| i > 0 && i + 1 < trend.len());
    out
}
