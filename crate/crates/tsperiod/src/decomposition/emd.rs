//! Empirical mode decomposition and its complete-ensemble noise-assisted
//! variant.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::spline::natural_cubic_on_grid;
use crate::error::{require_len, Error, Result};
use crate::numeric::sd;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SiftConfig {
    /// Consecutive sifts with stable extrema/zero-crossing counts required to stop.
    pub s_number: usize,
    pub max_siftings: usize,
}

impl Default for SiftConfig {
    fn default() -> Self {
        SiftConfig {
            s_number: 4,
            max_siftings: 50,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Extrema {
    pub maxima: Vec<usize>,
    pub minima: Vec<usize>,
}

impl Extrema {
    pub fn count(&self) -> usize {
        self.maxima.len() + self.minima.len()
    }
}

/// Local extrema; a flat run higher (lower) than both neighbours counts once,
/// at its middle.
pub fn find_extrema(x: &[f64]) -> Extrema {
    let mut out = Extrema::default();
    let n = x.len();
    let mut i = 1;
    while i + 1 < n {
        if x[i] == x[i - 1] {
            i += 1;
            continue;
        }
        let mut j = i;
        while j + 1 < n && x[j + 1] == x[i] {
            j += 1;
        }
        if j + 1 >= n {
            break;
        }
        let mid = (i + j) / 2;
        if x[i] > x[i - 1] && x[i] > x[j + 1] {
            out.maxima.push(mid);
        } else if x[i] < x[i - 1] && x[i] < x[j + 1] {
            out.minima.push(mid);
        }
        i = j + 1;
    }
    out
}

pub fn zero_crossings(x: &[f64]) -> usize {
    let mut count = 0;
    let mut last_sign = 0.0;
    for v in x {
        if *v == 0.0 {
            continue;
        }
        let s = v.signum();
        if last_sign != 0.0 && s != last_sign {
            count += 1;
        }
        last_sign = s;
    }
    count
}

/// Whether |#extrema - #zero crossings| <= 1.
pub fn satisfies_imf_balance(x: &[f64]) -> bool {
    let e = find_extrema(x).count() as i64;
    let z = zero_crossings(x) as i64;
    (e - z).abs() <= 1
}

/// Envelope through the given extrema, mirrored about both ends of the series.
fn envelope(x: &[f64], idx: &[usize]) -> Vec<f64> {
    let n = x.len();
    let last = (n - 1) as f64;
    let first = idx[0];
    let end = idx[idx.len() - 1];
    let mut xs = Vec::with_capacity(idx.len() + 2);
    let mut ys = Vec::with_capacity(idx.len() + 2);
    if first > 0 {
        xs.push(-(first as f64));
        ys.push(x[first]);
    }
    for &i in idx {
        xs.push(i as f64);
        ys.push(x[i]);
    }
    if end < n - 1 {
        xs.push(2.0 * last - end as f64);
        ys.push(x[end]);
    }
    if xs.len() == 1 {
        return vec![ys[0]; n];
    }
    natural_cubic_on_grid(&xs, &ys, n)
}

/// Extract one IMF by repeated envelope-mean subtraction. Returns `None` when
/// the input has too few extrema to build both envelopes.
pub fn sift(x: &[f64], cfg: SiftConfig) -> Option<Vec<f64>> {
    let mut h = x.to_vec();
    let mut stable = 0;
    let mut prev: Option<(usize, usize, usize)> = None;
    let mut done = 0;
    loop {
        let ext = find_extrema(&h);
        if ext.maxima.is_empty() || ext.minima.is_empty() {
            return if done == 0 { None } else { Some(h) };
        }
        let counts = (ext.maxima.len(), ext.minima.len(), zero_crossings(&h));
        if done > 0 {
            let balanced = (counts.0 as i64 + counts.1 as i64 - counts.2 as i64).abs() <= 1;
            if balanced && prev == Some(counts) {
                stable += 1;
            } else {
                stable = 0;
            }
            if stable >= cfg.s_number || done >= cfg.max_siftings {
                return Some(h);
            }
        }
        prev = Some(counts);
        let upper = envelope(&h, &ext.maxima);
        let lower = envelope(&h, &ext.minima);
        for ((v, u), l) in h.iter_mut().zip(&upper).zip(&lower) {
            *v -= 0.5 * (u + l);
        }
        done += 1;
    }
}

/// Plain EMD into `num_imfs - 1` modes plus a residual (all length n).
pub fn emd(x: &[f64], num_imfs: usize, cfg: SiftConfig) -> Vec<Vec<f64>> {
    let mut res = x.to_vec();
    let mut out = Vec::with_capacity(num_imfs);
    for _ in 0..num_imfs.saturating_sub(1) {
        match sift(&res, cfg) {
            Some(imf) => {
                for (r, v) in res.iter_mut().zip(&imf) {
                    *r -= v;
                }
                out.push(imf);
            }
            None => out.push(vec![0.0; x.len()]),
        }
    }
    out.push(res);
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CeemdanConfig {
    pub ensemble_size: usize,
    /// Noise standard deviation as a fraction of the input's.
    pub noise_strength: f64,
    pub sift: SiftConfig,
    pub seed: u64,
    /// Total output columns including the residual; `None` means floor(log2 n).
    pub num_imfs: Option<usize>,
}

impl CeemdanConfig {
    pub fn new(seed: u64) -> Self {
        CeemdanConfig {
            ensemble_size: 250,
            noise_strength: 0.2,
            sift: SiftConfig::default(),
            seed,
            num_imfs: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImfSet {
    /// Columns: IMFs in extraction order, then the residual.
    pub imfs: Vec<Vec<f64>>,
    pub ensemble_size: usize,
    pub noise_strength: f64,
    pub s_number: usize,
    pub max_siftings: usize,
    pub seed: u64,
    /// Stage at which the residual ran out of extrema, if it did.
    pub terminated_at: Option<usize>,
    /// Extrema/zero-crossing balance per non-residual column.
    pub imf_balance: Vec<bool>,
}

impl ImfSet {
    pub fn len(&self) -> usize {
        self.imfs[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.imfs.is_empty() || self.imfs[0].is_empty()
    }

    pub fn reconstruct(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        for col in &self.imfs {
            for (o, v) in out.iter_mut().zip(col) {
                *o += v;
            }
        }
        out
    }

    /// Mean period in samples implied by the zero crossings of a column.
    pub fn mean_period(&self, column: usize) -> Option<f64> {
        let z = zero_crossings(&self.imfs[column]);
        (z > 0).then(|| 2.0 * self.len() as f64 / z as f64)
    }

    pub fn to_csv(&self) -> String {
        let k = self.imfs.len();
        let mut header: Vec<String> = (1..k).map(|i| format!("imf{i}")).collect();
        header.push("residual".into());
        let mut out = header.join(",");
        out.push('\n');
        for t in 0..self.len() {
            let row: Vec<String> = self.imfs.iter().map(|c| c[t].to_string()).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

fn member_rng(seed: u64, member: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(member as u64);
    rng
}

/// EMD modes of one member's white noise, each rescaled to unit sd.
fn noise_modes(seed: u64, member: usize, n: usize, modes: usize, cfg: SiftConfig) -> Vec<Vec<f64>> {
    let mut rng = member_rng(seed, member);
    let w: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    emd(&w, modes + 1, cfg)
        .into_iter()
        .take(modes)
        .map(|mut m| {
            let s = sd(&m);
            if s > 0.0 {
                m.iter_mut().for_each(|v| *v /= s);
            }
            m
        })
        .collect()
}

/// Complete ensemble EMD with adaptive noise. Members are evaluated in
/// parallel and averaged in index order, so output does not depend on the
/// thread count.
pub fn ceemdan(x: &[f64], cfg: &CeemdanConfig) -> Result<ImfSet> {
    let n = x.len();
    require_len(n, 64)?;
    if cfg.ensemble_size == 0 {
        return Err(Error::Parameter("ensemble size must be positive".into()));
    }
    if !(cfg.noise_strength >= 0.0 && cfg.noise_strength.is_finite()) {
        return Err(Error::Parameter(format!(
            "noise strength {} must be a finite non-negative number",
            cfg.noise_strength
        )));
    }
    if cfg.sift.s_number == 0 || cfg.sift.max_siftings == 0 {
        return Err(Error::Parameter("S-number and max siftings must be positive".into()));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Parameter("series contains non-finite values".into()));
    }
    let k = cfg.num_imfs.unwrap_or_else(|| (n as f64).log2().floor() as usize);
    if k < 2 {
        return Err(Error::Parameter("need at least one IMF plus the residual".into()));
    }
    let beta = cfg.noise_strength * sd(x);
    let modes: Vec<Vec<Vec<f64>>> = (0..cfg.ensemble_size)
        .into_par_iter()
        .map(|m| noise_modes(cfg.seed, m, n, k - 1, cfg.sift))
        .collect();

    let mut res = x.to_vec();
    let mut imfs = Vec::with_capacity(k);
    let mut terminated_at = None;
    for stage in 0..k - 1 {
        if find_extrema(&res).count() < 4 {
            terminated_at = Some(stage);
            break;
        }
        let members: Vec<Option<Vec<f64>>> = modes
            .par_iter()
            .map(|m| {
                let noisy: Vec<f64> = res.iter().zip(&m[stage]).map(|(r, w)| r + beta * w).collect();
                sift(&noisy, cfg.sift).map(|imf| {
                    // local mean of this member: what the sift removed
                    noisy.iter().zip(&imf).map(|(a, b)| a - b).collect::<Vec<f64>>()
                })
            })
            .collect();
        let mut local_mean = vec![0.0; n];
        let mut used = 0usize;
        for m in members.iter().flatten() {
            for (a, v) in local_mean.iter_mut().zip(m) {
                *a += v;
            }
            used += 1;
        }
        if used == 0 {
            terminated_at = Some(stage);
            break;
        }
        let inv = 1.0 / used as f64;
        let imf: Vec<f64> = res.iter().zip(&local_mean).map(|(r, m)| r - m * inv).collect();
        for (r, v) in res.iter_mut().zip(&imf) {
            *r -= v;
        }
        imfs.push(imf);
    }
    while imfs.len() < k - 1 {
        imfs.push(vec![0.0; n]);
    }
    let imf_balance = imfs.iter().map(|c| satisfies_imf_balance(c)).collect();
    imfs.push(res);
    Ok(ImfSet {
        imfs,
        ensemble_size: cfg.ensemble_size,
        noise_strength: cfg.noise_strength,
        s_number: cfg.sift.s_number,
        max_siftings: cfg.sift.max_siftings,
        seed: cfg.seed,
        terminated_at,
        imf_balance,
    })
}
