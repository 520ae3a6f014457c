//! Additive decompositions (STL, refined moving average) and CEEMDAN.

mod emd;
mod rmaf;
mod spline;
mod stl;

use serde::{Deserialize, Serialize};

pub use emd::{
    ceemdan, emd, find_extrema, satisfies_imf_balance, sift, zero_crossings, CeemdanConfig,
    Extrema, ImfSet, SiftConfig,
};
pub use rmaf::{boundary_ma, plugin_half_width, seasonal_profile, truncated_ma};
pub use spline::natural_cubic_on_grid;
pub use stl::StlParams;

use crate::error::{require_len, Error, Result};
use crate::series::MonthlySeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Stl,
    Rmaf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub method: Method,
    pub seasonal: Vec<f64>,
    pub trend: Vec<f64>,
    pub remainder: Vec<f64>,
    /// Trend half-width in samples (RMAF only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trend_half_width: Option<usize>,
}

impl Decomposition {
    fn assemble(method: Method, x: &[f64], seasonal: Vec<f64>, trend: Vec<f64>, q: Option<usize>) -> Self {
        let remainder = x
            .iter()
            .zip(&seasonal)
            .zip(&trend)
            .map(|((v, s), t)| v - s - t)
            .collect();
        Decomposition {
            method,
            seasonal,
            trend,
            remainder,
            trend_half_width: q,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("trend,seasonal,remainder\n");
        for i in 0..self.trend.len() {
            out.push_str(&format!(
                "{},{},{}\n",
                self.trend[i], self.seasonal[i], self.remainder[i]
            ));
        }
        out
    }
}

fn check_values(x: &[f64]) -> Result<()> {
    if x.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Parameter("series contains non-finite values".into()))
    }
}

pub fn stl_decompose(series: &MonthlySeries, s_window: usize) -> Result<Decomposition> {
    stl_values(&series.values, series.frequency, s_window)
}

pub fn stl_values(x: &[f64], period: usize, s_window: usize) -> Result<Decomposition> {
    if s_window < 3 {
        return Err(Error::Parameter(format!("seasonal window {s_window} below 3")));
    }
    if period < 2 {
        return Err(Error::Parameter("STL needs a period of at least 2".into()));
    }
    check_values(x)?;
    require_len(x.len(), 2 * period + 1)?;
    let (seasonal, trend) = stl::stl(x, &StlParams::new(period, s_window));
    Ok(Decomposition::assemble(Method::Stl, x, seasonal, trend, None))
}

pub fn rmaf_decompose(series: &MonthlySeries, period: usize) -> Result<Decomposition> {
    rmaf_values(&series.values, period, None)
}

/// RMAF with an optional fixed trend half-width.
pub fn rmaf_values(x: &[f64], period: usize, half_width: Option<usize>) -> Result<Decomposition> {
    if period < 2 {
        return Err(Error::Parameter(format!("RMAF period {period} below 2")));
    }
    check_values(x)?;
    require_len(x.len(), 3 * period)?;
    let pilot = boundary_ma(x, period);
    let seasonal = seasonal_profile(x, &pilot, period);
    let adjusted: Vec<f64> = x.iter().zip(&seasonal).map(|(v, s)| v - s).collect();
    let q = match half_width {
        Some(q) if q == 0 || 2 * q + 1 > x.len() => {
            return Err(Error::Parameter(format!(
                "trend half-width {q} must be in 1..={}",
                (x.len() - 1) / 2
            )))
        }
        Some(q) => q,
        None => plugin_half_width(&adjusted, period)?,
    };
    let trend = truncated_ma(&adjusted, q);
    Ok(Decomposition::assemble(Method::Rmaf, x, seasonal, trend, Some(q)))
}

pub fn ceemdan_series(series: &MonthlySeries, cfg: &CeemdanConfig) -> Result<ImfSet> {
    ceemdan(&series.values, cfg)
}
