//! Canonical economic cycle bands.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CycleBand {
    #[serde(rename = "seasonal/yearly")]
    Seasonal,
    #[serde(rename = "kitchin")]
    Kitchin,
    #[serde(rename = "juglar")]
    Juglar,
    #[serde(rename = "kuznets")]
    Kuznets,
    #[serde(rename = "kondratieff")]
    Kondratieff,
    #[serde(rename = "unclassified")]
    Unclassified,
}

/// Band limits in years and whether the upper limit is inclusive.
const BANDS: [(CycleBand, f64, f64, bool); 5] = [
    (CycleBand::Seasonal, 0.2, 1.5, false),
    (CycleBand::Kitchin, 2.5, 4.5, false),
    (CycleBand::Juglar, 4.5, 11.0, false),
    (CycleBand::Kuznets, 15.0, 25.0, true),
    (CycleBand::Kondratieff, 40.0, 60.0, true),
];

/// Noted in reports: the Juglar band starts at 4.5 rather than the canonical 7
/// so that observed 5-6 year cycles fall inside it.
pub const JUGLAR_NOTE: &str = "juglar band widened to 4.5-11 years (canonical 7-11) so that 5-6 year cycles classify as juglar";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleClassification {
    pub period_years: f64,
    pub band: CycleBand,
    /// `None` for unclassified periods.
    pub band_range: Option<(f64, f64)>,
}

pub fn classify_cycles(period_years: f64) -> Result<CycleClassification> {
    if !(period_years > 0.0) || !period_years.is_finite() {
        return Err(Error::Parameter(format!(
            "cycle period {period_years} must be positive and finite"
        )));
    }
    let hit = BANDS.iter().find(|(_, lo, hi, closed)| {
        period_years >= *lo && (period_years < *hi || (*closed && period_years == *hi))
    });
    Ok(match hit {
        Some((band, lo, hi, _)) => CycleClassification {
            period_years,
            band: *band,
            band_range: Some((*lo, *hi)),
        },
        None => CycleClassification {
            period_years,
            band: CycleBand::Unclassified,
            band_range: None,
        },
    })
}
