//! Calendar-anchored monthly series, CSV ingestion and autocorrelation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MONTHS: [&str; 12] = [
    "Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec",
];

/// Shortest series any analysis accepts: two full yearly cycles.
pub const MIN_ANALYSIS_LEN: usize = 24;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonthlySeries {
    pub name: String,
    pub values: Vec<f64>,
    pub start_year: i32,
    pub start_month: u32,
    pub frequency: usize,
}

impl MonthlySeries {
    pub fn new(
        name: impl Into<String>,
        values: Vec<f64>,
        start_year: i32,
        start_month: u32,
        frequency: usize,
    ) -> Result<Self> {
        if !(1..=12).contains(&start_month) {
            return Err(Error::Parameter(format!(
                "start month {start_month} outside 1..=12"
            )));
        }
        if frequency == 0 {
            return Err(Error::Parameter("frequency must be positive".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Parse {
                row: i + 1,
                column: 1,
                message: "non-finite value".into(),
            });
        }
        Ok(MonthlySeries {
            name: name.into(),
            values,
            start_year,
            start_month,
            frequency,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn ensure_analysable(&self) -> Result<()> {
        crate::error::require_len(self.len(), MIN_ANALYSIS_LEN)
    }

    pub fn decimal_year(&self, index: usize) -> Result<f64> {
        self.check_index(index)?;
        Ok(decimal_year_at(self.start_year, self.start_month, self.frequency, index))
    }

    pub fn month_label(&self, index: usize) -> Result<String> {
        self.check_index(index)?;
        Ok(month_label_at(self.start_year, self.start_month, index))
    }

    /// Decimal years for every index.
    pub fn times(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| decimal_year_at(self.start_year, self.start_month, self.frequency, i))
            .collect()
    }

    fn check_index(&self, index: usize) -> Result<()> {
        if index >= self.len() {
            Err(Error::IndexOutOfRange {
                index,
                len: self.len(),
            })
        } else {
            Ok(())
        }
    }

    /// Same calendar anchor, new values.
    pub fn with_values(&self, name: impl Into<String>, values: Vec<f64>) -> MonthlySeries {
        MonthlySeries {
            name: name.into(),
            values,
            start_year: self.start_year,
            start_month: self.start_month,
            frequency: self.frequency,
        }
    }
}

pub fn decimal_year_at(start_year: i32, start_month: u32, frequency: usize, index: usize) -> f64 {
    start_year as f64 + (start_month as f64 - 1.0 + index as f64) / frequency as f64
}

pub fn month_label_at(start_year: i32, start_month: u32, index: usize) -> String {
    let m = start_month as usize - 1 + index;
    format!("{} {}", MONTHS[m % 12], start_year + (m / 12) as i32)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesBundle {
    pub pmn: MonthlySeries,
    pub pma: MonthlySeries,
    pub total: MonthlySeries,
}

impl SeriesBundle {
    pub fn iter(&self) -> impl Iterator<Item = &MonthlySeries> {
        [&self.pmn, &self.pma, &self.total].into_iter()
    }

    pub fn get(&self, column: &str) -> Option<&MonthlySeries> {
        self.iter().find(|s| s.name.eq_ignore_ascii_case(column))
    }

    /// Render back to the three-column CSV layout.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("PMN,PMA,TotalMD\n");
        for i in 0..self.pmn.len() {
            out.push_str(&format!(
                "{},{},{}\n",
                self.pmn.values[i], self.pma.values[i], self.total.values[i]
            ));
        }
        out
    }
}

const COLUMNS: [&str; 3] = ["PMN", "PMA", "TotalMD"];

fn parse_year_month(cell: &str) -> Option<(i32, u32)> {
    let mut parts = cell.trim().split(['-', '/']);
    let y = parts.next()?.parse().ok()?;
    let m = parts.next()?.parse().ok()?;
    Some((y, m))
}

/// Parse the PMN,PMA,TotalMD table. An optional leading YYYY-MM column is
/// accepted and checked against the anchor.
pub fn ingest_csv(
    content: &str,
    start_year: i32,
    start_month: u32,
    frequency: usize,
) -> Result<SeriesBundle> {
    let mut lines = content.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or(Error::InsufficientData {
        needed: MIN_ANALYSIS_LEN,
        got: 0,
    })?;
    let names: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
    let offset = match names.len() {
        3 => 0,
        4 => 1,
        _ => {
            return Err(Error::Parse {
                row: 0,
                column: 0,
                message: format!("expected header PMN,PMA,TotalMD, got {header:?}"),
            })
        }
    };
    for (j, want) in COLUMNS.iter().enumerate() {
        if !names[j + offset].eq_ignore_ascii_case(want) {
            return Err(Error::Parse {
                row: 0,
                column: j + offset + 1,
                message: format!("expected column {want}, found {:?}", names[j + offset]),
            });
        }
    }

    let mut cols: [Vec<f64>; 3] = Default::default();
    for (line_no, line) in lines {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != names.len() {
            return Err(Error::Parse {
                row: line_no,
                column: cells.len(),
                message: format!("expected {} cells", names.len()),
            });
        }
        let idx = cols[0].len();
        if offset == 1 {
            let expect_m = start_month as usize - 1 + idx;
            let expect = (start_year + (expect_m / 12) as i32, (expect_m % 12) as u32 + 1);
            match parse_year_month(cells[0]) {
                Some(ym) if ym == expect => {}
                _ => {
                    return Err(Error::Parse {
                        row: line_no,
                        column: 1,
                        message: format!(
                            "date {:?} does not match anchor {}-{:02}",
                            cells[0], expect.0, expect.1
                        ),
                    })
                }
            }
        }
        for j in 0..3 {
            let raw = cells[j + offset].trim();
            let v: f64 = raw.parse().map_err(|_| Error::Parse {
                row: line_no,
                column: j + offset + 1,
                message: format!("cannot parse {raw:?} as a number"),
            })?;
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Parse {
                    row: line_no,
                    column: j + offset + 1,
                    message: format!("{raw:?} is not a non-negative count"),
                });
            }
            cols[j].push(v);
        }
        let (a, b, t) = (cols[0][idx], cols[1][idx], cols[2][idx]);
        if a + b != t {
            return Err(Error::Consistency {
                row: line_no,
                pmn: a,
                pma: b,
                total: t,
            });
        }
    }
    crate::error::require_len(cols[0].len(), MIN_ANALYSIS_LEN)?;
    let [pmn, pma, total] = cols;
    Ok(SeriesBundle {
        pmn: MonthlySeries::new("PMN", pmn, start_year, start_month, frequency)?,
        pma: MonthlySeries::new("PMA", pma, start_year, start_month, frequency)?,
        total: MonthlySeries::new("TotalMD", total, start_year, start_month, frequency)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcfResult {
    pub max_lag: usize,
    pub rho: Vec<f64>,
    pub ci_halfwidth: f64,
}

pub fn acf(series: &MonthlySeries, max_lag: usize) -> Result<AcfResult> {
    acf_values(&series.values, max_lag)
}

pub fn acf_values(x: &[f64], max_lag: usize) -> Result<AcfResult> {
    let n = x.len();
    if max_lag >= n {
        return Err(Error::Parameter(format!(
            "max_lag {max_lag} must be below the series length {n}"
        )));
    }
    let m = crate::numeric::mean(x);
    let xc: Vec<f64> = x.iter().map(|v| v - m).collect();
    let denom: f64 = xc.iter().map(|v| v * v).sum();
    if denom <= 0.0 {
        return Err(Error::Degenerate("autocorrelation of a constant series".into()));
    }
    let mut rho = Vec::with_capacity(max_lag + 1);
    rho.push(1.0);
    for k in 1..=max_lag {
        let s: f64 = xc[..n - k].iter().zip(&xc[k..]).map(|(a, b)| a * b).sum();
        rho.push(s / denom);
    }
    Ok(AcfResult {
        max_lag,
        rho,
        ci_halfwidth: 1.96 / (n as f64).sqrt(),
    })
}
