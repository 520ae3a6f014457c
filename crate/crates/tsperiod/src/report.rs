//! End-to-end pipeline over the three series, producing the JSON report and
//! CSV side files.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cycles::{classify_cycles, CycleClassification, JUGLAR_NOTE};
use crate::decomposition::{ceemdan_series, rmaf_values, stl_decompose, CeemdanConfig};
use crate::descriptive::{basic_stats, SummaryStats};
use crate::distribution::{nonlinearity_suite, normality_suite, seasonality_suite};
use crate::error::{Error, Result};
use crate::hypothesis::{rejects, PBound, TestResult};
use crate::series::{ingest_csv, MonthlySeries, SeriesBundle};
use crate::spectral::{excursion_maxima, find_frequency, find_peaks, morlet_power, PeakOptions, Peak};
use crate::stationarity::{
    adf_test, kpss_test, long_memory, pp_test, Deterministic, LongMemoryEstimates, UnitRootTable,
};
use crate::structural::{breakpoints, efp_all, BreakpointSet, EfpResult, ProcessType};

/// JSON schema for [`Report`].
pub const REPORT_SCHEMA: &str = include_str!("../schema/report.schema.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    /// `None` analyses the bundled data set.
    pub input: Option<PathBuf>,
    pub start_year: i32,
    pub start_month: u32,
    pub frequency: usize,
    /// Required by CEEMDAN and the neural-network linearity test.
    pub seed: Option<u64>,
    pub alpha: f64,
    pub max_lag: usize,
    pub min_seg_frac: f64,
    pub max_breaks: usize,
    pub efp_bandwidth: f64,
    pub ensemble_size: usize,
    pub noise_strength: f64,
    pub dj: f64,
    pub s_window: usize,
    /// Seasonal period for RMAF and the seasonality tests; defaults to `frequency`.
    pub period: Option<usize>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            input: None,
            start_year: crate::fixture::START_YEAR,
            start_month: crate::fixture::START_MONTH,
            frequency: 12,
            seed: None,
            alpha: 0.01,
            max_lag: 5,
            min_seg_frac: 0.15,
            max_breaks: 5,
            efp_bandwidth: 0.15,
            ensemble_size: 250,
            noise_strength: 0.2,
            dj: 0.01,
            s_window: 12,
            period: None,
        }
    }
}

impl AnalysisConfig {
    pub fn with_seed(seed: u64) -> Self {
        AnalysisConfig {
            seed: Some(seed),
            ..Default::default()
        }
    }

    pub fn period(&self) -> usize {
        self.period.unwrap_or(self.frequency)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Parameter(m));
        if !(self.alpha > 0.0 && self.alpha < 0.5) {
            return bad(format!("alpha {} outside (0, 0.5)", self.alpha));
        }
        if !(1..=12).contains(&self.start_month) {
            return bad(format!("start month {} outside 1..=12", self.start_month));
        }
        if self.frequency < 2 {
            return bad(format!("frequency {} below 2", self.frequency));
        }
        if !(self.dj > 0.0 && self.dj <= 1.0) {
            return bad(format!("dj {} outside (0, 1]", self.dj));
        }
        if self.ensemble_size == 0 {
            return bad("ensemble size must be positive".into());
        }
        Ok(())
    }

    pub fn require_seed(&self) -> Result<u64> {
        self.seed
            .ok_or_else(|| Error::Parameter("a seed is required for CEEMDAN and the neural-network test".into()))
    }

    /// Reads `input` (or the bundled data) with the configured calendar anchor.
    pub fn load(&self) -> Result<SeriesBundle> {
        match &self.input {
            None => Ok(crate::fixture::load()),
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| Error::Io(e).context(format!("reading {}", path.display())))?;
                ingest_csv(&text, self.start_year, self.start_month, self.frequency)
            }
        }
    }
}

/// A test result together with its decision at the configured level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decided<T> {
    #[serde(flatten)]
    pub result: T,
    pub reject: bool,
}

pub fn decide(result: TestResult, alpha: f64) -> Decided<TestResult> {
    let reject = result.rejects(alpha);
    Decided { result, reject }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalitySection {
    pub anderson_darling: Decided<TestResult>,
    pub cramer_von_mises: Decided<TestResult>,
    pub lilliefors: Decided<TestResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeasonalitySection {
    pub qs: Decided<TestResult>,
    pub friedman: Decided<TestResult>,
    pub wo: Decided<TestResult>,
    pub welch: Decided<TestResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonlinearitySection {
    pub teraesvirta: Decided<TestResult>,
    pub white_nn: Decided<TestResult>,
    pub keenan: Decided<TestResult>,
    pub tsay: Decided<TestResult>,
    pub mcleod_li: Decided<TestResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitRootEntry {
    pub deterministic: Deterministic,
    pub lag: usize,
    pub statistic: f64,
    pub p_value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_bound: Option<PBound>,
    pub reject: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitRootSection {
    pub test_name: String,
    pub null_hypothesis: String,
    pub rows: Vec<UnitRootEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfpEntry {
    pub process_type: ProcessType,
    pub statistic: f64,
    pub p_value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_bound: Option<PBound>,
    pub bandwidth: f64,
    pub reject: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BreakSection {
    #[serde(flatten)]
    pub set: BreakpointSet,
    pub break_months: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionSection {
    pub stl_file: Option<String>,
    pub s_window: usize,
    pub rmaf_file: Option<String>,
    pub rmaf_period: usize,
    pub rmaf_trend_half_width: Option<usize>,
    pub ceemdan_file: Option<String>,
    pub ceemdan_seed: u64,
    pub ensemble_size: usize,
    pub noise_strength: f64,
    pub imf_count: usize,
    pub terminated_at: Option<usize>,
    pub imf_balance: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSection {
    pub power_file: Option<String>,
    pub avg_power_file: Option<String>,
    pub dt: f64,
    pub dj: f64,
    pub period_count: usize,
    pub dominant_period_years: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominantFrequency {
    pub samples: usize,
    pub classification: Option<CycleClassification>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImfPeriod {
    pub column: usize,
    pub classification: CycleClassification,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendPeak {
    pub index: usize,
    pub month: String,
    pub value: f64,
    pub left: usize,
    pub right: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LongCycle {
    /// Highest RMAF-trend point of each excursion above the trend mean.
    pub peaks: Vec<TrendPeak>,
    pub separation_months: f64,
    pub classification: CycleClassification,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodSection {
    pub dominant_frequency: DominantFrequency,
    pub wavelet_peaks: Vec<CycleClassification>,
    pub imf_periods: Vec<ImfPeriod>,
    /// IMF column with the longest mean zero-crossing period.
    pub imf_trend_column: Option<usize>,
    pub long_cycle: Option<LongCycle>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesReport {
    pub name: String,
    pub n: usize,
    pub start: String,
    pub summary: SummaryStats,
    pub normality: NormalitySection,
    pub seasonality: SeasonalitySection,
    pub nonlinearity: NonlinearitySection,
    pub adf: UnitRootSection,
    pub kpss: UnitRootSection,
    pub pp: UnitRootSection,
    pub long_memory: LongMemoryEstimates,
    pub efp: Vec<EfpEntry>,
    pub breakpoints: BreakSection,
    pub decompositions: DecompositionSection,
    pub spectrum: SpectrumSection,
    pub periods: PeriodSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub generated_unix_seconds: u64,
    pub config: AnalysisConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub metadata: Metadata,
    pub notes: Vec<String>,
    pub series: Vec<SeriesReport>,
}

/// A report plus the CSV side files it references, held in memory until written.
#[derive(Debug, Clone)]
pub struct ReportBundle {
    pub report: Report,
    pub side_files: Vec<(String, String)>,
}

impl ReportBundle {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(&self.report)
            .map_err(|e| Error::Numeric(format!("serializing report: {e}")))
    }

    /// Writes side files (when `csv_dir` is given) and then the JSON, each via a
    /// temporary file and rename so that no partial file is left behind.
    pub fn write(&self, out: &Path, csv_dir: Option<&Path>) -> Result<()> {
        let json = self.to_json()?;
        if let Some(dir) = csv_dir {
            fs::create_dir_all(dir)?;
            for (name, body) in &self.side_files {
                write_atomic(&dir.join(name), body)?;
            }
        }
        write_atomic(out, &json)
    }
}

pub fn write_atomic(path: &Path, body: &str) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, body)
        .and_then(|_| fs::rename(&tmp, path))
        .map_err(|e| {
            let _ = fs::remove_file(&tmp);
            Error::Io(e).context(format!("writing {}", path.display()))
        })
}

pub fn unit_root_section(table: UnitRootTable, null: &str, alpha: f64) -> UnitRootSection {
    UnitRootSection {
        test_name: table.test_name,
        null_hypothesis: null.to_string(),
        rows: table
            .rows
            .into_iter()
            .map(|r| UnitRootEntry {
                reject: rejects(r.p_value, r.p_bound, alpha),
                deterministic: r.deterministic,
                lag: r.lag,
                statistic: r.statistic,
                p_value: r.p_value,
                p_bound: r.p_bound,
            })
            .collect(),
    }
}

pub fn efp_entry(e: EfpResult, alpha: f64) -> EfpEntry {
    EfpEntry {
        reject: rejects(e.p_value, e.p_bound, alpha),
        process_type: e.process_type,
        statistic: e.statistic,
        p_value: e.p_value,
        p_bound: e.p_bound,
        bandwidth: e.bandwidth,
    }
}

pub fn break_section(series: &MonthlySeries, set: BreakpointSet) -> Result<BreakSection> {
    let break_months = set
        .break_indices
        .iter()
        .map(|&i| series.month_label(i))
        .collect::<Result<Vec<_>>>()?;
    Ok(BreakSection { set, break_months })
}

pub fn trend_peak(series: &MonthlySeries, p: &Peak) -> Result<TrendPeak> {
    Ok(TrendPeak {
        index: p.index,
        month: series.month_label(p.index)?,
        value: p.value,
        left: p.left,
        right: p.right,
    })
}

fn in_module<T>(series: &str, module: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| e.context(format!("{series}: {module}")))
}

fn analyse(series: &MonthlySeries, cfg: &AnalysisConfig, seed: u64) -> Result<(SeriesReport, Vec<(String, String)>)> {
    let name = series.name.as_str();
    let alpha = cfg.alpha;
    let period = cfg.period();
    let emit = |suffix: &str| format!("{name}_{suffix}.csv");
    let mut files = Vec::new();

    let summary = in_module(name, "descriptive", basic_stats(series))?;
    let norm = in_module(name, "normality", normality_suite(series))?;
    let seas = in_module(name, "seasonality", seasonality_suite(series, period))?;
    let nonlin = in_module(name, "nonlinearity", nonlinearity_suite(series, seed))?;
    let adf = in_module(name, "adf", adf_test(series, cfg.max_lag))?;
    let kpss = in_module(name, "kpss", kpss_test(series))?;
    let pp = in_module(name, "phillips-perron", pp_test(series))?;
    let lm = in_module(name, "long memory", long_memory(series))?;
    let efp = in_module(name, "efp", efp_all(series, cfg.efp_bandwidth))?;
    let bp = in_module(name, "breakpoints", breakpoints(series, cfg.min_seg_frac, cfg.max_breaks))?;

    let stl = in_module(name, "stl", stl_decompose(series, cfg.s_window))?;
    let rmaf = in_module(name, "rmaf", rmaf_values(&series.values, period, None))?;
    let ceemdan_cfg = CeemdanConfig {
        ensemble_size: cfg.ensemble_size,
        noise_strength: cfg.noise_strength,
        ..CeemdanConfig::new(seed)
    };
    let imfs = in_module(name, "ceemdan", ceemdan_series(series, &ceemdan_cfg))?;
    let dt = 1.0 / series.frequency as f64;
    let wavelet = in_module(name, "wavelet", morlet_power(series, dt, cfg.dj))?;
    let dominant = in_module(name, "dominant frequency", find_frequency(&series.values))?;

    files.push((emit("stl"), stl.to_csv()));
    files.push((emit("rmaf"), rmaf.to_csv()));
    files.push((emit("ceemdan"), imfs.to_csv()));
    let labels = (0..series.len())
        .map(|i| series.month_label(i))
        .collect::<Result<Vec<_>>>()?;
    files.push((emit("wavelet_power"), wavelet.matrix_csv(&labels)));
    files.push((emit("wavelet_avg_power"), wavelet.avg_power_csv()));

    let trend_peaks = find_peaks(&rmaf.trend, PeakOptions::default());
    let mut peak_csv = String::from("value,index,month,left,right\n");
    for p in &trend_peaks {
        peak_csv.push_str(&format!("{},{},{},{},{}\n", p.value, p.index, labels[p.index], p.left, p.right));
    }
    files.push((emit("rmaf_peaks"), peak_csv));

    let classify = |years: f64| in_module(name, "cycles", classify_cycles(years));
    let dominant_frequency = DominantFrequency {
        samples: dominant,
        classification: if dominant > 1 {
            Some(classify(dominant as f64 * dt)?)
        } else {
            None
        },
    };
    let wavelet_peaks = find_peaks(&wavelet.avg_power, PeakOptions::default())
        .iter()
        .map(|p| classify(wavelet.periods[p.index]))
        .collect::<Result<Vec<_>>>()?;
    let mut imf_periods = Vec::new();
    for c in 0..imfs.imfs.len() - 1 {
        if let Some(p) = imfs.mean_period(c) {
            imf_periods.push(ImfPeriod {
                column: c,
                classification: classify(p * dt)?,
            });
        }
    }
    let imf_trend_column = imf_periods
        .iter()
        .max_by(|a, b| a.classification.period_years.total_cmp(&b.classification.period_years))
        .map(|p| p.column);

    let maxima = excursion_maxima(&rmaf.trend);
    let long_cycle = if maxima.len() >= 2 {
        let gap = (maxima[maxima.len() - 1] - maxima[0]) as f64 / (maxima.len() - 1) as f64;
        let peaks = maxima
            .iter()
            .map(|&i| {
                let p = trend_peaks
                    .iter()
                    .find(|p| p.index == i)
                    .cloned()
                    .unwrap_or(Peak { value: rmaf.trend[i], index: i, left: i, right: i });
                trend_peak(series, &p)
            })
            .collect::<Result<Vec<_>>>()?;
        Some(LongCycle {
            peaks,
            separation_months: gap,
            classification: classify(gap * dt)?,
        })
    } else {
        None
    };

    let report = SeriesReport {
        name: name.to_string(),
        n: series.len(),
        start: format!("{}-{:02}", series.start_year, series.start_month),
        summary,
        normality: NormalitySection {
            anderson_darling: decide(norm.anderson_darling, alpha),
            cramer_von_mises: decide(norm.cramer_von_mises, alpha),
            lilliefors: decide(norm.lilliefors, alpha),
        },
        seasonality: SeasonalitySection {
            qs: decide(seas.qs, alpha),
            friedman: decide(seas.friedman, alpha),
            wo: decide(seas.wo, alpha),
            welch: decide(seas.welch, alpha),
        },
        nonlinearity: NonlinearitySection {
            teraesvirta: decide(nonlin.teraesvirta, alpha),
            white_nn: decide(nonlin.white_nn, alpha),
            keenan: decide(nonlin.keenan, alpha),
            tsay: decide(nonlin.tsay, alpha),
            mcleod_li: decide(nonlin.mcleod_li, alpha),
        },
        adf: unit_root_section(adf, "unit root", alpha),
        kpss: unit_root_section(kpss, "stationarity", alpha),
        pp: unit_root_section(pp, "unit root", alpha),
        long_memory: lm,
        efp: efp.into_iter().map(|e| efp_entry(e, alpha)).collect(),
        breakpoints: break_section(series, bp)?,
        decompositions: DecompositionSection {
            stl_file: Some(emit("stl")),
            s_window: cfg.s_window,
            rmaf_file: Some(emit("rmaf")),
            rmaf_period: period,
            rmaf_trend_half_width: rmaf.trend_half_width,
            ceemdan_file: Some(emit("ceemdan")),
            ceemdan_seed: seed,
            ensemble_size: imfs.ensemble_size,
            noise_strength: imfs.noise_strength,
            imf_count: imfs.imfs.len(),
            terminated_at: imfs.terminated_at,
            imf_balance: imfs.imf_balance.clone(),
        },
        spectrum: SpectrumSection {
            power_file: Some(emit("wavelet_power")),
            avg_power_file: Some(emit("wavelet_avg_power")),
            dt,
            dj: cfg.dj,
            period_count: wavelet.periods.len(),
            dominant_period_years: wavelet.dominant_period(),
        },
        periods: PeriodSection {
            dominant_frequency,
            wavelet_peaks,
            imf_periods,
            imf_trend_column,
            long_cycle,
        },
    };
    Ok((report, files))
}

/// Runs every module on every series. Series are analysed in parallel and
/// merged in input order; the first failing series (in that order) wins.
pub fn run_report(cfg: &AnalysisConfig) -> Result<ReportBundle> {
    cfg.validate()?;
    let seed = cfg.require_seed()?;
    let bundle = cfg.load()?;
    let all: Vec<&MonthlySeries> = bundle.iter().collect();
    let results: Vec<Result<(SeriesReport, Vec<(String, String)>)>> =
        all.par_iter().map(|s| analyse(s, cfg, seed)).collect();
    let mut series = Vec::new();
    let mut side_files = Vec::new();
    for r in results {
        let (rep, files) = r?;
        series.push(rep);
        side_files.extend(files);
    }
    let generated_unix_seconds = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    Ok(ReportBundle {
        report: Report {
            metadata: Metadata {
                tool: "tsperiod".into(),
                version: env!("CARGO_PKG_VERSION").into(),
                generated_unix_seconds,
                config: cfg.clone(),
            },
            notes: vec![
                JUGLAR_NOTE.to_string(),
                "wavelet average power is not masked by the cone of influence".to_string(),
                "p-values flagged at_most/at_least are clamped at the ends of a critical-value table".to_string(),
            ],
            series,
        },
        side_files,
    })
}

/// Drops side-file references from a report that will be written without them.
pub fn strip_file_refs(report: &mut Report) {
    for s in &mut report.series {
        s.decompositions.stl_file = None;
        s.decompositions.rmaf_file = None;
        s.decompositions.ceemdan_file = None;
        s.spectrum.power_file = None;
        s.spectrum.avg_power_file = None;
    }
}
