use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use tsperiod::decomposition::{
    ceemdan_series, rmaf_values, stl_decompose, CeemdanConfig, Decomposition, ImfSet,
};
use tsperiod::descriptive::{basic_stats, SummaryStats};
use tsperiod::distribution::{nonlinearity_suite, normality_suite, seasonality_suite};
use tsperiod::report::{
    break_section, decide, efp_entry, run_report, strip_file_refs, trend_peak, unit_root_section,
    write_atomic, AnalysisConfig, BreakSection, EfpEntry, NonlinearitySection, NormalitySection,
    SeasonalitySection, TrendPeak, UnitRootSection,
};
use tsperiod::series::{acf, AcfResult};
use tsperiod::spectral::{find_frequency, find_peaks, morlet_power, PeakOptions};
use tsperiod::stationarity::{adf_test, kpss_test, long_memory, pp_test, LongMemoryEstimates};
use tsperiod::structural::{breakpoints, efp_all};
use tsperiod::{Error, MonthlySeries, Result};

#[derive(Parser)]
#[command(name = "tsperiod", version, about = "Periodicity analysis of monthly application counts")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Args)]
struct Common {
    /// CSV with PMN,PMA,TotalMD columns (optionally preceded by YYYY-MM); bundled data if omitted.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Restrict to one series (PMN, PMA or TotalMD).
    #[arg(long, global = true)]
    column: Option<String>,
    /// First observation as YYYY-MM.
    #[arg(long, global = true)]
    start: Option<String>,
    #[arg(long, global = true, default_value_t = 12)]
    freq: usize,
    /// Required by report, the nonlinearity suite and CEEMDAN.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Significance level for reject flags.
    #[arg(long, global = true, default_value_t = 0.01)]
    alpha: f64,
    /// Write JSON here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Directory for CSV side files.
    #[arg(long = "emit-csv", global = true, value_name = "DIR")]
    emit_csv: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Verb {
    /// Summary statistics and autocorrelations.
    Describe {
        #[arg(long, default_value_t = 36)]
        max_lag: usize,
    },
    /// Normality, seasonality and nonlinearity tests.
    Tests {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
    },
    /// ADF, KPSS and Phillips-Perron tables.
    Unitroot {
        #[arg(long, default_value_t = 5)]
        max_lag: usize,
    },
    /// GPH, rescaled-range and maximum-likelihood Hurst estimates.
    Longmemory,
    /// Fluctuation tests and dated breakpoints.
    Breaks {
        #[arg(long, default_value_t = 0.15)]
        min_seg_frac: f64,
        #[arg(long, default_value_t = 5)]
        max_breaks: usize,
        #[arg(long, default_value_t = 0.15)]
        bandwidth: f64,
    },
    /// STL, RMAF or CEEMDAN decomposition.
    Decompose {
        #[arg(long, value_enum, default_value_t = MethodArg::Stl)]
        method: MethodArg,
        #[arg(long, default_value_t = 12)]
        s_window: usize,
        /// Seasonal period for RMAF (defaults to --freq).
        #[arg(long)]
        period: Option<usize>,
        #[arg(long, default_value_t = 250)]
        ensemble_size: usize,
        #[arg(long, default_value_t = 0.2)]
        noise_strength: f64,
    },
    /// Morlet wavelet power and the autoregressive dominant frequency.
    Spectrum {
        #[arg(long, default_value_t = 0.01)]
        dj: f64,
        /// Average power only outside the cone of influence.
        #[arg(long)]
        coi_mask: bool,
    },
    /// Peaks of the RMAF trend.
    Peaks {
        #[arg(long)]
        min_height: Option<f64>,
        #[arg(long, default_value_t = 0.0)]
        threshold: f64,
        #[arg(long)]
        npeaks: Option<usize>,
    },
    /// Full pipeline on all three series.
    Report {
        #[arg(long, default_value_t = 250)]
        ensemble_size: usize,
        #[arg(long, default_value_t = 0.01)]
        dj: f64,
    },
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Suite {
    Normality,
    Seasonality,
    Nonlinearity,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Stl,
    Rmaf,
    Ceemdan,
}

#[derive(Serialize)]
struct PerSeries<T> {
    series: String,
    #[serde(flatten)]
    result: T,
}

#[derive(Serialize)]
struct Describe {
    summary: SummaryStats,
    acf: AcfResult,
}

#[derive(Serialize)]
struct Tests {
    #[serde(skip_serializing_if = "Option::is_none")]
    normality: Option<NormalitySection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seasonality: Option<SeasonalitySection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    nonlinearity: Option<NonlinearitySection>,
}

#[derive(Serialize)]
struct UnitRoot {
    adf: UnitRootSection,
    kpss: UnitRootSection,
    pp: UnitRootSection,
}

#[derive(Serialize)]
struct Breaks {
    efp: Vec<EfpEntry>,
    breakpoints: BreakSection,
}

#[derive(Serialize)]
#[serde(untagged)]
enum Decomposed {
    Additive(Decomposition),
    Modes(ImfSet),
}

#[derive(Serialize)]
struct Spectrum {
    dominant_frequency_samples: usize,
    dominant_period_years: f64,
    coi_masked: bool,
    periods: Vec<f64>,
    avg_power: Vec<f64>,
}

#[derive(Serialize)]
struct Peaks {
    trend_half_width: Option<usize>,
    peaks: Vec<TrendPeak>,
}

fn parse_start(text: &str) -> Result<(i32, u32)> {
    let bad = || Error::Parameter(format!("--start {text:?} is not YYYY-MM"));
    let (y, m) = text.split_once('-').ok_or_else(bad)?;
    let y: i32 = y.parse().map_err(|_| bad())?;
    let m: u32 = m.parse().map_err(|_| bad())?;
    if !(1..=12).contains(&m) {
        return Err(bad());
    }
    Ok((y, m))
}

fn config(common: &Common) -> Result<AnalysisConfig> {
    let mut cfg = AnalysisConfig {
        input: common.input.clone(),
        frequency: common.freq,
        seed: common.seed,
        alpha: common.alpha,
        ..AnalysisConfig::default()
    };
    if let Some(start) = &common.start {
        (cfg.start_year, cfg.start_month) = parse_start(start)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn selected(cfg: &AnalysisConfig, column: Option<&str>) -> Result<Vec<MonthlySeries>> {
    let bundle = cfg.load()?;
    match column {
        None => Ok(bundle.iter().cloned().collect()),
        Some(c) => bundle
            .get(c)
            .cloned()
            .map(|s| vec![s])
            .ok_or_else(|| Error::Parameter(format!("unknown column {c:?}; expected PMN, PMA or TotalMD"))),
    }
}

fn per_series<T>(
    series: &[MonthlySeries],
    module: &str,
    f: impl Fn(&MonthlySeries) -> Result<T>,
) -> Result<Vec<PerSeries<T>>> {
    series
        .iter()
        .map(|s| {
            f(s).map(|result| PerSeries { series: s.name.clone(), result })
                .map_err(|e| e.context(format!("{}: {module}", s.name)))
        })
        .collect()
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| Error::Numeric(format!("serializing output: {e}")))
}

fn emit(out: Option<&Path>, json: &str) -> Result<()> {
    match out {
        Some(path) => write_atomic(path, json),
        None => {
            use std::io::Write;
            // A closed pipe (e.g. `| head`) is not a failure.
            match writeln!(std::io::stdout().lock(), "{json}") {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Error::Io(e)),
                _ => Ok(()),
            }
        }
    }
}

fn write_side_files(dir: Option<&Path>, files: &[(String, String)]) -> Result<()> {
    if let Some(dir) = dir {
        std::fs::create_dir_all(dir)?;
        for (name, body) in files {
            write_atomic(&dir.join(name), body)?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let common = &cli.common;
    let mut cfg = config(common)?;
    let out = common.out.as_deref();
    let csv_dir = common.emit_csv.as_deref();
    let alpha = cfg.alpha;

    if let Verb::Report { ensemble_size, dj } = cli.verb {
        cfg.ensemble_size = ensemble_size;
        cfg.dj = dj;
        cfg.validate()?;
        let mut bundle = run_report(&cfg)?;
        if csv_dir.is_none() {
            strip_file_refs(&mut bundle.report);
        }
        return match out {
            Some(path) => bundle.write(path, csv_dir),
            None => {
                write_side_files(csv_dir, &bundle.side_files)?;
                emit(None, &bundle.to_json()?)
            }
        };
    }

    let series = selected(&cfg, common.column.as_deref())?;
    let mut files: Vec<(String, String)> = Vec::new();
    let json = match cli.verb {
        Verb::Describe { max_lag } => to_json(&per_series(&series, "describe", |s| {
            Ok(Describe { summary: basic_stats(s)?, acf: acf(s, max_lag)? })
        })?)?,
        Verb::Tests { suite } => {
            let want = |s: Suite| suite == Suite::All || suite == s;
            let seed = if want(Suite::Nonlinearity) { Some(cfg.require_seed()?) } else { None };
            to_json(&per_series(&series, "tests", |s| {
                let normality = if want(Suite::Normality) {
                    let n = normality_suite(s)?;
                    Some(NormalitySection {
                        anderson_darling: decide(n.anderson_darling, alpha),
                        cramer_von_mises: decide(n.cramer_von_mises, alpha),
                        lilliefors: decide(n.lilliefors, alpha),
                    })
                } else {
                    None
                };
                let seasonality = if want(Suite::Seasonality) {
                    let q = seasonality_suite(s, cfg.period())?;
                    Some(SeasonalitySection {
                        qs: decide(q.qs, alpha),
                        friedman: decide(q.friedman, alpha),
                        wo: decide(q.wo, alpha),
                        welch: decide(q.welch, alpha),
                    })
                } else {
                    None
                };
                let nonlinearity = match seed {
                    Some(seed) => {
                        let t = nonlinearity_suite(s, seed)?;
                        Some(NonlinearitySection {
                            teraesvirta: decide(t.teraesvirta, alpha),
                            white_nn: decide(t.white_nn, alpha),
                            keenan: decide(t.keenan, alpha),
                            tsay: decide(t.tsay, alpha),
                            mcleod_li: decide(t.mcleod_li, alpha),
                        })
                    }
                    None => None,
                };
                Ok(Tests { normality, seasonality, nonlinearity })
            })?)?
        }
        Verb::Unitroot { max_lag } => to_json(&per_series(&series, "unitroot", |s| {
            Ok(UnitRoot {
                adf: unit_root_section(adf_test(s, max_lag)?, "unit root", alpha),
                kpss: unit_root_section(kpss_test(s)?, "stationarity", alpha),
                pp: unit_root_section(pp_test(s)?, "unit root", alpha),
            })
        })?)?,
        Verb::Longmemory => to_json(&per_series(&series, "longmemory", |s| -> Result<LongMemoryEstimates> {
            long_memory(s)
        })?)?,
        Verb::Breaks { min_seg_frac, max_breaks, bandwidth } => {
            to_json(&per_series(&series, "breaks", |s| {
                Ok(Breaks {
                    efp: efp_all(s, bandwidth)?.into_iter().map(|e| efp_entry(e, alpha)).collect(),
                    breakpoints: break_section(s, breakpoints(s, min_seg_frac, max_breaks)?)?,
                })
            })?)?
        }
        Verb::Decompose { method, s_window, period, ensemble_size, noise_strength } => {
            let seed = match method {
                MethodArg::Ceemdan => Some(cfg.require_seed()?),
                _ => None,
            };
            let results = per_series(&series, "decompose", |s| {
                Ok(match method {
                    MethodArg::Stl => Decomposed::Additive(stl_decompose(s, s_window)?),
                    MethodArg::Rmaf => Decomposed::Additive(rmaf_values(&s.values, period.unwrap_or(s.frequency), None)?),
                    MethodArg::Ceemdan => Decomposed::Modes(ceemdan_series(
                        s,
                        &CeemdanConfig {
                            ensemble_size,
                            noise_strength,
                            ..CeemdanConfig::new(seed.unwrap_or_default())
                        },
                    )?),
                })
            })?;
            let tag = match method {
                MethodArg::Stl => "stl",
                MethodArg::Rmaf => "rmaf",
                MethodArg::Ceemdan => "ceemdan",
            };
            for r in &results {
                let body = match &r.result {
                    Decomposed::Additive(d) => d.to_csv(),
                    Decomposed::Modes(m) => m.to_csv(),
                };
                files.push((format!("{}_{tag}.csv", r.series), body));
            }
            to_json(&results)?
        }
        Verb::Spectrum { dj, coi_mask } => {
            let results = per_series(&series, "spectrum", |s| {
                let w = morlet_power(s, 1.0 / s.frequency as f64, dj)?;
                let labels = (0..s.len()).map(|i| s.month_label(i)).collect::<Result<Vec<_>>>()?;
                let avg_power = if coi_mask { w.masked_avg_power() } else { w.avg_power.clone() };
                Ok((
                    Spectrum {
                        dominant_frequency_samples: find_frequency(&s.values)?,
                        dominant_period_years: w.dominant_period(),
                        coi_masked: coi_mask,
                        periods: w.periods.clone(),
                        avg_power,
                    },
                    w.matrix_csv(&labels),
                    w.avg_power_csv(),
                ))
            })?;
            let mut payload = Vec::new();
            for r in results {
                let (spec, matrix, avg) = r.result;
                files.push((format!("{}_wavelet_power.csv", r.series), matrix));
                files.push((format!("{}_wavelet_avg_power.csv", r.series), avg));
                payload.push(PerSeries { series: r.series, result: spec });
            }
            to_json(&payload)?
        }
        Verb::Peaks { min_height, threshold, npeaks } => {
            let results = per_series(&series, "peaks", |s| {
                let d = rmaf_values(&s.values, cfg.period(), None)?;
                let opts = PeakOptions {
                    npeaks,
                    threshold,
                    min_height: min_height.unwrap_or(f64::NEG_INFINITY),
                };
                let peaks = find_peaks(&d.trend, opts)
                    .iter()
                    .map(|p| trend_peak(s, p))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Peaks { trend_half_width: d.trend_half_width, peaks })
            })?;
            for r in &results {
                let mut csv = String::from("value,index,month,left,right\n");
                for p in &r.result.peaks {
                    csv.push_str(&format!("{},{},{},{},{}\n", p.value, p.index, p.month, p.left, p.right));
                }
                files.push((format!("{}_rmaf_peaks.csv", r.series), csv));
            }
            to_json(&results)?
        }
        Verb::Report { .. } => unreachable!("handled above"),
    };
    write_side_files(csv_dir, &files)?;
    emit(out, &json)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
