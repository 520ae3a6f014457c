use std::sync::OnceLock;

use tsperiod::cycles::{classify_cycles, CycleBand};
use tsperiod::report::*;
use tsperiod::ErrorKind;

fn fixture_report() -> &'static ReportBundle {
    static REPORT: OnceLock<ReportBundle> = OnceLock::new();
    REPORT.get_or_init(|| run_report(&AnalysisConfig::with_seed(42)).unwrap())
}

fn normalized_json(bundle: &ReportBundle) -> String {
    let mut report = bundle.report.clone();
    report.metadata.generated_unix_seconds = 0;
    serde_json::to_string_pretty(&report).unwrap()
}

#[test]
fn cycle_bands() {
    assert_eq!(classify_cycles(24.25).unwrap().band, CycleBand::Kuznets);
    assert_eq!(classify_cycles(5.5).unwrap().band, CycleBand::Juglar);
    assert_eq!(classify_cycles(1.0).unwrap().band, CycleBand::Seasonal);
    assert_eq!(classify_cycles(100.0).unwrap().band, CycleBand::Unclassified);
    assert_eq!(classify_cycles(1.5).unwrap().band, CycleBand::Unclassified);
    assert_eq!(classify_cycles(25.0).unwrap().band, CycleBand::Kuznets);
    assert_eq!(classify_cycles(4.5).unwrap().band, CycleBand::Juglar);
    assert_eq!(classify_cycles(3.0).unwrap().band_range, Some((2.5, 4.5)));
    assert_eq!(classify_cycles(12.0).unwrap().band_range, None);
    for bad in [0.0, -2.0, f64::NAN, f64::INFINITY] {
        assert_eq!(classify_cycles(bad).unwrap_err().kind(), ErrorKind::Config);
    }
}

#[test]
fn fixture_report_contents() {
    let r = &fixture_report().report;
    assert_eq!(
        r.series.iter().map(|s| s.name.as_str()).collect::<Vec<_>>(),
        ["PMN", "PMA", "TotalMD"]
    );
    for s in &r.series {
        assert_eq!(s.breakpoints.set.break_indices.len(), 3, "{}", s.name);
        assert_eq!(s.adf.rows.len(), 18);
        assert_eq!(s.decompositions.imf_count, 9);
        assert!(s.seasonality.qs.reject);
    }
    let total = &r.series[2];
    let long = total.periods.long_cycle.as_ref().expect("long cycle");
    assert_eq!(long.separation_months, 291.0);
    assert_eq!(long.classification.period_years, 24.25);
    assert_eq!(long.classification.band, CycleBand::Kuznets);
    let months: Vec<&str> = long.peaks.iter().map(|p| p.month.as_str()).collect();
    assert_eq!(months, ["Apr 1992", "Jul 2016"]);
    assert_eq!(total.periods.dominant_frequency.samples, 3);
    assert!(r.notes.iter().any(|n| n.contains("juglar")));
}

#[test]
fn report_validates_against_schema() {
    let schema: serde_json::Value = serde_json::from_str(REPORT_SCHEMA).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let mut doc: serde_json::Value = serde_json::from_str(&fixture_report().to_json().unwrap()).unwrap();
    let errors: Vec<String> = validator.iter_errors(&doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:#?}");
    doc["series"][0]["breakpoints"]["chosen_m"] = serde_json::json!("three");
    assert!(!validator.is_valid(&doc));
}

#[test]
fn identical_config_gives_identical_json() {
    let again = run_report(&AnalysisConfig::with_seed(42)).unwrap();
    assert_eq!(normalized_json(fixture_report()), normalized_json(&again));
}

#[test]
fn writes_json_and_side_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let csv = dir.path().join("csv");
    fixture_report().write(&out, Some(&csv)).unwrap();
    let text = std::fs::read_to_string(&out).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
    let stl = parsed["series"][0]["decompositions"]["stl_file"].as_str().unwrap();
    let body = std::fs::read_to_string(csv.join(stl)).unwrap();
    assert!(body.starts_with("trend,seasonal,remainder\n"));
    assert_eq!(body.lines().count(), 537);
    let power = std::fs::read_to_string(csv.join("PMN_wavelet_power.csv")).unwrap();
    assert!(power.lines().next().unwrap().starts_with("period,May 1976,Jun 1976"));
    assert!(csv.join("TotalMD_rmaf_peaks.csv").exists());
    let leftovers = std::fs::read_dir(dir.path())
        .unwrap()
        .filter(|e| e.as_ref().unwrap().file_name().to_string_lossy().ends_with(".partial"))
        .count();
    assert_eq!(leftovers, 0);
}

#[test]
fn configuration_errors() {
    let no_seed = AnalysisConfig::default();
    assert_eq!(run_report(&no_seed).unwrap_err().kind(), ErrorKind::Config);
    let bad_alpha = AnalysisConfig { alpha: 0.5, ..AnalysisConfig::with_seed(1) };
    assert_eq!(run_report(&bad_alpha).unwrap_err().kind(), ErrorKind::Config);
    let missing = AnalysisConfig {
        input: Some("/nonexistent/data.csv".into()),
        ..AnalysisConfig::with_seed(1)
    };
    let err = run_report(&missing).unwrap_err();
    assert_eq!(err.kind(), ErrorKind::Data);
    assert!(err.to_string().contains("/nonexistent/data.csv"));
}

#[test]
fn module_errors_carry_series_context() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("short.csv");
    // 40 rows pass ingestion but are too short for the breakpoint search.
    let mut body = String::from("PMN,PMA,TotalMD\n");
    for i in 0..40 {
        body.push_str(&format!("{},{},{}\n", 100 + i % 7, 3 + i % 2, 103 + i % 7 + i % 2));
    }
    std::fs::write(&path, body).unwrap();
    let cfg = AnalysisConfig {
        input: Some(path),
        ..AnalysisConfig::with_seed(1)
    };
    let err = run_report(&cfg).unwrap_err().to_string();
    assert!(err.starts_with("PMN: "), "{err}");
}
