//! Acceptance suite for the bundled 536-month fixture.
//!
//! Prints one PASS/FAIL line per criterion. Failures listed in `KNOWN` are
//! reproducible disagreements with the published reference numbers; they are
//! reported as `FAIL (known: ...)` and do not change the exit status. Any other
//! failure exits non-zero.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use tsperiod::cycles::{classify_cycles, CycleBand};
use tsperiod::decomposition::*;
use tsperiod::descriptive::basic_stats;
use tsperiod::distribution::{nonlinearity_suite, normality_suite, seasonality_suite};
use tsperiod::report::{run_report, AnalysisConfig};
use tsperiod::series::acf_values;
use tsperiod::spectral::{find_frequency, find_peaks, morlet_values, PeakOptions};
use tsperiod::stationarity::*;
use tsperiod::structural::*;
use tsperiod::{fixture, PBound, SeriesBundle, TestResult};

/// Sub-checks expected to fail, with the reason shown on the FAIL line.
const KNOWN: &[(&str, &str)] = &[
    (
        "PMA normality",
        "reference values for the second series match no column of the fixture; PMA reproduces the third set exactly",
    ),
    (
        "TotalMD normality",
        "the third reference set is PMA's; TotalMD gives A=3.7315, W=0.5204, D=0.0607",
    ),
    (
        "wavelet tone",
        "|W|^2/s peaks at 2w0/(w0+sqrt(w0^2+2)) = 0.9865 of the true period, 1.9 dj steps below it",
    ),
];

const CLAMP_LOW: f64 = 2.2e-16;

#[derive(Default)]
struct Criterion {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Criterion {
    fn check(&mut self, name: impl Into<String>, ok: bool, detail: impl Into<String>) {
        if !ok {
            self.failures.push(format!("{}: {}", name.into(), detail.into()));
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    fn timed<T>(&mut self, label: &str, limit: Duration, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        let took = start.elapsed();
        self.note(format!("{label} {:.2}s", took.as_secs_f64()));
        self.check(format!("{label} runtime"), took < limit, format!("{took:?} >= {limit:?}"));
        out
    }
}

fn known_reason(failure: &str) -> Option<&'static str> {
    KNOWN
        .iter()
        .find(|(prefix, _)| failure.starts_with(prefix))
        .map(|(_, why)| *why)
}

/// Prints the verdict line; returns false on an unexpected failure.
fn report(number: usize, title: &str, c: Criterion) -> bool {
    let notes = if c.notes.is_empty() {
        String::new()
    } else {
        format!(" [{}]", c.notes.join("; "))
    };
    if c.failures.is_empty() {
        println!("criterion {number:>2} {title}: PASS{notes}");
        return true;
    }
    let unexpected: Vec<&String> = c.failures.iter().filter(|f| known_reason(f).is_none()).collect();
    if unexpected.is_empty() {
        let mut reasons: Vec<&str> = c.failures.iter().filter_map(|f| known_reason(f)).collect();
        reasons.dedup();
        println!("criterion {number:>2} {title}: FAIL (known: {}){notes}", reasons.join(" / "));
        for f in &c.failures {
            println!("    {f}");
        }
        true
    } else {
        println!("criterion {number:>2} {title}: FAIL{notes}");
        for f in &c.failures {
            println!("    {f}");
        }
        false
    }
}

fn single_threaded<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .expect("thread pool")
        .install(f)
}

fn noise(seed: u64, n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
}

fn within(got: f64, want: f64, tol: f64) -> bool {
    (got - want).abs() <= tol
}

fn within_rel(got: f64, want: f64, rel: f64) -> bool {
    (got - want).abs() <= rel * want.abs()
}

// ------------------------------------------------------------------ 1

const SUMMARY_REF: [[f64; 3]; 16] = [
    [536.0, 536.0, 536.0],
    [0.0, 0.0, 0.0],
    [3.0, 0.0, 7.0],
    [813.0, 335.0, 869.0],
    [247.0, 32.0, 327.0],
    [347.25, 135.25, 437.25],
    [296.11, 83.59, 379.70],
    [286.0, 50.0, 388.0],
    [158714.0, 44805.0, 203519.0],
    [3.45, 3.25, 4.11],
    [289.33, 77.21, 371.62],
    [302.89, 89.98, 387.78],
    [6389.99, 5665.03, 9058.60],
    [79.94, 75.27, 95.18],
    [1.00, 1.06, -0.02],
    [5.14, -0.11, 2.34],
];

const SUMMARY_ROWS: [&str; 16] = [
    "nobs", "NAs", "min", "max", "Q1", "Q3", "mean", "median", "sum", "SE mean", "LCL", "UCL",
    "variance", "sd", "skewness", "kurtosis",
];

fn criterion_1(b: &SeriesBundle) -> Criterion {
    let mut c = Criterion::default();
    let stats = c.timed("basic stats", Duration::from_secs(1), || {
        single_threaded(|| b.iter().map(|s| basic_stats(s).unwrap()).collect::<Vec<_>>())
    });
    for (col, (s, st)) in b.iter().zip(&stats).enumerate() {
        let got = [
            st.nobs as f64,
            st.na_count as f64,
            st.minimum,
            st.maximum,
            st.q1,
            st.q3,
            st.mean,
            st.median,
            st.sum,
            st.se_mean,
            st.lcl_mean,
            st.ucl_mean,
            st.variance,
            st.stdev,
            st.skewness.unwrap_or(f64::NAN),
            st.kurtosis_excess.unwrap_or(f64::NAN),
        ];
        for (row, g) in got.iter().enumerate() {
            let want = SUMMARY_REF[row][col];
            let label = format!("{} {}", s.name, SUMMARY_ROWS[row]);
            c.check(label, within(*g, want, 0.005 + 1e-9), format!("{g} vs {want}"));
        }
    }
    c
}

// ------------------------------------------------------------------ 2

#[derive(Clone, Copy)]
enum P {
    Value(f64),
    Below,
}

fn p_matches(r: &TestResult, want: P) -> bool {
    match want {
        P::Value(v) => within_rel(r.p_value, v, 0.10),
        P::Below => r.p_value < CLAMP_LOW || (r.p_value <= CLAMP_LOW && r.p_bound == Some(PBound::AtMost)),
    }
}

fn criterion_2(b: &SeriesBundle) -> Criterion {
    let mut c = Criterion::default();
    // (A, p), (W, p), (D, p) per series
    let want = [
        [(2.5753, P::Value(1.665e-6)), (0.46434, P::Value(5.952e-6)), (0.063404, P::Value(2.391e-5))],
        [(7.6022, P::Below), (1.4083, P::Value(7.37e-10)), (0.094654, P::Value(2.012e-12))],
        [(36.156, P::Below), (6.9231, P::Value(7.37e-10)), (0.23466, P::Below)],
    ];
    for (s, w) in b.iter().zip(want) {
        let r = normality_suite(s).unwrap();
        let tests = [&r.anderson_darling, &r.cramer_von_mises, &r.lilliefors];
        let mut bad = Vec::new();
        for (t, (stat, p)) in tests.iter().zip(w) {
            if !within(t.statistic, stat, 1e-3) || !p_matches(t, p) {
                bad.push(format!("{} {:.6} (p {:.4e}) vs {stat}", t.test_name, t.statistic, t.p_value));
            }
        }
        c.check(format!("{} normality", s.name), bad.is_empty(), bad.join(", "));
    }
    c
}

// ------------------------------------------------------------------ 3

fn criterion_3(b: &SeriesBundle) -> Criterion {
    let mut c = Criterion::default();
    for (s, want) in b.iter().zip([0.3898275, 0.6492232, 0.4448909]) {
        let (d, m) = gph_estimate(&s.values, Some(153)).unwrap();
        c.check(format!("{} GPH", s.name), m == 153 && within(d, want, 5e-3), format!("d {d} m {m}"));
    }
    c
}

// ------------------------------------------------------------------ 4

fn criterion_4(b: &SeriesBundle) -> Criterion {
    let mut c = Criterion::default();
    let rs = [0.8290, 0.8590, 0.7708];
    let ml = [0.9295, 0.9958, 0.9214];
    for (i, s) in b.iter().enumerate() {
        let r = hurst_rs(&s.values).unwrap();
        c.check(format!("{} R/S", s.name), within(r.rs_simple, rs[i], 0.03), format!("{}", r.rs_simple));
        c.check(
            format!("{} theoretical", s.name),
            within(r.rs_theoretical, 0.5456, 1e-3),
            format!("{}", r.rs_theoretical),
        );
        let h = hurst_ml(&s.values).unwrap();
        c.check(format!("{} ML", s.name), within(h, ml[i], 0.02), format!("{h}"));
    }
    c
}

// ------------------------------------------------------------------ 5

type AdfRows = [[f64; 6]; 3];

const ADF_STATS: [AdfRows; 3] = [
    [
        [-2.189, -1.508, -1.051, -0.929, -0.798, -0.685],
        [-9.46, -6.73, -4.67, -4.03, -3.50, -3.06],
        [-9.85, -7.09, -5.04, -4.40, -3.89, -3.48],
    ],
    [
        [-2.906, -1.640, -0.890, -0.186, 0.111, 0.352],
        [-4.605, -2.928, -2.025, -1.304, -1.051, -0.863],
        [-9.40, -6.23, -4.49, -3.14, -2.70, -2.41],
    ],
    [
        [-2.030, -1.288, -0.788, -0.570, -0.442, -0.297],
        [-9.73, -6.86, -4.88, -4.10, -3.71, -3.39],
        [-11.25, -7.90, -5.43, -4.46, -3.96, -3.51],
    ],
];

/// Reference p-values; 0.01 is the lower table clamp.
const ADF_P: [AdfRows; 3] = [
    [
        [0.0287, 0.14, 0.3033, 0.3469, 0.3936, 0.4341],
        [0.01, 0.01, 0.01, 0.01, 0.01, 0.0313],
        [0.01, 0.01, 0.01, 0.01, 0.0140, 0.0441],
    ],
    [
        [0.010, 0.097, 0.361, 0.590, 0.676, 0.745],
        [0.01, 0.0444, 0.3181, 0.5941, 0.6836, 0.7503],
        [0.01, 0.01, 0.01, 0.0981, 0.2826, 0.4045],
    ],
    [
        [0.0428, 0.2186, 0.3973, 0.4751, 0.5166, 0.5584],
        [0.01, 0.01, 0.01, 0.01, 0.01, 0.0123],
        [0.01, 0.01, 0.01, 0.01, 0.0106, 0.0410],
    ],
];

const KPSS: [[f64; 3]; 3] = [[7.22, 1.85, 0.954], [3.30, 3.89, 1.38], [6.29, 2.16, 0.655]];
const PP_RHO: [[f64; 3]; 3] = [[-2.62, -145.0, -156.0], [-4.61, -18.0, -152.0], [-1.97, -151.0, -227.0]];

fn criterion_5(b: &SeriesBundle) -> Criterion {
    let mut c = Criterion::default();
    for (i, s) in b.iter().enumerate() {
        let adf = adf_test(s, 5).unwrap();
        for (k, det) in Deterministic::ALL.iter().enumerate() {
            for lag in 0..=5 {
                let r = adf.get(*det, lag).unwrap();
                let label = format!("{} ADF {} lag {lag}", s.name, det.label());
                let want = ADF_STATS[i][k][lag];
                c.check(&label, within(r.statistic, want, 0.01), format!("{} vs {want}", r.statistic));
                if ADF_P[i][k][lag] == 0.01 {
                    let clamped = r.p_value == 0.01 && r.p_bound == Some(PBound::AtMost);
                    c.check(label + " clamp", clamped, format!("p {} {:?}", r.p_value, r.p_bound));
                }
            }
        }
        let kpss = kpss_test(s).unwrap();
        let pp = pp_test(s).unwrap();
        for (k, det) in Deterministic::ALL.iter().enumerate() {
            let r = kpss.get(*det, 5).unwrap();
            c.check(
                format!("{} KPSS {}", s.name, det.label()),
                within(r.statistic, KPSS[i][k], 0.01),
                format!("{}", r.statistic),
            );
            let r = pp.get(*det, 6).unwrap();
            c.check(
                format!("{} PP {}", s.name, det.label()),
                within_rel(r.statistic, PP_RHO[i][k], 0.01),
                format!("{}", r.statistic),
            );
        }
    }
    c
}

// ------------------------------------------------------------------ 6

/// Kolmogorov series for the sup of a Brownian bridge.
fn oracle_bridge(x: f64) -> f64 {
    if x < 0.27 {
        return 1.0;
    }
    2.0 * (1..=100)
        .map(|k| {
            let k = k as f64;
            (-1f64).powf(k + 1.0) * (-2.0 * k * k * x * x).exp()
        })
        .sum::<f64>()
}

/// Crossing probability of a Brownian motion over the boundary x(1 + 2t).
fn oracle_linear_boundary(x: f64) -> f64 {
    // statrs erfc keeps the oracle off the library's own normal CDF
    let phi = |z: f64| 0.5 * statrs::function::erf::erfc(-z / std::f64::consts::SQRT_2);
    2.0 * (1.0 - phi(3.0 * x) + (-4.0 * x * x).exp() * phi(x))
}

fn criterion_6(b: &SeriesBundle) -> Criterion {
    let mut c = Criterion::default();
    let want = [
        [4.5812, 4.6639, 5.3071, 4.754],
        [9.6287, 5.9073, 6.661, 8.702],
        [5.4535, 5.376, 6.6661, 6.1793],
    ];
    for (s, w) in b.iter().zip(want) {
        for (p, stat) in ProcessType::ALL.iter().zip(w) {
            let r = efp_test(s, *p, 0.15).unwrap();
            let label = format!("{} {}", s.name, p.label());
            c.check(&label, within(r.statistic, stat, 0.01), format!("{} vs {stat}", r.statistic));
            let oracle = match p {
                ProcessType::OlsCusum => oracle_bridge(r.statistic),
                ProcessType::RecCusum => oracle_linear_boundary(r.statistic),
                _ => continue,
            };
            let agree = (r.p_value - oracle).abs() <= 1e-6 * oracle.abs() + 1e-300;
            c.check(label + " p", agree, format!("{:e} vs {oracle:e}", r.p_value));
        }
    }
    c
}

// ------------------------------------------------------------------ 7

fn criterion_7(b: &SeriesBundle) -> Criterion {
    let mut c = Criterion::default();
    let want: [([f64; 3], [(f64, f64); 3]); 3] = [
        ([1983.083, 1996.917, 2003.667], [(1982.917, 1983.250), (1996.667, 1997.583), (2002.917, 2004.333)]),
        ([1983.083, 2005.333, 2012.0], [(1982.917, 1983.250), (2005.083, 2005.417), (2011.750, 2012.250)]),
        ([1983.083, 1996.917, 2010.333], [(1982.917, 1983.250), (1996.583, 1997.917), (2009.833, 2010.500)]),
    ];
    let sets = c.timed("breakpoints", Duration::from_secs(30), || {
        single_threaded(|| b.iter().map(|s| breakpoints(s, 0.15, 5).unwrap()).collect::<Vec<_>>())
    });
    let month = |d: f64| (d * 12.0).round() as i64;
    for ((s, set), (dates, cis)) in b.iter().zip(&sets).zip(want) {
        c.check(format!("{} m", s.name), set.chosen_m == 3, format!("{}", set.chosen_m));
        for (j, (want_d, (lo, hi))) in dates.iter().zip(cis).enumerate() {
            let (Some(d), Some(ci)) = (set.break_dates.get(j), set.conf_intervals.get(j)) else {
                c.check(format!("{} break {j}", s.name), false, "missing");
                continue;
            };
            c.check(format!("{} break {j} date", s.name), month(*d) == month(*want_d), format!("{d}"));
            let ends = (month(ci.lower) - month(lo)).abs() <= 2 && (month(ci.upper) - month(hi)).abs() <= 2;
            c.check(format!("{} break {j} CI", s.name), ends, format!("({}, {})", ci.lower, ci.upper));
        }
    }
    c
}

// ------------------------------------------------------------------ 8

fn criterion_8(b: &SeriesBundle) -> Criterion {
    let mut c = Criterion::default();
    for (s, want) in b.iter().zip([12, 4, 3]) {
        let f = find_frequency(&s.values).unwrap();
        c.check(format!("{} frequency", s.name), f == want, format!("{f}"));
    }
    c
}

// ------------------------------------------------------------------ 9

fn criterion_9(b: &SeriesBundle) -> Criterion {
    let mut c = Criterion::default();
    let d = rmaf_decompose(&b.total, 12).unwrap();
    let peaks = find_peaks(&d.trend, PeakOptions::default());
    let near = |idx: usize| peaks.iter().find(|p| p.index.abs_diff(idx) <= 1);
    let targets = [(191usize, "Apr 1992", 443.6578), (482, "Jul 2016", 467.8616)];
    let mut found = Vec::new();
    for (idx, label, value) in targets {
        match near(idx) {
            Some(p) => {
                c.check(format!("peak {label} value"), within(p.value, value, 0.5), format!("{}", p.value));
                c.note(format!("{} {:.4}", b.total.month_label(p.index).unwrap(), p.value));
                found.push(p.index);
            }
            None => c.check(format!("peak {label}"), false, "no trend peak within one month"),
        }
    }
    if let [a, z] = found[..] {
        let months = z - a;
        c.check("separation", months == 291, format!("{months} months"));
        let cls = classify_cycles(months as f64 / 12.0).unwrap();
        c.check("separation band", cls.band == CycleBand::Kuznets, format!("{:?}", cls.band));
    }
    c
}

// ------------------------------------------------------------------ 10

fn criterion_10(b: &SeriesBundle) -> Criterion {
    let mut c = Criterion::default();
    let ter = [4.9388, 130.32, 37.342];
    let white_rejects = [true, true, true];
    for (i, s) in b.iter().enumerate() {
        let r = nonlinearity_suite(s, 42).unwrap();
        c.check(
            format!("{} Teraesvirta", s.name),
            within(r.teraesvirta.statistic, ter[i], 0.01),
            format!("{}", r.teraesvirta.statistic),
        );
        c.check(
            format!("{} White", s.name),
            r.white_nn.rejects(0.01) == white_rejects[i],
            format!("p {:e}", r.white_nn.p_value),
        );
        if s.name == "PMA" {
            let order = r.keenan.auxiliary.get("order").copied();
            c.check("PMA Keenan order", order == Some(20.0), format!("{order:?}"));
            c.check(
                "PMA Keenan statistic",
                within(r.keenan.statistic, 5.27641, 5e-6),
                format!("{}", r.keenan.statistic),
            );
        } else {
            let order = r.tsay.auxiliary.get("order").copied();
            c.check(format!("{} Tsay order", s.name), order == Some(13.0), format!("{order:?}"));
        }
    }
    c
}

// ------------------------------------------------------------------ 11

fn criterion_11(b: &SeriesBundle) -> Criterion {
    let mut c = Criterion::default();
    for s in b.iter() {
        let r = seasonality_suite(s, 12).unwrap();
        c.check(format!("{} WO", s.name), r.wo_seasonal(), format!("{:?}", r.wo_components()));
        c.check(format!("{} QS", s.name), r.qs.rejects(0.01), format!("p {:e}", r.qs.p_value));
        c.check(
            format!("{} Friedman", s.name),
            r.friedman.rejects(0.01),
            format!("p {:e}", r.friedman.p_value),
        );
        if s.name == "PMA" {
            for (got, want) in r.wo_components().iter().zip([6.08e-11, 1.01e-07, 3.31e-06]) {
                let ok = (got / want).log10().abs() <= 1.0 || (want <= CLAMP_LOW && *got <= CLAMP_LOW);
                c.check("PMA WO component", ok, format!("{got:e} vs {want:e}"));
            }
        }
    }
    c
}

// ------------------------------------------------------------------ 12

fn rss_direct(y: &[f64]) -> f64 {
    let m = y.iter().sum::<f64>() / y.len() as f64;
    y.iter().map(|v| (v - m).powi(2)).sum()
}

/// Minimum RSS over every admissible placement of `m` breaks.
fn exhaustive_rss(y: &[f64], h: usize, m: usize) -> f64 {
    if m == 0 {
        return if y.len() >= h { rss_direct(y) } else { f64::INFINITY };
    }
    (h..=y.len().saturating_sub(h))
        .map(|cut| rss_direct(&y[..cut]) + exhaustive_rss(&y[cut..], h, m - 1))
        .fold(f64::INFINITY, f64::min)
}

fn identity_rel(x: &[f64], d: &Decomposition) -> f64 {
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    x.iter()
        .enumerate()
        .map(|(i, v)| (v - d.trend[i] - d.seasonal[i] - d.remainder[i]).abs())
        .fold(0.0, f64::max)
        / scale
}

fn criterion_12(b: &SeriesBundle) -> Criterion {
    let mut c = Criterion::default();

    for s in b.iter() {
        let e = identity_rel(&s.values, &stl_decompose(s, 13).unwrap());
        c.check(format!("{} STL identity", s.name), e <= 1e-8, format!("{e:e}"));
        let e = identity_rel(&s.values, &rmaf_decompose(s, 12).unwrap());
        c.check(format!("{} RMAF identity", s.name), e <= 1e-8, format!("{e:e}"));
    }

    let cfg = CeemdanConfig::new(42);
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| ceemdan_series(&b.pmn, &cfg).unwrap())
    };
    let (one, four) = (run(1), run(4));
    c.check("CEEMDAN columns", one.imfs.len() == 9, format!("{}", one.imfs.len()));
    let sigma = tsperiod::numeric::sd(&b.pmn.values);
    let worst = one
        .reconstruct()
        .iter()
        .zip(&b.pmn.values)
        .map(|(r, x)| (r - x).abs())
        .fold(0.0, f64::max);
    c.check("CEEMDAN reconstruction", worst <= 1e-6 * sigma, format!("{worst:e}"));
    let same = one.imfs.iter().flatten().map(|v| v.to_bits()).eq(four.imfs.iter().flatten().map(|v| v.to_bits()));
    c.check("CEEMDAN thread independence", same, "1 vs 4 threads differ");

    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut mismatches = 0;
    for _ in 0..50 {
        let n = rng.random_range(20..40);
        let h = rng.random_range(2..6);
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(-50..50) as f64).collect();
        let parts = optimal_partitions(&y, h, 2).unwrap();
        for (m, (rss, _)) in parts.iter().enumerate() {
            let oracle = exhaustive_rss(&y, h, m);
            if (rss - oracle).abs() > 1e-7 * oracle.max(1.0) {
                mismatches += 1;
            }
        }
    }
    c.check("DP vs exhaustive", mismatches == 0, format!("{mismatches} mismatches"));

    let x = &b.total.values;
    let y: Vec<f64> = x.iter().map(|v| 2.5 * v + 17.0).collect();
    let acf_gap = acf_values(x, 24)
        .unwrap()
        .rho
        .iter()
        .zip(acf_values(&y, 24).unwrap().rho)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    c.check("ACF affine invariance", acf_gap < 1e-10, format!("{acf_gap:e}"));
    let sx = b.total.with_values("x", x.clone());
    let sy = b.total.with_values("y", y.clone());
    let (nx, ny) = (normality_suite(&sx).unwrap(), normality_suite(&sy).unwrap());
    let norm_gap = [
        nx.anderson_darling.statistic - ny.anderson_darling.statistic,
        nx.cramer_von_mises.statistic - ny.cramer_von_mises.statistic,
        nx.lilliefors.statistic - ny.lilliefors.statistic,
    ]
    .iter()
    .fold(0.0f64, |m, v| m.max(v.abs()));
    c.check("normality affine invariance", norm_gap < 1e-9, format!("{norm_gap:e}"));
    let (dx, _) = gph_estimate(x, None).unwrap();
    let (dy, _) = gph_estimate(&y, None).unwrap();
    let hx = hurst_rs(x).unwrap().rs_simple;
    let hy = hurst_rs(&y).unwrap().rs_simple;
    let lm_gap = (dx - dy).abs().max((hx - hy).abs());
    c.check("long-memory affine invariance", lm_gap < 1e-9, format!("{lm_gap:e}"));

    let dt = 1.0 / 12.0;
    let tone: Vec<f64> = (0..512).map(|t| (2.0 * std::f64::consts::PI * t as f64 * dt).sin()).collect();
    let w = morlet_values(&tone, dt, 0.01).unwrap();
    let p = w.dominant_period();
    c.check("wavelet tone", p.log2().abs() <= 0.01 + 1e-12, format!("period {p:.4} for a 1.0 tone"));

    let e = noise(9, 600);
    let x: Vec<f64> = (0..600)
        .map(|t| (2.0 * std::f64::consts::PI * t as f64 / 60.0).sin() + 0.3 * e[t])
        .collect();
    let set = ceemdan(&x, &CeemdanConfig::new(5)).unwrap();
    let periods: Vec<f64> = (0..set.imfs.len() - 1).filter_map(|k| set.mean_period(k)).collect();
    c.check(
        "CEEMDAN tone",
        periods.iter().any(|p| (50.0..=70.0).contains(p)),
        format!("{periods:?}"),
    );

    c.timed("full pipeline", Duration::from_secs(120), || {
        single_threaded(|| run_report(&AnalysisConfig::with_seed(42)).unwrap())
    });
    c
}

fn main() {
    // `cargo test` passes harness flags; listing mode expects no output.
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let b = fixture::load();
    let criteria: [(&str, fn(&SeriesBundle) -> Criterion); 12] = [
        ("descriptive table", criterion_1),
        ("normality", criterion_2),
        ("GPH", criterion_3),
        ("Hurst", criterion_4),
        ("unit roots", criterion_5),
        ("fluctuation tests", criterion_6),
        ("breakpoints", criterion_7),
        ("dominant frequency", criterion_8),
        ("RMAF peaks", criterion_9),
        ("nonlinearity", criterion_10),
        ("seasonality", criterion_11),
        ("property suites", criterion_12),
    ];
    let mut ok = true;
    for (i, (title, f)) in criteria.iter().enumerate() {
        ok &= report(i + 1, title, f(&b));
    }
    if !ok {
        std::process::exit(1);
    }
}
