use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use tsperiod::fixture;
use tsperiod::structural::*;
use tsperiod::MonthlySeries;

fn noise(seed: u64, n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
}

fn series(values: Vec<f64>) -> MonthlySeries {
    MonthlySeries::new("x", values, 2000, 1, 12).unwrap()
}

fn month(d: f64) -> i64 {
    (d * 12.0).round() as i64
}

#[test]
fn efp_fixture_statistics() {
    let b = fixture::load();
    let want = [
        (&b.pmn, [4.5812, 4.6639, 5.3071, 4.754]),
        (&b.pma, [9.6287, 5.9073, 6.661, 8.702]),
        (&b.total, [5.4535, 5.376, 6.6661, 6.1793]),
    ];
    for (s, stats) in want {
        for (p, w) in ProcessType::ALL.iter().zip(stats) {
            let r = efp_test(s, *p, 0.15).unwrap();
            assert!((r.statistic - w).abs() < 1e-3, "{} {:?} {}", s.name, p, r.statistic);
            assert!(r.p_value <= 0.01);
        }
    }
    let r = efp_test(&b.pmn, ProcessType::OlsCusum, 0.15).unwrap();
    assert!(r.p_value < 2.2e-16);
    let r = efp_test(&b.pma, ProcessType::RecMosum, 0.15).unwrap();
    assert_eq!((r.p_value, r.p_bound), (0.01, Some(tsperiod::PBound::AtMost)));
}

#[test]
fn efp_statistic_is_recomputable_from_path() {
    let b = fixture::load();
    for p in ProcessType::ALL {
        let r = efp_test(&b.total, p, 0.15).unwrap();
        assert_eq!(r.statistic, r.statistic_from_path());
    }
}

#[test]
fn efp_rejects_bad_bandwidth() {
    let s = series(noise(1, 100));
    assert!(efp_test(&s, ProcessType::OlsMosum, 0.5).is_err());
    assert!(efp_test(&s, ProcessType::OlsMosum, 0.0).is_err());
}

#[test]
fn efp_no_break_noise_rarely_rejects() {
    let reps = 200;
    for p in ProcessType::ALL {
        let rejections = (0..reps)
            .filter(|s| efp_test(&series(noise(500 + s, 300)), p, 0.15).unwrap().p_value <= 0.05)
            .count();
        // nominal 5%, binomial slack for 200 draws
        assert!(rejections <= 20, "{:?} rejected {rejections}/{reps}", p);
    }
}

#[test]
fn cusum_p_value_matches_boundary_series() {
    // one term of the alternating series dominates for large x
    for x in [1.2, 1.5, 2.0] {
        let approx = 2.0 * (-2.0 * x * x as f64).exp();
        assert!((bridge_sup_p_value(x) - approx).abs() < 2.0 * (-8.0 * x * x as f64).exp() + 1e-15);
    }
}

#[test]
fn fixture_break_dates_and_intervals() {
    let b = fixture::load();
    let want = [
        (&b.pmn, [1983.083, 1996.917, 2003.667], [(1982.917, 1983.250), (1996.667, 1997.583), (2002.917, 2004.333)]),
        (&b.pma, [1983.083, 2005.333, 2012.0], [(1982.917, 1983.250), (2005.083, 2005.417), (2011.750, 2012.250)]),
        (&b.total, [1983.083, 1996.917, 2010.333], [(1982.917, 1983.250), (1996.583, 1997.917), (2009.833, 2010.500)]),
    ];
    for (s, dates, cis) in want {
        let set = breakpoints(s, 0.15, 5).unwrap();
        assert_eq!(set.chosen_m, 3, "{}", s.name);
        assert_eq!(set.min_segment, 80);
        for ((d, ci), (want_d, (lo, hi))) in set.break_dates.iter().zip(&set.conf_intervals).zip(dates.iter().zip(cis)) {
            assert_eq!(month(*d), month(*want_d), "{}", s.name);
            assert_eq!(month(ci.lower), month(lo), "{} lower", s.name);
            assert_eq!(month(ci.upper), month(hi), "{} upper", s.name);
        }
        for w in set.rss_by_m.windows(2) {
            assert!(w[1] <= w[0]);
        }
        let argmin = set
            .bic_by_m
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        assert_eq!(argmin, set.chosen_m);
    }
}

#[test]
fn single_step_matches_exhaustive_scan() {
    let mut y = vec![0.0; 100];
    y.extend(vec![10.0; 100]);
    let parts = optimal_partitions(&y, 15, 1).unwrap();
    let cost = SegmentCost::new(&y);
    let best = (14..=184)
        .min_by(|&a, &b| (cost.rss(0, a) + cost.rss(a + 1, 199)).total_cmp(&(cost.rss(0, b) + cost.rss(b + 1, 199))))
        .unwrap();
    assert_eq!(best, 99);
    assert_eq!(parts[1].1, vec![99]);
}

#[test]
fn noiseless_step_interval_collapses() {
    let mut y = vec![5.0; 60];
    y.extend(vec![50.0; 60]);
    let s = series(y);
    let set = breakpoints(&s, 0.15, 1).unwrap();
    assert_eq!(set.break_indices, vec![59]);
    let ci = &set.conf_intervals[0];
    assert_eq!((ci.lower_index, ci.index, ci.upper_index), (59, 59, 59));
}

#[test]
fn large_step_interval_within_one_month() {
    let mut y = noise(9, 120);
    for v in y.iter_mut().skip(60) {
        *v += 1e4;
    }
    let set = breakpoints(&series(y), 0.15, 1).unwrap();
    let ci = &set.conf_intervals[0];
    assert!(ci.index - ci.lower_index <= 1 && ci.upper_index - ci.index <= 1);
}

#[test]
fn break_indices_affine_invariant() {
    let b = fixture::load();
    let y: Vec<f64> = b.total.values.iter().map(|v| -2.5 * v + 7.0).collect();
    let a = breakpoints(&b.total, 0.15, 5).unwrap();
    let c = breakpoints(&b.total.with_values("t", y), 0.15, 5).unwrap();
    assert_eq!(a.break_indices, c.break_indices);
}

/// Double quadrature of the break-date distribution from its Brownian-motion
/// representation (normal endpoint times exponential overshoot).
fn quadrature_cdf(x: f64, xi: f64, phi: f64) -> f64 {
    let (lam, rate, var, mu, e_max, negative) = if x < 0.0 {
        let a = -x;
        (1.0, xi / phi, a, -a / 2.0, 60.0, true)
    } else {
        (xi / phi, 1.0, phi * x, -xi * x / 2.0, 60.0 * phi / xi, false)
    };
    let sd = var.sqrt();
    let (y0, y1) = (mu - 12.0 * sd, mu + 12.0 * sd);
    let ny = 1600;
    let ne = 1600;
    let hy = (y1 - y0) / ny as f64;
    let he = e_max / ne as f64;
    let simpson = |i: usize, n: usize| if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
    let mut total = 0.0;
    for i in 0..=ny {
        let y = y0 + i as f64 * hy;
        let dens = (-(y - mu).powi(2) / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt();
        let mut inner = 0.0;
        for j in 0..=ne {
            let e = j as f64 * he;
            let s = y + e;
            if s > 0.0 {
                inner += simpson(j, ne)
                    * lam
                    * (-lam * e).exp()
                    * (1.0 - (-2.0 * s * e / var).exp())
                    * (1.0 - (-rate * s).exp());
            }
        }
        total += simpson(i, ny) * dens * inner * he / 3.0;
    }
    let v = total * hy / 3.0;
    if negative {
        v
    } else {
        1.0 - v
    }
}

#[test]
fn argmax_cdf_matches_quadrature() {
    for &(x, phi) in &[(-3.0, 1.0), (-12.0, 1.0), (4.0, 1.0), (-6.0, 2.3), (9.0, 2.3), (5.0, 0.4)] {
        let closed = break_argmax_cdf(x, 1.0, phi);
        let quad = quadrature_cdf(x, 1.0, phi);
        assert!((closed - quad).abs() < 2e-3, "x {x} phi {phi}: {closed} vs {quad}");
    }
}

fn exhaustive(y: &[f64], h: usize, m: usize) -> f64 {
    let cost = SegmentCost::new(y);
    let n = y.len();
    match m {
        0 => cost.rss(0, n - 1),
        1 => (h - 1..=n - h - 1)
            .map(|b| cost.rss(0, b) + cost.rss(b + 1, n - 1))
            .fold(f64::INFINITY, f64::min),
        _ => {
            let mut best = f64::INFINITY;
            for b1 in h - 1..n {
                for b2 in b1 + h..n {
                    if b2 + h > n - 1 {
                        break;
                    }
                    best = best.min(cost.rss(0, b1) + cost.rss(b1 + 1, b2) + cost.rss(b2 + 1, n - 1));
                }
            }
            best
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]
    #[test]
    fn dp_equals_exhaustive_search(
        y in prop::collection::vec(-50i32..50, 20..60),
        h in 2usize..6,
    ) {
        let y: Vec<f64> = y.into_iter().map(f64::from).collect();
        let parts = optimal_partitions(&y, h, 2).unwrap();
        for (m, (rss, breaks)) in parts.iter().enumerate() {
            let oracle = exhaustive(&y, h, m);
            prop_assert!((rss - oracle).abs() <= 1e-7 * oracle.max(1.0));
            prop_assert_eq!(breaks.len(), m);
            let mut prev: i64 = -1;
            for b in breaks {
                prop_assert!(*b as i64 - prev >= h as i64);
                prev = *b as i64;
            }
            prop_assert!((y.len() as i64 - 1) - prev >= h as i64);
        }
    }
}
