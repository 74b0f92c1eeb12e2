use cfuav::ScenarioConfig;
use cfuav_harness::cdf::{run_cdf_experiment, CdfMetric};
use cfuav_harness::spec::{ExperimentKind, ExperimentSpec};
use cfuav_harness::stats::{quantile_sorted, DistributionSummary};

/// Textbook definition: the interpolated order statistic at rank
/// `1 + (n - 1) p`, found by scanning.
fn brute_quantile(xs: &[f64], p: f64) -> f64 {
    let mut s = xs.to_vec();
    s.sort_by(f64::total_cmp);
    let rank = 1.0 + (s.len() - 1) as f64 * p;
    let mut below = s[0];
    for (i, x) in s.iter().enumerate() {
        let r = (i + 1) as f64;
        if r == rank {
            return *x;
        }
        if r > rank {
            let frac = rank - (r - 1.0);
            return below + frac * (x - below);
        }
        below = *x;
    }
    below
}

#[test]
fn quantiles_match_brute_force() {
    let hundred: Vec<f64> = (0..100).map(|i| ((i * 7919) % 101) as f64 / 3.0).collect();
    for xs in [vec![4.2], vec![3.0, -1.0], hundred] {
        let mut sorted = xs.clone();
        sorted.sort_by(f64::total_cmp);
        for k in 0..=40 {
            let p = k as f64 / 40.0;
            let q = quantile_sorted(&sorted, p);
            assert!((q - brute_quantile(&xs, p)).abs() < 1e-12, "n {} p {p}", xs.len());
        }
    }
    assert_eq!(quantile_sorted(&[-1.0, 3.0], 0.5), 1.0);
    assert_eq!(quantile_sorted(&[-1.0, 3.0], 0.05), -0.8);
}

#[test]
fn summary_rejects_bad_samples() {
    assert!(DistributionSummary::new(&[]).is_err());
    assert!(DistributionSummary::new(&[1.0, f64::NAN]).is_err());
    let s = DistributionSummary::new(&[3.0, 1.0, 2.0]).unwrap();
    assert_eq!((s.min, s.median, s.max, s.mean), (1.0, 2.0, 3.0, 2.0));
    assert!((s.p95_likely - 1.1).abs() < 1e-12);
}

#[test]
fn single_realization_gives_a_step() {
    let mut spec = ExperimentSpec::new(ExperimentKind::CdfSe, "unused", 3);
    spec.realizations = 1;
    let cfg = ScenarioConfig { se_draws: 100, ..Default::default() };
    let r = run_cdf_experiment(&spec, &cfg, CdfMetric::Se).unwrap();
    for (samples, s) in r.samples.iter().zip(&r.summaries) {
        assert_eq!(samples.len(), 1);
        let x = samples[0];
        assert!(x.is_finite() && x >= 0.0);
        assert_eq!((s.min, s.median, s.p95_likely, s.max), (x, x, x, x));
        for p in [0.0, 0.3, 1.0] {
            assert_eq!(s.quantile(p), x);
        }
    }
}
