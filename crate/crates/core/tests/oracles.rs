//! Reduced-draw versions of the validation suite. The full 1e5-draw run
//! lives in the harness acceptance target.

use cfuav::oracle::{run_validation, EstimateSource, OracleSettings};
use cfuav::{MonteCarloReport, ScenarioConfig};

fn quick(tolerance: f64) -> OracleSettings {
    OracleSettings { realizations: 20_000, seed: 3, tolerance, ..Default::default() }
}

fn show(reports: &[MonteCarloReport]) -> String {
    reports
        .iter()
        .map(|r| format!("{}: {:.4e} vs {:.4e} ({:.4})\n", r.quantity, r.closed_form, r.sample_mean, r.rel_error))
        .collect()
}

#[test]
fn closed_forms_match_oracles() {
    for tue_enabled in [false, true] {
        let cfg = ScenarioConfig { tue_enabled, ..Default::default() };
        let reports = run_validation(&cfg, &quick(0.05)).unwrap();
        assert!(reports.len() >= 12);
        assert!(reports.iter().all(|r| r.pass), "{}", show(&reports));
        if tue_enabled {
            assert!(reports.iter().any(|r| r.quantity.starts_with("SE term UI")));
            assert!(reports.iter().any(|r| r.quantity.starts_with("TUE pickup")));
        }
    }
}

#[test]
fn other_scenes_and_sizes_match_too() {
    for (seed, antennas, altitude) in [(5, 1, 20.0), (6, 4, 40.0)] {
        let cfg = ScenarioConfig { rng_seed: seed, antennas, altitude, n_aps: 8, ..Default::default() };
        let reports = run_validation(&cfg, &quick(0.05)).unwrap();
        assert!(reports.iter().all(|r| r.pass), "{}", show(&reports));
    }
}

#[test]
fn tampered_closed_form_is_rejected() {
    let reports = run_validation(&ScenarioConfig::default(), &quick(0.05)).unwrap();
    let mut checked = 0;
    for r in reports.iter().filter(|r| r.closed_form != 0.0 && r.rel_error < 0.02) {
        let bad = MonteCarloReport::scalar(&r.quantity, 1.1 * r.closed_form, r.sample_mean, r.std_error, r.sample_count, 0.02);
        assert!(!bad.pass, "{} accepted a 10% error", r.quantity);
        checked += 1;
    }
    assert!(checked >= 8);
}

#[test]
fn impairment_term_vanishes_at_unit_quality() {
    let cfg = ScenarioConfig { kappa: 1.0, ..Default::default() };
    let reports = run_validation(&cfg, &quick(0.05)).unwrap();
    let hi = reports.iter().find(|r| r.quantity.starts_with("SE term HI")).expect("HI report");
    assert_eq!(hi.closed_form, 0.0);
    assert!(hi.pass, "{hi:?}");
}

#[test]
fn pilot_chain_agrees_on_estimation_and_energy() {
    let settings = OracleSettings { source: EstimateSource::PilotChain, ..quick(0.05) };
    let reports = run_validation(&ScenarioConfig::default(), &settings).unwrap();
    for r in reports.iter().filter(|r| r.quantity.starts_with("HE") || r.quantity.starts_with("Q")) {
        assert!(r.pass, "{}", show(std::slice::from_ref(r)));
    }
}
