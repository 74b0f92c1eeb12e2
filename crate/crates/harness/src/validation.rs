//! Closed form against Monte Carlo, with and without a TUE.

use anyhow::Result;
use cfuav::oracle::{run_validation, OracleSettings};
use cfuav::{MonteCarloReport, ScenarioConfig};

/// Runs the oracle suite on the config as given and, unless the config
/// already has one, again with a TUE, so the TUE terms are always covered.
pub fn run_validation_suite(cfg: &ScenarioConfig, realizations: usize, seed: u64) -> Result<Vec<MonteCarloReport>> {
    let settings = OracleSettings { realizations, seed, ..Default::default() };
    let mut reports = run_validation(cfg, &settings)?;
    if !cfg.tue_enabled {
        let with_tue = ScenarioConfig { tue_enabled: true, ..cfg.clone() };
        reports.extend(run_validation(&with_tue, &settings)?);
    }
    Ok(reports)
}

pub fn all_pass(reports: &[MonteCarloReport]) -> bool {
    reports.iter().all(|r| r.pass)
}
