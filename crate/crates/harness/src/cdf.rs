//! CDF experiments: one steady-state slot per random placement.

use anyhow::{Context, Result};
use cfuav::{Architecture, ScenarioConfig};
use rayon::prelude::*;

use crate::scene::Scene;
use crate::spec::ExperimentSpec;
use crate::stats::DistributionSummary;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CdfMetric {
    Se,
    He,
}

#[derive(Debug, Clone)]
pub struct CdfResult {
    pub metric: CdfMetric,
    pub variants: Vec<Architecture>,
    /// `samples[v][r]`: variant `v`, realization `r`.
    pub samples: Vec<Vec<f64>>,
    pub summaries: Vec<DistributionSummary>,
}

impl CdfResult {
    pub fn summary(&self, arch: Architecture) -> Option<&DistributionSummary> {
        self.variants.iter().position(|a| *a == arch).map(|i| &self.summaries[i])
    }
}

/// SE (or HE) of every variant at a uniformly random UAV position, after
/// `warmup_slots` blocks of pilot-power recursion at that position.
fn one_realization(cfg: &ScenarioConfig, seed: u64, r: u64, variants: &[Architecture], metric: CdfMetric) -> Result<Vec<f64>> {
    let scene = Scene::draw(cfg, seed, r);
    let model = scene.model(cfg)?;
    let w = cfg.warmup_slots;
    variants
        .iter()
        .map(|&arch| {
            let pilot = *model.warm_up(arch, &scene.uav, w)?.last().expect("warm-up returns p[0]");
            let v = match metric {
                CdfMetric::Se => model.evaluate(arch, &scene.uav, w as u64, pilot)?.se,
                CdfMetric::He => model.harvest(arch, &scene.uav, pilot)?.p_he,
            };
            Ok(v)
        })
        .collect::<cfuav::Result<Vec<f64>>>()
        .with_context(|| format!("realization {r}"))
}

pub fn run_cdf_experiment(spec: &ExperimentSpec, cfg: &ScenarioConfig, metric: CdfMetric) -> Result<CdfResult> {
    spec.validate()?;
    let rows: Vec<Vec<f64>> = (0..spec.realizations as u64)
        .into_par_iter()
        .map(|r| one_realization(cfg, spec.seed, r, &spec.variants, metric))
        .collect::<Result<_>>()?;
    let samples: Vec<Vec<f64>> = (0..spec.variants.len()).map(|v| rows.iter().map(|row| row[v]).collect()).collect();
    let summaries = samples.iter().map(|s| DistributionSummary::new(s)).collect::<Result<_>>()?;
    Ok(CdfResult { metric, variants: spec.variants.clone(), samples, summaries })
}
