//! Median SE against the time-splitting fraction.

use anyhow::Result;
use cfuav::{Architecture, ScenarioConfig};
use rayon::prelude::*;

use crate::scene::Scene;
use crate::spec::{variant_label, ExperimentSpec};
use crate::stats::DistributionSummary;

#[derive(Debug, Clone)]
pub struct SweepCurve {
    pub variant: String,
    pub arch: Architecture,
    /// Sweep-axis assignment, empty for the base config.
    pub combo: String,
    pub rho: Vec<f64>,
    pub median_se: Vec<f64>,
}

impl SweepCurve {
    /// Grid point of the largest median SE; the first one on ties.
    pub fn argmax(&self) -> (f64, f64) {
        let mut best = (self.rho[0], self.median_se[0]);
        for (r, s) in self.rho.iter().zip(&self.median_se) {
            if *s > best.1 {
                best = (*r, *s);
            }
        }
        best
    }

    pub fn at(&self, rho: f64) -> Option<f64> {
        self.rho.iter().position(|r| (r - rho).abs() < 1e-12).map(|i| self.median_se[i])
    }
}

/// For every combination and realization the placement is drawn once and
/// shared across the rho grid, so the curves are smooth in rho.
pub fn run_rho_sweep(spec: &ExperimentSpec, base: &ScenarioConfig) -> Result<Vec<SweepCurve>> {
    spec.validate()?;
    let mut curves = Vec::new();
    for (combo, cfg) in spec.combinations(base)? {
        // se[r][v][g]
        let se: Vec<Vec<Vec<f64>>> = (0..spec.realizations as u64)
            .into_par_iter()
            .map(|r| -> Result<Vec<Vec<f64>>> {
                let scene = Scene::draw(&cfg, spec.seed, r);
                let mut per_variant = vec![Vec::with_capacity(spec.rho_grid.len()); spec.variants.len()];
                for &rho in &spec.rho_grid {
                    let c = ScenarioConfig { rho, ..cfg.clone() };
                    let model = scene.model(&c)?;
                    for (v, &arch) in spec.variants.iter().enumerate() {
                        let pilot = *model.warm_up(arch, &scene.uav, c.warmup_slots)?.last().expect("p[0]");
                        per_variant[v].push(model.evaluate(arch, &scene.uav, c.warmup_slots as u64, pilot)?.se);
                    }
                }
                Ok(per_variant)
            })
            .collect::<Result<_>>()?;
        for (v, &arch) in spec.variants.iter().enumerate() {
            let median_se = (0..spec.rho_grid.len())
                .map(|g| {
                    let column: Vec<f64> = se.iter().map(|row| row[v][g]).collect();
                    Ok(DistributionSummary::new(&column)?.median)
                })
                .collect::<Result<Vec<_>>>()?;
            curves.push(SweepCurve {
                variant: variant_label(arch, &combo),
                arch,
                combo: combo.clone(),
                rho: spec.rho_grid.clone(),
                median_se,
            });
        }
    }
    Ok(curves)
}
