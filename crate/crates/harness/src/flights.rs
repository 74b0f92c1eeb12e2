//! Trajectory experiments over random AP placements.

use anyhow::{Context, Result};
use cfuav::trajectory::{plan_scheme, replay, ArchitectureObjective, FlightLimits, Scheme};
use cfuav::{Architecture, Placement, Position, ScenarioConfig, TrajectoryLog};
use rayon::prelude::*;

use crate::scene::Scene;
use crate::spec::ExperimentSpec;

/// One flown trajectory, reduced to what the comparison table needs.
#[derive(Debug, Clone, PartialEq)]
pub struct FlightSummary {
    pub placement: u64,
    pub variant: Architecture,
    /// Variant whose objective planned the path; differs from `variant`
    /// for replayed flights.
    pub path_of: Architecture,
    pub scheme: Scheme,
    pub average_se: f64,
    pub slots_used: usize,
    pub direction_switches: usize,
    pub direction_searches: usize,
    pub aps_reached: Option<usize>,
    pub arrived: bool,
    /// Length of the flown polyline in meters.
    pub path_length: f64,
}

impl FlightSummary {
    fn of(placement: u64, variant: Architecture, path_of: Architecture, log: &TrajectoryLog) -> Self {
        Self {
            placement,
            variant,
            path_of,
            scheme: log.scheme,
            average_se: log.average_se(),
            slots_used: log.slots_used,
            direction_switches: log.direction_switches,
            direction_searches: log.direction_searches,
            aps_reached: log.aps_reached,
            arrived: log.arrived,
            path_length: log.positions.windows(2).map(|w| w[0].distance(&w[1])).sum(),
        }
    }
}

/// Full logs of one placement, kept for the first few placements only.
#[derive(Debug, Clone)]
pub struct TracedPlacement {
    pub placement_index: u64,
    pub placement: Placement,
    pub logs: Vec<(Architecture, TrajectoryLog)>,
}

#[derive(Debug, Clone)]
pub struct TrajectoryResult {
    pub flights: Vec<FlightSummary>,
    pub traced: Vec<TracedPlacement>,
    pub n_aps: usize,
    pub candidates: usize,
}

/// Mean of the per-placement average SE for one variant and scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeAggregate {
    pub variant: Architecture,
    pub scheme: Scheme,
    pub mean_average_se: f64,
    /// Relative gain of the mean over the line path of the same variant.
    pub gain_over_line: Option<f64>,
}

impl TrajectoryResult {
    /// Flights planned by `variant` itself.
    pub fn flights_of(&self, variant: Architecture, scheme: Scheme) -> impl Iterator<Item = &FlightSummary> {
        self.flights.iter().filter(move |f| f.variant == variant && f.path_of == variant && f.scheme == scheme)
    }

    /// Flights of `variant` along the paths planned by `path_of`.
    pub fn replays_of(&self, variant: Architecture, path_of: Architecture, scheme: Scheme) -> impl Iterator<Item = &FlightSummary> {
        self.flights.iter().filter(move |f| f.variant == variant && f.path_of == path_of && f.scheme == scheme)
    }

    pub fn aggregate(&self) -> Vec<SchemeAggregate> {
        let mut pairs: Vec<(Architecture, Scheme)> = Vec::new();
        for f in self.flights.iter().filter(|f| f.variant == f.path_of) {
            if !pairs.contains(&(f.variant, f.scheme)) {
                pairs.push((f.variant, f.scheme));
            }
        }
        let mean = |v: Architecture, s: Scheme| -> Option<f64> {
            let xs: Vec<f64> = self.flights_of(v, s).map(|f| f.average_se).collect();
            (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
        };
        pairs
            .into_iter()
            .map(|(v, s)| {
                let m = mean(v, s).expect("pair taken from the flights");
                SchemeAggregate {
                    variant: v,
                    scheme: s,
                    mean_average_se: m,
                    gain_over_line: mean(v, Scheme::LinePath).map(|line| m / line - 1.0),
                }
            })
            .collect()
    }
}

fn fly_placement(
    cfg: &ScenarioConfig,
    spec: &ExperimentSpec,
    r: u64,
) -> Result<(Vec<FlightSummary>, Option<TracedPlacement>)> {
    let scene = Scene::draw(cfg, spec.seed, r);
    let model = scene.model(cfg)?;
    let limits = FlightLimits::from_config(cfg);
    let start = Position::new(cfg.uav_start.0, cfg.uav_start.1);
    let dest = Position::new(cfg.uav_dest.0, cfg.uav_dest.1);
    let aps = &scene.channels.placement.aps;
    let trace = (r as usize) < spec.trace_placements;
    let mut summaries = Vec::new();
    let mut logs = Vec::new();
    for &arch in &spec.variants {
        let objective = ArchitectureObjective { model: &model, arch };
        for &scheme in &spec.schemes {
            let log = plan_scheme(scheme, start, dest, aps, &objective, limits)
                .with_context(|| format!("placement {r}, {arch} {scheme}"))?;
            summaries.push(FlightSummary::of(r, arch, arch, &log));
            for &other in spec.replay_variants.iter().filter(|v| **v != arch) {
                let again = replay(&log, &ArchitectureObjective { model: &model, arch: other })
                    .with_context(|| format!("placement {r}, {other} along the {arch} {scheme} path"))?;
                summaries.push(FlightSummary::of(r, other, arch, &again));
            }
            if trace {
                logs.push((arch, log));
            }
        }
    }
    let traced = trace.then(|| TracedPlacement { placement_index: r, placement: scene.channels.placement.clone(), logs });
    Ok((summaries, traced))
}

/// Flies every requested scheme for every variant on each placement, and
/// replays each path under the replay variants. The start and destination
/// come from the config; the APs (and TUE) are redrawn per placement.
pub fn run_trajectory_experiment(spec: &ExperimentSpec, cfg: &ScenarioConfig) -> Result<TrajectoryResult> {
    spec.validate()?;
    let per: Vec<_> = (0..spec.realizations as u64)
        .into_par_iter()
        .map(|r| fly_placement(cfg, spec, r))
        .collect::<Result<_>>()?;
    let mut flights = Vec::new();
    let mut traced = Vec::new();
    for (f, t) in per {
        flights.extend(f);
        traced.extend(t);
    }
    Ok(TrajectoryResult { flights, traced, n_aps: cfg.n_aps, candidates: cfg.candidates })
}
