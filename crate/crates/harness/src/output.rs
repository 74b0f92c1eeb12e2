//! CSV tables and the JSON sidecar.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so equal
//! results give byte-identical files.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Duration;

use anyhow::{Context, Result};
use cfuav::spectral::ComplexityCount;
use cfuav::{MonteCarloReport, Placement, ScenarioConfig, TrajectoryLog};
use serde_json::{json, Map, Value};

use crate::cdf::{CdfMetric, CdfResult};
use crate::flights::TrajectoryResult;
use crate::plot::{
    CDF_HEADER, COMPLEXITY_HEADER, PLACEMENT_HEADER, SWEEP_HEADER, TRAJECTORY_HEADER, TRAJECTORY_SUMMARY_HEADER,
    TRAJECTORY_TABLE_HEADER, VALIDATION_HEADER,
};
use crate::spec::ExperimentSpec;
use crate::sweep::SweepCurve;

fn writer(path: &Path, header: &[&str]) -> Result<csv::Writer<fs::File>> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let mut w = csv::Writer::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    w.write_record(header).with_context(|| format!("writing {}", path.display()))?;
    Ok(w)
}

fn finish(mut w: csv::Writer<fs::File>, path: &Path) -> Result<PathBuf> {
    w.flush().with_context(|| format!("writing {}", path.display()))?;
    Ok(path.to_path_buf())
}

fn put(w: &mut csv::Writer<fs::File>, path: &Path, row: &[String]) -> Result<()> {
    w.write_record(row).with_context(|| format!("writing {}", path.display()))
}

pub fn cdf_file_name(metric: CdfMetric) -> &'static str {
    match metric {
        CdfMetric::Se => "cdf_se.csv",
        CdfMetric::He => "cdf_he.csv",
    }
}

/// Raw samples, grouped by variant in realization order.
pub fn write_cdf(dir: &Path, result: &CdfResult) -> Result<PathBuf> {
    let path = dir.join(cdf_file_name(result.metric));
    let mut w = writer(&path, CDF_HEADER)?;
    for (arch, samples) in result.variants.iter().zip(&result.samples) {
        for s in samples {
            put(&mut w, &path, &[arch.to_string(), s.to_string()])?;
        }
    }
    finish(w, &path)
}

pub fn write_sweep(dir: &Path, curves: &[SweepCurve]) -> Result<PathBuf> {
    let path = dir.join("rho_sweep.csv");
    let mut w = writer(&path, SWEEP_HEADER)?;
    for c in curves {
        for (r, s) in c.rho.iter().zip(&c.median_se) {
            put(&mut w, &path, &[c.variant.clone(), r.to_string(), s.to_string()])?;
        }
    }
    finish(w, &path)
}

/// Slot 0 is the start position with its initial SE.
pub fn write_trajectory_log(path: &Path, log: &TrajectoryLog) -> Result<PathBuf> {
    let mut w = writer(path, TRAJECTORY_HEADER)?;
    for (slot, pos) in log.positions.iter().enumerate() {
        let se = if slot == 0 { log.initial_se } else { log.per_slot_se[slot - 1] };
        put(
            &mut w,
            path,
            &[
                slot.to_string(),
                pos.x.to_string(),
                pos.y.to_string(),
                se.to_string(),
                log.p_he[slot].to_string(),
                log.p_u[slot].to_string(),
            ],
        )?;
    }
    finish(w, path)
}

pub fn write_placement(path: &Path, placement: &Placement) -> Result<PathBuf> {
    let mut w = writer(path, PLACEMENT_HEADER)?;
    let mut row = |kind: &str, i: usize, x: f64, y: f64| put(&mut w, path, &[kind.into(), i.to_string(), x.to_string(), y.to_string()]);
    for (i, ap) in placement.aps.iter().enumerate() {
        row("ap", i, ap.x, ap.y)?;
    }
    row("bs", 0, placement.bs.x, placement.bs.y)?;
    if let Some(t) = placement.tue {
        row("tue", 0, t.x, t.y)?;
    }
    row("start", 0, placement.uav_start.x, placement.uav_start.y)?;
    row("dest", 0, placement.uav_dest.x, placement.uav_dest.y)?;
    finish(w, path)
}

pub fn write_trajectories(dir: &Path, result: &TrajectoryResult) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();

    let path = dir.join("trajectory_summary.csv");
    let mut w = writer(&path, TRAJECTORY_SUMMARY_HEADER)?;
    for f in &result.flights {
        put(
            &mut w,
            &path,
            &[
                f.placement.to_string(),
                f.variant.to_string(),
                f.path_of.to_string(),
                f.scheme.to_string(),
                f.average_se.to_string(),
                f.slots_used.to_string(),
                f.direction_switches.to_string(),
                f.direction_searches.to_string(),
                f.aps_reached.map_or(String::new(), |n| n.to_string()),
                f.arrived.to_string(),
            ],
        )?;
    }
    written.push(finish(w, &path)?);

    let path = dir.join("trajectory_table.csv");
    let mut w = writer(&path, TRAJECTORY_TABLE_HEADER)?;
    for a in result.aggregate() {
        put(
            &mut w,
            &path,
            &[
                a.variant.to_string(),
                a.scheme.to_string(),
                a.mean_average_se.to_string(),
                a.gain_over_line.map_or(String::new(), |g| g.to_string()),
            ],
        )?;
    }
    written.push(finish(w, &path)?);

    for t in &result.traced {
        let r = t.placement_index;
        written.push(write_placement(&dir.join(format!("placement_{r}.csv")), &t.placement)?);
        for (arch, log) in &t.logs {
            let name = format!("trajectory_{arch}_{}_{r}.csv", log.scheme);
            written.push(write_trajectory_log(&dir.join(name), log)?);
        }
    }
    Ok(written)
}

pub fn write_validation(dir: &Path, reports: &[MonteCarloReport]) -> Result<PathBuf> {
    let path = dir.join("validation.csv");
    let mut w = writer(&path, VALIDATION_HEADER)?;
    for r in reports {
        put(
            &mut w,
            &path,
            &[
                r.quantity.clone(),
                r.closed_form.to_string(),
                r.sample_mean.to_string(),
                r.rel_error.to_string(),
                r.pass.to_string(),
            ],
        )?;
    }
    finish(w, &path)
}

pub fn write_complexity(dir: &Path, count: &ComplexityCount) -> Result<PathBuf> {
    let path = dir.join("complexity.csv");
    let mut w = writer(&path, COMPLEXITY_HEADER)?;
    for (phase, n) in [
        ("statistics_matrices", count.statistics_matrices),
        ("estimation", count.estimation),
        ("combining_vectors", count.combining_vectors),
        ("downlink_precoding", count.downlink_precoding),
        ("uplink_combining", count.uplink_combining),
        ("total", count.total()),
    ] {
        put(&mut w, &path, &[phase.to_string(), n.to_string()])?;
    }
    finish(w, &path)
}

/// `git describe` of the working directory, or "unknown" outside a
/// repository.
pub fn git_describe() -> String {
    Command::new("git")
        .args(["describe", "--always", "--dirty", "--tags"])
        .output()
        .ok()
        .filter(|o| o.status.success())
        .and_then(|o| String::from_utf8(o.stdout).ok())
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .unwrap_or_else(|| "unknown".into())
}

fn config_echo(cfg: &ScenarioConfig) -> Value {
    let mut map = Map::new();
    for line in cfg.to_kv_string().lines() {
        if let Some((k, v)) = line.split_once('=') {
            map.insert(k.trim().to_string(), Value::String(v.trim().to_string()));
        }
    }
    Value::Object(map)
}

/// `<kind>.json` next to the tables. This is the only output that differs
/// between identical reruns (wall clock, repository state).
pub fn write_sidecar(
    spec: &ExperimentSpec,
    cfg: &ScenarioConfig,
    elapsed: Duration,
    files: &[PathBuf],
    summary: Value,
) -> Result<PathBuf> {
    let path = spec.out.join(format!("{}.json", spec.kind));
    let body = json!({
        "kind": spec.kind.as_str(),
        "seed": spec.seed,
        "realizations": spec.realizations,
        "variants": spec.variants.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        "config": config_echo(cfg),
        "git_describe": git_describe(),
        "wall_clock_seconds": elapsed.as_secs_f64(),
        "files": files.iter().filter_map(|p| p.file_name()).map(|n| n.to_string_lossy().into_owned()).collect::<Vec<_>>(),
        "summary": summary,
    });
    fs::create_dir_all(&spec.out).with_context(|| format!("creating {}", spec.out.display()))?;
    fs::write(&path, serde_json::to_string_pretty(&body)? + "\n").with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}
