use std::path::PathBuf;
use std::process::{Command as Process, ExitCode};
use std::time::Instant;

use anyhow::{Context, Result};
use cfuav::spectral::complexity_count;
use cfuav::trajectory::Scheme;
use cfuav::{Architecture, ScenarioConfig};
use cfuav_harness::cdf::{run_cdf_experiment, CdfMetric};
use cfuav_harness::flights::run_trajectory_experiment;
use cfuav_harness::output;
use cfuav_harness::plot::PlotRequest;
use cfuav_harness::spec::{ExperimentKind, ExperimentSpec, SweepAxis};
use cfuav_harness::sweep::run_rho_sweep;
use cfuav_harness::validation::{all_pass, run_validation_suite};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

/// Also used for run-time failures such as I/O errors.
const EXIT_VALIDATION_FAILED: u8 = 1;
const EXIT_CONFIG: u8 = 2;

/// WPT-powered UAV uplink experiments over cell-free, small-cell and
/// cellular massive MIMO.
#[derive(Parser)]
#[command(name = "cfuav", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// CDF of the uplink SE over random placements.
    CdfSe(Common),
    /// CDF of the harvested energy over random placements.
    CdfHe(Common),
    /// Median SE against the time-splitting fraction.
    RhoSweep {
        #[command(flatten)]
        common: Common,
        /// Comma-separated rho values (default 0, 0.02, ..., 1).
        #[arg(long, value_delimiter = ',')]
        rho_grid: Option<Vec<f64>>,
        /// Config key swept over values, e.g. `antennas=2,4`. Repeatable;
        /// the sweep runs once per combination.
        #[arg(long = "sweep")]
        sweeps: Vec<String>,
    },
    /// Flight schemes compared over random AP placements.
    Trajectory {
        #[command(flatten)]
        common: Common,
        /// Comma-separated subset of angle, ap, line, all-aps.
        #[arg(long, value_delimiter = ',')]
        schemes: Option<Vec<String>>,
        /// Number of leading placements whose per-slot logs are written.
        #[arg(long, default_value_t = 1)]
        trace: usize,
        /// Comma-separated variants re-scored along every planned path.
        #[arg(long, value_delimiter = ',')]
        replay: Option<Vec<String>>,
    },
    /// Closed forms against Monte Carlo; exits with 1 on any failure.
    Validate(Common),
    /// Complex multiplications per coherence block.
    Complexity {
        #[command(flatten)]
        common: Common,
        /// Number of UEs served.
        #[arg(long, default_value_t = 1)]
        ues: usize,
    },
    /// Checks a renderer request against the table headers and hands it to
    /// the command in CFUAV_PLOTTER.
    Plot {
        #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
        args: Vec<String>,
    },
}

#[derive(Args, Clone)]
struct Common {
    /// Key-value config file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides `rng_seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "results")]
    out: PathBuf,
    #[arg(long)]
    realizations: Option<usize>,
    /// `key=value` config override. Repeatable.
    #[arg(long = "set")]
    sets: Vec<String>,
    /// Comma-separated subset of cf, cf-lsfd, sc, cellular.
    #[arg(long, value_delimiter = ',')]
    variants: Option<Vec<String>>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
}

/// Error raised before any simulation starts.
#[derive(Debug)]
struct ConfigError(anyhow::Error);

impl Common {
    fn load(&self, kind: ExperimentKind) -> Result<(ScenarioConfig, ExperimentSpec), ConfigError> {
        let inner = || -> Result<(ScenarioConfig, ExperimentSpec)> {
            let mut cfg = match &self.config {
                Some(p) => {
                    let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                    ScenarioConfig::from_kv_str(&text).with_context(|| format!("in {}", p.display()))?
                }
                None => ScenarioConfig::default(),
            };
            for kv in &self.sets {
                let (k, v) = kv.split_once('=').with_context(|| format!("--set expects key=value, got `{kv}`"))?;
                cfg.set(k.trim(), v.trim())?;
            }
            if let Some(s) = self.seed {
                cfg.rng_seed = s;
            }
            cfg.validate()?;
            let mut spec = ExperimentSpec::new(kind, &self.out, cfg.rng_seed);
            if let Some(n) = self.realizations {
                spec.realizations = n;
            }
            if let Some(v) = &self.variants {
                spec.variants = v.iter().map(|s| s.parse::<Architecture>()).collect::<cfuav::Result<_>>()?;
            }
            if let Some(t) = self.threads {
                rayon::ThreadPoolBuilder::new().num_threads(t).build_global()?;
            }
            Ok((cfg, spec))
        };
        inner().map_err(ConfigError)
    }
}

enum Outcome {
    Done,
    ValidationFailed,
}

fn run(cmd: Cmd) -> Result<Outcome, (u8, anyhow::Error)> {
    let cfg_err = |e: ConfigError| (EXIT_CONFIG, e.0);
    let run_err = |e: anyhow::Error| (EXIT_VALIDATION_FAILED, e);
    match cmd {
        Cmd::CdfSe(common) => cdf(common, ExperimentKind::CdfSe, CdfMetric::Se),
        Cmd::CdfHe(common) => cdf(common, ExperimentKind::CdfHe, CdfMetric::He),
        Cmd::RhoSweep { common, rho_grid, sweeps } => {
            let (cfg, mut spec) = common.load(ExperimentKind::RhoSweep).map_err(cfg_err)?;
            if let Some(g) = rho_grid {
                spec.rho_grid = g;
            }
            spec.sweeps = sweeps
                .iter()
                .map(|s| s.parse::<SweepAxis>())
                .collect::<Result<_>>()
                .map_err(|e| (EXIT_CONFIG, e))?;
            spec.validate().map_err(|e| (EXIT_CONFIG, e))?;
            let t = Instant::now();
            let curves = run_rho_sweep(&spec, &cfg).map_err(run_err)?;
            let file = output::write_sweep(&spec.out, &curves).map_err(run_err)?;
            let summary: Vec<_> = curves
                .iter()
                .map(|c| {
                    let (rho, se) = c.argmax();
                    json!({ "variant": c.variant, "argmax_rho": rho, "max_median_se": se })
                })
                .collect();
            output::write_sidecar(&spec, &cfg, t.elapsed(), &[file], json!(summary)).map_err(run_err)?;
            Ok(Outcome::Done)
        }
        Cmd::Trajectory { common, schemes, trace, replay } => {
            let (cfg, mut spec) = common.load(ExperimentKind::Trajectory).map_err(cfg_err)?;
            if let Some(s) = schemes {
                spec.schemes = s
                    .iter()
                    .map(|x| x.parse::<Scheme>())
                    .collect::<cfuav::Result<_>>()
                    .map_err(|e| (EXIT_CONFIG, e.into()))?;
            }
            spec.trace_placements = trace;
            if let Some(r) = replay {
                spec.replay_variants = r
                    .iter()
                    .map(|x| x.parse::<Architecture>())
                    .collect::<cfuav::Result<_>>()
                    .map_err(|e| (EXIT_CONFIG, e.into()))?;
            }
            spec.validate().map_err(|e| (EXIT_CONFIG, e))?;
            let t = Instant::now();
            let result = run_trajectory_experiment(&spec, &cfg).map_err(run_err)?;
            let files = output::write_trajectories(&spec.out, &result).map_err(run_err)?;
            let summary: Vec<_> = result
                .aggregate()
                .iter()
                .map(|a| {
                    json!({
                        "variant": a.variant.to_string(),
                        "scheme": a.scheme.to_string(),
                        "mean_average_se": a.mean_average_se,
                        "gain_over_line": a.gain_over_line,
                    })
                })
                .collect();
            output::write_sidecar(&spec, &cfg, t.elapsed(), &files, json!(summary)).map_err(run_err)?;
            Ok(Outcome::Done)
        }
        Cmd::Validate(common) => {
            let (cfg, spec) = common.load(ExperimentKind::Validate).map_err(cfg_err)?;
            spec.validate().map_err(|e| (EXIT_CONFIG, e))?;
            let t = Instant::now();
            let reports = run_validation_suite(&cfg, spec.realizations, spec.seed).map_err(run_err)?;
            let file = output::write_validation(&spec.out, &reports).map_err(run_err)?;
            let failed: Vec<&str> = reports.iter().filter(|r| !r.pass).map(|r| r.quantity.as_str()).collect();
            for r in &reports {
                println!(
                    "{:<34} closed form {:>12.6e}  sample {:>12.6e}  rel {:.4}  {}",
                    r.quantity,
                    r.closed_form,
                    r.sample_mean,
                    r.rel_error,
                    if r.pass { "pass" } else { "FAIL" }
                );
            }
            let summary = json!({ "reports": reports.len(), "failed": failed });
            output::write_sidecar(&spec, &cfg, t.elapsed(), &[file], summary).map_err(run_err)?;
            Ok(if all_pass(&reports) { Outcome::Done } else { Outcome::ValidationFailed })
        }
        Cmd::Complexity { common, ues } => {
            let (cfg, spec) = common.load(ExperimentKind::Complexity).map_err(cfg_err)?;
            let t = Instant::now();
            let count = complexity_count(ues, cfg.n_aps, cfg.antennas, cfg.tau_c, cfg.tau_p, cfg.tau_e());
            let file = output::write_complexity(&spec.out, &count).map_err(run_err)?;
            output::write_sidecar(&spec, &cfg, t.elapsed(), &[file], json!({ "total": count.total() }))
                .map_err(run_err)?;
            Ok(Outcome::Done)
        }
        Cmd::Plot { args } => {
            let req = PlotRequest::parse(&args).map_err(|e| (EXIT_CONFIG, e))?;
            req.check_inputs().map_err(|e| (EXIT_CONFIG, e))?;
            let renderer = std::env::var("CFUAV_PLOTTER")
                .map_err(|_| (EXIT_CONFIG, anyhow::anyhow!("inputs are valid, but CFUAV_PLOTTER names no renderer")))?;
            let status = Process::new(&renderer)
                .args(req.to_args())
                .status()
                .with_context(|| format!("running {renderer}"))
                .map_err(run_err)?;
            if status.success() {
                Ok(Outcome::Done)
            } else {
                Err(run_err(anyhow::anyhow!("{renderer} exited with {status}")))
            }
        }
    }
}

fn cdf(common: Common, kind: ExperimentKind, metric: CdfMetric) -> Result<Outcome, (u8, anyhow::Error)> {
    let (cfg, spec) = common.load(kind).map_err(|e| (EXIT_CONFIG, e.0))?;
    spec.validate().map_err(|e| (EXIT_CONFIG, e))?;
    let run_err = |e: anyhow::Error| (EXIT_VALIDATION_FAILED, e);
    let t = Instant::now();
    let result = run_cdf_experiment(&spec, &cfg, metric).map_err(run_err)?;
    let file = output::write_cdf(&spec.out, &result).map_err(run_err)?;
    let summary: serde_json::Map<String, serde_json::Value> = result
        .variants
        .iter()
        .zip(&result.summaries)
        .map(|(a, s)| (a.to_string(), serde_json::to_value(s).expect("plain numbers")))
        .collect();
    output::write_sidecar(&spec, &cfg, t.elapsed(), &[file], summary.into()).map_err(run_err)?;
    Ok(Outcome::Done)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::ValidationFailed) => {
            eprintln!("validation failed");
            ExitCode::from(EXIT_VALIDATION_FAILED)
        }
        Err((code, e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(code)
        }
    }
}
