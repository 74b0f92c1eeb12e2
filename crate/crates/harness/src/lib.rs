//! Experiment runner for the `cfuav` simulator: CDFs over random
//! placements, rho sweeps, trajectory comparisons, the closed-form
//! validation suite and the complexity table, with CSV and JSON output.

pub mod cdf;
pub mod flights;
pub mod output;
pub mod plot;
pub mod scene;
pub mod spec;
pub mod stats;
pub mod sweep;
pub mod validation;

pub use cdf::{run_cdf_experiment, CdfMetric, CdfResult};
pub use flights::{run_trajectory_experiment, TrajectoryResult};
pub use spec::{ExperimentKind, ExperimentSpec};
pub use stats::DistributionSummary;
pub use sweep::{run_rho_sweep, SweepCurve};
pub use validation::run_validation_suite;
