//! Link-level models of a WPT-powered UAV uplink served by cell-free,
//! small-cell or cellular massive MIMO.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`). The aliases
//! at the crate root fix the precision to `f64`, which is what the harness
//! uses; the `F32` aliases exist for memory-bound sweeps.

pub mod channel;
pub mod config;
pub mod energy;
pub mod error;
pub mod estimation;
pub mod geometry;
pub mod linalg;
pub mod oracle;
pub mod rng;
pub mod scalar;
pub mod spectral;
pub mod system;
pub mod trajectory;

pub use config::{ScTueServing, ScenarioConfig};
pub use error::{Error, Result};
pub use scalar::Real;
pub use system::Architecture;

pub type Position = geometry::Position<f64>;
pub type Placement = geometry::Placement<f64>;
pub type LinkStatistics = channel::LinkStatistics<f64>;
pub type TueLinkStatistics = channel::TueLinkStatistics<f64>;
pub type ScenarioChannels = channel::ScenarioChannels<f64>;
pub type EstimationMatrices = estimation::EstimationMatrices<f64>;
pub type SlotEnergyState = energy::SlotEnergyState<f64>;
pub type TimeSplit = energy::TimeSplit<f64>;
pub type LinkSummary = energy::LinkSummary<f64>;
pub type SeTermBreakdown = spectral::SeTermBreakdown<f64>;
pub type LsfdVectors = spectral::LsfdVectors<f64>;
pub type SlotModel = system::SlotModel<f64>;
pub type SlotEvaluation = system::SlotEvaluation<f64>;
pub type TrajectoryLog = trajectory::TrajectoryLog<f64>;
pub type MonteCarloReport = oracle::MonteCarloReport;

pub type PositionF32 = geometry::Position<f32>;
pub type SlotModelF32 = system::SlotModel<f32>;
pub type TrajectoryLogF32 = trajectory::TrajectoryLog<f32>;
