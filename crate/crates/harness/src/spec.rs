//! What to run.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{anyhow, bail, Result};
use cfuav::trajectory::Scheme;
use cfuav::{Architecture, ScenarioConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExperimentKind {
    CdfSe,
    CdfHe,
    RhoSweep,
    Trajectory,
    Validate,
    Complexity,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 6] =
        [Self::CdfSe, Self::CdfHe, Self::RhoSweep, Self::Trajectory, Self::Validate, Self::Complexity];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::CdfSe => "cdf-se",
            Self::CdfHe => "cdf-he",
            Self::RhoSweep => "rho-sweep",
            Self::Trajectory => "trajectory",
            Self::Validate => "validate",
            Self::Complexity => "complexity",
        }
    }

    pub fn default_variants(self) -> Vec<Architecture> {
        use Architecture::*;
        match self {
            Self::CdfSe => vec![Cf, Sc, Cellular],
            Self::CdfHe => vec![Cf, Sc, Cellular],
            Self::RhoSweep | Self::Trajectory => vec![Cf],
            Self::Validate | Self::Complexity => vec![Cf],
        }
    }

    pub fn default_realizations(self) -> usize {
        match self {
            Self::CdfSe | Self::CdfHe => 5000,
            Self::RhoSweep => 2000,
            Self::Trajectory => 200,
            Self::Validate => 100_000,
            Self::Complexity => 1,
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentKind {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| anyhow!("unknown experiment kind `{s}`"))
    }
}

/// One config key swept over several values, e.g. `antennas=2,4`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub key: String,
    pub values: Vec<String>,
}

impl FromStr for SweepAxis {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let (key, values) = s.split_once('=').ok_or_else(|| anyhow!("expected key=v1,v2,... got `{s}`"))?;
        let values: Vec<String> = values.split(',').map(|v| v.trim().to_string()).filter(|v| !v.is_empty()).collect();
        if values.is_empty() {
            bail!("sweep `{key}` has no values");
        }
        Ok(Self { key: key.trim().to_string(), values })
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub variants: Vec<Architecture>,
    pub realizations: usize,
    /// Time-splitting fractions of a rho sweep.
    pub rho_grid: Vec<f64>,
    /// Extra config axes; the rho sweep runs once per combination.
    pub sweeps: Vec<SweepAxis>,
    pub schemes: Vec<Scheme>,
    /// Variants re-scored along every planned trajectory.
    pub replay_variants: Vec<Architecture>,
    /// Trajectory placements whose full per-slot log is written out.
    pub trace_placements: usize,
    pub out: PathBuf,
    pub seed: u64,
}

impl ExperimentSpec {
    pub fn new(kind: ExperimentKind, out: impl Into<PathBuf>, seed: u64) -> Self {
        Self {
            kind,
            variants: kind.default_variants(),
            realizations: kind.default_realizations(),
            rho_grid: default_rho_grid(),
            sweeps: Vec::new(),
            schemes: vec![Scheme::AngleSearch, Scheme::ApSearch, Scheme::LinePath],
            replay_variants: Vec::new(),
            trace_placements: 1,
            out: out.into(),
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.realizations == 0 {
            bail!("realizations must be at least 1");
        }
        if self.variants.is_empty() {
            bail!("at least one variant is required");
        }
        if self.kind == ExperimentKind::RhoSweep {
            if self.rho_grid.is_empty() {
                bail!("empty rho grid");
            }
            if let Some(r) = self.rho_grid.iter().find(|r| !(0.0..=1.0).contains(*r)) {
                bail!("rho {r} outside [0, 1]");
            }
        }
        if self.kind == ExperimentKind::Trajectory && self.schemes.is_empty() {
            bail!("at least one flight scheme is required");
        }
        let mut probe = ScenarioConfig::default();
        for axis in &self.sweeps {
            for v in &axis.values {
                probe.set(&axis.key, v)?;
            }
        }
        Ok(())
    }

    /// Every combination of the sweep axes as `(label, config)`. Without
    /// axes this is the base config with an empty label.
    pub fn combinations(&self, base: &ScenarioConfig) -> Result<Vec<(String, ScenarioConfig)>> {
        let mut combos = vec![(String::new(), base.clone())];
        for axis in &self.sweeps {
            let mut next = Vec::with_capacity(combos.len() * axis.values.len());
            for (label, cfg) in &combos {
                for v in &axis.values {
                    let mut c = cfg.clone();
                    c.set(&axis.key, v)?;
                    c.validate()?;
                    let sep = if label.is_empty() { "" } else { "," };
                    next.push((format!("{label}{sep}{}={v}", axis.key), c));
                }
            }
            combos = next;
        }
        Ok(combos)
    }
}

/// 0, 0.02, ..., 1.
pub fn default_rho_grid() -> Vec<f64> {
    (0..=50).map(|i| i as f64 / 50.0).collect()
}

/// Variant label of a sweep row: `cf` or `cf[antennas=4]`.
pub fn variant_label(arch: Architecture, combo: &str) -> String {
    if combo.is_empty() {
        arch.to_string()
    } else {
        format!("{arch}[{combo}]")
    }
}
