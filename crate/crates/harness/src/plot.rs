//! The interface between the harness and the figure renderer.
//!
//! The renderer itself lives outside this workspace. It is invoked as
//! `plot <kind> --in <csv...> --out <png>` and reads only the tables below;
//! this module pins their headers and checks a request before it is handed
//! over, so a missing column is reported by name on this side.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};

pub const CDF_HEADER: &[&str] = &["variant", "sample"];
pub const SWEEP_HEADER: &[&str] = &["variant", "rho", "median_se"];
pub const TRAJECTORY_HEADER: &[&str] = &["slot", "x", "y", "se", "p_he", "p_u"];
pub const PLACEMENT_HEADER: &[&str] = &["kind", "index", "x", "y"];
pub const VALIDATION_HEADER: &[&str] = &["quantity", "closed_form", "sample_mean", "rel_error", "pass"];
pub const TRAJECTORY_SUMMARY_HEADER: &[&str] = &[
    "placement",
    "variant",
    "path_of",
    "scheme",
    "average_se",
    "slots_used",
    "direction_switches",
    "direction_searches",
    "aps_reached",
    "arrived",
];
pub const TRAJECTORY_TABLE_HEADER: &[&str] = &["variant", "scheme", "mean_average_se", "gain_over_line"];
pub const COMPLEXITY_HEADER: &[&str] = &["phase", "multiplications"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    /// CDF curves, one per variant.
    Cdf,
    /// Median SE against rho, one line per variant.
    Sweep,
    /// AP markers, start and destination, and trajectory polylines.
    Map,
    /// Average SE per variant and scheme.
    Bars,
}

impl PlotKind {
    pub const ALL: [PlotKind; 4] = [Self::Cdf, Self::Sweep, Self::Map, Self::Bars];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Cdf => "cdf",
            Self::Sweep => "sweep",
            Self::Map => "map",
            Self::Bars => "bars",
        }
    }

    /// Headers an input may have for this kind.
    pub fn accepted_headers(self) -> &'static [&'static [&'static str]] {
        match self {
            Self::Cdf => &[CDF_HEADER],
            Self::Sweep => &[SWEEP_HEADER],
            Self::Map => &[PLACEMENT_HEADER, TRAJECTORY_HEADER],
            Self::Bars => &[TRAJECTORY_TABLE_HEADER, TRAJECTORY_SUMMARY_HEADER],
        }
    }
}

impl fmt::Display for PlotKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PlotKind {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| anyhow!("unknown plot kind `{s}` (expected cdf, sweep, map or bars)"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotRequest {
    pub kind: PlotKind,
    pub inputs: Vec<PathBuf>,
    pub out: PathBuf,
}

impl PlotRequest {
    /// Parses `<kind> --in <csv...> --out <png>` (without the leading
    /// `plot`).
    pub fn parse<S: AsRef<str>>(args: &[S]) -> Result<Self> {
        let mut it = args.iter().map(|s| s.as_ref());
        let kind: PlotKind = it.next().ok_or_else(|| anyhow!("missing plot kind"))?.parse()?;
        let mut inputs = Vec::new();
        let mut out = None;
        let mut in_inputs = false;
        while let Some(a) = it.next() {
            match a {
                "--in" => in_inputs = true,
                "--out" => {
                    in_inputs = false;
                    out = Some(PathBuf::from(it.next().ok_or_else(|| anyhow!("--out needs a path"))?));
                }
                other if in_inputs && !other.starts_with("--") => inputs.push(PathBuf::from(other)),
                other => bail!("unexpected argument `{other}`"),
            }
        }
        if inputs.is_empty() {
            bail!("--in needs at least one csv");
        }
        let out = out.ok_or_else(|| anyhow!("missing --out"))?;
        Ok(Self { kind, inputs, out })
    }

    /// The argument list the renderer is invoked with.
    pub fn to_args(&self) -> Vec<String> {
        let mut v = vec!["plot".to_string(), self.kind.to_string(), "--in".to_string()];
        v.extend(self.inputs.iter().map(|p| p.display().to_string()));
        v.push("--out".into());
        v.push(self.out.display().to_string());
        v
    }

    /// Checks every input against the headers of the kind. A map needs a
    /// placement table and at least one trajectory.
    pub fn check_inputs(&self) -> Result<()> {
        let accepted = self.kind.accepted_headers();
        let mut seen = vec![false; accepted.len()];
        for path in &self.inputs {
            let header = read_header(path)?;
            let idx = match_header(&header, accepted)
                .with_context(|| format!("{} is not a valid `{}` input", path.display(), self.kind))?;
            seen[idx] = true;
        }
        if self.kind == PlotKind::Map && !(seen[0] && seen[1]) {
            bail!("map needs a placement csv and at least one trajectory csv");
        }
        Ok(())
    }
}

fn read_header(path: &Path) -> Result<Vec<String>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(r.headers().with_context(|| format!("reading {}", path.display()))?.iter().map(str::to_string).collect())
}

/// Index of the first accepted header contained in `header`; otherwise an
/// error naming the columns missing from the closest candidate.
pub fn match_header(header: &[String], accepted: &[&[&str]]) -> Result<usize> {
    let mut closest: Option<Vec<&str>> = None;
    for (i, want) in accepted.iter().enumerate() {
        let missing: Vec<&str> = want.iter().copied().filter(|c| !header.iter().any(|h| h == c)).collect();
        if missing.is_empty() {
            return Ok(i);
        }
        if closest.as_ref().is_none_or(|m| missing.len() < m.len()) {
            closest = Some(missing);
        }
    }
    let missing = closest.unwrap_or_default();
    bail!("missing column(s): {}", missing.join(", "))
}
