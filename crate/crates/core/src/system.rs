//! One coherence block of the full system: estimation, harvesting, power
//! split and uplink SE for each architecture.

use std::fmt;
use std::str::FromStr;

use crate::channel::{LinkStatistics, ScenarioChannels};
use crate::config::{ScTueServing, ScenarioConfig};
use crate::energy::{
    advance_energy, he_cf, he_cellular, he_sc, summarize_link, summarize_with_q, LinkSummary, SlotEnergyState, TimeSplit, TueCoupling,
    TueServingAp,
};
use crate::error::{Error, Result};
use crate::estimation::{estimate_covariance, estimation_matrices, tue_estimation, EstimationMatrices};
use crate::geometry::Position;
use crate::rng::{derive_seed, substream};
use crate::scalar::{CMatrix, Real};
use crate::spectral::{lsfd_vectors, se_cellular, se_cf_closed_form, se_lsfd, se_sc, McLink, SeTermBreakdown};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Architecture {
    /// Cell-free with matched-filter (equal-weight) combining at the CPU.
    Cf,
    /// Cell-free with LSFD weights at the CPU.
    CfLsfd,
    Sc,
    Cellular,
}

impl Architecture {
    pub const ALL: [Architecture; 4] = [Self::Cf, Self::CfLsfd, Self::Sc, Self::Cellular];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Cf => "cf",
            Self::CfLsfd => "cf-lsfd",
            Self::Sc => "sc",
            Self::Cellular => "cellular",
        }
    }
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Architecture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown variant `{s}` (expected cf, cf-lsfd, sc or cellular)")))
    }
}

/// Scalar system parameters in the working precision.
#[derive(Debug, Clone, Copy)]
pub struct SystemParams<T> {
    pub kappa: T,
    pub sigma2: T,
    pub p_d_cf: T,
    pub p_d_sc: T,
    pub p_d_c: T,
    pub p_te: T,
    pub p_te_u: T,
    pub p0_pilot: T,
    pub split: TimeSplit<T>,
    pub se_draws: usize,
    pub sc_tue_serving: ScTueServing,
}

impl<T: Real> SystemParams<T> {
    pub fn from_config(cfg: &ScenarioConfig) -> Self {
        Self {
            kappa: T::lit(cfg.kappa),
            sigma2: T::lit(cfg.sigma2),
            p_d_cf: T::lit(cfg.p_d_cf),
            p_d_sc: T::lit(cfg.p_d_sc()),
            p_d_c: T::lit(cfg.p_d_c),
            p_te: T::lit(cfg.p_te),
            p_te_u: T::lit(cfg.p_te_u),
            p0_pilot: T::lit(cfg.p0_pilot),
            split: cfg.time_split(),
            se_draws: cfg.se_draws,
            sc_tue_serving: cfg.sc_tue_serving,
        }
    }
}

/// Result of one coherence block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotEvaluation<T> {
    pub se: T,
    /// Monte Carlo standard error of `se` (zero for closed forms).
    pub se_std_error: T,
    pub energy: SlotEnergyState<T>,
    /// Closed-form term moments (cell-free variants only).
    pub terms: Option<SeTermBreakdown<T>>,
    /// Small cell: AP chosen for harvesting.
    pub harvesting_ap: Option<usize>,
    /// Small cell: AP chosen for uplink data.
    pub serving_ap: Option<usize>,
}

/// Per-AP quantities at one UAV position and pilot power.
#[derive(Debug, Clone)]
pub struct ApSnapshot<T: Real> {
    pub stats: Vec<LinkStatistics<T>>,
    pub mats: Vec<EstimationMatrices<T>>,
    pub summaries: Vec<LinkSummary<T>>,
}

/// Splits harvested energy; with no data phase everything goes to the next
/// pilot and the uplink is silent.
pub fn energy_state<T: Real>(p_he: T, split: &TimeSplit<T>) -> Result<SlotEnergyState<T>> {
    if split.has_data_phase() {
        advance_energy(p_he, split)
    } else {
        Ok(SlotEnergyState {
            p_he,
            p_u: T::zero(),
            p_pilot_next: split.tau_c / split.tau_p * p_he,
            partial: T::one(),
        })
    }
}

/// A placement with its frozen channel geometry and TUE estimates, ready to
/// evaluate coherence blocks at arbitrary UAV positions.
#[derive(Debug, Clone)]
pub struct SlotModel<T: Real> {
    pub params: SystemParams<T>,
    pub channels: ScenarioChannels<T>,
    tue_g_aps: Option<Vec<CMatrix<T>>>,
    tue_g_bs: Option<CMatrix<T>>,
    tue_strongest_ap: Option<usize>,
    mc_seed: u64,
}

impl<T: Real> SlotModel<T> {
    /// `mc_seed` drives the small-cell / cellular expectation draws.
    pub fn new(cfg: &ScenarioConfig, channels: ScenarioChannels<T>, mc_seed: u64) -> Result<Self> {
        let params = SystemParams::from_config(cfg);
        let tue_g_aps = match &channels.tue_aps {
            Some(links) => Some(
                links
                    .iter()
                    .map(|t| tue_estimation(t, params.p_te, params.sigma2))
                    .collect::<Result<Vec<_>>>()?,
            ),
            None => None,
        };
        let tue_g_bs = match &channels.tue_bs {
            Some(t) => Some(tue_estimation(t, params.p_te, params.sigma2)?),
            None => None,
        };
        let tue_strongest_ap = channels.tue_aps.as_ref().and_then(|links| {
            let mut best: Option<(usize, T)> = None;
            for (l, t) in links.iter().enumerate() {
                if best.is_none_or(|(_, b)| t.beta_te > b) {
                    best = Some((l, t.beta_te));
                }
            }
            best.map(|(l, _)| l)
        });
        Ok(Self { params, channels, tue_g_aps, tue_g_bs, tue_strongest_ap, mc_seed })
    }

    pub fn tue_present(&self) -> bool {
        self.channels.tue_aps.is_some()
    }

    /// AP the TUE is attached to: the one with the strongest TUE link.
    pub fn tue_serving_ap(&self) -> Option<usize> {
        self.tue_strongest_ap
    }

    pub fn tue_covariances(&self) -> Option<&[CMatrix<T>]> {
        self.tue_g_aps.as_deref()
    }

    pub fn tue_bs_covariance(&self) -> Option<&CMatrix<T>> {
        self.tue_g_bs.as_ref()
    }

    fn ap_coupling(&self, l: usize) -> Option<TueCoupling<'_, T>> {
        match (&self.channels.tue_aps, &self.tue_g_aps) {
            (Some(links), Some(g)) => Some(TueCoupling { r_te: &links[l].r_te, g_te: &g[l] }),
            _ => None,
        }
    }

    fn bs_coupling(&self) -> Option<TueCoupling<'_, T>> {
        match (&self.channels.tue_bs, &self.tue_g_bs) {
            (Some(link), Some(g)) => Some(TueCoupling { r_te: &link.r_te, g_te: g }),
            _ => None,
        }
    }

    pub fn ap_snapshot(&self, pos: &Position<T>, pilot: T) -> Result<ApSnapshot<T>> {
        let n = self.channels.n_aps();
        let mut stats = Vec::with_capacity(n);
        let mut mats = Vec::with_capacity(n);
        let mut summaries = Vec::with_capacity(n);
        for l in 0..n {
            let s = self.channels.ap_link(pos, l)?;
            let m = estimation_matrices(&s, pilot, self.params.kappa, self.params.sigma2)?;
            summaries.push(summarize_link(&s, &m, self.ap_coupling(l)));
            stats.push(s);
            mats.push(m);
        }
        Ok(ApSnapshot { stats, mats, summaries })
    }

    /// Cell-free per-AP summaries only; the hot path of trajectory planning.
    pub fn ap_summaries(&self, pos: &Position<T>, pilot: T) -> Result<Vec<LinkSummary<T>>> {
        (0..self.channels.n_aps())
            .map(|l| {
                let s = self.channels.ap_link(pos, l)?;
                let q = estimate_covariance(&s, pilot, self.params.kappa, self.params.sigma2)?;
                Ok(summarize_with_q(&s, &q, self.ap_coupling(l)))
            })
            .collect()
    }

    fn sc_serving(&self) -> TueServingAp {
        match (self.params.sc_tue_serving, self.tue_strongest_ap) {
            (ScTueServing::TueStrongest, Some(l)) => TueServingAp::Fixed(l),
            (ScTueServing::UavEnergyAp, Some(_)) => TueServingAp::Harvesting,
            // without a TUE every pickup is zero and the choice is moot
            (_, None) => TueServingAp::Harvesting,
        }
    }

    /// Runs one coherence block at `pos` with pilot power `pilot`. The
    /// Monte Carlo variants draw from a stream fixed by `slot`.
    pub fn evaluate(&self, arch: Architecture, pos: &Position<T>, slot: u64, pilot: T) -> Result<SlotEvaluation<T>> {
        let p = &self.params;
        match arch {
            Architecture::Cf | Architecture::CfLsfd => {
                let links = self.ap_summaries(pos, pilot)?;
                let energy = energy_state(he_cf(&links, p.p_d_cf, p.kappa, &p.split)?, &p.split)?;
                let (se, terms) = se_cf_closed_form(&links, energy.p_u, p.p_te_u, p.kappa, p.sigma2, &p.split);
                let se = if arch == Architecture::CfLsfd {
                    se_lsfd(&lsfd_vectors(&links), energy.p_u, p.p_te_u, p.kappa, p.sigma2, &p.split)
                } else {
                    se
                };
                Ok(SlotEvaluation {
                    se,
                    se_std_error: T::zero(),
                    energy,
                    terms: Some(terms),
                    harvesting_ap: None,
                    serving_ap: None,
                })
            }
            Architecture::Sc => {
                let snap = self.ap_snapshot(pos, pilot)?;
                let (p_he, harvesting) = he_sc(&snap.summaries, p.p_d_sc, p.kappa, &p.split, self.sc_serving())?;
                let energy = energy_state(p_he, &p.split)?;
                let tue = self.channels.tue_aps.as_ref();
                let mc = (0..snap.stats.len())
                    .map(|l| {
                        McLink::new(
                            &snap.stats[l],
                            &snap.mats[l],
                            tue.map(|t| &t[l].r_te),
                            energy.p_u,
                            p.p_te_u,
                            p.sigma2,
                        )
                    })
                    .collect::<Result<Vec<_>>>()?;
                let mut rng = self.mc_stream(arch, slot);
                let r = se_sc(&mc, energy.p_u, p.kappa, &p.split, p.se_draws, &mut rng);
                Ok(SlotEvaluation {
                    se: r.se,
                    se_std_error: r.std_error,
                    energy,
                    terms: None,
                    harvesting_ap: Some(harvesting),
                    serving_ap: Some(r.serving),
                })
            }
            Architecture::Cellular => {
                let stats = self.channels.bs_link(pos)?;
                let mats = estimation_matrices(&stats, pilot, p.kappa, p.sigma2)?;
                let coupling = self.bs_coupling();
                let summary = summarize_link(&stats, &mats, coupling);
                let energy = energy_state(he_cellular(&summary, p.p_d_c, p.kappa, &p.split)?, &p.split)?;
                let link = McLink::new(&stats, &mats, coupling.map(|c| c.r_te), energy.p_u, p.p_te_u, p.sigma2)?;
                let mut rng = self.mc_stream(arch, slot);
                let r = se_cellular(&link, energy.p_u, p.kappa, &p.split, p.se_draws, &mut rng);
                Ok(SlotEvaluation {
                    se: r.se,
                    se_std_error: r.std_error,
                    energy,
                    terms: None,
                    harvesting_ap: None,
                    serving_ap: None,
                })
            }
        }
    }

    /// Harvested energy only, skipping the SE computation.
    pub fn harvest(&self, arch: Architecture, pos: &Position<T>, pilot: T) -> Result<SlotEnergyState<T>> {
        let p = &self.params;
        let p_he = match arch {
            Architecture::Cf | Architecture::CfLsfd => he_cf(&self.ap_summaries(pos, pilot)?, p.p_d_cf, p.kappa, &p.split)?,
            Architecture::Sc => he_sc(&self.ap_summaries(pos, pilot)?, p.p_d_sc, p.kappa, &p.split, self.sc_serving())?.0,
            Architecture::Cellular => {
                let stats = self.channels.bs_link(pos)?;
                let mats = estimation_matrices(&stats, pilot, p.kappa, p.sigma2)?;
                he_cellular(&summarize_link(&stats, &mats, self.bs_coupling()), p.p_d_c, p.kappa, &p.split)?
            }
        };
        energy_state(p_he, &p.split)
    }

    /// Pilot power after `warmup` blocks at a fixed position, starting from
    /// the initial pilot power. Returns the pilot sequence `p[0..=warmup]`.
    pub fn warm_up(&self, arch: Architecture, pos: &Position<T>, warmup: usize) -> Result<Vec<T>> {
        let mut pilots = Vec::with_capacity(warmup + 1);
        let mut pilot = self.params.p0_pilot;
        pilots.push(pilot);
        for _ in 0..warmup {
            pilot = self.harvest(arch, pos, pilot)?.p_pilot_next;
            pilots.push(pilot);
        }
        Ok(pilots)
    }

    fn mc_stream(&self, arch: Architecture, slot: u64) -> crate::rng::RandomStream {
        let tag = Architecture::ALL.iter().position(|a| *a == arch).unwrap_or(0) as u64;
        substream(derive_seed(self.mc_seed, slot), tag)
    }
}
