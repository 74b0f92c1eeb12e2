//! Downlink harvested energy and the per-slot pilot/data power recursion.

use crate::channel::LinkStatistics;
use crate::error::{Error, Result};
use crate::estimation::EstimationMatrices;
use crate::linalg::{norm_sqr, quad_form, trace_of_product, trace_real};
use crate::scalar::{CMatrix, Real};

/// Channel uses of one coherence block: `tau_c` total, `tau_p` pilot,
/// `tau_e` downlink WPT, the remainder uplink data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeSplit<T> {
    pub tau_c: T,
    pub tau_p: T,
    pub tau_e: T,
}

impl<T: Real> TimeSplit<T> {
    pub fn new(tau_c: T, tau_p: T, tau_e: T) -> Self {
        Self { tau_c, tau_p, tau_e }
    }

    pub fn from_rho(tau_c: T, tau_p: T, rho: T) -> Self {
        Self::new(tau_c, tau_p, rho * (tau_c - tau_p))
    }

    pub fn data_uses(&self) -> T {
        self.tau_c - self.tau_p - self.tau_e
    }

    pub fn has_data_phase(&self) -> bool {
        self.data_uses() > T::zero()
    }

    /// `(tau_c - tau_p - tau_e) / tau_c`, floored at zero.
    pub fn prelog(&self) -> T {
        (self.data_uses() / self.tau_c).max(T::zero())
    }

    pub fn wpt_fraction(&self) -> T {
        self.tau_e / self.tau_c
    }

    /// Share of the harvested energy kept for the next pilot,
    /// `tau_p / (tau_c - tau_e)`.
    pub fn partial(&self) -> T {
        self.tau_p / (self.tau_c - self.tau_e)
    }
}

/// Per-AP second-order statistics that every closed form is assembled from.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LinkSummary<T> {
    /// `tr Q + ||h_bar||^2`, i.e. `E ||g_hat||^2`.
    pub b: T,
    pub upsilon: T,
    /// TUE precoding power picked up by the UAV:
    /// `tr(G_te R) + h_bar^H G_te h_bar`.
    pub te_pickup: T,
    /// TUE uplink leakage through the combiner:
    /// `tr(R_te Q) + h_bar^H R_te h_bar`.
    pub te_leak: T,
}

/// TUE matrices seen by one array.
#[derive(Debug, Clone, Copy)]
pub struct TueCoupling<'a, T: Real> {
    pub r_te: &'a CMatrix<T>,
    pub g_te: &'a CMatrix<T>,
}

/// `tr(R Q) + h_bar^H Q h_bar + h_bar^H R h_bar`.
pub fn upsilon<T: Real>(stats: &LinkStatistics<T>, mats: &EstimationMatrices<T>) -> T {
    upsilon_with(stats, &mats.q)
}

fn upsilon_with<T: Real>(stats: &LinkStatistics<T>, q: &CMatrix<T>) -> T {
    trace_of_product(&stats.r, q) + quad_form(&stats.h_bar, q) + quad_form(&stats.h_bar, &stats.r)
}

pub fn summarize_link<T: Real>(
    stats: &LinkStatistics<T>,
    mats: &EstimationMatrices<T>,
    tue: Option<TueCoupling<'_, T>>,
) -> LinkSummary<T> {
    summarize_with_q(stats, &mats.q, tue)
}

/// Same as [`summarize_link`] given only the estimate covariance `Q`.
pub fn summarize_with_q<T: Real>(
    stats: &LinkStatistics<T>,
    q: &CMatrix<T>,
    tue: Option<TueCoupling<'_, T>>,
) -> LinkSummary<T> {
    let b = trace_real(q) + norm_sqr(&stats.h_bar);
    let (te_pickup, te_leak) = match tue {
        Some(t) => (
            trace_of_product(t.g_te, &stats.r) + quad_form(&stats.h_bar, t.g_te),
            trace_of_product(t.r_te, q) + quad_form(&stats.h_bar, t.r_te),
        ),
        None => (T::zero(), T::zero()),
    };
    LinkSummary { b, upsilon: upsilon_with(stats, q), te_pickup, te_leak }
}

/// `(Upsilon + b^2) / b + te_pickup` of one AP.
fn ap_energy_term<T: Real>(link: &LinkSummary<T>, index: usize) -> Result<T> {
    if !(link.b > T::zero()) {
        return Err(Error::Degenerate(format!("AP {index} has a dead link (E||g_hat||^2 = 0)")));
    }
    Ok((link.upsilon + link.b * link.b) / link.b + link.te_pickup)
}

/// Cell-free harvested energy; with a single stacked link this is the
/// cellular form.
pub fn he_cf<T: Real>(links: &[LinkSummary<T>], p_d: T, kappa: T, split: &TimeSplit<T>) -> Result<T> {
    let mut sum = T::zero();
    for (l, link) in links.iter().enumerate() {
        sum += ap_energy_term(link, l)?;
    }
    Ok(split.wpt_fraction() * kappa * p_d * sum)
}

pub fn he_cellular<T: Real>(link: &LinkSummary<T>, p_d: T, kappa: T, split: &TimeSplit<T>) -> Result<T> {
    he_cf(std::slice::from_ref(link), p_d, kappa, split)
}

/// Which AP's TUE pickup is added inside the small-cell maximization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TueServingAp {
    Fixed(usize),
    /// The AP being maximized over serves the TUE as well.
    Harvesting,
}

/// Small-cell harvested energy and the harvesting AP. Ties go to the lowest
/// index.
pub fn he_sc<T: Real>(
    links: &[LinkSummary<T>],
    p_d_sc: T,
    kappa: T,
    split: &TimeSplit<T>,
    serving: TueServingAp,
) -> Result<(T, usize)> {
    if links.is_empty() {
        return Err(Error::Degenerate("no APs".into()));
    }
    let fixed_pickup = match serving {
        TueServingAp::Fixed(l) => links
            .get(l)
            .ok_or(Error::Dimension { expected: links.len(), got: l })?
            .te_pickup,
        TueServingAp::Harvesting => T::zero(),
    };
    let mut best = (T::zero(), usize::MAX);
    for (l, link) in links.iter().enumerate() {
        let own = ap_energy_term(link, l)? - link.te_pickup;
        let v = match serving {
            TueServingAp::Fixed(_) => own + fixed_pickup,
            TueServingAp::Harvesting => own + link.te_pickup,
        };
        if best.1 == usize::MAX || v > best.0 {
            best = (v, l);
        }
    }
    Ok((split.wpt_fraction() * kappa * p_d_sc * best.0, best.1))
}

/// Energy bookkeeping of one coherence block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotEnergyState<T> {
    pub p_he: T,
    pub p_u: T,
    pub p_pilot_next: T,
    pub partial: T,
}

/// Splits the harvested energy between this slot's uplink data and the
/// next slot's pilot.
pub fn advance_energy<T: Real>(p_he: T, split: &TimeSplit<T>) -> Result<SlotEnergyState<T>> {
    if !split.has_data_phase() {
        return Err(Error::NoDataPhase {
            tau_e: split.tau_e.as_f64(),
            available: (split.tau_c - split.tau_p).as_f64(),
        });
    }
    let partial = split.partial();
    let p_u = split.tau_c / split.data_uses() * (T::one() - partial) * p_he;
    let p_pilot_next = split.tau_c / split.tau_p * partial * p_he;
    Ok(SlotEnergyState { p_he, p_u, p_pilot_next, partial })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;
    use approx::assert_relative_eq;
    use rand::Rng;

    fn scalar(b: f64, upsilon: f64) -> LinkSummary<f64> {
        LinkSummary { b, upsilon, ..Default::default() }
    }

    #[test]
    fn scalar_cf() {
        let split = TimeSplit::new(2.0, 0.0, 1.0);
        let v = he_cf(&[scalar(0.5, 0.5)], 1.0, 1.0, &split).unwrap();
        assert_relative_eq!(v, 0.75, max_relative = 1e-15);
        let none = TimeSplit::new(2.0, 1.0, 0.0);
        assert_eq!(he_cf(&[scalar(0.5, 0.5)], 1.0, 1.0, &none).unwrap(), 0.0);
        assert!(he_cf(&[scalar(0.0, 0.0)], 1.0, 1.0, &split).is_err());
    }

    #[test]
    fn sc_single_ap_and_ties() {
        let split = TimeSplit::new(2.0, 0.0, 1.0);
        let one = [scalar(0.5, 0.5)];
        let (v, l) = he_sc(&one, 1.0, 1.0, &split, TueServingAp::Fixed(0)).unwrap();
        assert_eq!(v, he_cf(&one, 1.0, 1.0, &split).unwrap());
        assert_eq!(l, 0);
        let tied = [scalar(0.2, 0.1), scalar(0.5, 0.5), scalar(0.5, 0.5)];
        let (_, l) = he_sc(&tied, 1.0, 1.0, &split, TueServingAp::Harvesting).unwrap();
        assert_eq!(l, 1);
    }

    #[test]
    fn tue_pickup_adds_linearly() {
        let split = TimeSplit::new(2.0, 0.0, 1.0);
        let base = scalar(0.5, 0.5);
        let with = LinkSummary { te_pickup: 0.5, ..base };
        let d = he_cf(&[with], 3.0, 0.8, &split).unwrap() - he_cf(&[base], 3.0, 0.8, &split).unwrap();
        assert_relative_eq!(d, 0.5 * 0.8 * 3.0 * 0.5, max_relative = 1e-12);
    }

    #[test]
    fn recursion_reference_split() {
        let split = TimeSplit::from_rho(200.0, 1.0, 0.5);
        assert_eq!(split.tau_e, 99.5);
        let s = advance_energy(1.0, &split).unwrap();
        assert_relative_eq!(s.p_u, 200.0 / 100.5, max_relative = 1e-14);
        assert_relative_eq!(s.p_pilot_next, 200.0 / 100.5, max_relative = 1e-14);
        let z = advance_energy(0.0, &split).unwrap();
        assert_eq!((z.p_u, z.p_pilot_next), (0.0, 0.0));
        assert!(advance_energy(1.0, &TimeSplit::from_rho(200.0, 1.0, 1.0)).is_err());
    }

    #[test]
    fn data_and_next_pilot_power_agree() {
        let mut rng = substream(21, 0);
        for _ in 0..1000 {
            let tau_c: f64 = rng.random_range(10.0..500.0);
            let tau_p: f64 = rng.random_range(1.0..5.0);
            let rho: f64 = rng.random_range(0.0..0.999);
            let p_he: f64 = rng.random_range(1e-9..1e3);
            let s = advance_energy(p_he, &TimeSplit::from_rho(tau_c, tau_p, rho)).unwrap();
            assert!((s.p_u - s.p_pilot_next).abs() <= 1e-12 * s.p_u);
        }
    }
}
