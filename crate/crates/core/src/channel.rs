//! Large-scale and small-scale channel models.
//!
//! UAV links are spatially correlated Rician: a ULA steering vector scaled
//! by the LoS gain plus a Gaussian-local-scattering NLoS covariance. TUE
//! links are correlated Rayleigh with a three-slope pathloss.
//!
//! Three-slope TUE pathloss, distances in km, `PL` in dB:
//!
//! | range            | PL(d)                                   |
//! |------------------|-----------------------------------------|
//! | d > d1           | -Lc - 35 log10(d)                       |
//! | d0 < d <= d1     | -Lc - 15 log10(d1) - 20 log10(d)        |
//! | d <= d0          | -Lc - 15 log10(d1) - 20 log10(d0)       |
//!
//! with d0 = 10 m, d1 = 50 m and the Hata-COST231 constant
//!
//! ```text
//! Lc = 46.3 + 33.9 log10 f - 13.82 log10 h_ap - (1.1 log10 f - 0.7) h_ue + (1.56 log10 f - 0.8)
//! ```
//!
//! at f = 2000 MHz, h_ap = 15 m, h_ue = 1.65 m, which gives Lc ≈ 141.4646 dB.

use nalgebra::Complex;
use rand::Rng;

use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::geometry::{Placement, Position};
use crate::linalg::psd_sqrt;
use crate::rng::complex_normal_vector;
use crate::scalar::{CMatrix, CVector, Real};

pub const TUE_D0_M: f64 = 10.0;
pub const TUE_D1_M: f64 = 50.0;
pub const TUE_CARRIER_MHZ: f64 = 2000.0;
pub const TUE_AP_HEIGHT_M: f64 = 15.0;
pub const TUE_UE_HEIGHT_M: f64 = 1.65;
/// Spread of cluster nominal AoAs around the geometric AoA (degrees).
pub const CLUSTER_SPREAD_DEG: f64 = 40.0;

/// Hata-COST231 intercept of the three-slope model in dB.
pub fn three_slope_constant_db() -> f64 {
    let lf = TUE_CARRIER_MHZ.log10();
    46.3 + 33.9 * lf - 13.82 * TUE_AP_HEIGHT_M.log10() - (1.1 * lf - 0.7) * TUE_UE_HEIGHT_M
        + (1.56 * lf - 0.8)
}

/// Statistics of one UAV-to-array link.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkStatistics<T: Real> {
    pub zeta: T,
    pub k_factor: T,
    pub beta_los: T,
    pub beta_nlos: T,
    /// LoS mean of the channel.
    pub h_bar: CVector<T>,
    /// NLoS spatial correlation.
    pub r: CMatrix<T>,
}

impl<T: Real> LinkStatistics<T> {
    pub fn antennas(&self) -> usize {
        self.h_bar.len()
    }

    /// Pure Rayleigh / deterministic links built directly from matrices.
    pub fn from_parts(h_bar: CVector<T>, r: CMatrix<T>) -> Self {
        let n = T::from_usize_lossy(h_bar.len().max(1));
        let beta_los = crate::linalg::norm_sqr(&h_bar) / n;
        let beta_nlos = crate::linalg::trace_real(&r) / n;
        Self {
            zeta: beta_los + beta_nlos,
            k_factor: if beta_nlos > T::zero() { beta_los / beta_nlos } else { T::zero() },
            beta_los,
            beta_nlos,
            h_bar,
            r,
        }
    }
}

/// Zero-mean correlated Rayleigh link between the TUE and an array.
#[derive(Debug, Clone, PartialEq)]
pub struct TueLinkStatistics<T: Real> {
    pub beta_te: T,
    pub r_te: CMatrix<T>,
}

/// Free-space large-scale gain `beta0 / (horizontal distance^2 + H^2)`.
pub fn path_loss<T: Real>(uav: &Position<T>, ap: &Position<T>, altitude: T, beta0: T) -> Result<T> {
    let d2 = uav.distance_sqr(ap) + altitude * altitude;
    if d2 <= T::zero() {
        return Err(Error::PathLossDomain);
    }
    Ok(beta0 / d2)
}

/// Distance-dependent Rician factor, `13 - 0.03 d` dB, linear.
pub fn rician_factor<T: Real>(distance_3d: T) -> T {
    let db = T::lit(13.0) - T::lit(0.03) * distance_3d;
    T::lit(10.0).powf(db / T::lit(10.0))
}

/// LoS / NLoS split of `zeta`, using square-root weights
/// `sqrt(K / (K + 1))` and `sqrt(1 / (K + 1))`. The two parts do not sum to
/// `zeta`.
pub fn split_large_scale<T: Real>(zeta: T, k: T) -> (T, T) {
    let denom = k + T::one();
    ((k / denom).sqrt() * zeta, (T::one() / denom).sqrt() * zeta)
}

/// ULA steering vector scaled by `sqrt(beta_los)`.
pub fn los_steering<T: Real>(phi: T, antennas: usize, d_h: T, beta_los: T) -> CVector<T> {
    steering_from_sin(phi.sin(), antennas, d_h, beta_los)
}

// Element k is the k-th power of the unit phasor between neighbours.
fn steering_from_sin<T: Real>(sin_phi: T, antennas: usize, d_h: T, beta_los: T) -> CVector<T> {
    let (s, c) = (T::two_pi() * d_h * sin_phi).sin_cos();
    let step = Complex::new(c, s);
    let mut cur = Complex::from(beta_los.sqrt());
    CVector::from_fn(antennas, |_, _| {
        let out = cur;
        cur *= step;
        out
    })
}

/// Gaussian-local-scattering correlation averaged over clusters with
/// nominal AoAs `cluster_aoas` (radians) and angular standard deviation
/// `asd` (radians). The matrix is Hermitian Toeplitz with `beta_nlos` on
/// the diagonal.
pub fn nlos_correlation<T: Real>(
    cluster_aoas: &[T],
    antennas: usize,
    asd: T,
    d_h: T,
    beta_nlos: T,
) -> CMatrix<T> {
    let trig: Vec<(T, T)> = cluster_aoas.iter().map(|phi| phi.sin_cos()).collect();
    correlation_from_trig(&trig, antennas, asd, d_h, beta_nlos)
}

// `trig` holds (sin, cos) of each cluster AoA.
fn correlation_from_trig<T: Real>(
    trig: &[(T, T)],
    antennas: usize,
    asd: T,
    d_h: T,
    beta_nlos: T,
) -> CMatrix<T> {
    assert!(!trig.is_empty(), "at least one scattering cluster");
    let k = T::from_usize_lossy(trig.len());
    let half_var = asd * asd / T::lit(2.0);
    let mut first_col = Vec::with_capacity(antennas);
    first_col.push(Complex::from(beta_nlos));
    for lag in 1..antennas {
        let base = T::two_pi() * d_h * T::from_usize_lossy(lag);
        let mut acc = Complex::from(T::zero());
        for &(sin, cos) in trig {
            let spread = base * cos;
            let mag = (-(half_var * spread * spread)).exp();
            let (s, c) = (base * sin).sin_cos();
            acc += Complex::new(mag * c, mag * s);
        }
        first_col.push(acc * (beta_nlos / k));
    }
    CMatrix::from_fn(antennas, antennas, |s, m| {
        if s >= m {
            first_col[s - m]
        } else {
            first_col[m - s].conj()
        }
    })
}

/// Cluster nominal AoA offsets, uniform in ±40 degrees (radians).
pub fn draw_cluster_offsets<T: Real, R: Rng + ?Sized>(clusters: usize, rng: &mut R) -> Vec<T> {
    let spread = CLUSTER_SPREAD_DEG.to_radians();
    (0..clusters)
        .map(|_| T::lit((rng.random::<f64>() * 2.0 - 1.0) * spread))
        .collect()
}

/// Three-slope TUE large-scale gain for a horizontal distance in meters.
pub fn tue_path_loss<T: Real>(tue: &Position<T>, ap: &Position<T>) -> T {
    T::lit(three_slope_gain(tue.distance(ap).as_f64()))
}

fn three_slope_gain(distance_m: f64) -> f64 {
    let lc = three_slope_constant_db();
    let d = distance_m / 1000.0;
    let d0 = TUE_D0_M / 1000.0;
    let d1 = TUE_D1_M / 1000.0;
    let pl_db = if d > d1 {
        -lc - 35.0 * d.log10()
    } else if d > d0 {
        -lc - 15.0 * d1.log10() - 20.0 * d.log10()
    } else {
        -lc - 15.0 * d1.log10() - 20.0 * d0.log10()
    };
    10f64.powf(pl_db / 10.0)
}

/// One realization `h_bar + R^{1/2} w`, `w ~ CN(0, I)`.
pub fn draw_channel<T: Real, R: Rng + ?Sized>(stats: &LinkStatistics<T>, rng: &mut R) -> Result<CVector<T>> {
    Ok(ChannelSampler::new(stats)?.draw(rng))
}

/// Reusable sampler for `CN(mean, cov)` with the square root factored once.
#[derive(Debug, Clone)]
pub struct ChannelSampler<T: Real> {
    mean: CVector<T>,
    sqrt: CMatrix<T>,
}

impl<T: Real> ChannelSampler<T> {
    pub fn new(stats: &LinkStatistics<T>) -> Result<Self> {
        Self::gaussian(stats.h_bar.clone(), &stats.r)
    }

    pub fn gaussian(mean: CVector<T>, cov: &CMatrix<T>) -> Result<Self> {
        if cov.nrows() != mean.len() {
            return Err(Error::Dimension { expected: mean.len(), got: cov.nrows() });
        }
        Ok(Self { mean, sqrt: psd_sqrt(cov)? })
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> CVector<T> {
        let w = complex_normal_vector(rng, self.mean.len());
        &self.mean + &self.sqrt * w
    }

    pub fn mean(&self) -> &CVector<T> {
        &self.mean
    }
}

/// Scalar parameters shared by every link of a scenario.
#[derive(Debug, Clone, Copy)]
pub struct LinkModel<T> {
    pub altitude: T,
    pub beta0: T,
    pub d_h: T,
    pub asd: T,
}

impl<T: Real> LinkModel<T> {
    pub fn from_config(cfg: &ScenarioConfig) -> Self {
        Self {
            altitude: T::lit(cfg.altitude),
            beta0: T::lit(cfg.beta0),
            d_h: T::lit(cfg.d_h),
            asd: T::lit(cfg.asd_deg.to_radians()),
        }
    }

    /// Statistics of the link between a UAV at `uav` and an array of
    /// `antennas` elements at `node`. The AoA is the azimuth from the node to
    /// the UAV; each cluster sits at that AoA plus its frozen offset.
    pub fn uav_link(
        &self,
        uav: &Position<T>,
        node: &Position<T>,
        antennas: usize,
        cluster_offsets: &[T],
    ) -> Result<LinkStatistics<T>> {
        self.uav_link_trig(uav, node, antennas, &offset_trig(cluster_offsets))
    }

    fn uav_link_trig(
        &self,
        uav: &Position<T>,
        node: &Position<T>,
        antennas: usize,
        offsets: &[(T, T)],
    ) -> Result<LinkStatistics<T>> {
        let zeta = path_loss(uav, node, self.altitude, self.beta0)?;
        let d3 = (uav.distance_sqr(node) + self.altitude * self.altitude).sqrt();
        let k_factor = rician_factor(d3);
        let (beta_los, beta_nlos) = split_large_scale(zeta, k_factor);
        let (sin_phi, cos_phi) = bearing_trig(node, uav);
        let h_bar = steering_from_sin(sin_phi, antennas, self.d_h, beta_los);
        let aoas = shifted_trig(sin_phi, cos_phi, offsets);
        let r = correlation_from_trig(&aoas, antennas, self.asd, self.d_h, beta_nlos);
        Ok(LinkStatistics { zeta, k_factor, beta_los, beta_nlos, h_bar, r })
    }

    pub fn tue_link(
        &self,
        tue: &Position<T>,
        node: &Position<T>,
        antennas: usize,
        cluster_offsets: &[T],
    ) -> TueLinkStatistics<T> {
        let beta_te = tue_path_loss(tue, node);
        let phi = node.bearing_to(tue);
        let aoas: Vec<T> = cluster_offsets.iter().map(|&o| phi + o).collect();
        TueLinkStatistics {
            beta_te,
            r_te: nlos_correlation(&aoas, antennas, self.asd, self.d_h, beta_te),
        }
    }
}

fn offset_trig<T: Real>(offsets: &[T]) -> Vec<(T, T)> {
    offsets.iter().map(|o| o.sin_cos()).collect()
}

/// (sin, cos) of the azimuth from `from` to `to`; zero azimuth when they
/// coincide, matching `atan2(0, 0)`.
fn bearing_trig<T: Real>(from: &Position<T>, to: &Position<T>) -> (T, T) {
    let (dx, dy) = (to.x - from.x, to.y - from.y);
    let r = dx.hypot(dy);
    if r > T::zero() {
        (dy / r, dx / r)
    } else {
        (T::zero(), T::one())
    }
}

/// (sin, cos) of `phi + offset` for every offset.
fn shifted_trig<T: Real>(sin_phi: T, cos_phi: T, offsets: &[(T, T)]) -> Vec<(T, T)> {
    offsets
        .iter()
        .map(|&(so, co)| (sin_phi * co + cos_phi * so, cos_phi * co - sin_phi * so))
        .collect()
}

/// Everything about a placement realization that stays frozen while the UAV
/// moves: node positions, cluster offsets and the static TUE links.
#[derive(Debug, Clone)]
pub struct ScenarioChannels<T: Real> {
    pub model: LinkModel<T>,
    pub placement: Placement<T>,
    pub antennas: usize,
    ap_offsets: Vec<Vec<(T, T)>>,
    bs_offsets: Vec<(T, T)>,
    /// Per-AP TUE links, when a TUE is present.
    pub tue_aps: Option<Vec<TueLinkStatistics<T>>>,
    /// TUE link to the cellular BS, when a TUE is present.
    pub tue_bs: Option<TueLinkStatistics<T>>,
}

impl<T: Real> ScenarioChannels<T> {
    pub fn new<R: Rng + ?Sized>(cfg: &ScenarioConfig, placement: Placement<T>, rng: &mut R) -> Self {
        let model = LinkModel::from_config(cfg);
        let ap_offsets: Vec<Vec<(T, T)>> = placement
            .aps
            .iter()
            .map(|_| offset_trig(&draw_cluster_offsets(cfg.clusters, rng)))
            .collect();
        let bs_offsets = offset_trig(&draw_cluster_offsets(cfg.clusters, rng));
        let bs_antennas = cfg.n_aps * cfg.antennas;
        let (tue_aps, tue_bs) = match placement.tue {
            Some(tue) => {
                let per_ap = placement
                    .aps
                    .iter()
                    .map(|ap| {
                        let offsets = draw_cluster_offsets(cfg.clusters, rng);
                        model.tue_link(&tue, ap, cfg.antennas, &offsets)
                    })
                    .collect();
                let offsets = draw_cluster_offsets(cfg.clusters, rng);
                let bs = model.tue_link(&tue, &placement.bs, bs_antennas, &offsets);
                (Some(per_ap), Some(bs))
            }
            None => (None, None),
        };
        Self { model, placement, antennas: cfg.antennas, ap_offsets, bs_offsets, tue_aps, tue_bs }
    }

    pub fn n_aps(&self) -> usize {
        self.placement.aps.len()
    }

    pub fn ap_link(&self, uav: &Position<T>, ap: usize) -> Result<LinkStatistics<T>> {
        self.model
            .uav_link_trig(uav, &self.placement.aps[ap], self.antennas, &self.ap_offsets[ap])
    }

    pub fn ap_links(&self, uav: &Position<T>) -> Result<Vec<LinkStatistics<T>>> {
        (0..self.n_aps()).map(|l| self.ap_link(uav, l)).collect()
    }

    /// Link to the co-located `L * N` element BS array.
    pub fn bs_link(&self, uav: &Position<T>) -> Result<LinkStatistics<T>> {
        self.model.uav_link_trig(
            uav,
            &self.placement.bs,
            self.n_aps() * self.antennas,
            &self.bs_offsets,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{min_eigenvalue, norm_sqr, relative_frobenius, trace_real};
    use crate::rng::substream;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn path_loss_examples() {
        let p = Position::new(10.0, 10.0);
        assert_relative_eq!(path_loss(&p, &p, 20.0, 1e-4).unwrap(), 2.5e-7, max_relative = 1e-12);
        assert_eq!(path_loss(&p, &Position::new(0.0, 0.0), 20.0, 0.0).unwrap(), 0.0);
        let q = Position::new(110.0, 10.0);
        assert_relative_eq!(path_loss(&p, &q, 20.0, 1e-4).unwrap(), 1e-4 / 10400.0, max_relative = 1e-12);
        assert_eq!(path_loss(&p, &p, 0.0, 1e-4), Err(Error::PathLossDomain));
    }

    #[test]
    fn path_loss_monotone() {
        let ap = Position::new(0.0, 0.0);
        let mut last = f64::INFINITY;
        for i in 0..50 {
            let v = path_loss(&Position::new(i as f64 * 2.0, 0.0), &ap, 20.0, 1e-4).unwrap();
            assert!(v < last);
            last = v;
        }
        let lo = path_loss(&Position::new(5.0, 0.0), &ap, 20.0, 1e-4).unwrap();
        let hi = path_loss(&Position::new(5.0, 0.0), &ap, 40.0, 1e-4).unwrap();
        assert!(hi < lo);
    }

    #[test]
    fn rician_factor_examples() {
        assert_relative_eq!(rician_factor(100.0), 10.0, max_relative = 1e-12);
        assert_relative_eq!(rician_factor(20.0), 10f64.powf(1.24), max_relative = 1e-12);
        assert_relative_eq!(rician_factor(20.0), 17.378, max_relative = 1e-4);
        assert_relative_eq!(rician_factor(430.0), 1.0233, max_relative = 1e-4);
        assert_relative_eq!(rician_factor(433.33), 1.000023, max_relative = 1e-5);
    }

    #[test]
    fn split_examples() {
        let (los, nlos) = split_large_scale(1.0, 10.0);
        assert_relative_eq!(los, 0.953_462_589_245_592_4, max_relative = 1e-12);
        assert_relative_eq!(nlos, 0.301_511_344_577_763_6, max_relative = 1e-12);
        assert_eq!(split_large_scale(2.0, 0.0), (0.0, 2.0));
        let mut prev = split_large_scale(1.0f64, 0.0);
        for k in [0.1, 1.0, 10.0, 1e3, 1e9] {
            let cur = split_large_scale(1.0, k);
            assert!(cur.0 > prev.0 && cur.1 < prev.1);
            prev = cur;
        }
        assert!((prev.0 - 1.0).abs() < 1e-4 && prev.1 < 1e-4);
    }

    #[test]
    fn steering_examples() {
        let h = los_steering(0.0, 2, 0.5, 1.0);
        assert_relative_eq!(h[0].re, 1.0);
        assert_relative_eq!(h[1].re, 1.0);
        let h = los_steering(PI / 6.0, 2, 0.5, 1.0);
        assert!((h[0] - Complex::new(1.0, 0.0)).norm() < 1e-12);
        assert!((h[1] - Complex::new(0.0, 1.0)).norm() < 1e-12);
        let h = los_steering(0.3, 5, 0.5, 2.0);
        for v in h.iter() {
            assert_relative_eq!(v.norm(), 2f64.sqrt(), max_relative = 1e-12);
        }
    }

    #[test]
    fn correlation_single_antenna_and_rank_one() {
        let r = nlos_correlation(&[0.4, 1.0], 1, 0.17, 0.5, 3.0);
        assert_eq!(r.nrows(), 1);
        assert_eq!(r[(0, 0)].re, 3.0);

        let phi = 0.7f64;
        let r = nlos_correlation(&[phi], 4, 0.0, 0.5, 2.0);
        let a = los_steering(phi, 4, 0.5, 1.0);
        let expected = (&a * a.adjoint()) * Complex::from(2.0);
        assert!(relative_frobenius(&r, &expected) < 1e-12);
    }

    #[test]
    fn correlation_is_hermitian_psd_with_exact_trace() {
        let mut rng = substream(3, 0);
        let asd = 10f64.to_radians();
        for _ in 0..1000 {
            let phi: f64 = rng.random::<f64>() * 2.0 * PI - PI;
            let offsets = draw_cluster_offsets::<f64, _>(6, &mut rng);
            let aoas: Vec<f64> = offsets.iter().map(|o| phi + o).collect();
            let r = nlos_correlation(&aoas, 2, asd, 0.5, 1.5);
            assert_eq!(r, r.adjoint());
            assert!(min_eigenvalue(&r) >= -1e-10 * 3.0);
            assert_relative_eq!(trace_real(&r), 3.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn three_slope_model() {
        assert_relative_eq!(three_slope_constant_db(), 141.4646, epsilon = 1e-3);
        // continuity at both breakpoints
        for bp in [TUE_D0_M, TUE_D1_M] {
            let lo = three_slope_gain(bp * (1.0 - 1e-12));
            let hi = three_slope_gain(bp * (1.0 + 1e-12));
            assert_relative_eq!(lo, hi, max_relative = 1e-9);
        }
        let mut last = f64::INFINITY;
        for i in 0..400 {
            let g = three_slope_gain(0.5 + i as f64);
            assert!(g <= last);
            last = g;
        }
        // 1 km: -Lc dB
        assert_relative_eq!(three_slope_gain(1000.0), 10f64.powf(-three_slope_constant_db() / 10.0), max_relative = 1e-12);
        assert_relative_eq!(three_slope_gain(1000.0), 7.1398e-15, max_relative = 1e-3);
        // flat below d0
        assert_eq!(three_slope_gain(1.0), three_slope_gain(9.0));
    }

    #[test]
    fn generated_link_energy_budget() {
        let cfg = ScenarioConfig::default();
        let model = LinkModel::<f64>::from_config(&cfg);
        let mut rng = substream(9, 0);
        for i in 0..50 {
            let uav = Position::new(i as f64 * 2.0, 30.0);
            let ap = Position::new(40.0, 60.0);
            let offsets = draw_cluster_offsets(6, &mut rng);
            let s = model.uav_link(&uav, &ap, 2, &offsets).unwrap();
            let lhs = trace_real(&s.r) + norm_sqr(&s.h_bar);
            assert_relative_eq!(lhs, 2.0 * (s.beta_los + s.beta_nlos), max_relative = 1e-9);
            assert_relative_eq!(norm_sqr(&s.h_bar), 2.0 * s.beta_los, max_relative = 1e-12);
        }
    }

    #[test]
    fn zero_covariance_draw_is_mean() {
        let h = los_steering(0.2, 3, 0.5, 1.0);
        let stats = LinkStatistics::from_parts(h.clone(), CMatrix::zeros(3, 3));
        let g = draw_channel(&stats, &mut substream(1, 1)).unwrap();
        assert!((g - h).norm() < 1e-15);
    }

    #[test]
    fn cellular_stack_is_single_ula() {
        let cfg = ScenarioConfig::default();
        let placement = crate::geometry::generate_placement::<f64, _>(&cfg, &mut substream(5, 0));
        let ch = ScenarioChannels::new(&cfg, placement, &mut substream(5, 1));
        let bs = ch.bs_link(&Position::new(10.0, 20.0)).unwrap();
        assert_eq!(bs.antennas(), 40);
        assert_eq!(bs.r.nrows(), 40);
        assert!(min_eigenvalue(&bs.r) >= -1e-10 * trace_real(&bs.r));
    }
}
