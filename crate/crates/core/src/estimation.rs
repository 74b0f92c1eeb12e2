//! LMMSE estimation of the UAV channel from a single impaired pilot, and
//! MMSE estimation of the TUE channel.

use nalgebra::Complex;
use rand::Rng;

use crate::channel::{LinkStatistics, TueLinkStatistics};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_solve, hermitize};
use nalgebra::Cholesky;
use crate::rng::{complex_normal, complex_normal_vector};
use crate::scalar::{CMatrix, CVector, Real};

/// `Psi`, `Q` and `C` for one link at one pilot power.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimationMatrices<T: Real> {
    /// `(p R + (1 - kappa) p h_bar h_bar^H + sigma2 I)^{-1}`
    pub psi: CMatrix<T>,
    /// Covariance of the estimate around its mean.
    pub q: CMatrix<T>,
    /// Estimation-error covariance, `R - Q`.
    pub c: CMatrix<T>,
}

/// Channel estimate `g_hat ~ CN(h_bar, Q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelEstimate<T: Real> {
    pub g_hat: CVector<T>,
}

impl<T: Real> ChannelEstimate<T> {
    /// Estimation error against a known true channel.
    pub fn error(&self, g: &CVector<T>) -> CVector<T> {
        g - &self.g_hat
    }
}

const SINGULAR_PILOT: &str = "pilot covariance is singular (zero noise with rank-deficient R)";

/// `p R + (1 - kappa) p h_bar h_bar^H + sigma2 I`
fn pilot_covariance<T: Real>(stats: &LinkStatistics<T>, p: T, kappa: T, sigma2: T) -> Result<CMatrix<T>> {
    if p < T::zero() {
        return Err(Error::Config("pilot power must be non-negative".into()));
    }
    let hi = Complex::from((T::one() - kappa) * p);
    let mut a = &stats.r * Complex::from(p) + (&stats.h_bar * stats.h_bar.adjoint()) * hi;
    for i in 0..stats.antennas() {
        a[(i, i)] += Complex::from(sigma2);
    }
    Ok(a)
}

pub fn estimation_matrices<T: Real>(
    stats: &LinkStatistics<T>,
    p: T,
    kappa: T,
    sigma2: T,
) -> Result<EstimationMatrices<T>> {
    let n = stats.antennas();
    let r = &stats.r;
    let a = pilot_covariance(stats, p, kappa, sigma2)?;
    let psi = hermitize(
        &hermitian_solve(&a, &CMatrix::identity(n, n)).map_err(|_| Error::Degenerate(SINGULAR_PILOT.into()))?,
    );
    let q = if kappa * p == T::zero() {
        CMatrix::zeros(n, n)
    } else {
        hermitize(&((r * &psi * r) * Complex::from(kappa * p)))
    };
    let c = r - &q;
    Ok(EstimationMatrices { psi, q, c })
}

/// `Q` alone: with `A = L L^H`, `Q = kappa p (L^{-1} R)^H (L^{-1} R)`.
/// Cheaper than [`estimation_matrices`] when `Psi` and `C` are not needed.
pub fn estimate_covariance<T: Real>(stats: &LinkStatistics<T>, p: T, kappa: T, sigma2: T) -> Result<CMatrix<T>> {
    let a = pilot_covariance(stats, p, kappa, sigma2)?;
    let n = stats.antennas();
    if kappa * p == T::zero() {
        return Ok(CMatrix::zeros(n, n));
    }
    let chol = Cholesky::new(a).ok_or_else(|| Error::Degenerate(SINGULAR_PILOT.into()))?;
    let x = chol
        .l_dirty()
        .solve_lower_triangular(&stats.r)
        .ok_or_else(|| Error::Degenerate(SINGULAR_PILOT.into()))?;
    Ok(x.ad_mul(&x) * Complex::from(kappa * p))
}

/// Received pilot `z = sqrt(kappa p) g + eta g + n` with
/// `eta ~ CN(0, (1 - kappa) p)` and `n ~ CN(0, sigma2 I)`.
pub fn simulate_pilot<T: Real, R: Rng + ?Sized>(
    g: &CVector<T>,
    p: T,
    kappa: T,
    sigma2: T,
    rng: &mut R,
) -> CVector<T> {
    let eta = complex_normal::<T, R>(rng) * ((T::one() - kappa) * p).sqrt();
    simulate_pilot_with_impairment(g, p, kappa, sigma2, eta, rng)
}

/// As [`simulate_pilot`], with the impairment sample supplied by the caller
/// so several APs can share the same UAV-side distortion.
pub fn simulate_pilot_with_impairment<T: Real, R: Rng + ?Sized>(
    g: &CVector<T>,
    p: T,
    kappa: T,
    sigma2: T,
    eta: Complex<T>,
    rng: &mut R,
) -> CVector<T> {
    let gain = Complex::from((kappa * p).sqrt()) + eta;
    let noise: CVector<T> = complex_normal_vector(rng, g.len()) * Complex::from(sigma2.sqrt());
    g * gain + noise
}

/// `g_hat = h_bar + sqrt(kappa p) R Psi (z - sqrt(kappa p) h_bar)`.
pub fn lmmse_estimate<T: Real>(
    stats: &LinkStatistics<T>,
    mats: &EstimationMatrices<T>,
    z: &CVector<T>,
    p: T,
    kappa: T,
) -> ChannelEstimate<T> {
    let a = Complex::from((kappa * p).sqrt());
    let innovation = z - &stats.h_bar * a;
    let g_hat = &stats.h_bar + (&stats.r * (&mats.psi * innovation)) * a;
    ChannelEstimate { g_hat }
}

/// Covariance `G_te = p_te R_te Psi_te R_te` of the MMSE estimate of the TUE
/// channel, `Psi_te = (p_te R_te + sigma2 I)^{-1}`.
pub fn tue_estimation<T: Real>(tue: &TueLinkStatistics<T>, p_te: T, sigma2: T) -> Result<CMatrix<T>> {
    let n = tue.r_te.nrows();
    if p_te == T::zero() {
        return Ok(CMatrix::zeros(n, n));
    }
    let mut a = &tue.r_te * Complex::from(p_te);
    for i in 0..n {
        a[(i, i)] += Complex::from(sigma2);
    }
    let psi_r = hermitian_solve(&a, &tue.r_te)?;
    Ok(hermitize(&((&tue.r_te * psi_r) * Complex::from(p_te))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{min_eigenvalue, relative_frobenius, trace_real};
    use crate::rng::substream;
    use approx::assert_relative_eq;

    fn scalar_link(h: f64, r: f64) -> LinkStatistics<f64> {
        LinkStatistics::from_parts(
            CVector::from_element(1, Complex::from(h)),
            CMatrix::from_element(1, 1, Complex::from(r)),
        )
    }

    #[test]
    fn scalar_lmmse() {
        let m = estimation_matrices(&scalar_link(0.0, 1.0), 1.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(m.q[(0, 0)].re, 0.5, max_relative = 1e-14);
        assert_relative_eq!(m.c[(0, 0)].re, 0.5, max_relative = 1e-14);
    }

    #[test]
    fn no_quality_means_no_information() {
        let s = scalar_link(0.3, 2.0);
        let m = estimation_matrices(&s, 5.0, 0.0, 1.0).unwrap();
        assert_eq!(m.q[(0, 0)], Complex::from(0.0));
        assert_eq!(m.c, s.r);
    }

    #[test]
    fn high_snr_limit() {
        let s = scalar_link(0.0, 1.0);
        let m = estimation_matrices(&s, 1e9, 1.0, 1.0).unwrap();
        assert!((m.q[(0, 0)].re - 1.0).abs() < 1e-8);
    }

    #[test]
    fn zero_innovation_returns_mean() {
        let s = scalar_link(0.7, 1.0);
        let m = estimation_matrices(&s, 2.0, 0.9, 0.1).unwrap();
        let z = &s.h_bar * Complex::from((0.9f64 * 2.0).sqrt());
        let e = lmmse_estimate(&s, &m, &z, 2.0, 0.9);
        assert!((e.g_hat[0] - s.h_bar[0]).norm() < 1e-15);
        let e = lmmse_estimate(&s, &m, &CVector::from_element(1, Complex::new(5.0, 1.0)), 0.0, 0.9);
        assert_eq!(e.g_hat, s.h_bar);
    }

    #[test]
    fn pilot_degenerate_cases() {
        let g = CVector::from_element(2, Complex::new(1.0, -1.0));
        let mut a = substream(4, 0);
        let mut b = substream(4, 0);
        // kappa = 1: impairment variance 0, so z = sqrt(p) g + n
        let z = simulate_pilot(&g, 4.0, 1.0, 0.0, &mut a);
        assert!((z - &g * Complex::from(2.0)).norm() < 1e-15);
        let z = simulate_pilot(&g, 0.0, 0.5, 1.0, &mut b);
        let mut c = substream(4, 0);
        let _eta = complex_normal::<f64, _>(&mut c);
        let n: CVector<f64> = complex_normal_vector(&mut c, 2);
        assert!((z - n).norm() < 1e-15);
    }

    #[test]
    fn tue_covariance() {
        let t = TueLinkStatistics { beta_te: 1.0, r_te: CMatrix::from_element(1, 1, Complex::from(1.0)) };
        assert_relative_eq!(tue_estimation(&t, 1.0, 1.0).unwrap()[(0, 0)].re, 0.5, max_relative = 1e-14);
        assert_eq!(tue_estimation(&t, 0.0, 1.0).unwrap()[(0, 0)].re, 0.0);
    }

    #[test]
    fn q_plus_c_is_r_and_both_psd() {
        let cfg = crate::config::ScenarioConfig::default();
        let model = crate::channel::LinkModel::<f64>::from_config(&cfg);
        let mut rng = substream(8, 0);
        for i in 0..100 {
            let offsets = crate::channel::draw_cluster_offsets(6, &mut rng);
            let uav = crate::geometry::Position::new(i as f64, 100.0 - i as f64);
            let s = model
                .uav_link(&uav, &crate::geometry::Position::new(30.0, 40.0), 4, &offsets)
                .unwrap();
            let m = estimation_matrices(&s, 1e-3 * (i + 1) as f64, 0.98, cfg.sigma2).unwrap();
            assert!(relative_frobenius(&(&m.q + &m.c), &s.r) < 1e-9);
            let tr = trace_real(&s.r);
            assert!(min_eigenvalue(&m.q) >= -1e-10 * tr);
            assert!(min_eigenvalue(&m.c) >= -1e-10 * tr);
            let q = estimate_covariance(&s, 1e-3 * (i + 1) as f64, 0.98, cfg.sigma2).unwrap();
            assert!(relative_frobenius(&q, &m.q) < 1e-9);
        }
        assert_eq!(estimate_covariance(&scalar_link(0.3, 2.0), 5.0, 0.0, 1.0).unwrap()[(0, 0)], Complex::from(0.0));
    }
}
