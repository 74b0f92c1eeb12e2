//! Uplink spectral efficiency: the cell-free closed form, LSFD combining,
//! Monte Carlo small-cell and cellular bounds, and per-block complexity.

use nalgebra::Complex;
use rand::Rng;

use crate::channel::LinkStatistics;
use crate::energy::{LinkSummary, TimeSplit};
use crate::error::Result;
use crate::estimation::EstimationMatrices;
use crate::linalg::{norm_sqr, psd_factor, quad_form};
use crate::rng::complex_normal;
use crate::scalar::{CMatrix, CVector, Real};

/// Second moments of the desired signal and of each distortion term of the
/// combined uplink signal.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SeTermBreakdown<T> {
    pub ds: T,
    pub bu: T,
    pub hi: T,
    pub ui: T,
    pub ns: T,
}

impl<T: Real> SeTermBreakdown<T> {
    pub fn sinr(&self) -> T {
        let den = self.bu + self.hi + self.ui + self.ns;
        if self.ds == T::zero() {
            T::zero()
        } else {
            self.ds / den
        }
    }

    pub fn se(&self, split: &TimeSplit<T>) -> T {
        se_from_sinr(self.sinr(), split)
    }
}

pub fn se_from_sinr<T: Real>(sinr: T, split: &TimeSplit<T>) -> T {
    split.prelog() * (T::one() + sinr).log2()
}

/// Closed-form term moments for matched-filter cell-free combining.
pub fn se_terms_cf<T: Real>(links: &[LinkSummary<T>], p_u: T, p_te_u: T, kappa: T, sigma2: T) -> SeTermBreakdown<T> {
    let mut sum_b = T::zero();
    let mut sum_upsilon = T::zero();
    let mut sum_leak = T::zero();
    for link in links {
        sum_b += link.b;
        sum_upsilon += link.upsilon;
        sum_leak += link.te_leak;
    }
    let b2 = sum_b * sum_b;
    SeTermBreakdown {
        ds: kappa * p_u * b2,
        bu: kappa * p_u * sum_upsilon,
        hi: (T::one() - kappa) * p_u * (sum_upsilon + b2),
        ui: p_te_u * sum_leak,
        ns: sigma2 * sum_b,
    }
}

pub fn se_cf_closed_form<T: Real>(
    links: &[LinkSummary<T>],
    p_u: T,
    p_te_u: T,
    kappa: T,
    sigma2: T,
    split: &TimeSplit<T>,
) -> (T, SeTermBreakdown<T>) {
    let terms = se_terms_cf(links, p_u, p_te_u, kappa, sigma2);
    (terms.se(split), terms)
}

/// The vectors behind LSFD combining. The matrices are diagonal and kept as
/// their diagonals.
#[derive(Debug, Clone, PartialEq)]
pub struct LsfdVectors<T> {
    pub b: Vec<T>,
    pub gamma: Vec<T>,
    pub t: Vec<T>,
    pub lambda: Vec<T>,
}

pub fn lsfd_vectors<T: Real>(links: &[LinkSummary<T>]) -> LsfdVectors<T> {
    LsfdVectors {
        b: links.iter().map(|l| l.b).collect(),
        gamma: links.iter().map(|l| l.upsilon).collect(),
        t: links.iter().map(|l| l.te_leak).collect(),
        lambda: links.iter().map(|l| l.b).collect(),
    }
}

/// `kappa p b^T (p Gamma + (1 - kappa) p b b^T + p_te T + sigma2 Lambda)^{-1} b`.
///
/// The matrix is diagonal plus rank one, so the quadratic form is evaluated
/// with the Sherman-Morrison identity.
pub fn lsfd_sinr<T: Real>(v: &LsfdVectors<T>, p_u: T, p_te_u: T, kappa: T, sigma2: T) -> T {
    if p_u == T::zero() {
        return T::zero();
    }
    let mut x = T::zero();
    for l in 0..v.b.len() {
        let d = p_u * v.gamma[l] + p_te_u * v.t[l] + sigma2 * v.lambda[l];
        x += v.b[l] * v.b[l] / d;
    }
    kappa * p_u * x / (T::one() + (T::one() - kappa) * p_u * x)
}

pub fn se_lsfd<T: Real>(v: &LsfdVectors<T>, p_u: T, p_te_u: T, kappa: T, sigma2: T, split: &TimeSplit<T>) -> T {
    se_from_sinr(lsfd_sinr(v, p_u, p_te_u, kappa, sigma2), split)
}

/// Instantaneous MR SINR of one array given an estimate `g_hat` and the
/// interference-plus-noise matrix `a = p_u C + p_te_u R_te + sigma2 I`.
pub fn mr_sinr<T: Real>(g_hat: &CVector<T>, a: &CMatrix<T>, p_u: T, kappa: T) -> T {
    let s = norm_sqr(g_hat);
    let s2 = s * s;
    let num = kappa * p_u * s2;
    if num == T::zero() {
        return T::zero();
    }
    num / ((T::one() - kappa) * p_u * s2 + quad_form(g_hat, a))
}

/// Eigenvalues of `Q` below this fraction of its trace are dropped when
/// drawing estimates.
const ESTIMATE_RANK_TOL: f64 = 1e-12;

/// Everything needed to draw estimates of one array and score them.
///
/// With `Q ~ F F^H` over its significant eigenpairs, an estimate is
/// `g_hat = h_bar + F m` with `m ~ CN(0, I_k)`, and both `||g_hat||^2` and
/// `g_hat^H A g_hat` are quadratics in `m` whose coefficients are computed
/// once. A draw then costs `O(k^2)` instead of `O(N^2)`.
#[derive(Debug, Clone)]
pub struct McLink<T: Real> {
    /// `||h_bar||^2`
    norm0: T,
    /// `F^H h_bar`
    norm_lin: CVector<T>,
    /// eigenvalues of `F^H F`
    norm_quad: Vec<T>,
    /// `h_bar^H A h_bar`
    int0: T,
    /// `F^H A h_bar`
    int_lin: CVector<T>,
    /// `F^H A F`
    int_quad: CMatrix<T>,
}

impl<T: Real> McLink<T> {
    pub fn new(
        stats: &LinkStatistics<T>,
        mats: &EstimationMatrices<T>,
        r_te: Option<&CMatrix<T>>,
        p_u: T,
        p_te_u: T,
        sigma2: T,
    ) -> Result<Self> {
        let n = stats.antennas();
        let mut a = &mats.c * Complex::from(p_u);
        if let Some(r_te) = r_te {
            a += r_te * Complex::from(p_te_u);
        }
        for i in 0..n {
            a[(i, i)] += Complex::from(sigma2);
        }
        let (f, lambda) = psd_factor(&mats.q, ESTIMATE_RANK_TOL)?;
        let fh = f.adjoint();
        let a_h = &a * &stats.h_bar;
        Ok(Self {
            norm0: norm_sqr(&stats.h_bar),
            norm_lin: &fh * &stats.h_bar,
            norm_quad: lambda,
            int0: stats.h_bar.dotc(&a_h).re,
            int_lin: &fh * &a_h,
            int_quad: &fh * &a * &f,
        })
    }

    /// Rank of the estimate spread.
    pub fn rank(&self) -> usize {
        self.norm_quad.len()
    }

    fn draw_sinr<R: Rng + ?Sized>(&self, rng: &mut R, m: &mut CVector<T>, bm: &mut CVector<T>, p_u: T, kappa: T) -> T {
        for v in m.iter_mut() {
            *v = complex_normal(rng);
        }
        let two = T::lit(2.0);
        let mut s = self.norm0 + two * m.dotc(&self.norm_lin).re;
        for (mi, l) in m.iter().zip(&self.norm_quad) {
            s += *l * mi.norm_sqr();
        }
        bm.gemv(Complex::from(T::one()), &self.int_quad, m, Complex::from(T::zero()));
        let quad = (self.int0 + two * m.dotc(&self.int_lin).re + m.dotc(bm).re).max(T::zero());
        let s2 = s * s;
        let num = kappa * p_u * s2;
        if num == T::zero() {
            return T::zero();
        }
        num / ((T::one() - kappa) * p_u * s2 + quad)
    }

    /// Sample mean and standard error of `log2(1 + SINR)` over `draws`.
    pub fn expected_rate<R: Rng + ?Sized>(&self, draws: usize, p_u: T, kappa: T, rng: &mut R) -> (T, T) {
        let k = self.rank();
        let mut m = CVector::zeros(k);
        let mut bm = CVector::zeros(k);
        let mut sum = 0f64;
        let mut sum_sq = 0f64;
        for _ in 0..draws {
            let r = (T::one() + self.draw_sinr(rng, &mut m, &mut bm, p_u, kappa)).log2().as_f64();
            sum += r;
            sum_sq += r * r;
        }
        let n = draws.max(1) as f64;
        let mean = sum / n;
        let var = if draws > 1 { ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0) } else { 0.0 };
        (T::lit(mean), T::lit((var / n).sqrt()))
    }
}

/// Monte Carlo small-cell / cellular SE result.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McSe<T> {
    pub se: T,
    pub std_error: T,
    /// Index of the AP whose expected rate was largest (0 for cellular).
    pub serving: usize,
}

/// `prelog * max_l E{log2(1 + SINR_l)}` with the maximum taken after
/// averaging. Every AP sees the same random stream position so the
/// comparison uses common random numbers.
pub fn se_sc<T: Real, R: Rng + Clone>(
    links: &[McLink<T>],
    p_u: T,
    kappa: T,
    split: &TimeSplit<T>,
    draws: usize,
    rng: &mut R,
) -> McSe<T> {
    let mut best = McSe { se: T::zero(), std_error: T::zero(), serving: usize::MAX };
    let start = rng.clone();
    for (l, link) in links.iter().enumerate() {
        let mut local = start.clone();
        let (rate, se) = link.expected_rate(draws, p_u, kappa, &mut local);
        if best.serving == usize::MAX || rate > best.se {
            best = McSe { se: rate, std_error: se, serving: l };
        }
        if l + 1 == links.len() {
            *rng = local;
        }
    }
    let prelog = split.prelog();
    McSe { se: prelog * best.se, std_error: prelog * best.std_error, serving: best.serving }
}

pub fn se_cellular<T: Real, R: Rng + ?Sized>(
    link: &McLink<T>,
    p_u: T,
    kappa: T,
    split: &TimeSplit<T>,
    draws: usize,
    rng: &mut R,
) -> McSe<T> {
    let (rate, se) = link.expected_rate(draws, p_u, kappa, rng);
    let prelog = split.prelog();
    McSe { se: prelog * rate, std_error: prelog * se, serving: 0 }
}

/// Complex multiplications per coherence block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexityCount {
    pub statistics_matrices: f64,
    pub estimation: f64,
    pub combining_vectors: f64,
    pub downlink_precoding: f64,
    pub uplink_combining: f64,
}

impl ComplexityCount {
    pub fn total(&self) -> f64 {
        self.statistics_matrices + self.estimation + self.combining_vectors + self.downlink_precoding + self.uplink_combining
    }
}

pub fn complexity_count(k_ues: usize, l: usize, n: usize, tau_c: f64, tau_p: f64, tau_e: f64) -> ComplexityCount {
    let kl = (k_ues * l) as f64;
    let nf = n as f64;
    ComplexityCount {
        statistics_matrices: kl * (4.0 * nf.powi(3) - nf) / 3.0,
        estimation: kl * nf * nf,
        combining_vectors: kl * nf,
        downlink_precoding: kl * tau_e * nf,
        uplink_combining: kl * (tau_c - tau_p - tau_e) * nf,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;
    use approx::assert_relative_eq;

    fn split() -> TimeSplit<f64> {
        TimeSplit::from_rho(200.0, 1.0, 0.5)
    }

    fn scalar_summary() -> LinkSummary<f64> {
        // R = 1, Q = 0.5, h_bar = 0
        LinkSummary { b: 0.5, upsilon: 0.5, ..Default::default() }
    }

    #[test]
    fn scalar_closed_form() {
        let (se, terms) = se_cf_closed_form(&[scalar_summary()], 1.0, 0.0, 1.0, 1.0, &split());
        assert_relative_eq!(terms.sinr(), 0.25, max_relative = 1e-14);
        assert_relative_eq!(se, 0.4975 * 1.25f64.log2(), max_relative = 1e-12);
        assert_relative_eq!(se, 0.16017, max_relative = 1e-4);
        assert_eq!(terms.hi, 0.0);
        let (zero, _) = se_cf_closed_form(&[scalar_summary()], 0.0, 0.0, 1.0, 1.0, &split());
        assert_eq!(zero, 0.0);
    }

    #[test]
    fn lsfd_single_ap_matches_closed_form() {
        let links = [scalar_summary()];
        let v = lsfd_vectors(&links);
        assert_relative_eq!(lsfd_sinr(&v, 1.0, 0.0, 1.0, 1.0), 0.25, max_relative = 1e-14);
        let lb = [LinkSummary { b: 0.75, ..Default::default() }];
        assert_eq!(lsfd_vectors(&lb).b, vec![0.75]);
        assert_eq!(lsfd_vectors(&lb).t, vec![0.0]);
    }

    #[test]
    fn lsfd_matches_direct_solve() {
        let mut rng = substream(2, 0);
        let links: Vec<LinkSummary<f64>> = (0..5)
            .map(|_| LinkSummary {
                b: rng.random_range(0.1..2.0),
                upsilon: rng.random_range(0.01..1.0),
                te_leak: rng.random_range(0.0..0.5),
                te_pickup: 0.0,
            })
            .collect();
        let v = lsfd_vectors(&links);
        let (p, pt, k, s2) = (0.7, 0.3, 0.9, 0.2);
        let n = links.len();
        let a = nalgebra::DMatrix::from_fn(n, n, |i, j| {
            let diag = if i == j { p * v.gamma[i] + pt * v.t[i] + s2 * v.lambda[i] } else { 0.0 };
            diag + (1.0 - k) * p * v.b[i] * v.b[j]
        });
        let b = nalgebra::DVector::from_vec(v.b.clone());
        let direct = k * p * b.dot(&a.lu().solve(&b).unwrap());
        assert_relative_eq!(lsfd_sinr(&v, p, pt, k, s2), direct, max_relative = 1e-12);
    }

    #[test]
    fn deterministic_mr_reduction() {
        let g = CVector::from_element(1, Complex::from(1.0));
        let a = CMatrix::from_element(1, 1, Complex::from(1.0));
        let sinr = mr_sinr(&g, &a, 1.0, 1.0);
        assert_eq!(sinr, 1.0);
        assert_relative_eq!(se_from_sinr(sinr, &split()), 0.4975, max_relative = 1e-12);
        assert!(mr_sinr(&g, &a, 1.0, 1e-9) < 1e-8);
    }

    #[test]
    fn table_one_rows() {
        let c = complexity_count(1, 20, 2, 200.0, 1.0, 99.5);
        assert_eq!(c.statistics_matrices, 200.0);
        assert_eq!(complexity_count(3, 7, 1, 200.0, 1.0, 99.5).statistics_matrices, 21.0);
        assert_relative_eq!(c.downlink_precoding + c.uplink_combining, 20.0 * 2.0 * 199.0, max_relative = 1e-12);
    }

    use rand::Rng;
}
