//! Monte Carlo oracles for the closed forms, built from the raw signal
//! models: pilots, estimates, energy symbols, data symbols, impairments,
//! TUE signals and noise are all drawn explicitly.

use nalgebra::Complex;
use rand::Rng;
use rayon::prelude::*;

use crate::channel::{LinkStatistics, ScenarioChannels, TueLinkStatistics};
use crate::config::ScenarioConfig;
use crate::energy::{he_cf, he_cellular, he_sc, summarize_link, LinkSummary, TueCoupling, TueServingAp};
use crate::error::Result;
use crate::estimation::{estimation_matrices, tue_estimation, EstimationMatrices};
use crate::geometry::{generate_placement, uniform_position, Position};
use crate::linalg::{psd_sqrt, relative_frobenius, trace_real};
use crate::rng::{complex_normal, derive_seed, substream, RandomStream};
use crate::scalar::{CMatrix, CVector};
use crate::spectral::se_terms_cf;
use crate::system::{energy_state, Architecture, SlotModel};

/// One closed form checked against its sample estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloReport {
    pub quantity: String,
    pub closed_form: f64,
    pub sample_mean: f64,
    pub std_error: f64,
    pub sample_count: usize,
    pub rel_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl MonteCarloReport {
    /// A scalar comparison. When the closed form is exactly zero the
    /// sample must instead lie within three standard errors of zero.
    pub fn scalar(quantity: impl Into<String>, closed_form: f64, sample_mean: f64, std_error: f64, sample_count: usize, tolerance: f64) -> Self {
        let rel_error = (closed_form - sample_mean).abs() / closed_form.abs().max(f64::MIN_POSITIVE);
        let pass = if closed_form == 0.0 {
            sample_mean.abs() <= 3.0 * std_error
        } else {
            rel_error <= tolerance
        };
        Self { quantity: quantity.into(), closed_form, sample_mean, std_error, sample_count, rel_error, tolerance, pass }
    }

    /// A matrix comparison; `rel_error` is the relative Frobenius distance
    /// and the scalar columns carry the two Frobenius norms.
    pub fn matrix(quantity: impl Into<String>, closed_form: &CMatrix<f64>, sample: &CMatrix<f64>, sample_count: usize, tolerance: f64) -> Self {
        let rel_error = relative_frobenius(sample, closed_form);
        Self {
            quantity: quantity.into(),
            closed_form: closed_form.norm(),
            sample_mean: sample.norm(),
            std_error: f64::NAN,
            sample_count,
            rel_error,
            tolerance,
            pass: rel_error <= tolerance,
        }
    }
}

/// How the oracles produce channel estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateSource {
    /// `g_hat ~ CN(h_bar, Q)` and an independent error `CN(0, C)`.
    Gaussian,
    /// True channel, impaired pilot (one impairment sample shared by all
    /// APs), then the LMMSE estimator.
    PilotChain,
}

#[derive(Debug, Clone, Copy)]
pub struct OracleSettings {
    pub realizations: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub source: EstimateSource,
    pub batch: usize,
}

impl Default for OracleSettings {
    fn default() -> Self {
        Self { realizations: 100_000, seed: 1, tolerance: 0.02, source: EstimateSource::Gaussian, batch: 2_000 }
    }
}

/// Running mean and variance (Welford), mergeable in a fixed order.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub n: u64,
    pub mean: f64,
    m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&mut self, o: &Moments) {
        if o.n == 0 {
            return;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        self.mean += d * o.n as f64 / n as f64;
        self.m2 += o.m2 + d * d * (self.n as f64 * o.n as f64) / n as f64;
        self.n = n;
    }

    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn std_error(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            (self.variance() / self.n as f64).sqrt()
        }
    }
}

/// Mean and variance `E|z - E z|^2` of a complex sample.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ComplexMoments {
    pub re: Moments,
    pub im: Moments,
}

impl ComplexMoments {
    pub fn push(&mut self, z: Complex<f64>) {
        self.re.push(z.re);
        self.im.push(z.im);
    }

    pub fn merge(&mut self, o: &ComplexMoments) {
        self.re.merge(&o.re);
        self.im.merge(&o.im);
    }

    pub fn mean(&self) -> Complex<f64> {
        Complex::new(self.re.mean, self.im.mean)
    }

    pub fn variance(&self) -> f64 {
        self.re.variance() + self.im.variance()
    }
}

/// Splits `total` draws into fixed batches on independent streams, runs
/// them in parallel and returns the per-batch results in batch order.
pub fn run_batches<A, F>(total: usize, batch: usize, seed: u64, f: F) -> Vec<A>
where
    A: Send,
    F: Fn(&mut RandomStream, usize) -> A + Sync,
{
    let batch = batch.max(1);
    let n_batches = total.div_ceil(batch);
    (0..n_batches)
        .into_par_iter()
        .map(|i| {
            let count = batch.min(total - i * batch);
            f(&mut substream(seed, i as u64), count)
        })
        .collect()
}

fn cn_vec<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CVector<f64> {
    CVector::from_fn(n, |_, _| complex_normal(rng))
}

fn dot(a: &CVector<f64>, b: &CVector<f64>) -> Complex<f64> {
    // a^H b
    a.iter().zip(b.iter()).fold(Complex::new(0.0, 0.0), |acc, (x, y)| acc + x.conj() * y)
}

/// Draws `(g_hat, g)` pairs for one array.
#[derive(Debug, Clone)]
pub struct LinkSampler {
    h_bar: CVector<f64>,
    q_sqrt: CMatrix<f64>,
    c_sqrt: CMatrix<f64>,
    r_sqrt: CMatrix<f64>,
    gain: CMatrix<f64>,
    sqrt_kp: f64,
    sigma: f64,
}

impl LinkSampler {
    pub fn new(stats: &LinkStatistics<f64>, mats: &EstimationMatrices<f64>, p: f64, kappa: f64, sigma2: f64) -> Result<Self> {
        let sqrt_kp = (kappa * p).sqrt();
        Ok(Self {
            h_bar: stats.h_bar.clone(),
            q_sqrt: psd_sqrt(&mats.q)?,
            c_sqrt: psd_sqrt(&mats.c)?,
            r_sqrt: psd_sqrt(&stats.r)?,
            gain: (&stats.r * &mats.psi) * Complex::from(sqrt_kp),
            sqrt_kp,
            sigma: sigma2.sqrt(),
        })
    }

    pub fn dim(&self) -> usize {
        self.h_bar.len()
    }

    /// `eta` is the pilot impairment sample, used by the pilot chain only.
    pub fn draw<R: Rng + ?Sized>(&self, source: EstimateSource, eta: Complex<f64>, rng: &mut R) -> (CVector<f64>, CVector<f64>) {
        let n = self.dim();
        match source {
            EstimateSource::Gaussian => {
                let g_hat = &self.h_bar + &self.q_sqrt * cn_vec(rng, n);
                let g = &g_hat + &self.c_sqrt * cn_vec(rng, n);
                (g_hat, g)
            }
            EstimateSource::PilotChain => {
                let g = &self.h_bar + &self.r_sqrt * cn_vec(rng, n);
                let noise = cn_vec(rng, n) * Complex::from(self.sigma);
                let z = &g * (Complex::from(self.sqrt_kp) + eta) + noise;
                let innovation = z - &self.h_bar * Complex::from(self.sqrt_kp);
                let g_hat = &self.h_bar + &self.gain * innovation;
                (g_hat, g)
            }
        }
    }
}

/// Draws TUE channels and their MMSE estimates from a simulated TUE pilot.
#[derive(Debug, Clone)]
pub struct TueSampler {
    r_sqrt: CMatrix<f64>,
    gain: CMatrix<f64>,
    sqrt_p: f64,
    sigma: f64,
}

impl TueSampler {
    pub fn new(tue: &TueLinkStatistics<f64>, p_te: f64, sigma2: f64) -> Result<Self> {
        let n = tue.r_te.nrows();
        let mut a = &tue.r_te * Complex::from(p_te);
        for i in 0..n {
            a[(i, i)] += Complex::from(sigma2);
        }
        let psi = crate::linalg::hermitian_solve(&a, &CMatrix::identity(n, n))?;
        Ok(Self {
            r_sqrt: psd_sqrt(&tue.r_te)?,
            gain: (&tue.r_te * psi) * Complex::from(p_te.sqrt()),
            sqrt_p: p_te.sqrt(),
            sigma: sigma2.sqrt(),
        })
    }

    /// `(h_te, h_hat_te)`.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> (CVector<f64>, CVector<f64>) {
        let n = self.r_sqrt.nrows();
        let h = &self.r_sqrt * cn_vec(rng, n);
        let z = &h * Complex::from(self.sqrt_p) + cn_vec(rng, n) * Complex::from(self.sigma);
        let h_hat = &self.gain * z;
        (h, h_hat)
    }
}

fn sample_covariance(sum_outer: &CMatrix<f64>, sum: &CVector<f64>, n: usize) -> CMatrix<f64> {
    let k = n as f64;
    let mean = sum / Complex::from(k);
    (sum_outer / Complex::from(k) - &mean * mean.adjoint()) * Complex::from(k / (k - 1.0))
}

/// Sample covariance of LMMSE estimates from simulated pilots against `Q`,
/// and the mean squared error against `tr C`.
pub fn oracle_estimation(
    stats: &LinkStatistics<f64>,
    p: f64,
    kappa: f64,
    sigma2: f64,
    settings: &OracleSettings,
    label: &str,
) -> Result<Vec<MonteCarloReport>> {
    let mats = estimation_matrices(stats, p, kappa, sigma2)?;
    let sampler = LinkSampler::new(stats, &mats, p, kappa, sigma2)?;
    let n = stats.antennas();
    let eta_sd = ((1.0 - kappa) * p).sqrt();
    let batches = run_batches(settings.realizations, settings.batch, settings.seed, |rng, count| {
        let mut outer = CMatrix::zeros(n, n);
        let mut sum = CVector::zeros(n);
        let mut err = Moments::default();
        for _ in 0..count {
            let eta = complex_normal::<f64, _>(rng) * eta_sd;
            let (g_hat, g) = sampler.draw(EstimateSource::PilotChain, eta, rng);
            outer += &g_hat * g_hat.adjoint();
            sum += &g_hat;
            err.push((g - &g_hat).norm_squared());
        }
        (outer, sum, err)
    });
    let mut outer = CMatrix::zeros(n, n);
    let mut sum = CVector::zeros(n);
    let mut err = Moments::default();
    for (o, s, e) in &batches {
        outer += o;
        sum += s;
        err.merge(e);
    }
    let cov = sample_covariance(&outer, &sum, settings.realizations);
    Ok(vec![
        MonteCarloReport::matrix(format!("Q {label}"), &mats.q, &cov, settings.realizations, settings.tolerance),
        MonteCarloReport::scalar(
            format!("tr C {label}"),
            trace_real(&mats.c),
            err.mean,
            err.std_error(),
            settings.realizations,
            settings.tolerance,
        ),
    ])
}

/// Sample covariance of simulated TUE channel estimates against `G_te`.
pub fn oracle_tue_estimate(
    tue: &TueLinkStatistics<f64>,
    p_te: f64,
    sigma2: f64,
    settings: &OracleSettings,
    label: &str,
) -> Result<MonteCarloReport> {
    let g_te = tue_estimation(tue, p_te, sigma2)?;
    let sampler = TueSampler::new(tue, p_te, sigma2)?;
    let n = tue.r_te.nrows();
    let batches = run_batches(settings.realizations, settings.batch, settings.seed, |rng, count| {
        let mut outer = CMatrix::zeros(n, n);
        let mut sum = CVector::zeros(n);
        for _ in 0..count {
            let (_, h_hat) = sampler.draw(rng);
            outer += &h_hat * h_hat.adjoint();
            sum += &h_hat;
        }
        (outer, sum)
    });
    let mut outer = CMatrix::zeros(n, n);
    let mut sum = CVector::zeros(n);
    for (o, s) in &batches {
        outer += o;
        sum += s;
    }
    let cov = sample_covariance(&outer, &sum, settings.realizations);
    Ok(MonteCarloReport::matrix(format!("G_te {label}"), &g_te, &cov, settings.realizations, settings.tolerance))
}

/// Arrays plus their TUE counterparts at one pilot power.
pub struct ArraySet {
    pub samplers: Vec<LinkSampler>,
    pub summaries: Vec<LinkSummary<f64>>,
    pub tue: Option<Vec<TueSampler>>,
    pub pilot: f64,
    pub kappa: f64,
}

impl ArraySet {
    pub fn new(
        stats: &[LinkStatistics<f64>],
        tue: Option<(&[TueLinkStatistics<f64>], &[CMatrix<f64>])>,
        pilot: f64,
        kappa: f64,
        sigma2: f64,
        p_te: f64,
    ) -> Result<Self> {
        let mut samplers = Vec::with_capacity(stats.len());
        let mut summaries = Vec::with_capacity(stats.len());
        for (l, s) in stats.iter().enumerate() {
            let m = estimation_matrices(s, pilot, kappa, sigma2)?;
            let coupling = tue.map(|(links, g)| TueCoupling { r_te: &links[l].r_te, g_te: &g[l] });
            summaries.push(summarize_link(s, &m, coupling));
            samplers.push(LinkSampler::new(s, &m, pilot, kappa, sigma2)?);
        }
        let tue = match tue {
            Some((links, _)) => Some(links.iter().map(|t| TueSampler::new(t, p_te, sigma2)).collect::<Result<Vec<_>>>()?),
            None => None,
        };
        Ok(Self { samplers, summaries, tue, pilot, kappa })
    }

    fn pilot_eta<R: Rng + ?Sized>(&self, rng: &mut R) -> Complex<f64> {
        complex_normal::<f64, _>(rng) * ((1.0 - self.kappa) * self.pilot).sqrt()
    }
}

/// Sample moments of the downlink energy signal.
#[derive(Debug, Clone, Default)]
pub struct EnergySamples {
    /// `|sum_l g_l^H w_l v_l + sum_l g_l^H h_hat_te,l x|^2` (all APs jointly).
    pub joint: Moments,
    /// `|g_l^H w_l v_l|^2` per AP.
    pub per_ap: Vec<Moments>,
    /// `|g_l^H h_hat_te,l x|^2` per AP.
    pub pickup: Vec<Moments>,
    /// `g_l^H g_hat_l` per AP.
    pub inner: Vec<ComplexMoments>,
}

impl EnergySamples {
    fn new(l: usize) -> Self {
        Self { joint: Moments::default(), per_ap: vec![Moments::default(); l], pickup: vec![Moments::default(); l], inner: vec![ComplexMoments::default(); l] }
    }

    fn merge(&mut self, o: &EnergySamples) {
        self.joint.merge(&o.joint);
        for l in 0..self.per_ap.len() {
            self.per_ap[l].merge(&o.per_ap[l]);
            self.pickup[l].merge(&o.pickup[l]);
            self.inner[l].merge(&o.inner[l]);
        }
    }
}

/// Simulates the energy phase: every AP beamforms `w_l = g_hat_l / sqrt(E||g_hat_l||^2)`
/// with its own energy symbol, plus MR precoding toward the TUE when present.
/// Moments are of the received signal before the `sqrt(kappa p_d)` scaling.
pub fn simulate_energy(set: &ArraySet, settings: &OracleSettings, seed: u64) -> EnergySamples {
    let l_count = set.samplers.len();
    let batches = run_batches(settings.realizations, settings.batch, seed, |rng, count| {
        let mut acc = EnergySamples::new(l_count);
        for _ in 0..count {
            let eta = set.pilot_eta(rng);
            let x: Complex<f64> = complex_normal(rng);
            let mut joint = Complex::new(0.0, 0.0);
            for (l, s) in set.samplers.iter().enumerate() {
                let (g_hat, g) = s.draw(settings.source, eta, rng);
                let inner = dot(&g, &g_hat);
                acc.inner[l].push(inner);
                let v: Complex<f64> = complex_normal(rng);
                let beam = inner / set.summaries[l].b.sqrt() * v;
                acc.per_ap[l].push(beam.norm_sqr());
                joint += beam;
                if let Some(tue) = &set.tue {
                    let (_, h_hat) = tue[l].draw(rng);
                    let pick = dot(&g, &h_hat) * x;
                    acc.pickup[l].push(pick.norm_sqr());
                    joint += pick;
                }
            }
            acc.joint.push(joint.norm_sqr());
        }
        acc
    });
    let mut total = EnergySamples::new(l_count);
    for b in &batches {
        total.merge(b);
    }
    total
}

/// Sample moments of the five uplink terms.
#[derive(Debug, Clone, Copy, Default)]
pub struct SeTermSamples {
    /// `sum_l g_hat_l^H g_l`
    pub inner_sum: ComplexMoments,
    pub hi: Moments,
    pub ui: Moments,
    pub ns: Moments,
}

impl SeTermSamples {
    fn merge(&mut self, o: &SeTermSamples) {
        self.inner_sum.merge(&o.inner_sum);
        self.hi.merge(&o.hi);
        self.ui.merge(&o.ui);
        self.ns.merge(&o.ns);
    }
}

/// Simulates the uplink data phase at every AP and the CPU sum of the MR
/// outputs, accumulating the raw distortion terms.
pub fn simulate_uplink(
    set: &ArraySet,
    tue: Option<&[TueLinkStatistics<f64>]>,
    p_u: f64,
    p_te_u: f64,
    sigma2: f64,
    settings: &OracleSettings,
    seed: u64,
) -> Result<SeTermSamples> {
    let te_sqrt: Option<Vec<CMatrix<f64>>> = match tue {
        Some(links) => Some(links.iter().map(|t| psd_sqrt(&t.r_te)).collect::<Result<_>>()?),
        None => None,
    };
    let kappa = set.kappa;
    let eta_sd = ((1.0 - kappa) * p_u).sqrt();
    let sigma = sigma2.sqrt();
    let batches = run_batches(settings.realizations, settings.batch, seed, |rng, count| {
        let mut acc = SeTermSamples::default();
        for _ in 0..count {
            let pilot_eta = set.pilot_eta(rng);
            let eta = complex_normal::<f64, _>(rng) * eta_sd;
            let x: Complex<f64> = complex_normal(rng);
            let mut inner = Complex::new(0.0, 0.0);
            let mut ui = Complex::new(0.0, 0.0);
            let mut ns = Complex::new(0.0, 0.0);
            for (l, sm) in set.samplers.iter().enumerate() {
                let (g_hat, g) = sm.draw(settings.source, pilot_eta, rng);
                inner += dot(&g_hat, &g);
                let n = cn_vec(rng, sm.dim()) * Complex::from(sigma);
                ns += dot(&g_hat, &n);
                if let Some(ts) = &te_sqrt {
                    let h_te = &ts[l] * cn_vec(rng, sm.dim());
                    ui += dot(&g_hat, &h_te) * p_te_u.sqrt() * x;
                }
            }
            acc.inner_sum.push(inner);
            acc.hi.push((inner * eta).norm_sqr());
            acc.ui.push(ui.norm_sqr());
            acc.ns.push(ns.norm_sqr());
        }
        acc
    });
    let mut total = SeTermSamples::default();
    for b in &batches {
        total.merge(b);
    }
    Ok(total)
}

/// Where and at which pilot powers the validation suite runs.
#[derive(Debug, Clone)]
pub struct ValidationScene {
    pub model: SlotModel<f64>,
    pub uav: Position<f64>,
}

impl ValidationScene {
    pub fn new(cfg: &ScenarioConfig) -> Result<Self> {
        let mut rng = substream(cfg.rng_seed, 0);
        let placement = generate_placement::<f64, _>(cfg, &mut rng);
        let uav = uniform_position(cfg.area_side, &mut rng);
        let channels = ScenarioChannels::new(cfg, placement, &mut substream(cfg.rng_seed, 1));
        let model = SlotModel::new(cfg, channels, derive_seed(cfg.rng_seed, 2))?;
        Ok(Self { model, uav })
    }

    /// Steady-state pilot power of an architecture at the scene position.
    pub fn pilot(&self, arch: Architecture, warmup: usize) -> Result<f64> {
        Ok(*self.model.warm_up(arch, &self.uav, warmup)?.last().unwrap())
    }
}

/// Runs every closed-form-versus-oracle pair on the scene built from `cfg`.
pub fn run_validation(cfg: &ScenarioConfig, settings: &OracleSettings) -> Result<Vec<MonteCarloReport>> {
    let scene = ValidationScene::new(cfg)?;
    let model = &scene.model;
    let params = model.params;
    let tol = settings.tolerance;
    let count = settings.realizations;
    let suffix = if model.tue_present() { " [tue]" } else { "" };
    let mut reports = Vec::new();

    let ap_stats = model.channels.ap_links(&scene.uav)?;
    let tue_pair = match (&model.channels.tue_aps, model.tue_covariances()) {
        (Some(links), Some(g)) => Some((links.as_slice(), g)),
        _ => None,
    };

    // estimation at the strongest AP
    let strongest = (0..ap_stats.len())
        .max_by(|&a, &b| ap_stats[a].zeta.partial_cmp(&ap_stats[b].zeta).unwrap())
        .unwrap_or(0);
    let cf_pilot = scene.pilot(Architecture::Cf, cfg.warmup_slots)?;
    reports.extend(oracle_estimation(
        &ap_stats[strongest],
        cf_pilot,
        params.kappa,
        params.sigma2,
        &OracleSettings { seed: derive_seed(settings.seed, 10), ..*settings },
        "(strongest AP)",
    )?);
    if let Some((links, _)) = tue_pair {
        let l = model.tue_serving_ap().unwrap_or(0);
        reports.push(oracle_tue_estimate(
            &links[l],
            params.p_te,
            params.sigma2,
            &OracleSettings { seed: derive_seed(settings.seed, 11), ..*settings },
            "(TUE serving AP)",
        )?);
    }

    // cell-free energy, upsilon and uplink terms
    let cf = ArraySet::new(&ap_stats, tue_pair, cf_pilot, params.kappa, params.sigma2, params.p_te)?;
    let energy = simulate_energy(&cf, settings, derive_seed(settings.seed, 20));
    let wpt = params.split.wpt_fraction() * params.kappa;
    let he_closed = he_cf(&cf.summaries, params.p_d_cf, params.kappa, &params.split)?;
    reports.push(MonteCarloReport::scalar(
        format!("HE cf{suffix}"),
        he_closed,
        wpt * params.p_d_cf * energy.joint.mean,
        wpt * params.p_d_cf * energy.joint.std_error(),
        count,
        tol,
    ));
    let ups_closed: f64 = cf.summaries.iter().map(|s| s.upsilon).sum();
    let ups_sample: f64 = energy.inner.iter().map(|m| m.variance()).sum();
    reports.push(MonteCarloReport::scalar("Upsilon (sum over APs)", ups_closed, ups_sample, f64::NAN, count, tol));
    reports.push(MonteCarloReport::scalar(
        "Upsilon (strongest AP)",
        cf.summaries[strongest].upsilon,
        energy.inner[strongest].variance(),
        f64::NAN,
        count,
        tol,
    ));
    if model.tue_present() {
        let closed: f64 = cf.summaries.iter().map(|s| s.te_pickup).sum();
        let sample: f64 = energy.pickup.iter().map(|m| m.mean).sum();
        reports.push(MonteCarloReport::scalar("TUE pickup (sum over APs)", closed, sample, f64::NAN, count, tol));
    }

    let cf_energy = energy_state(he_closed, &params.split)?;
    if cf_energy.p_u > 0.0 {
        let tue_links = model.channels.tue_aps.as_deref();
        let up = simulate_uplink(&cf, tue_links, cf_energy.p_u, params.p_te_u, params.sigma2, settings, derive_seed(settings.seed, 30))?;
        let closed = se_terms_cf(&cf.summaries, cf_energy.p_u, params.p_te_u, params.kappa, params.sigma2);
        let kp = params.kappa * cf_energy.p_u;
        let mean_inner = up.inner_sum.mean().norm_sqr();
        // unit-power symbols: DS is the mean gain, BU its spread
        let ds = kp * mean_inner;
        let bu = kp * up.inner_sum.variance();
        let terms = [
            ("DS", closed.ds, ds, f64::NAN),
            ("BU", closed.bu, bu, f64::NAN),
            ("HI", closed.hi, up.hi.mean, up.hi.std_error()),
            ("NS", closed.ns, up.ns.mean, up.ns.std_error()),
        ];
        for (name, c, s, se) in terms {
            reports.push(MonteCarloReport::scalar(format!("SE term {name}{suffix}"), c, s, se, count, tol));
        }
        if model.tue_present() {
            reports.push(MonteCarloReport::scalar(format!("SE term UI{suffix}"), closed.ui, up.ui.mean, up.ui.std_error(), count, tol));
        }
        let sample_sinr = ds / (bu + up.hi.mean + up.ui.mean + up.ns.mean);
        reports.push(MonteCarloReport::scalar(
            format!("SE cf{suffix}"),
            closed.se(&params.split),
            crate::spectral::se_from_sinr(sample_sinr, &params.split),
            f64::NAN,
            count,
            tol,
        ));
    }

    // small cell
    let sc_pilot = scene.pilot(Architecture::Sc, cfg.warmup_slots)?;
    let sc = ArraySet::new(&ap_stats, tue_pair, sc_pilot, params.kappa, params.sigma2, params.p_te)?;
    let serving = match (cfg.sc_tue_serving, model.tue_serving_ap()) {
        (crate::config::ScTueServing::TueStrongest, Some(l)) => TueServingAp::Fixed(l),
        _ => TueServingAp::Harvesting,
    };
    let (he_sc_closed, best) = he_sc(&sc.summaries, params.p_d_sc, params.kappa, &params.split, serving)?;
    let sc_energy = simulate_energy(&sc, settings, derive_seed(settings.seed, 40));
    let pick_of = |l: usize| if model.tue_present() { sc_energy.pickup[l].mean } else { 0.0 };
    let per_ap = |l: usize| {
        sc_energy.per_ap[l].mean
            + match serving {
                TueServingAp::Fixed(s) => pick_of(s),
                TueServingAp::Harvesting => pick_of(l),
            }
    };
    let sample_best = (0..sc.samplers.len()).map(per_ap).fold(f64::MIN, f64::max);
    reports.push(MonteCarloReport::scalar(
        format!("HE sc{suffix}"),
        he_sc_closed,
        wpt * params.p_d_sc * sample_best,
        wpt * params.p_d_sc * sc_energy.per_ap[best].std_error(),
        count,
        tol,
    ));

    // cellular
    let c_pilot = scene.pilot(Architecture::Cellular, cfg.warmup_slots)?;
    let bs = model.channels.bs_link(&scene.uav)?;
    let bs_tue = match (&model.channels.tue_bs, model.tue_bs_covariance()) {
        (Some(t), Some(g)) => Some((std::slice::from_ref(t), std::slice::from_ref(g))),
        _ => None,
    };
    let cell = ArraySet::new(std::slice::from_ref(&bs), bs_tue, c_pilot, params.kappa, params.sigma2, params.p_te)?;
    let c_energy = simulate_energy(&cell, settings, derive_seed(settings.seed, 50));
    reports.push(MonteCarloReport::scalar(
        format!("HE cellular{suffix}"),
        he_cellular(&cell.summaries[0], params.p_d_c, params.kappa, &params.split)?,
        wpt * params.p_d_c * c_energy.joint.mean,
        wpt * params.p_d_c * c_energy.joint.std_error(),
        count,
        tol,
    ));
    Ok(reports)
}
