use cfuav::channel::ScenarioChannels;
use cfuav::energy::{advance_energy, TimeSplit};
use cfuav::geometry::{generate_placement, uniform_position};
use cfuav::rng::substream;
use cfuav::spectral::{lsfd_sinr, lsfd_vectors, se_terms_cf};
use cfuav::system::SlotModel;
use cfuav::{Architecture, LinkSummary, ScenarioConfig};
use proptest::prelude::*;

/// After the configured warm-up the pilot power has settled: one more
/// block changes it by less than 0.1%.
#[test]
fn warm_up_reaches_steady_state() {
    for seed in 0..30u64 {
        let cfg = ScenarioConfig { rng_seed: seed, tue_enabled: seed % 2 == 0, ..Default::default() };
        let mut rng = substream(seed, 0);
        let placement = generate_placement(&cfg, &mut rng);
        let uav = uniform_position(cfg.area_side, &mut rng);
        let ch = ScenarioChannels::new(&cfg, placement, &mut substream(seed, 1));
        let m = SlotModel::new(&cfg, ch, seed).unwrap();
        for arch in Architecture::ALL {
            let p = m.warm_up(arch, &uav, cfg.warmup_slots + 1).unwrap();
            let (w, next): (f64, f64) = (p[cfg.warmup_slots], p[cfg.warmup_slots + 1]);
            assert!((next - w).abs() / w < 1e-3, "seed {seed} {arch}: {w} -> {next}");
        }
    }
}

fn summary() -> impl Strategy<Value = LinkSummary> {
    (1e-9..1e-3f64, 0.0..2.0f64, 0.0..1e-3f64, 0.0..1e-3f64).prop_map(|(b, u, pick, leak)| LinkSummary {
        b,
        upsilon: u * b * b,
        te_pickup: pick * b,
        te_leak: leak * b,
    })
}

proptest! {
    #[test]
    fn energy_split_conserves_harvest(tau_c in 10u32..500, rho in 0.0..0.99f64, p_he in 0.0..10.0f64) {
        let split = TimeSplit::from_rho(tau_c as f64, 1.0, rho);
        let s = advance_energy(p_he, &split).unwrap();
        let spent = split.tau_p * s.p_pilot_next + split.data_uses() * s.p_u;
        prop_assert!((spent - split.tau_c * p_he).abs() <= 1e-12 * (1.0 + split.tau_c * p_he));
        prop_assert!((s.p_u - s.p_pilot_next).abs() <= 1e-12 * (1.0 + s.p_u));
    }

    #[test]
    fn lsfd_never_loses_to_equal_weights(
        links in prop::collection::vec(summary(), 1..12),
        p_u in 1e-6..1.0f64,
        p_te_u in 0.0..1.0f64,
        kappa in 0.5..=1.0f64,
    ) {
        let sigma2 = 2.5e-10;
        let mf = se_terms_cf(&links, p_u, p_te_u, kappa, sigma2).sinr();
        let opt = lsfd_sinr(&lsfd_vectors(&links), p_u, p_te_u, kappa, sigma2);
        prop_assert!(opt >= mf * (1.0 - 1e-10), "lsfd {} < mf {}", opt, mf);
    }

    #[test]
    fn closed_form_se_grows_with_uplink_power(
        links in prop::collection::vec(summary(), 1..8),
        p_u in 1e-6..1.0f64,
        kappa in 0.5..=1.0f64,
    ) {
        let split = TimeSplit::from_rho(200.0, 1.0, 0.5);
        let lo = se_terms_cf(&links, p_u, 1e-3, kappa, 2.5e-10).se(&split);
        let hi = se_terms_cf(&links, 2.0 * p_u, 1e-3, kappa, 2.5e-10).se(&split);
        prop_assert!(hi >= lo * (1.0 - 1e-12));
        prop_assert!(lo >= 0.0);
    }
}
