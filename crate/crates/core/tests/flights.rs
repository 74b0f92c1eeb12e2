use cfuav::channel::ScenarioChannels;
use cfuav::geometry::{generate_placement, slots_on_line, Position};
use cfuav::rng::substream;
use cfuav::system::SlotModel;
use cfuav::trajectory::{plan_scheme, replay, ArchitectureObjective, FlightLimits, Scheme};
use cfuav::{Architecture, ScenarioConfig, TrajectoryLog};

// a shorter route keeps the angle search quick
const DEST: (f64, f64) = (40.0, 30.0);

fn model(cfg: &ScenarioConfig) -> SlotModel<f64> {
    let placement = generate_placement(cfg, &mut substream(cfg.rng_seed, 0));
    let ch = ScenarioChannels::new(cfg, placement, &mut substream(cfg.rng_seed, 1));
    SlotModel::new(cfg, ch, 5).unwrap()
}

fn fly(cfg: &ScenarioConfig, m: &SlotModel<f64>, arch: Architecture, scheme: Scheme) -> TrajectoryLog {
    let start = Position::new(cfg.uav_start.0, cfg.uav_start.1);
    let dest = Position::new(cfg.uav_dest.0, cfg.uav_dest.1);
    let objective = ArchitectureObjective { model: m, arch };
    plan_scheme(scheme, start, dest, &m.channels.placement.aps, &objective, FlightLimits::from_config(cfg)).unwrap()
}

fn audit(cfg: &ScenarioConfig, log: &TrajectoryLog) {
    let d_min = cfg.d_min();
    let dest = Position::new(cfg.uav_dest.0, cfg.uav_dest.1);
    assert!(log.arrived, "{} did not arrive", log.scheme);
    assert_eq!(log.positions.len(), log.slots_used + 1);
    assert_eq!(log.per_slot_se.len(), log.slots_used);
    assert_eq!(log.p_he.len(), log.slots_used + 1);
    assert!(log.slots_used <= cfg.max_slots);
    assert_eq!(*log.positions.last().unwrap(), dest);
    for w in log.positions.windows(2) {
        assert!(w[0].distance(&w[1]) <= d_min * (1.0 + 1e-9));
    }
    assert!(log.per_slot_se.iter().all(|s| s.is_finite() && *s >= 0.0));
}

#[test]
fn cell_free_schemes_pass_the_audit() {
    let cfg = ScenarioConfig { uav_dest: DEST, ..Default::default() };
    let m = model(&cfg);
    let line = fly(&cfg, &m, Architecture::Cf, Scheme::LinePath);
    let start = Position::new(0.0, 0.0);
    let dest = Position::new(DEST.0, DEST.1);
    assert_eq!(line.slots_used, slots_on_line(&start, &dest, cfg.d_min()));
    for scheme in [Scheme::AngleSearch, Scheme::ApSearch, Scheme::LinePath] {
        let log = fly(&cfg, &m, Architecture::Cf, scheme);
        audit(&cfg, &log);
        assert!(log.slots_used >= line.slots_used);
        match scheme {
            Scheme::AngleSearch => {
                assert_eq!(log.direction_searches, cfg.candidates * (log.slots_used - 1));
                // never past the destination on either axis
                assert!(log.positions.iter().all(|p| p.x <= DEST.0 + 1e-9 && p.y <= DEST.1 + 1e-9));
            }
            Scheme::ApSearch => assert_eq!(log.direction_switches, log.aps_reached.unwrap() + 1),
            _ => assert_eq!((log.direction_switches, log.direction_searches), (1, 1)),
        }
    }
}

#[test]
fn replay_under_the_planning_objective_is_exact() {
    let cfg = ScenarioConfig { uav_dest: DEST, tue_enabled: true, ..Default::default() };
    let m = model(&cfg);
    let log = fly(&cfg, &m, Architecture::Cf, Scheme::AngleSearch);
    let again = replay(&log, &ArchitectureObjective { model: &m, arch: Architecture::Cf }).unwrap();
    assert_eq!(again, log);
    let lsfd = replay(&log, &ArchitectureObjective { model: &m, arch: Architecture::CfLsfd }).unwrap();
    assert_eq!(lsfd.positions, log.positions);
    for (a, b) in lsfd.per_slot_se.iter().zip(&log.per_slot_se) {
        assert!(*a >= *b * (1.0 - 1e-12));
    }
}

#[test]
fn monte_carlo_architectures_fly_too() {
    let cfg = ScenarioConfig { uav_dest: (6.0, 4.0), se_draws: 200, ..Default::default() };
    let m = model(&cfg);
    for arch in [Architecture::Sc, Architecture::Cellular] {
        for scheme in [Scheme::AngleSearch, Scheme::LinePath] {
            audit(&cfg, &fly(&cfg, &m, arch, scheme));
        }
    }
}

#[test]
fn single_precision_flight_tracks_double() {
    let cfg = ScenarioConfig { uav_dest: (8.0, 5.0), ..Default::default() };
    let wide = fly(&cfg, &model(&cfg), Architecture::Cf, Scheme::LinePath);
    let placement = generate_placement(&cfg, &mut substream(cfg.rng_seed, 0));
    let ch = ScenarioChannels::<f32>::new(&cfg, placement, &mut substream(cfg.rng_seed, 1));
    let m = SlotModel::new(&cfg, ch, 5).unwrap();
    let objective = ArchitectureObjective { model: &m, arch: Architecture::Cf };
    let start = Position::new(0.0f32, 0.0);
    let dest = Position::new(8.0f32, 5.0);
    let narrow = plan_scheme(Scheme::LinePath, start, dest, &[], &objective, FlightLimits::from_config(&cfg)).unwrap();
    assert_eq!(narrow.slots_used, wide.slots_used);
    let gap = (narrow.average_se() as f64 - wide.average_se()).abs() / wide.average_se();
    assert!(gap < 1e-3, "relative gap {gap}");
}
