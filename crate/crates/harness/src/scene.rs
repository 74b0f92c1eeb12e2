//! Per-realization random scenes. Each realization draws from its own
//! substreams, so results never depend on scheduling.

use cfuav::geometry::{generate_placement, uniform_position};
use cfuav::rng::{derive_seed, substream};
use cfuav::{Position, ScenarioChannels, ScenarioConfig, SlotModel};

const PLACEMENT_STREAM: u64 = 1;
const CHANNEL_STREAM: u64 = 2;
const MONTE_CARLO_STREAM: u64 = 3;

pub struct Scene {
    pub index: u64,
    pub channels: ScenarioChannels,
    /// Random UAV position, drawn after the placement.
    pub uav: Position,
    pub mc_seed: u64,
}

impl Scene {
    pub fn draw(cfg: &ScenarioConfig, seed: u64, index: u64) -> Self {
        let mut rng = substream(derive_seed(seed, PLACEMENT_STREAM), index);
        let placement = generate_placement::<f64, _>(cfg, &mut rng);
        let uav = uniform_position(cfg.area_side, &mut rng);
        let mut ch_rng = substream(derive_seed(seed, CHANNEL_STREAM), index);
        let channels = ScenarioChannels::new(cfg, placement, &mut ch_rng);
        Self { index, channels, uav, mc_seed: derive_seed(derive_seed(seed, MONTE_CARLO_STREAM), index) }
    }

    /// Slot model under `cfg`, which may differ from the drawing config in
    /// anything but the geometry and array sizes.
    pub fn model(&self, cfg: &ScenarioConfig) -> cfuav::Result<SlotModel> {
        SlotModel::new(cfg, self.channels.clone(), self.mc_seed)
    }
}
