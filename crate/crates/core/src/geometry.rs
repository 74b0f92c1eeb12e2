//! Node placement and UAV kinematics in the horizontal plane.

use rand::Rng;

use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Horizontal coordinates in meters. APs, the BS and the TUE sit at height
/// zero; the UAV altitude lives in the config.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Position<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> Position<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn from_f64(p: (f64, f64)) -> Self {
        Self::new(T::lit(p.0), T::lit(p.1))
    }

    pub fn distance(&self, other: &Self) -> T {
        self.distance_sqr(other).sqrt()
    }

    pub fn distance_sqr(&self, other: &Self) -> T {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    /// Azimuth of `other` seen from `self`, in radians.
    pub fn bearing_to(&self, other: &Self) -> T {
        (other.y - self.y).atan2(other.x - self.x)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Placement<T> {
    pub aps: Vec<Position<T>>,
    pub bs: Position<T>,
    pub tue: Option<Position<T>>,
    pub uav_start: Position<T>,
    pub uav_dest: Position<T>,
}

impl<T: Real> Placement<T> {
    /// Checks that every node lies inside `[0, side]^2`.
    pub fn validate(&self, area_side: f64) -> Result<()> {
        let side = T::lit(area_side);
        let inside = |p: &Position<T>| {
            p.is_finite() && p.x >= T::zero() && p.y >= T::zero() && p.x <= side && p.y <= side
        };
        let all = self
            .aps
            .iter()
            .chain([&self.bs, &self.uav_start, &self.uav_dest])
            .chain(self.tue.iter());
        for p in all {
            if !inside(p) {
                return Err(Error::Config(format!(
                    "position ({}, {}) outside the {area_side} m square",
                    p.x.as_f64(),
                    p.y.as_f64()
                )));
            }
        }
        Ok(())
    }
}

/// Uniform point in the configured square.
pub fn uniform_position<T: Real, R: Rng + ?Sized>(area_side: f64, rng: &mut R) -> Position<T> {
    let x = rng.random::<f64>() * area_side;
    let y = rng.random::<f64>() * area_side;
    Position::new(T::lit(x), T::lit(y))
}

/// Drops the APs (and the TUE when enabled) uniformly over the square.
/// The BS defaults to the square's center.
pub fn generate_placement<T: Real, R: Rng + ?Sized>(cfg: &ScenarioConfig, rng: &mut R) -> Placement<T> {
    let aps = (0..cfg.n_aps)
        .map(|_| uniform_position(cfg.area_side, rng))
        .collect();
    let tue = cfg
        .tue_enabled
        .then(|| uniform_position(cfg.area_side, rng));
    Placement {
        aps,
        bs: Position::from_f64(cfg.bs_position()),
        tue,
        uav_start: Position::from_f64(cfg.uav_start),
        uav_dest: Position::from_f64(cfg.uav_dest),
    }
}

/// Moves `d_min` along `heading` (radians from the +x axis).
pub fn step_uav<T: Real>(current: &Position<T>, heading: T, d_min: T) -> Position<T> {
    let (s, c) = heading.sin_cos();
    Position::new(current.x + d_min * c, current.y + d_min * s)
}

/// Slots needed to cover the straight segment at `d_min` per slot.
pub fn slots_on_line<T: Real>(from: &Position<T>, to: &Position<T>, d_min: T) -> usize {
    let dist = from.distance(to);
    if dist <= T::zero() {
        return 0;
    }
    let ratio = (dist / d_min).as_f64();
    // guard against ratios like 1.0000000000000002 from rounding
    let rounded = ratio.round();
    if (ratio - rounded).abs() <= 1e-9 * rounded.max(1.0) {
        rounded as usize
    } else {
        ratio.ceil() as usize
    }
}
