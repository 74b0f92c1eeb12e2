//! Flight schemes over a per-slot SE objective: angle search, AP search,
//! line path and all-APs path.
//!
//! Every slot the UAV moves exactly `d_min`, except the slot that lands it
//! on its target, which is shortened to end on the target.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::{step_uav, Position};
use crate::scalar::Real;
use crate::system::{Architecture, SlotEvaluation, SlotModel};

/// Relative slack on `d_min` when deciding whether a target is one step away.
const LANDING_SLACK: f64 = 1e-9;

/// Per-slot SE as a function of position, slot index and pilot power.
pub trait SeObjective<T: Real> {
    fn evaluate(&self, pos: &Position<T>, slot: u64, pilot: T) -> Result<SlotEvaluation<T>>;

    /// Pilot power of slot 0.
    fn initial_pilot(&self) -> T;
}

/// One architecture of a [`SlotModel`] as an objective.
#[derive(Debug, Clone, Copy)]
pub struct ArchitectureObjective<'a, T: Real> {
    pub model: &'a SlotModel<T>,
    pub arch: Architecture,
}

impl<T: Real> SeObjective<T> for ArchitectureObjective<'_, T> {
    fn evaluate(&self, pos: &Position<T>, slot: u64, pilot: T) -> Result<SlotEvaluation<T>> {
        self.model.evaluate(self.arch, pos, slot, pilot)
    }

    fn initial_pilot(&self) -> T {
        self.model.params.p0_pilot
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    AngleSearch,
    ApSearch,
    LinePath,
    AllAps,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Self::AngleSearch, Self::ApSearch, Self::LinePath, Self::AllAps];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::AngleSearch => "angle",
            Self::ApSearch => "ap",
            Self::LinePath => "line",
            Self::AllAps => "all-aps",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown scheme `{s}` (expected angle, ap, line or all-aps)")))
    }
}

/// Flight record. Index 0 of the position / energy vectors is the start
/// position (slot 0); `per_slot_se` covers slots `1..=slots_used`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryLog<T> {
    pub scheme: Scheme,
    pub positions: Vec<Position<T>>,
    pub initial_se: T,
    pub per_slot_se: Vec<T>,
    pub p_he: Vec<T>,
    pub p_u: Vec<T>,
    pub direction_switches: usize,
    pub direction_searches: usize,
    pub slots_used: usize,
    pub arrived: bool,
    /// APs that came within `d_min` of the UAV (AP search and all-APs only).
    pub aps_reached: Option<usize>,
}

impl<T: Real> TrajectoryLog<T> {
    /// Time-averaged SE over slots `1..=slots_used`.
    pub fn average_se(&self) -> T {
        if self.per_slot_se.is_empty() {
            return T::zero();
        }
        let sum = self.per_slot_se.iter().fold(T::zero(), |a, &b| a + b);
        sum / T::from_usize_lossy(self.per_slot_se.len())
    }

    pub fn last_position(&self) -> Position<T> {
        *self.positions.last().expect("log always holds the start position")
    }
}

/// Planner limits.
#[derive(Debug, Clone, Copy)]
pub struct FlightLimits<T> {
    pub d_min: T,
    pub max_slots: usize,
    /// Angle-search candidates per slot.
    pub candidates: usize,
}

impl<T: Real> FlightLimits<T> {
    pub fn from_config(cfg: &crate::config::ScenarioConfig) -> Self {
        Self { d_min: T::lit(cfg.d_min()), max_slots: cfg.max_slots, candidates: cfg.candidates }
    }

    fn within_step(&self, a: &Position<T>, b: &Position<T>) -> bool {
        a.distance(b) <= self.d_min * (T::one() + T::lit(LANDING_SLACK))
    }
}

struct Flight<'a, T: Real, O: SeObjective<T> + ?Sized> {
    objective: &'a O,
    pilot: T,
    log: TrajectoryLog<T>,
    limits: FlightLimits<T>,
}

impl<'a, T: Real, O: SeObjective<T> + ?Sized> Flight<'a, T, O> {
    fn start(objective: &'a O, scheme: Scheme, start: Position<T>, limits: FlightLimits<T>) -> Result<Self> {
        let e = objective.evaluate(&start, 0, objective.initial_pilot())?;
        let log = TrajectoryLog {
            scheme,
            positions: vec![start],
            initial_se: e.se,
            per_slot_se: Vec::new(),
            p_he: vec![e.energy.p_he],
            p_u: vec![e.energy.p_u],
            direction_switches: 0,
            direction_searches: 0,
            slots_used: 0,
            arrived: false,
            aps_reached: None,
        };
        Ok(Self { objective, pilot: e.energy.p_pilot_next, log, limits })
    }

    fn current(&self) -> Position<T> {
        self.log.last_position()
    }

    fn next_slot(&self) -> u64 {
        self.log.slots_used as u64 + 1
    }

    fn capped(&self) -> bool {
        self.log.slots_used >= self.limits.max_slots
    }

    fn evaluate(&self, pos: &Position<T>) -> Result<SlotEvaluation<T>> {
        self.objective.evaluate(pos, self.next_slot(), self.pilot)
    }

    fn commit(&mut self, pos: Position<T>, e: SlotEvaluation<T>) {
        self.log.positions.push(pos);
        self.log.per_slot_se.push(e.se);
        self.log.p_he.push(e.energy.p_he);
        self.log.p_u.push(e.energy.p_u);
        self.log.slots_used += 1;
        self.pilot = e.energy.p_pilot_next;
    }

    fn move_to(&mut self, pos: Position<T>) -> Result<()> {
        let e = self.evaluate(&pos)?;
        self.commit(pos, e);
        Ok(())
    }

    /// Flies straight at `target` until landing on it, the slot cap, or
    /// `interrupt` asks for a new target after a slot. Returns whether the
    /// target was reached.
    fn fly_leg(&mut self, target: Position<T>, mut interrupt: impl FnMut(&Position<T>) -> bool) -> Result<bool> {
        let origin = self.current();
        let dist = origin.distance(&target);
        if dist == T::zero() {
            return Ok(true);
        }
        let ux = (target.x - origin.x) / dist;
        let uy = (target.y - origin.y) / dist;
        let mut k = T::zero();
        while !self.capped() {
            let cur = self.current();
            let landing = self.limits.within_step(&cur, &target);
            let next = if landing {
                target
            } else {
                k += T::one();
                Position::new(origin.x + k * self.limits.d_min * ux, origin.y + k * self.limits.d_min * uy)
            };
            self.move_to(next)?;
            if landing {
                return Ok(true);
            }
            if interrupt(&next) {
                return Ok(false);
            }
        }
        Ok(false)
    }

    fn finish(mut self, arrived: bool) -> TrajectoryLog<T> {
        self.log.arrived = arrived;
        self.log
    }
}

/// Closed axis-aligned quadrant around `from` that contains `dest`, as the
/// sign of each axis (zero offsets count as positive).
fn quadrant_signs<T: Real>(from: &Position<T>, dest: &Position<T>) -> (T, T) {
    let sx = if dest.x >= from.x { T::one() } else { -T::one() };
    let sy = if dest.y >= from.y { T::one() } else { -T::one() };
    (sx, sy)
}

fn in_quadrant<T: Real>(from: &Position<T>, signs: (T, T), p: &Position<T>) -> bool {
    (p.x - from.x) * signs.0 >= T::zero() && (p.y - from.y) * signs.1 >= T::zero()
}

/// Headings (radians) of the `m` candidates spanning the closed quadrant of
/// `dest`, including both edges, so `m = 10` gives a 10 degree spacing.
pub fn candidate_headings<T: Real>(from: &Position<T>, dest: &Position<T>, m: usize) -> Vec<T> {
    let (sx, sy) = quadrant_signs(from, dest);
    let base_deg = match (sx > T::zero(), sy > T::zero()) {
        (true, true) => 0.0,
        (false, true) => 90.0,
        (false, false) => 180.0,
        (true, false) => 270.0,
    };
    let m = m.max(2);
    let spacing = 90.0 / (m - 1) as f64;
    (0..m).map(|i| T::lit((base_deg + spacing * i as f64).to_radians())).collect()
}

fn angular_gap<T: Real>(a: T, b: T) -> T {
    let two_pi = T::two_pi();
    let mut d = (a - b) % two_pi;
    if d < T::zero() {
        d += two_pi;
    }
    d.min(two_pi - d)
}

/// Greedy per-slot SE maximization over `M` headings in the quadrant of the
/// destination. Headings that would carry the UAV past either coordinate of
/// `dest` are skipped; ties go to the heading closest to the bearing of
/// `dest`.
pub fn plan_angle_search<T: Real, O: SeObjective<T> + ?Sized>(
    start: Position<T>,
    dest: Position<T>,
    objective: &O,
    limits: FlightLimits<T>,
) -> Result<TrajectoryLog<T>> {
    let mut flight = Flight::start(objective, Scheme::AngleSearch, start, limits)?;
    let mut last_heading: Option<T> = None;
    while !flight.capped() {
        let cur = flight.current();
        if cur == dest {
            return Ok(flight.finish(true));
        }
        if limits.within_step(&cur, &dest) {
            flight.move_to(dest)?;
            return Ok(flight.finish(true));
        }
        let bearing = cur.bearing_to(&dest);
        let mut headings = candidate_headings(&cur, &dest, limits.candidates);
        headings.sort_by(|a, b| angular_gap(*a, bearing).partial_cmp(&angular_gap(*b, bearing)).unwrap());
        let signs = quadrant_signs(&cur, &dest);
        let slack = limits.d_min * T::lit(LANDING_SLACK);
        let mut best: Option<(T, Position<T>, SlotEvaluation<T>)> = None;
        for &h in &headings {
            let pos = step_uav(&cur, h, limits.d_min);
            // crossing an axis through dest flips the quadrant and lets the
            // UAV zigzag along that axis
            if (pos.x - dest.x) * signs.0 > slack || (pos.y - dest.y) * signs.1 > slack {
                continue;
            }
            let e = flight.evaluate(&pos)?;
            if best.as_ref().is_none_or(|(_, _, b)| e.se > b.se) {
                best = Some((h, pos, e));
            }
        }
        flight.log.direction_searches += headings.len();
        let (h, pos, e) = match best {
            Some(b) => b,
            None => {
                // every candidate overshoots: head straight at dest
                let pos = step_uav(&cur, bearing, limits.d_min);
                let e = flight.evaluate(&pos)?;
                (bearing, pos, e)
            }
        };
        if last_heading != Some(h) {
            flight.log.direction_switches += 1;
            last_heading = Some(h);
        }
        flight.commit(pos, e);
    }
    let arrived = flight.current() == dest;
    Ok(flight.finish(arrived))
}

/// Flies from AP to AP: always toward the nearest unvisited AP in the
/// quadrant of the destination, or toward the destination when that is
/// nearer or no such AP is left. An AP counts as reached once the UAV is
/// within `d_min` of it.
pub fn plan_ap_search<T: Real, O: SeObjective<T> + ?Sized>(
    start: Position<T>,
    dest: Position<T>,
    aps: &[Position<T>],
    objective: &O,
    limits: FlightLimits<T>,
) -> Result<TrajectoryLog<T>> {
    let mut flight = Flight::start(objective, Scheme::ApSearch, start, limits)?;
    let mut visited = vec![false; aps.len()];
    let mut reached = 0usize;

    let mark = |pos: &Position<T>, visited: &mut [bool]| -> usize {
        let mut n = 0;
        for (l, ap) in aps.iter().enumerate() {
            if !visited[l] && limits.within_step(pos, ap) {
                visited[l] = true;
                n += 1;
            }
        }
        n
    };

    let newly = mark(&start, &mut visited);
    reached += newly;
    flight.log.direction_switches += 1 + newly;
    loop {
        let cur = flight.current();
        let signs = quadrant_signs(&cur, &dest);
        let mut target = dest;
        let mut best = cur.distance(&dest);
        let mut examined = 0;
        for (l, ap) in aps.iter().enumerate() {
            if visited[l] || !in_quadrant(&cur, signs, ap) {
                continue;
            }
            examined += 1;
            let d = cur.distance(ap);
            if d < best {
                best = d;
                target = *ap;
            }
        }
        flight.log.direction_searches += examined;
        let mut hit = 0usize;
        let landed = flight.fly_leg(target, |pos| {
            hit = mark(pos, &mut visited);
            hit > 0
        })?;
        if landed {
            hit += mark(&flight.current(), &mut visited);
        }
        reached += hit;
        flight.log.direction_switches += hit;
        if landed && target == dest {
            break;
        }
        if flight.capped() {
            break;
        }
    }
    flight.log.aps_reached = Some(reached);
    let arrived = flight.current() == dest;
    Ok(flight.finish(arrived))
}

/// Straight flight to the destination.
pub fn plan_line_path<T: Real, O: SeObjective<T> + ?Sized>(
    start: Position<T>,
    dest: Position<T>,
    objective: &O,
    limits: FlightLimits<T>,
) -> Result<TrajectoryLog<T>> {
    let mut flight = Flight::start(objective, Scheme::LinePath, start, limits)?;
    flight.log.direction_switches = 1;
    flight.log.direction_searches = 1;
    let arrived = flight.fly_leg(dest, |_| false)?;
    Ok(flight.finish(arrived))
}

/// Visits every AP in greedy nearest-unvisited order, then flies to the
/// destination.
pub fn plan_all_aps<T: Real, O: SeObjective<T> + ?Sized>(
    start: Position<T>,
    dest: Position<T>,
    aps: &[Position<T>],
    objective: &O,
    limits: FlightLimits<T>,
) -> Result<TrajectoryLog<T>> {
    let mut flight = Flight::start(objective, Scheme::AllAps, start, limits)?;
    let mut visited = vec![false; aps.len()];
    let mut reached = 0;
    for _ in 0..aps.len() {
        let cur = flight.current();
        let next = (0..aps.len())
            .filter(|&l| !visited[l])
            .min_by(|&a, &b| cur.distance(&aps[a]).partial_cmp(&cur.distance(&aps[b])).unwrap())
            .expect("an unvisited AP remains");
        flight.log.direction_switches += 1;
        flight.log.direction_searches += 1;
        if !flight.fly_leg(aps[next], |_| false)? {
            flight.log.aps_reached = Some(reached);
            return Ok(flight.finish(false));
        }
        visited[next] = true;
        reached += 1;
    }
    flight.log.direction_switches += 1;
    flight.log.direction_searches += 1;
    let arrived = flight.fly_leg(dest, |_| false)?;
    flight.log.aps_reached = Some(reached);
    Ok(flight.finish(arrived))
}

/// Runs `scheme`. `aps` is only used by the AP-based schemes.
pub fn plan_scheme<T: Real, O: SeObjective<T> + ?Sized>(
    scheme: Scheme,
    start: Position<T>,
    dest: Position<T>,
    aps: &[Position<T>],
    objective: &O,
    limits: FlightLimits<T>,
) -> Result<TrajectoryLog<T>> {
    match scheme {
        Scheme::AngleSearch => plan_angle_search(start, dest, objective, limits),
        Scheme::ApSearch => plan_ap_search(start, dest, aps, objective, limits),
        Scheme::LinePath => plan_line_path(start, dest, objective, limits),
        Scheme::AllAps => plan_all_aps(start, dest, aps, objective, limits),
    }
}

/// Flies the positions of `log` again under another objective, with its own
/// energy recursion. Counters are copied from `log`.
pub fn replay<T: Real, O: SeObjective<T> + ?Sized>(log: &TrajectoryLog<T>, objective: &O) -> Result<TrajectoryLog<T>> {
    let limits = FlightLimits { d_min: T::one(), max_slots: usize::MAX, candidates: 2 };
    let mut flight = Flight::start(objective, log.scheme, log.positions[0], limits)?;
    for pos in &log.positions[1..] {
        flight.move_to(*pos)?;
    }
    let mut out = flight.finish(log.arrived);
    out.direction_switches = log.direction_switches;
    out.direction_searches = log.direction_searches;
    out.aps_reached = log.aps_reached;
    Ok(out)
}
