//! Scenario configuration and its flat `key = value` file format.
//!
//! All powers are stored in milliwatts and all gains as linear ratios. Keys
//! carrying a `_db` / `_dbm` suffix are converted when they are read.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::{db_to_linear, dbm_to_mw, linear_to_db, Real};
use crate::energy::TimeSplit;

/// Which AP's TUE-precoding pickup enters the small-cell harvested energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScTueServing {
    /// The AP with the strongest TUE link serves the TUE.
    #[default]
    TueStrongest,
    /// The AP the UAV harvests from also serves the TUE.
    UavEnergyAp,
}

impl FromStr for ScTueServing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tue-strongest" => Ok(Self::TueStrongest),
            "uav-energy-ap" => Ok(Self::UavEnergyAp),
            other => Err(Error::Config(format!("unknown sc_tue_serving `{other}`"))),
        }
    }
}

impl ScTueServing {
    fn as_str(self) -> &'static str {
        match self {
            Self::TueStrongest => "tue-strongest",
            Self::UavEnergyAp => "uav-energy-ap",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    /// Number of APs, `L`.
    pub n_aps: usize,
    /// Antennas per AP, `N`. The cellular BS carries `L * N`.
    pub antennas: usize,
    /// UAV altitude in meters.
    pub altitude: f64,
    pub area_side: f64,
    pub tau_c: f64,
    pub tau_p: f64,
    /// Time-splitting fraction: share of `tau_c - tau_p` spent on WPT.
    pub rho: f64,
    /// Hardware quality factor of the UAV.
    pub kappa: f64,
    /// Reference channel gain at 1 m (linear).
    pub beta0: f64,
    /// Receiver noise power (mW).
    pub sigma2: f64,
    pub p_d_cf: f64,
    pub p_d_c: f64,
    /// Small-cell downlink power multiplier; `None` means `n_aps`.
    pub sc_power_scale: Option<f64>,
    /// Pilot power in the very first slot (mW).
    pub p0_pilot: f64,
    /// UAV horizontal speed (m/s).
    pub v_hor: f64,
    /// Coherence block duration (s).
    pub t_block: f64,
    /// Angle-search candidates per slot, `M`.
    pub candidates: usize,
    pub max_slots: usize,
    /// Antenna spacing in wavelengths.
    pub d_h: f64,
    pub asd_deg: f64,
    pub clusters: usize,
    pub p_te: f64,
    pub p_te_u: f64,
    pub tue_enabled: bool,
    pub sc_tue_serving: ScTueServing,
    pub bs_position: Option<(f64, f64)>,
    pub uav_start: (f64, f64),
    pub uav_dest: (f64, f64),
    /// Slots run before sampling so the pilot recursion settles.
    pub warmup_slots: usize,
    /// Channel-estimate draws behind each small-cell / cellular SE expectation.
    pub se_draws: usize,
    pub rng_seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            n_aps: 20,
            antennas: 2,
            altitude: 20.0,
            area_side: 100.0,
            tau_c: 200.0,
            tau_p: 1.0,
            rho: 0.5,
            kappa: 0.98,
            beta0: db_to_linear(-40.0),
            sigma2: dbm_to_mw(-96.0),
            p_d_cf: dbm_to_mw(30.0),
            p_d_c: dbm_to_mw(30.0),
            sc_power_scale: None,
            p0_pilot: dbm_to_mw(1.0),
            v_hor: 20.0,
            t_block: 2e-3,
            candidates: 10,
            max_slots: 20_000,
            d_h: 0.5,
            asd_deg: 10.0,
            clusters: 6,
            p_te: dbm_to_mw(1.0),
            p_te_u: dbm_to_mw(1.0),
            tue_enabled: false,
            sc_tue_serving: ScTueServing::default(),
            bs_position: None,
            uav_start: (0.0, 0.0),
            uav_dest: (85.0, 85.0),
            warmup_slots: 5,
            se_draws: 10_000,
            rng_seed: 1,
        }
    }
}

fn parse<V: FromStr>(key: &str, value: &str) -> Result<V> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("cannot parse `{value}` for `{key}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(Error::Config(format!("cannot parse `{value}` as bool for `{key}`"))),
    }
}

impl ScenarioConfig {
    /// Parses a config file body on top of the defaults.
    pub fn from_kv_str(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            cfg.set(key.trim(), value.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Applies one `key = value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "n_aps" | "L" => self.n_aps = parse(key, value)?,
            "antennas" | "N" => self.antennas = parse(key, value)?,
            "altitude" | "H" => self.altitude = parse(key, value)?,
            "area_side" => self.area_side = parse(key, value)?,
            "tau_c" => self.tau_c = parse(key, value)?,
            "tau_p" => self.tau_p = parse(key, value)?,
            "rho" => self.rho = parse(key, value)?,
            "kappa" => self.kappa = parse(key, value)?,
            "beta0" => self.beta0 = parse(key, value)?,
            "beta0_db" => self.beta0 = db_to_linear(parse(key, value)?),
            "sigma2" => self.sigma2 = parse(key, value)?,
            "sigma2_dbm" => self.sigma2 = dbm_to_mw(parse(key, value)?),
            "p_d_cf" => self.p_d_cf = parse(key, value)?,
            "p_d_cf_dbm" => self.p_d_cf = dbm_to_mw(parse(key, value)?),
            "p_d_c" => self.p_d_c = parse(key, value)?,
            "p_d_c_dbm" => self.p_d_c = dbm_to_mw(parse(key, value)?),
            "sc_power_scale" => self.sc_power_scale = Some(parse(key, value)?),
            "p0_pilot" => self.p0_pilot = parse(key, value)?,
            "p0_pilot_dbm" => self.p0_pilot = dbm_to_mw(parse(key, value)?),
            "v_hor" => self.v_hor = parse(key, value)?,
            "t_block" => self.t_block = parse(key, value)?,
            "candidates" | "M" => self.candidates = parse(key, value)?,
            "max_slots" | "N_slot_max" => self.max_slots = parse(key, value)?,
            "d_h" | "d_H" => self.d_h = parse(key, value)?,
            "asd_deg" => self.asd_deg = parse(key, value)?,
            "clusters" | "n_clusters" => self.clusters = parse(key, value)?,
            "p_te" => self.p_te = parse(key, value)?,
            "p_te_dbm" => self.p_te = dbm_to_mw(parse(key, value)?),
            "p_te_u" => self.p_te_u = parse(key, value)?,
            "p_te_u_dbm" => self.p_te_u = dbm_to_mw(parse(key, value)?),
            "tue_enabled" => self.tue_enabled = parse_bool(key, value)?,
            "sc_tue_serving" => self.sc_tue_serving = value.parse()?,
            "bs_x" => self.bs_position = Some((parse(key, value)?, self.bs_position.map_or(self.area_side / 2.0, |p| p.1))),
            "bs_y" => self.bs_position = Some((self.bs_position.map_or(self.area_side / 2.0, |p| p.0), parse(key, value)?)),
            "start_x" => self.uav_start.0 = parse(key, value)?,
            "start_y" => self.uav_start.1 = parse(key, value)?,
            "dest_x" => self.uav_dest.0 = parse(key, value)?,
            "dest_y" => self.uav_dest.1 = parse(key, value)?,
            "warmup_slots" => self.warmup_slots = parse(key, value)?,
            "se_draws" => self.se_draws = parse(key, value)?,
            "seed" | "rng_seed" => self.rng_seed = parse(key, value)?,
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.n_aps == 0 || self.antennas == 0 {
            return bad("n_aps and antennas must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return bad(format!("rho = {} outside [0, 1]", self.rho));
        }
        if !(0.0..=1.0).contains(&self.kappa) {
            return bad(format!("kappa = {} outside [0, 1]", self.kappa));
        }
        if self.tau_p < 1.0 || self.tau_c <= self.tau_p {
            return bad(format!("need 1 <= tau_p < tau_c, got tau_p = {}, tau_c = {}", self.tau_p, self.tau_c));
        }
        if !(self.d_min() > 0.0) {
            return bad("v_hor * t_block must be positive".into());
        }
        if self.area_side < 0.0 || !self.area_side.is_finite() {
            return bad("area_side must be finite and non-negative".into());
        }
        if !(self.d_h > 0.0 && self.d_h <= 0.5) {
            return bad(format!("d_h = {} outside (0, 0.5]", self.d_h));
        }
        if self.clusters == 0 || self.asd_deg < 0.0 {
            return bad("clusters >= 1 and asd_deg >= 0 required".into());
        }
        if self.candidates < 2 {
            return bad("angle search needs at least 2 candidates".into());
        }
        if self.se_draws == 0 {
            return bad("se_draws must be positive".into());
        }
        for (name, v) in [
            ("beta0", self.beta0),
            ("sigma2", self.sigma2),
            ("p_d_cf", self.p_d_cf),
            ("p_d_c", self.p_d_c),
            ("p0_pilot", self.p0_pilot),
            ("p_te", self.p_te),
            ("p_te_u", self.p_te_u),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return bad(format!("{name} must be finite and non-negative"));
            }
        }
        Ok(())
    }

    /// WPT channel uses per block; kept real-valued.
    pub fn tau_e(&self) -> f64 {
        self.rho * (self.tau_c - self.tau_p)
    }

    /// Distance flown in one coherence block.
    pub fn d_min(&self) -> f64 {
        self.v_hor * self.t_block
    }

    pub fn p_d_sc(&self) -> f64 {
        self.sc_power_scale.unwrap_or(self.n_aps as f64) * self.p_d_cf
    }

    pub fn bs_position(&self) -> (f64, f64) {
        self.bs_position
            .unwrap_or((self.area_side / 2.0, self.area_side / 2.0))
    }

    pub fn time_split<T: Real>(&self) -> TimeSplit<T> {
        TimeSplit::new(T::lit(self.tau_c), T::lit(self.tau_p), T::lit(self.tau_e()))
    }

    /// Serializes back to the key-value format (linear units), for echoing
    /// the effective configuration next to experiment outputs.
    pub fn to_kv_string(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("n_aps", self.n_aps.to_string());
        put("antennas", self.antennas.to_string());
        put("altitude", self.altitude.to_string());
        put("area_side", self.area_side.to_string());
        put("tau_c", self.tau_c.to_string());
        put("tau_p", self.tau_p.to_string());
        put("rho", self.rho.to_string());
        put("kappa", self.kappa.to_string());
        put("beta0_db", linear_to_db(self.beta0).to_string());
        put("sigma2", self.sigma2.to_string());
        put("p_d_cf", self.p_d_cf.to_string());
        put("p_d_c", self.p_d_c.to_string());
        if let Some(scale) = self.sc_power_scale {
            put("sc_power_scale", scale.to_string());
        }
        put("p0_pilot", self.p0_pilot.to_string());
        put("v_hor", self.v_hor.to_string());
        put("t_block", self.t_block.to_string());
        put("candidates", self.candidates.to_string());
        put("max_slots", self.max_slots.to_string());
        put("d_h", self.d_h.to_string());
        put("asd_deg", self.asd_deg.to_string());
        put("clusters", self.clusters.to_string());
        put("p_te", self.p_te.to_string());
        put("p_te_u", self.p_te_u.to_string());
        put("tue_enabled", self.tue_enabled.to_string());
        put("sc_tue_serving", self.sc_tue_serving.as_str().to_string());
        if let Some((x, y)) = self.bs_position {
            put("bs_x", x.to_string());
            put("bs_y", y.to_string());
        }
        put("start_x", self.uav_start.0.to_string());
        put("start_y", self.uav_start.1.to_string());
        put("dest_x", self.uav_dest.0.to_string());
        put("dest_y", self.uav_dest.1.to_string());
        put("warmup_slots", self.warmup_slots.to_string());
        put("se_draws", self.se_draws.to_string());
        put("rng_seed", self.rng_seed.to_string());
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_reference_scenario() {
        let cfg = ScenarioConfig::default();
        assert_eq!(cfg.n_aps, 20);
        assert!((cfg.d_min() - 0.04).abs() < 1e-15);
        assert!((cfg.tau_e() - 99.5).abs() < 1e-12);
        assert!((cfg.p_d_sc() - 20_000.0).abs() < 1e-9);
        assert!((cfg.sigma2 - 10f64.powf(-9.6)).abs() < 1e-22);
        cfg.validate().unwrap();
    }

    #[test]
    fn parses_db_keys_and_comments() {
        let text = "# reference\nbeta0_db = -40\nsigma2_dbm = -96  # noise\np_d_cf_dbm = 30\np0_pilot_dbm = 1\nL = 10\n\nkappa=0.9\n";
        let cfg = ScenarioConfig::from_kv_str(text).unwrap();
        assert!((cfg.beta0 - 1e-4).abs() < 1e-18);
        assert!((cfg.p_d_cf - 1000.0).abs() < 1e-9);
        assert!((cfg.p0_pilot - 10f64.powf(0.1)).abs() < 1e-12);
        assert_eq!(cfg.n_aps, 10);
        assert_eq!(cfg.kappa, 0.9);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ScenarioConfig::from_kv_str("rho = 1.5").is_err());
        assert!(ScenarioConfig::from_kv_str("kappa = -0.1").is_err());
        assert!(ScenarioConfig::from_kv_str("bogus = 1").is_err());
        assert!(ScenarioConfig::from_kv_str("rho 0.3").is_err());
        assert!(ScenarioConfig::from_kv_str("v_hor = 0").is_err());
    }

    #[test]
    fn echo_round_trips() {
        let mut cfg = ScenarioConfig::default();
        cfg.set("tue_enabled", "true").unwrap();
        cfg.set("bs_x", "10").unwrap();
        let back = ScenarioConfig::from_kv_str(&cfg.to_kv_string()).unwrap();
        assert!(back.tue_enabled);
        assert_eq!(back.bs_position, Some((10.0, 50.0)));
        assert!((back.beta0 - cfg.beta0).abs() < 1e-18);
    }
}
