//! Fleet, charger, horizon and delivery configuration.
//!
//! Configurations are written as TOML documents:
//!
//! ```toml
//! [locations]
//! A = "San Antonio"
//! B = "San Marcos"
//! C = "Austin"
//!
//! [horizon]
//! steps_per_day = 96
//! num_days = 7
//! dt_hours = 0.25
//!
//! [charger]
//! p_c_max_kw = 150.0
//! p_d_max_kw = 150.0
//!
//! [delivery]
//! min_visits = { A = 0, B = 6, C = 6 }
//! window = "per_day"
//!
//! [distances]
//! A-B = 50.0
//! A-C = 81.0
//! B-C = 31.0
//!
//! [[vehicle]]
//! id = 0
//! capacity_kwh = 700.0
//! e_init_kwh = 450.0
//! eta_c = 0.97
//! eta_d = 0.97
//! p_drive_kw = 70.0
//! home = "A"
//! ```
//!
//! `e_min_kwh` defaults to 10% of capacity and `e_final_kwh` to `e_init_kwh`.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::ConfigError;

/// One of the three sites a vehicle can be parked (and charge) at.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Location {
    A,
    B,
    C,
}

impl Location {
    pub const ALL: [Location; 3] = [Location::A, Location::B, Location::C];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Location> {
        Self::ALL.get(i).copied()
    }

    pub fn letter(self) -> &'static str {
        match self {
            Location::A => "A",
            Location::B => "B",
            Location::C => "C",
        }
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.letter())
    }
}

impl FromStr for Location {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "A" | "a" => Ok(Location::A),
            "B" | "b" => Ok(Location::B),
            "C" | "c" => Ok(Location::C),
            other => Err(format!("unknown location '{other}'")),
        }
    }
}

/// Discretisation of the planning window.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Horizon {
    pub steps_per_day: usize,
    pub num_days: usize,
    pub dt_hours: f64,
}

impl Horizon {
    pub fn new(steps_per_day: usize, num_days: usize, dt_hours: f64) -> Self {
        Self { steps_per_day, num_days, dt_hours }
    }

    pub fn total_steps(&self) -> usize {
        self.steps_per_day * self.num_days
    }

    pub fn day_of(&self, step: usize) -> usize {
        step / self.steps_per_day
    }

    /// Horizon covering a single day with the same step length.
    pub fn single_day(&self) -> Horizon {
        Horizon { num_days: 1, ..*self }
    }

    fn validate(&self) -> Result<(), ConfigError> {
        if self.steps_per_day == 0 {
            return Err(ConfigError::invalid("steps_per_day must be positive"));
        }
        if self.num_days == 0 {
            return Err(ConfigError::invalid("num_days must be positive"));
        }
        if !(self.dt_hours.is_finite() && self.dt_hours > 0.0) {
            return Err(ConfigError::invalid("dt_hours must be positive"));
        }
        Ok(())
    }
}

impl Default for Horizon {
    fn default() -> Self {
        Self { steps_per_day: 96, num_days: 1, dt_hours: 0.25 }
    }
}

/// Per-truck battery and drivetrain parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VehicleSpec {
    pub id: u32,
    pub capacity_kwh: f64,
    pub e_min_kwh: f64,
    pub e_init_kwh: f64,
    pub e_final_kwh: f64,
    pub eta_c: f64,
    pub eta_d: f64,
    pub p_drive_kw: f64,
    pub home: Location,
}

impl VehicleSpec {
    /// Vehicle with the default 10% SOC floor and `e_final = e_init`.
    pub fn new(id: u32, capacity_kwh: f64, e_init_kwh: f64, roundtrip: f64, p_drive_kw: f64, home: Location) -> Self {
        let eta = roundtrip.sqrt();
        Self {
            id,
            capacity_kwh,
            e_min_kwh: 0.1 * capacity_kwh,
            e_init_kwh,
            e_final_kwh: e_init_kwh,
            eta_c: eta,
            eta_d: eta,
            p_drive_kw,
            home,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let id = self.id;
        let finite = [
            self.capacity_kwh,
            self.e_min_kwh,
            self.e_init_kwh,
            self.e_final_kwh,
            self.eta_c,
            self.eta_d,
            self.p_drive_kw,
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(ConfigError::invalid(format!("vehicle {id}: non-finite parameter")));
        }
        if self.e_init_kwh > self.capacity_kwh {
            return Err(ConfigError::invalid(format!("vehicle {id}: initial energy exceeds capacity")));
        }
        if self.e_min_kwh > self.e_init_kwh {
            return Err(ConfigError::invalid(format!("vehicle {id}: initial energy below minimum energy")));
        }
        if self.e_final_kwh > self.capacity_kwh {
            return Err(ConfigError::invalid(format!("vehicle {id}: final energy exceeds capacity")));
        }
        if self.e_min_kwh > self.e_final_kwh {
            return Err(ConfigError::invalid(format!("vehicle {id}: final energy below minimum energy")));
        }
        if self.e_min_kwh < 0.0 {
            return Err(ConfigError::invalid(format!("vehicle {id}: minimum energy is negative")));
        }
        if !(self.eta_c > 0.0 && self.eta_c <= 1.0) {
            return Err(ConfigError::invalid(format!("vehicle {id}: charging efficiency outside (0, 1]")));
        }
        if !(self.eta_d > 0.0 && self.eta_d <= 1.0) {
            return Err(ConfigError::invalid(format!("vehicle {id}: discharging efficiency outside (0, 1]")));
        }
        if self.p_drive_kw < 0.0 {
            return Err(ConfigError::invalid(format!("vehicle {id}: drive power is negative")));
        }
        Ok(())
    }
}

/// Grid-side charger limits, identical at every site.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChargerSpec {
    pub p_c_max_kw: f64,
    pub p_d_max_kw: f64,
}

impl Default for ChargerSpec {
    fn default() -> Self {
        Self { p_c_max_kw: 150.0, p_d_max_kw: 150.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum VisitWindow {
    #[default]
    PerDay,
    WholeHorizon,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
pub struct DeliveryRequirement {
    /// Minimum number of distinct visiting vehicles, indexed by [`Location::index`].
    pub min_visits: [u32; 3],
    pub window: VisitWindow,
}

impl DeliveryRequirement {
    pub fn min_visits(&self, loc: Location) -> u32 {
        self.min_visits[loc.index()]
    }
}

/// Symmetric road distances between the three sites, in miles.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Distances {
    pub ab: f64,
    pub ac: f64,
    pub bc: f64,
}

impl Distances {
    pub fn get(&self, from: Location, to: Location) -> f64 {
        use Location::*;
        match (from, to) {
            (A, B) | (B, A) => self.ab,
            (A, C) | (C, A) => self.ac,
            (B, C) | (C, B) => self.bc,
            _ => 0.0,
        }
    }
}

impl Default for Distances {
    /// San Antonio (A), San Marcos (B), Austin (C).
    fn default() -> Self {
        Self { ab: 50.0, bc: 31.0, ac: 81.0 }
    }
}

/// How the builder encodes the ban on arriving somewhere before a trip could
/// have finished. Both encodings admit exactly the same integer schedules.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TravelRows {
    /// One row per conflicting pair of (location, step) indicators.
    Pairwise,
    /// One row per triple of mutually conflicting indicators at A, B and C,
    /// plus pairwise rows for conflicts no triple covers. Tighter LP bound.
    #[default]
    Clique,
}

pub const DEFAULT_LOCATION_NAMES: [&str; 3] = ["San Antonio", "San Marcos", "Austin"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FleetConfig {
    /// Display and price-zone labels, indexed by [`Location::index`].
    pub location_names: [String; 3],
    pub vehicles: Vec<VehicleSpec>,
    pub charger: ChargerSpec,
    pub horizon: Horizon,
    pub delivery: DeliveryRequirement,
    pub distances_mi: Distances,
    /// Require every vehicle to be back home at the last step of each day.
    pub home_return: bool,
    pub travel_rows: TravelRows,
}

impl FleetConfig {
    pub fn new(vehicles: Vec<VehicleSpec>, horizon: Horizon) -> Self {
        Self {
            location_names: DEFAULT_LOCATION_NAMES.map(String::from),
            vehicles,
            charger: ChargerSpec::default(),
            horizon,
            delivery: DeliveryRequirement::default(),
            distances_mi: Distances::default(),
            home_return: true,
            travel_rows: TravelRows::default(),
        }
    }

    pub fn num_vehicles(&self) -> usize {
        self.vehicles.len()
    }

    pub fn location_name(&self, loc: Location) -> &str {
        &self.location_names[loc.index()]
    }

    /// Resolve a zone label or a bare `A`/`B`/`C` id.
    pub fn location_by_name(&self, name: &str) -> Option<Location> {
        let name = name.trim();
        Location::ALL
            .into_iter()
            .find(|l| self.location_names[l.index()] == name)
            .or_else(|| name.parse().ok())
    }

    /// Whether the week splits into independent single-day problems.
    pub fn days_decouple(&self) -> bool {
        self.home_return && self.delivery.window == VisitWindow::PerDay
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.horizon.validate()?;
        if self.vehicles.is_empty() {
            return Err(ConfigError::invalid("fleet has no vehicles"));
        }
        let mut ids = HashSet::new();
        for v in &self.vehicles {
            if !ids.insert(v.id) {
                return Err(ConfigError::invalid(format!("duplicate vehicle id {}", v.id)));
            }
            v.validate()?;
        }
        let c = &self.charger;
        if !(c.p_c_max_kw.is_finite() && c.p_c_max_kw > 0.0) {
            return Err(ConfigError::invalid("charger p_c_max_kw must be positive"));
        }
        if !(c.p_d_max_kw.is_finite() && c.p_d_max_kw > 0.0) {
            return Err(ConfigError::invalid("charger p_d_max_kw must be positive"));
        }
        let d = &self.distances_mi;
        for (pair, v) in [("A-B", d.ab), ("A-C", d.ac), ("B-C", d.bc)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(ConfigError::invalid(format!("distance {pair} must be positive")));
            }
        }
        let n = self.vehicles.len();
        for loc in Location::ALL {
            let need = self.delivery.min_visits(loc) as usize;
            if need > n {
                return Err(ConfigError::invalid(format!(
                    "min_visits at {loc} ({need}) exceeds fleet size ({n})"
                )));
            }
        }
        let mut names = HashSet::new();
        for name in &self.location_names {
            if name.trim().is_empty() || !names.insert(name.as_str()) {
                return Err(ConfigError::invalid("location names must be unique and non-empty"));
            }
        }
        Ok(())
    }
}

/// Draw `n` trucks from the default parameter ranges.
///
/// Capacity 630 to 770 kWh, round-trip efficiency 0.90 to 1.00 split evenly between
/// charge and discharge, initial energy 420 to 490 kWh and driving draw
/// 63 to 77 kW. All trucks are based at the warehouse (location A).
pub fn sample_fleet(seed: u64, n: usize) -> Vec<VehicleSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let capacity = rng.gen_range(630.0..=770.0);
            let roundtrip = rng.gen_range(0.90..=1.00);
            let e_init = rng.gen_range(420.0..=490.0);
            let p_drive = rng.gen_range(63.0..=77.0);
            VehicleSpec::new(i as u32, capacity, e_init, roundtrip, p_drive, Location::A)
        })
        .collect()
}

// Document layout. Everything optional is resolved in `into_config`.

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    locations: Option<RawLocations>,
    horizon: Horizon,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    charger: Option<ChargerSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    delivery: Option<RawDelivery>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    distances: Option<BTreeMap<String, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    model: Option<RawModel>,
    #[serde(default, rename = "vehicle")]
    vehicles: Vec<RawVehicle>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    #[serde(default)]
    travel_rows: TravelRows,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLocations {
    #[serde(rename = "A")]
    a: String,
    #[serde(rename = "B")]
    b: String,
    #[serde(rename = "C")]
    c: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDelivery {
    #[serde(default)]
    min_visits: BTreeMap<String, u32>,
    #[serde(default)]
    window: VisitWindow,
    #[serde(default = "default_true")]
    home_return: bool,
}

fn default_true() -> bool {
    true
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVehicle {
    id: u32,
    capacity_kwh: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    e_min_kwh: Option<f64>,
    e_init_kwh: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    e_final_kwh: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    roundtrip: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    eta_c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    eta_d: Option<f64>,
    p_drive_kw: f64,
    #[serde(default = "default_home")]
    home: String,
}

fn default_home() -> String {
    "A".to_string()
}

impl RawConfig {
    fn into_config(self) -> Result<FleetConfig, ConfigError> {
        let location_names = match self.locations {
            Some(l) => [l.a, l.b, l.c],
            None => DEFAULT_LOCATION_NAMES.map(String::from),
        };
        let mut cfg = FleetConfig::new(Vec::new(), self.horizon);
        cfg.location_names = location_names;
        if let Some(c) = self.charger {
            cfg.charger = c;
        }
        if let Some(d) = self.delivery {
            for (key, count) in d.min_visits {
                let loc = cfg
                    .location_by_name(&key)
                    .ok_or_else(|| ConfigError::invalid(format!("min_visits: unknown location '{key}'")))?;
                cfg.delivery.min_visits[loc.index()] = count;
            }
            cfg.delivery.window = d.window;
            cfg.home_return = d.home_return;
        }
        if let Some(m) = self.model {
            cfg.travel_rows = m.travel_rows;
        }
        if let Some(dist) = self.distances {
            for (key, miles) in dist {
                let (from, to) = key
                    .split_once('-')
                    .ok_or_else(|| ConfigError::invalid(format!("distance key '{key}' is not of the form X-Y")))?;
                let from = cfg
                    .location_by_name(from)
                    .ok_or_else(|| ConfigError::invalid(format!("distance key '{key}': unknown location")))?;
                let to = cfg
                    .location_by_name(to)
                    .ok_or_else(|| ConfigError::invalid(format!("distance key '{key}': unknown location")))?;
                let slot = match (from.min(to), from.max(to)) {
                    (Location::A, Location::B) => &mut cfg.distances_mi.ab,
                    (Location::A, Location::C) => &mut cfg.distances_mi.ac,
                    (Location::B, Location::C) => &mut cfg.distances_mi.bc,
                    _ => return Err(ConfigError::invalid(format!("distance key '{key}' joins a location to itself"))),
                };
                *slot = miles;
            }
        }
        for raw in self.vehicles {
            let home = cfg
                .location_by_name(&raw.home)
                .ok_or_else(|| ConfigError::invalid(format!("vehicle {}: unknown home '{}'", raw.id, raw.home)))?;
            let split = raw.roundtrip.map(f64::sqrt);
            let eta_c = raw.eta_c.or(split).unwrap_or(1.0);
            let eta_d = raw.eta_d.or(split).unwrap_or(1.0);
            cfg.vehicles.push(VehicleSpec {
                id: raw.id,
                capacity_kwh: raw.capacity_kwh,
                e_min_kwh: raw.e_min_kwh.unwrap_or(0.1 * raw.capacity_kwh),
                e_init_kwh: raw.e_init_kwh,
                e_final_kwh: raw.e_final_kwh.unwrap_or(raw.e_init_kwh),
                eta_c,
                eta_d,
                p_drive_kw: raw.p_drive_kw,
                home,
            });
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn from_config(cfg: &FleetConfig) -> Self {
        let [a, b, c] = cfg.location_names.clone();
        let key = |l: Location| l.letter().to_string();
        RawConfig {
            locations: Some(RawLocations { a, b, c }),
            horizon: cfg.horizon,
            charger: Some(cfg.charger),
            delivery: Some(RawDelivery {
                min_visits: Location::ALL
                    .into_iter()
                    .map(|l| (key(l), cfg.delivery.min_visits(l)))
                    .collect(),
                window: cfg.delivery.window,
                home_return: cfg.home_return,
            }),
            distances: Some(BTreeMap::from([
                ("A-B".to_string(), cfg.distances_mi.ab),
                ("A-C".to_string(), cfg.distances_mi.ac),
                ("B-C".to_string(), cfg.distances_mi.bc),
            ])),
            model: Some(RawModel { travel_rows: cfg.travel_rows }),
            vehicles: cfg
                .vehicles
                .iter()
                .map(|v| RawVehicle {
                    id: v.id,
                    capacity_kwh: v.capacity_kwh,
                    e_min_kwh: Some(v.e_min_kwh),
                    e_init_kwh: v.e_init_kwh,
                    e_final_kwh: Some(v.e_final_kwh),
                    roundtrip: None,
                    eta_c: Some(v.eta_c),
                    eta_d: Some(v.eta_d),
                    p_drive_kw: v.p_drive_kw,
                    home: key(v.home),
                })
                .collect(),
        }
    }
}

/// Parse and validate a TOML fleet document.
pub fn parse_config(text: &str) -> Result<FleetConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let (line, column) = e
            .span()
            .map(|span| line_col(text, span.start))
            .unwrap_or((0, 0));
        ConfigError::Syntax { line, column, message: e.message().to_string() }
    })?;
    raw.into_config()
}

/// Render a configuration as a TOML document that [`parse_config`] reads back unchanged.
pub fn serialize_config(cfg: &FleetConfig) -> String {
    toml::to_string(&RawConfig::from_config(cfg)).expect("config serialises to TOML")
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(before.len(), |nl| before.len() - nl - 1) + 1;
    (line, column)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[horizon]
steps_per_day = 8
num_days = 1
dt_hours = 0.25

[[vehicle]]
id = 7
capacity_kwh = 700.0
e_init_kwh = 450.0
p_drive_kw = 70.0
"#;

    #[test]
    fn minimal_document() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(cfg.num_vehicles(), 1);
        assert_eq!(cfg.horizon.total_steps(), 8);
        let v = &cfg.vehicles[0];
        assert_eq!(v.e_final_kwh, v.e_init_kwh);
        assert!((v.e_min_kwh - 70.0).abs() < 1e-12);
        assert_eq!(v.home, Location::A);
        assert_eq!(cfg.charger, ChargerSpec::default());
        assert_eq!(cfg.distances_mi, Distances::default());
    }

    #[test]
    fn initial_energy_above_capacity_is_rejected() {
        let text = MINIMAL.replace("e_init_kwh = 450.0", "e_init_kwh = 800.0");
        let err = parse_config(&text).unwrap_err();
        assert!(err.to_string().contains("initial energy exceeds capacity"), "{err}");
    }

    #[test]
    fn syntax_error_reports_position() {
        let text = "[horizon]\nsteps_per_day = 8\nnum_days = = 1\n";
        match parse_config(text).unwrap_err() {
            ConfigError::Syntax { line, column, .. } => {
                assert_eq!(line, 3);
                assert!(column > 1);
            }
            other => panic!("expected syntax error, got {other}"),
        }
    }

    #[test]
    fn pigeonhole_delivery_is_rejected() {
        let text = format!("{MINIMAL}\n[delivery]\nmin_visits = {{ B = 2 }}\n");
        let err = parse_config(&text).unwrap_err();
        assert!(err.to_string().contains("exceeds fleet size"), "{err}");
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let second = "\n[[vehicle]]\nid = 7\ncapacity_kwh = 650.0\ne_init_kwh = 430.0\np_drive_kw = 65.0\n";
        let err = parse_config(&format!("{MINIMAL}{second}")).unwrap_err();
        assert!(err.to_string().contains("duplicate vehicle id"), "{err}");
    }

    #[test]
    fn names_resolve_in_keys() {
        let text = format!(
            "{MINIMAL}\n[delivery]\nmin_visits = {{ \"San Marcos\" = 1 }}\n[distances]\n\"Austin-San Marcos\" = 30.0\n"
        );
        let cfg = parse_config(&text).unwrap();
        assert_eq!(cfg.delivery.min_visits(Location::B), 1);
        assert_eq!(cfg.distances_mi.get(Location::C, Location::B), 30.0);
    }

    #[test]
    fn sampled_fleet_respects_ranges() {
        let fleet = sample_fleet(1, 10);
        assert_eq!(fleet.len(), 10);
        for v in &fleet {
            assert!((630.0..=770.0).contains(&v.capacity_kwh));
            assert!((63.0..=77.0).contains(&v.p_drive_kw));
            assert!((420.0..=490.0).contains(&v.e_init_kwh));
            let rt = v.eta_c * v.eta_d;
            assert!((0.90 - 1e-12..=1.0 + 1e-12).contains(&rt));
            assert_eq!(v.eta_c, v.eta_d);
            v.validate().unwrap();
        }
        assert_eq!(fleet, sample_fleet(1, 10));
        assert_ne!(fleet, sample_fleet(2, 10));
    }
}
