//! Travel durations between the three sites, in whole timesteps.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::DataError;
use crate::fleet::{Distances, FleetConfig, Horizon, Location};

/// Average highway speed used to derive default travel times.
pub const DEFAULT_SPEED_MPH: f64 = 60.0;

/// Timesteps needed for a trip of `minutes`, rounded up and at least one.
pub fn minutes_to_steps(minutes: f64, dt_hours: f64) -> u32 {
    let exact = minutes / (60.0 * dt_hours);
    // Guard against 30/15 landing a hair above 2.
    let steps = (exact - 1e-9).ceil();
    steps.max(1.0) as u32
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TravelTimeTable {
    steps_per_day: usize,
    /// Constant fallback per ordered pair; diagonal unused.
    defaults: [[u32; 3]; 3],
    /// Departure-time-of-day profiles for pairs with traffic data.
    profiles: BTreeMap<(Location, Location), Vec<u32>>,
}

impl TravelTimeTable {
    /// Same duration for every pair and departure time.
    pub fn constant(steps: u32, horizon: &Horizon) -> Self {
        let s = steps.max(1);
        Self { steps_per_day: horizon.steps_per_day, defaults: [[s; 3]; 3], profiles: BTreeMap::new() }
    }

    /// Constant durations from road distance at [`DEFAULT_SPEED_MPH`].
    pub fn from_distances(distances: &Distances, horizon: &Horizon) -> Self {
        let mut defaults = [[1; 3]; 3];
        for from in Location::ALL {
            for to in Location::ALL {
                if from != to {
                    let minutes = distances.get(from, to) / DEFAULT_SPEED_MPH * 60.0;
                    defaults[from.index()][to.index()] = minutes_to_steps(minutes, horizon.dt_hours);
                }
            }
        }
        Self { steps_per_day: horizon.steps_per_day, defaults, profiles: BTreeMap::new() }
    }

    /// Timesteps needed to go from `from` to `to` when leaving after `step`.
    ///
    /// `step` is taken modulo the day length, so the same table serves any day.
    pub fn steps(&self, from: Location, to: Location, step: usize) -> u32 {
        match self.profiles.get(&(from, to)) {
            Some(profile) => profile[step % self.steps_per_day],
            None => self.defaults[from.index()][to.index()],
        }
    }

    pub fn default_steps(&self, from: Location, to: Location) -> u32 {
        self.defaults[from.index()][to.index()]
    }

    pub fn steps_per_day(&self) -> usize {
        self.steps_per_day
    }

    pub fn has_profile(&self, from: Location, to: Location) -> bool {
        self.profiles.contains_key(&(from, to))
    }
}

#[derive(Deserialize)]
struct TrafficRow {
    origin: String,
    destination: String,
    depart_hhmm: String,
    minutes: f64,
}

fn parse_hhmm(raw: &str) -> Option<u32> {
    let raw = raw.trim();
    let (h, m) = match raw.split_once(':') {
        Some((h, m)) => (h, m),
        None if raw.len() >= 3 => raw.split_at(raw.len() - 2),
        None => return None,
    };
    let (h, m): (u32, u32) = (h.parse().ok()?, m.parse().ok()?);
    (h < 24 && m < 60).then_some(h * 60 + m)
}

/// Load typical-traffic rows (`origin,destination,depart_hhmm,minutes`).
///
/// Each ordered pair with data gets a piecewise-constant profile over the
/// day: a departure uses the latest row at or before its time of day, wrapping
/// to the day's last row before the first entry. Pairs without rows fall back
/// to the distance-derived constant.
pub fn load_travel_times<R: Read>(
    reader: R,
    source_name: &str,
    config: &FleetConfig,
) -> Result<TravelTimeTable, DataError> {
    let horizon = &config.horizon;
    let mut table = TravelTimeTable::from_distances(&config.distances_mi, horizon);
    let mut rows: BTreeMap<(Location, Location), BTreeMap<u32, f64>> = BTreeMap::new();
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let malformed = |message: String| DataError::Malformed { source_name: source_name.to_string(), message };
    for (i, row) in rdr.deserialize::<TrafficRow>().enumerate() {
        let line = i + 2;
        let row = row?;
        let from = config
            .location_by_name(&row.origin)
            .ok_or_else(|| malformed(format!("unknown origin '{}' on line {line}", row.origin)))?;
        let to = config
            .location_by_name(&row.destination)
            .ok_or_else(|| malformed(format!("unknown destination '{}' on line {line}", row.destination)))?;
        if from == to {
            return Err(malformed(format!("origin equals destination on line {line}")));
        }
        let tod = parse_hhmm(&row.depart_hhmm)
            .ok_or_else(|| malformed(format!("bad departure time '{}' on line {line}", row.depart_hhmm)))?;
        if !(row.minutes.is_finite() && row.minutes > 0.0) {
            return Err(DataError::NonPositiveDuration {
                source_name: source_name.to_string(),
                minutes: row.minutes,
                line,
            });
        }
        rows.entry((from, to)).or_default().insert(tod, row.minutes);
    }
    for (pair, by_time) in rows {
        let last = *by_time.values().next_back().expect("non-empty");
        let profile = (0..horizon.steps_per_day)
            .map(|s| {
                let tod = (s as f64 * horizon.dt_hours * 60.0).round() as u32 % (24 * 60);
                let minutes = by_time.range(..=tod).next_back().map_or(last, |(_, m)| *m);
                minutes_to_steps(minutes, horizon.dt_hours)
            })
            .collect();
        table.profiles.insert(pair, profile);
    }
    Ok(table)
}

pub fn load_travel_times_file(path: &Path, config: &FleetConfig) -> Result<TravelTimeTable, DataError> {
    let file = std::fs::File::open(path)?;
    load_travel_times(file, &path.display().to_string(), config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fleet::sample_fleet;

    fn config() -> FleetConfig {
        FleetConfig::new(sample_fleet(1, 2), Horizon::new(96, 1, 0.25))
    }

    #[test]
    fn distance_defaults_round_up() {
        let t = TravelTimeTable::from_distances(&Distances::default(), &Horizon::default());
        // San Marcos - Austin, 31 mi at 60 mi/h over 15-minute steps.
        assert_eq!(t.steps(Location::B, Location::C, 0), 3);
        assert_eq!(t.steps(Location::C, Location::B, 50), 3);
        assert_eq!(t.steps(Location::A, Location::B, 0), 4);
        assert_eq!(t.steps(Location::A, Location::C, 0), 6);
    }

    #[test]
    fn short_trip_takes_one_step() {
        assert_eq!(minutes_to_steps(14.0, 0.25), 1);
        assert_eq!(minutes_to_steps(30.0, 0.25), 2);
        assert_eq!(minutes_to_steps(30.5, 0.25), 3);
    }

    #[test]
    fn profile_follows_departure_time() {
        let text = "origin,destination,depart_hhmm,minutes\n\
                    A,B,07:00,75\nA,B,09:00,50\nSan Marcos,Austin,0000,14\n";
        let t = load_travel_times(text.as_bytes(), "traffic", &config()).unwrap();
        // Before 07:00 wraps to the 09:00 entry.
        assert_eq!(t.steps(Location::A, Location::B, 0), 4);
        assert_eq!(t.steps(Location::A, Location::B, 28), 5);
        assert_eq!(t.steps(Location::A, Location::B, 36), 4);
        assert_eq!(t.steps(Location::B, Location::C, 60), 1);
        // Reverse direction has no rows and keeps the default.
        assert!(!t.has_profile(Location::B, Location::A));
        assert_eq!(t.steps(Location::B, Location::A, 28), 4);
    }

    #[test]
    fn rejects_non_positive_durations() {
        let text = "origin,destination,depart_hhmm,minutes\nA,B,07:00,0\n";
        assert!(matches!(
            load_travel_times(text.as_bytes(), "traffic", &config()),
            Err(DataError::NonPositiveDuration { line: 2, .. })
        ));
    }
}
