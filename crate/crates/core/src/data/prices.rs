//! Zonal price panels, scenario sets, and the price CSV loader.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use chrono::{DateTime, NaiveDateTime};
use serde::{Deserialize, Serialize};

use crate::error::DataError;
use crate::fleet::{Horizon, Location};

/// One location's price trace in $/kWh.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PriceSeries {
    pub location: Location,
    pub values: Vec<f64>,
}

/// Prices for all three locations over a common horizon, in $/kWh.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PricePanel {
    values: [Vec<f64>; 3],
}

impl PricePanel {
    pub fn new(values: [Vec<f64>; 3]) -> Result<Self, DataError> {
        let len = values[0].len();
        if values.iter().any(|v| v.len() != len) {
            return Err(DataError::Shape("price series differ in length".into()));
        }
        if values.iter().flatten().any(|p| !p.is_finite()) {
            return Err(DataError::Shape("price series contain non-finite values".into()));
        }
        Ok(Self { values })
    }

    pub fn from_series(series: [PriceSeries; 3]) -> Result<Self, DataError> {
        for (i, s) in series.iter().enumerate() {
            if s.location.index() != i {
                return Err(DataError::Shape("series must be ordered A, B, C".into()));
            }
        }
        let [a, b, c] = series;
        Self::new([a.values, b.values, c.values])
    }

    /// The same price at every location and step.
    pub fn flat(len: usize, price: f64) -> Self {
        Self { values: [vec![price; len], vec![price; len], vec![price; len]] }
    }

    pub fn len(&self) -> usize {
        self.values[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn series(&self, loc: Location) -> &[f64] {
        &self.values[loc.index()]
    }

    pub fn price(&self, loc: Location, step: usize) -> f64 {
        self.values[loc.index()][step]
    }

    pub fn into_values(self) -> [Vec<f64>; 3] {
        self.values
    }

    /// Steps `[start, start + len)`.
    pub fn window(&self, start: usize, len: usize) -> PricePanel {
        PricePanel { values: self.values.clone().map(|v| v[start..start + len].to_vec()) }
    }

    pub fn day(&self, day: usize, steps_per_day: usize) -> PricePanel {
        self.window(day * steps_per_day, steps_per_day)
    }

    /// Apply `f(location, step, price)` to every entry.
    pub fn map(&self, mut f: impl FnMut(Location, usize, f64) -> f64) -> PricePanel {
        let mut values = self.values.clone();
        for loc in Location::ALL {
            for (t, p) in values[loc.index()].iter_mut().enumerate() {
                *p = f(loc, t, *p);
            }
        }
        PricePanel { values }
    }
}

/// Equally weighted price realisations sharing one horizon.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSet {
    scenarios: Vec<PricePanel>,
}

impl ScenarioSet {
    pub fn new(scenarios: Vec<PricePanel>) -> Result<Self, DataError> {
        let first = scenarios
            .first()
            .ok_or_else(|| DataError::Shape("scenario set is empty".into()))?;
        if scenarios.iter().any(|s| s.len() != first.len()) {
            return Err(DataError::Shape("scenarios differ in horizon length".into()));
        }
        Ok(Self { scenarios })
    }

    pub fn single(panel: PricePanel) -> Self {
        Self { scenarios: vec![panel] }
    }

    /// One scenario per historical day of `history`, each `steps_per_day` long.
    pub fn from_history(history: &PricePanel, steps_per_day: usize) -> Result<Self, DataError> {
        if steps_per_day == 0 || history.len() < steps_per_day {
            return Err(DataError::Shape("history shorter than one day".into()));
        }
        let days = history.len() / steps_per_day;
        Self::new((0..days).map(|d| history.day(d, steps_per_day)).collect())
    }

    pub fn len(&self) -> usize {
        self.scenarios.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scenarios.is_empty()
    }

    pub fn horizon_len(&self) -> usize {
        self.scenarios[0].len()
    }

    pub fn scenarios(&self) -> &[PricePanel] {
        &self.scenarios
    }

    pub fn weight(&self) -> f64 {
        1.0 / self.scenarios.len() as f64
    }

    pub fn window(&self, start: usize, len: usize) -> ScenarioSet {
        ScenarioSet { scenarios: self.scenarios.iter().map(|s| s.window(start, len)).collect() }
    }
}

/// Per-location, per-step arithmetic mean over the scenarios.
///
/// The sum starts from the first scenario so a single-scenario set returns
/// its panel bit for bit.
pub fn mean_panel(set: &ScenarioSet) -> PricePanel {
    let k = set.len();
    let mut iter = set.scenarios.iter();
    let mut acc = iter.next().expect("scenario set is non-empty").values.clone();
    for panel in iter {
        for (sum, vals) in acc.iter_mut().zip(&panel.values) {
            for (s, v) in sum.iter_mut().zip(vals) {
                *s += v;
            }
        }
    }
    if k > 1 {
        let k = k as f64;
        for v in acc.iter_mut().flatten() {
            *v /= k;
        }
    }
    PricePanel { values: acc }
}

/// Collapse the spatial dimension: each step's price becomes the cross-location mean.
pub fn time_only_panel(panel: &PricePanel) -> PricePanel {
    let [a, b, c] = &panel.values;
    let collapsed: Vec<f64> = a
        .iter()
        .zip(b)
        .zip(c)
        .map(|((&a, &b), &c)| if a == b && b == c { a } else { (a + b + c) / 3.0 })
        .collect();
    PricePanel { values: [collapsed.clone(), collapsed.clone(), collapsed] }
}

pub(crate) fn parse_timestamp(raw: &str) -> Option<NaiveDateTime> {
    let raw = raw.trim();
    if let Ok(dt) = DateTime::parse_from_rfc3339(raw) {
        return Some(dt.naive_utc());
    }
    ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M", "%Y-%m-%d %H:%M"]
        .iter()
        .find_map(|fmt| NaiveDateTime::parse_from_str(raw, fmt).ok())
}

pub(crate) fn format_timestamp(ts: NaiveDateTime) -> String {
    ts.format("%Y-%m-%dT%H:%M:%S").to_string()
}

#[derive(Deserialize)]
struct PriceRow {
    timestamp: String,
    zone: String,
    price_per_mwh: String,
}

/// Load a `timestamp,zone,price_per_mwh` file into a panel covering `horizon`.
///
/// Zones are matched against `zone_names` (indexed A, B, C); single-letter ids
/// are accepted too. Prices are converted from $/MWh to $/kWh. When the file
/// is sampled more finely than the horizon step (and the step is a whole
/// multiple of it) consecutive intervals are averaged. Intervals past the
/// horizon are ignored.
pub fn load_prices<R: Read>(
    reader: R,
    source_name: &str,
    horizon: &Horizon,
    zone_names: &[String; 3],
) -> Result<PricePanel, DataError> {
    let src = || source_name.to_string();
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut by_zone: [BTreeMap<i64, f64>; 3] = Default::default();
    for (i, row) in rdr.deserialize::<PriceRow>().enumerate() {
        let line = i + 2;
        let row = row?;
        let loc = Location::ALL
            .into_iter()
            .find(|l| zone_names[l.index()] == row.zone)
            .or_else(|| row.zone.parse().ok())
            .ok_or_else(|| DataError::UnknownZone { source_name: src(), zone: row.zone.clone(), line })?;
        let ts = parse_timestamp(&row.timestamp)
            .ok_or_else(|| DataError::BadTimestamp { source_name: src(), value: row.timestamp.clone(), line })?;
        let price: f64 = row
            .price_per_mwh
            .parse()
            .ok()
            .filter(|p: &f64| p.is_finite())
            .ok_or_else(|| DataError::BadPrice { source_name: src(), value: row.price_per_mwh.clone(), line })?;
        if by_zone[loc.index()].insert(ts.and_utc().timestamp(), price / 1000.0).is_some() {
            return Err(DataError::Duplicate {
                source_name: src(),
                zone: zone_names[loc.index()].clone(),
                timestamp: format_timestamp(ts),
            });
        }
    }

    for loc in Location::ALL {
        if by_zone[loc.index()].is_empty() {
            return Err(DataError::Malformed {
                source_name: src(),
                message: format!("no rows for zone '{}'", zone_names[loc.index()]),
            });
        }
    }
    let start = by_zone.iter().filter_map(|m| m.keys().next().copied()).min().unwrap();
    let native = by_zone
        .iter()
        .flat_map(|m| m.keys().zip(m.keys().skip(1)).map(|(a, b)| b - a))
        .min();
    let step_secs = (horizon.dt_hours * 3600.0).round() as i64;
    // A file with one row per zone can only describe a one-step horizon.
    let native = native.unwrap_or(step_secs);
    if native <= 0 || step_secs % native != 0 {
        return Err(DataError::Malformed {
            source_name: src(),
            message: format!("sampling interval of {native} s does not divide the {step_secs} s step"),
        });
    }
    let per_step = (step_secs / native) as usize;
    let total = horizon.total_steps();

    let mut values: [Vec<f64>; 3] = Default::default();
    for loc in Location::ALL {
        let zone = &by_zone[loc.index()];
        let mut series = Vec::with_capacity(total);
        for t in 0..total {
            let mut sum = 0.0;
            for j in 0..per_step {
                let ts = start + ((t * per_step + j) as i64) * native;
                match zone.get(&ts) {
                    Some(p) => sum += p,
                    None => {
                        let stamp = DateTime::from_timestamp(ts, 0).unwrap().naive_utc();
                        return Err(DataError::MissingInterval {
                            source_name: src(),
                            zone: zone_names[loc.index()].clone(),
                            timestamp: format_timestamp(stamp),
                        });
                    }
                }
            }
            series.push(if per_step == 1 { sum } else { sum / per_step as f64 });
        }
        values[loc.index()] = series;
    }
    PricePanel::new(values)
}

pub fn load_prices_file(path: &Path, horizon: &Horizon, zone_names: &[String; 3]) -> Result<PricePanel, DataError> {
    let file = std::fs::File::open(path)?;
    load_prices(file, &path.display().to_string(), horizon, zone_names)
}

/// Write a panel in the loader's CSV layout, one row per zone and interval.
pub fn write_prices<W: std::io::Write>(
    panel: &PricePanel,
    start: NaiveDateTime,
    dt_hours: f64,
    zone_names: &[String; 3],
    out: W,
) -> Result<(), DataError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["timestamp", "zone", "price_per_mwh"])?;
    let step = chrono::Duration::seconds((dt_hours * 3600.0).round() as i64);
    for t in 0..panel.len() {
        let ts = format_timestamp(start + step * t as i32);
        for loc in Location::ALL {
            let mwh = panel.price(loc, t) * 1000.0;
            w.write_record([ts.as_str(), zone_names[loc.index()].as_str(), &format!("{mwh:.4}")])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names() -> [String; 3] {
        ["San Antonio", "San Marcos", "Austin"].map(String::from)
    }

    fn csv_for(steps: usize, skip: Option<usize>, minutes: i64) -> String {
        let mut s = String::from("timestamp,zone,price_per_mwh\n");
        let start = parse_timestamp("2022-08-01T00:00:00").unwrap();
        for t in 0..steps {
            if Some(t) == skip {
                continue;
            }
            let ts = format_timestamp(start + chrono::Duration::minutes(minutes * t as i64));
            for (z, name) in names().iter().enumerate() {
                s.push_str(&format!("{ts},{name},{}\n", 20.0 + t as f64 + 10.0 * z as f64));
            }
        }
        s
    }

    #[test]
    fn week_of_quarter_hours() {
        let h = Horizon::new(96, 7, 0.25);
        let panel = load_prices(csv_for(672, None, 15).as_bytes(), "week", &h, &names()).unwrap();
        assert_eq!(panel.len(), 672);
        assert!((panel.price(Location::B, 3) - 0.033).abs() < 1e-15);
    }

    #[test]
    fn converts_mwh_to_kwh() {
        let text = "timestamp,zone,price_per_mwh\n\
                    2022-01-01T00:00:00,A,50\n2022-01-01T00:00:00,B,50\n2022-01-01T00:00:00,C,-12.5\n";
        let panel = load_prices(text.as_bytes(), "one", &Horizon::new(1, 1, 0.25), &names()).unwrap();
        assert_eq!(panel.price(Location::A, 0), 0.05);
        assert_eq!(panel.price(Location::C, 0), -0.0125);
    }

    #[test]
    fn gap_is_reported_with_its_timestamp() {
        let h = Horizon::new(8, 1, 0.25);
        let err = load_prices(csv_for(8, Some(5), 15).as_bytes(), "gap", &h, &names()).unwrap_err();
        let msg = err.to_string();
        assert!(matches!(err, DataError::MissingInterval { .. }));
        assert!(msg.contains("2022-08-01T01:15:00"), "{msg}");
    }

    #[test]
    fn short_file_is_a_gap() {
        let h = Horizon::new(8, 1, 0.25);
        let err = load_prices(csv_for(6, None, 15).as_bytes(), "short", &h, &names()).unwrap_err();
        assert!(err.to_string().contains("2022-08-01T01:30:00"), "{err}");
    }

    #[test]
    fn unknown_zone_and_bad_price() {
        let h = Horizon::new(1, 1, 0.25);
        let text = "timestamp,zone,price_per_mwh\n2022-01-01T00:00:00,Houston,50\n";
        assert!(matches!(
            load_prices(text.as_bytes(), "x", &h, &names()),
            Err(DataError::UnknownZone { line: 2, .. })
        ));
        let text = "timestamp,zone,price_per_mwh\n2022-01-01T00:00:00,A,cheap\n";
        assert!(matches!(load_prices(text.as_bytes(), "x", &h, &names()), Err(DataError::BadPrice { .. })));
    }

    #[test]
    fn quarter_hours_average_into_hours() {
        let h = Horizon::new(2, 1, 1.0);
        let panel = load_prices(csv_for(8, None, 15).as_bytes(), "agg", &h, &names()).unwrap();
        assert_eq!(panel.len(), 2);
        assert!((panel.price(Location::A, 0) - 0.0215).abs() < 1e-15);
        assert!((panel.price(Location::A, 1) - 0.0255).abs() < 1e-15);
    }

    #[test]
    fn writer_output_reloads() {
        let panel = PricePanel::new([vec![0.01, -0.02], vec![0.03, 0.04], vec![0.5, 0.25]]).unwrap();
        let mut buf = Vec::new();
        let start = parse_timestamp("2022-01-01 00:00").unwrap();
        write_prices(&panel, start, 0.25, &names(), &mut buf).unwrap();
        let back = load_prices(buf.as_slice(), "rt", &Horizon::new(2, 1, 0.25), &names()).unwrap();
        assert_eq!(back, panel);
    }

    #[test]
    fn mean_of_one_is_identity() {
        let p = PricePanel::new([vec![0.1, -0.0], vec![0.3, 0.7], vec![1e-3, 2.0]]).unwrap();
        let m = mean_panel(&ScenarioSet::single(p.clone()));
        assert_eq!(m, p);
        assert!(m.price(Location::A, 1).is_sign_negative());
    }

    #[test]
    fn mean_of_opposites_is_zero() {
        let p = PricePanel::new([vec![0.1, 0.2], vec![-0.3, 0.7], vec![0.0, 2.0]]).unwrap();
        let neg = p.map(|_, _, v| -v);
        let m = mean_panel(&ScenarioSet::new(vec![p, neg]).unwrap());
        assert!(m.into_values().iter().flatten().all(|&v| v == 0.0));
    }

    #[test]
    fn mean_of_three() {
        let set = ScenarioSet::new(vec![
            PricePanel::flat(1, 0.02),
            PricePanel::flat(1, 0.04),
            PricePanel::flat(1, 0.06),
        ])
        .unwrap();
        assert!((mean_panel(&set).price(Location::C, 0) - 0.04).abs() < 1e-15);
    }

    #[test]
    fn time_only_collapses_space() {
        let p = PricePanel::new([vec![0.03, 0.00], vec![0.03, 0.03], vec![0.03, 0.06]]).unwrap();
        let t = time_only_panel(&p);
        for loc in Location::ALL {
            assert_eq!(t.price(loc, 0), 0.03);
            assert!((t.price(loc, 1) - 0.03).abs() < 1e-15);
        }
        assert_eq!(time_only_panel(&t), t);
    }

    #[test]
    fn history_slices_into_days() {
        let p = PricePanel::new([(0..8).map(f64::from).collect(), vec![0.0; 8], vec![1.0; 8]]).unwrap();
        let set = ScenarioSet::from_history(&p, 4).unwrap();
        assert_eq!(set.len(), 2);
        assert_eq!(set.scenarios()[1].series(Location::A), &[4.0, 5.0, 6.0, 7.0]);
        assert!((set.weight() - 0.5).abs() < 1e-15);
    }
}
