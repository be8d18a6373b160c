//! Report files: one JSON document per scenario plus plot-ready CSVs.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::Error;
use crate::fleet::{FleetConfig, Location};
use crate::sim::{Metrics, ReplayReport, ScenarioReport};

const METRIC_HEADER: [&str; 9] = [
    "day",
    "cost_usd",
    "distance_mi",
    "throughput_kwh",
    "charged_kwh",
    "discharged_kwh",
    "driving_kwh",
    "net_grid_kwh",
    "trips",
];

fn metric_record(label: &str, m: &Metrics) -> Vec<String> {
    vec![
        label.to_string(),
        m.cost.to_string(),
        m.distance_mi.to_string(),
        m.throughput_kwh.to_string(),
        m.charged_kwh.to_string(),
        m.discharged_kwh.to_string(),
        m.driving_kwh.to_string(),
        m.net_grid_kwh.to_string(),
        m.trips.to_string(),
    ]
}

fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<(), Error> {
    let mut w = csv::Writer::from_path(path).map_err(crate::error::DataError::from)?;
    w.write_record(header).map_err(crate::error::DataError::from)?;
    for r in rows {
        w.write_record(&r).map_err(crate::error::DataError::from)?;
    }
    w.flush()?;
    Ok(())
}

/// Write `report` under `dir/<scenario>/` and return that directory.
///
/// Files: `report.json`, `schedule.json`, `net_power.csv`,
/// `vehicle_counts.csv`, `soc.csv`, `trips.csv`, `metrics.csv`.
pub fn write_scenario_report(report: &ScenarioReport, config: &FleetConfig, dir: &Path) -> Result<PathBuf, Error> {
    let out = dir.join(report.scenario.name());
    fs::create_dir_all(&out)?;
    fs::write(out.join("report.json"), report.to_json() + "\n")?;
    fs::write(out.join("schedule.json"), report.schedule.to_json() + "\n")?;
    let name = |l: Location| config.location_name(l).to_string();

    write_csv(
        &out.join("net_power.csv"),
        &["step", "location", "kw"],
        report
            .net_power_kw
            .iter()
            .enumerate()
            .flat_map(|(t, p)| Location::ALL.map(|l| vec![t.to_string(), name(l), p[l.index()].to_string()])),
    )?;
    write_csv(
        &out.join("vehicle_counts.csv"),
        &["step", "location", "vehicles"],
        report.vehicle_counts.iter().enumerate().flat_map(|(t, c)| {
            let located = Location::ALL.map(|l| vec![t.to_string(), name(l), c[l.index()].to_string()]);
            located.into_iter().chain([vec![t.to_string(), "driving".into(), c[3].to_string()]])
        }),
    )?;
    write_csv(
        &out.join("soc.csv"),
        &["step", "fleet_soc_kwh"],
        report.fleet_soc_kwh.iter().enumerate().map(|(t, e)| vec![t.to_string(), e.to_string()]),
    )?;
    write_csv(
        &out.join("trips.csv"),
        &["from", "to", "trips"],
        Location::ALL.into_iter().flat_map(|a| {
            Location::ALL
                .into_iter()
                .filter(move |&b| b != a)
                .map(move |b| vec![name(a), name(b), report.trips[a.index()][b.index()].to_string()])
        }),
    )?;
    write_csv(
        &out.join("metrics.csv"),
        &METRIC_HEADER,
        report
            .days
            .iter()
            .map(|d| metric_record(&d.day.to_string(), &d.metrics))
            .chain([metric_record("total", &report.totals)]),
    )?;
    Ok(out)
}

/// Write `replay.json` and `replay.csv` into `dir`.
pub fn write_replay_report(report: &ReplayReport, dir: &Path) -> Result<(), Error> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("replay.json"), serde_json::to_string_pretty(report)? + "\n")?;
    write_csv(
        &dir.join("replay.csv"),
        &["day", "planned_usd", "settled_usd", "delta_usd", "net_charged_kwh"],
        report.days.iter().map(|d| {
            vec![
                d.day.to_string(),
                d.planned.to_string(),
                d.settled.to_string(),
                d.delta.to_string(),
                d.net_charged_kwh.to_string(),
            ]
        }),
    )
}

/// Scenario comparison table: cost, distance and throughput per scenario.
pub fn summary_table(reports: &[ScenarioReport]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:<16} {:>14} {:>14} {:>18}", "scenario", "cost ($)", "distance (mi)", "throughput (kWh)");
    for r in reports {
        let t = &r.totals;
        let _ = writeln!(
            s,
            "{:<16} {:>14.2} {:>14.1} {:>18.1}",
            r.scenario.name(),
            t.cost,
            t.distance_mi,
            t.throughput_kwh
        );
    }
    s
}

/// The summary table as CSV, written to `dir/summary.csv`.
pub fn write_summary(reports: &[ScenarioReport], dir: &Path) -> Result<(), Error> {
    fs::create_dir_all(dir)?;
    write_csv(
        &dir.join("summary.csv"),
        &["scenario", "cost_usd", "distance_mi", "throughput_kwh", "limit_reached"],
        reports.iter().map(|r| {
            vec![
                r.scenario.name().to_string(),
                r.totals.cost.to_string(),
                r.totals.distance_mi.to_string(),
                r.totals.throughput_kwh.to_string(),
                r.limit_reached.to_string(),
            ]
        }),
    )
}
