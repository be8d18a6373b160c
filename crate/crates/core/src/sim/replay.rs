//! Plan on day-ahead prices, settle on real-time prices.

use serde::{Deserialize, Serialize};

use super::schedule::FleetSchedule;
use super::scenario::{plan, SolveRecord};
use crate::data::{PricePanel, TravelTimeTable};
use crate::error::SimError;
use crate::fleet::{FleetConfig, Location};
use crate::model::{evaluate_cost, BuildMode};
use crate::solver::MilpLimits;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplayDay {
    pub day: usize,
    /// Cost of the plan under the day-ahead prices.
    pub planned: f64,
    /// Cost of the same plan under the real-time prices.
    pub settled: f64,
    /// `settled - planned`.
    pub delta: f64,
    /// Grid energy charged minus discharged, kWh.
    pub net_charged_kwh: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReplayReport {
    pub days: Vec<ReplayDay>,
    pub planned: f64,
    pub settled: f64,
    pub delta: f64,
    pub solves: Vec<SolveRecord>,
    #[serde(skip)]
    pub schedule: FleetSchedule,
}

/// Day-by-day cost of `schedule` under `panel`.
fn daily_costs(schedule: &FleetSchedule, panel: &PricePanel, steps_per_day: usize) -> Result<Vec<f64>, SimError> {
    let days = schedule.steps() / steps_per_day;
    (0..days)
        .map(|d| evaluate_cost(&slice(schedule, d * steps_per_day, steps_per_day), &panel.day(d, steps_per_day)))
        .collect()
}

fn slice(schedule: &FleetSchedule, start: usize, len: usize) -> FleetSchedule {
    let r = start..start + len;
    FleetSchedule {
        dt_hours: schedule.dt_hours,
        vehicles: schedule
            .vehicles
            .iter()
            .map(|v| super::schedule::VehicleSchedule {
                vehicle_id: v.vehicle_id,
                ind: v.ind[r.clone()].to_vec(),
                charge_kw: v.charge_kw[r.clone()].to_vec(),
                discharge_kw: v.discharge_kw[r.clone()].to_vec(),
                soc_kwh: v.soc_kwh[r.clone()].to_vec(),
            })
            .collect(),
    }
}

/// Spatial plan on `day_ahead`, settled on `real_time`.
pub fn forecast_replay(
    config: &FleetConfig,
    day_ahead: &PricePanel,
    real_time: &PricePanel,
    travel: &TravelTimeTable,
    limits: &MilpLimits,
) -> Result<ReplayReport, SimError> {
    if day_ahead.len() != real_time.len() {
        return Err(SimError::Dimension(format!(
            "day-ahead spans {} steps, real-time {}",
            day_ahead.len(),
            real_time.len()
        )));
    }
    let p = plan(config, day_ahead, travel, BuildMode::Spatial, limits)?;
    let spd = config.horizon.steps_per_day;
    let planned = daily_costs(&p.schedule, day_ahead, spd)?;
    let settled = daily_costs(&p.schedule, real_time, spd)?;
    let dt = p.schedule.dt_hours;
    let days: Vec<ReplayDay> = planned
        .iter()
        .zip(&settled)
        .enumerate()
        .map(|(day, (&planned, &settled))| {
            let mut net = 0.0;
            for v in &p.schedule.vehicles {
                for t in day * spd..(day + 1) * spd {
                    for l in Location::ALL {
                        net += (v.charge_kw[t][l.index()] - v.discharge_kw[t][l.index()]) * dt;
                    }
                }
            }
            ReplayDay { day, planned, settled, delta: settled - planned, net_charged_kwh: net }
        })
        .collect();
    Ok(ReplayReport {
        planned: days.iter().map(|d| d.planned).sum(),
        settled: days.iter().map(|d| d.settled).sum(),
        delta: days.iter().map(|d| d.delta).sum(),
        days,
        solves: p.solves,
        schedule: p.schedule,
    })
}
