//! The three operating scenarios, solved day by day.

use serde::{Deserialize, Serialize};

use super::account::{account_days, count_trips, Metrics};
use super::schedule::FleetSchedule;
use crate::data::{mean_panel, time_only_panel, PricePanel, ScenarioSet, TravelTimeTable};
use crate::error::SimError;
use crate::fleet::FleetConfig;
use crate::model::{build_with_panel, BuildMode};
use crate::solver::{solve_milp, MilpLimits, MilpStatus};

/// Recorded in every report so readers know what the throughput column sums.
pub const THROUGHPUT_DEFINITION: &str =
    "sum over vehicles and steps of (eta_c*charge + discharge/eta_d + p_drive*driving)*dt, kWh";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    /// Vehicles move and trade against location-specific prices.
    Spatial,
    /// Vehicles move but plan against the cross-location mean; settled on true prices.
    Counterfactual,
    /// Every vehicle stays at the warehouse (location A).
    Stationary,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [Scenario::Spatial, Scenario::Counterfactual, Scenario::Stationary];

    pub fn mode(self) -> BuildMode {
        match self {
            Scenario::Stationary => BuildMode::Stationary,
            _ => BuildMode::Spatial,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Spatial => "spatial",
            Scenario::Counterfactual => "counterfactual",
            Scenario::Stationary => "stationary",
        }
    }

    /// Prices the scenario plans against, given the true panel.
    pub fn planning_panel(self, truth: &PricePanel) -> PricePanel {
        match self {
            Scenario::Counterfactual => time_only_panel(truth),
            _ => truth.clone(),
        }
    }

    fn planning_description(self) -> &'static str {
        match self {
            Scenario::Counterfactual => "cross-location mean of the scenario-mean prices",
            _ => "scenario-mean prices",
        }
    }
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| format!("unknown scenario '{s}'"))
    }
}

/// Outcome of one MILP solve. `first_day..=last_day` are the days it covered.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveRecord {
    pub first_day: usize,
    pub last_day: usize,
    pub status: MilpStatus,
    /// Objective under the planning prices.
    pub objective: f64,
    pub bound: f64,
    pub gap: f64,
    pub nodes: usize,
    pub limit_reached: bool,
}

/// Solved schedule together with the per-solve records.
#[derive(Clone, Debug)]
pub struct Plan {
    pub schedule: FleetSchedule,
    pub solves: Vec<SolveRecord>,
}

impl Plan {
    pub fn limit_reached(&self) -> bool {
        self.solves.iter().any(|s| s.limit_reached)
    }

    pub fn planned_objective(&self) -> f64 {
        self.solves.iter().map(|s| s.objective).sum()
    }
}

/// Single-day copy of `config` for `day`. Later days start at the
/// end-of-day energy the previous day was required to reach.
pub fn day_config(config: &FleetConfig, day: usize) -> FleetConfig {
    let mut c = config.clone();
    c.horizon = config.horizon.single_day();
    if day > 0 {
        for v in &mut c.vehicles {
            v.e_init_kwh = v.e_final_kwh;
        }
    }
    c
}

/// Optimise the fleet against `planning` prices in `mode`.
///
/// When the days decouple (home return on, per-day visit windows) each day
/// is its own MILP; otherwise the whole horizon is solved at once. Overlapping
/// charge and discharge is cancelled before the schedule is returned.
pub fn plan(
    config: &FleetConfig,
    planning: &PricePanel,
    travel: &TravelTimeTable,
    mode: BuildMode,
    limits: &MilpLimits,
) -> Result<Plan, SimError> {
    let h = &config.horizon;
    if planning.len() != h.total_steps() {
        return Err(SimError::Dimension(format!(
            "prices span {} steps, horizon has {}",
            planning.len(),
            h.total_steps()
        )));
    }
    let chunks: Vec<(usize, usize, FleetConfig)> = if config.days_decouple() {
        (0..h.num_days).map(|d| (d, d, day_config(config, d))).collect()
    } else {
        vec![(0, h.num_days - 1, config.clone())]
    };

    let mut schedules = Vec::with_capacity(chunks.len());
    let mut solves = Vec::with_capacity(chunks.len());
    for (first, last, cfg) in chunks {
        let start = first * h.steps_per_day;
        let len = (last + 1 - first) * h.steps_per_day;
        let panel = planning.window(start, len);
        let instance = build_with_panel::<f64>(&cfg, &panel, travel, mode)?;
        let sol = solve_milp(&instance, limits, None)?;
        match sol.status {
            MilpStatus::Infeasible => return Err(SimError::Infeasible { day: first }),
            MilpStatus::NoIncumbent => return Err(SimError::NoIncumbent { day: first }),
            MilpStatus::Optimal | MilpStatus::Feasible { .. } => {}
        }
        let mut schedule = FleetSchedule::from_solution(&cfg, mode, &sol.x)?;
        schedule.cancel_overlap(&cfg);
        schedules.push(schedule);
        solves.push(SolveRecord {
            first_day: first,
            last_day: last,
            status: sol.status,
            objective: sol.objective,
            bound: sol.bound,
            gap: sol.gap,
            nodes: sol.nodes,
            limit_reached: sol.limit_reached,
        });
    }
    Ok(Plan { schedule: FleetSchedule::concat(schedules)?, solves })
}

/// Metrics of one day of a scenario run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DayReport {
    pub day: usize,
    pub metrics: Metrics,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScenarioReport {
    pub scenario: Scenario,
    pub planning_prices: String,
    pub throughput_definition: String,
    pub solves: Vec<SolveRecord>,
    /// True when any solve stopped on a limit rather than the gap target.
    pub limit_reached: bool,
    pub days: Vec<DayReport>,
    /// Sum of the per-day metrics.
    pub totals: Metrics,
    /// Trips by ordered pair `[from][to]` over locations A, B, C.
    pub trips: [[u32; 3]; 3],
    /// Fleet grid power per step and location, charge minus discharge, kW.
    pub net_power_kw: Vec<[f64; 3]>,
    /// Vehicles per step at A, B, C and driving.
    pub vehicle_counts: Vec<[u32; 4]>,
    /// Fleet stored energy after each step, kWh.
    pub fleet_soc_kwh: Vec<f64>,
    #[serde(skip)]
    pub schedule: FleetSchedule,
}

impl ScenarioReport {
    /// Assemble a report for `schedule`, settled against `truth`.
    pub fn assemble(
        scenario: Scenario,
        plan: Plan,
        config: &FleetConfig,
        travel: &TravelTimeTable,
        truth: &PricePanel,
    ) -> Result<Self, SimError> {
        let Plan { schedule, solves } = plan;
        let per_day = account_days(&schedule, config, travel, truth)?;
        let steps = schedule.steps();
        let mut net_power_kw = vec![[0.0; 3]; steps];
        let mut vehicle_counts = vec![[0u32; 4]; steps];
        let mut fleet_soc_kwh = vec![0.0; steps];
        for v in &schedule.vehicles {
            for t in 0..steps {
                for l in 0..3 {
                    net_power_kw[t][l] += v.charge_kw[t][l] - v.discharge_kw[t][l];
                    vehicle_counts[t][l] += u32::from(v.ind[t][l]);
                }
                vehicle_counts[t][3] += u32::from(v.is_driving(t));
                fleet_soc_kwh[t] += v.soc_kwh[t];
            }
        }
        let days: Vec<DayReport> = per_day.into_iter().enumerate().map(|(day, metrics)| DayReport { day, metrics }).collect();
        Ok(Self {
            scenario,
            planning_prices: scenario.planning_description().to_string(),
            throughput_definition: THROUGHPUT_DEFINITION.to_string(),
            limit_reached: solves.iter().any(|s| s.limit_reached),
            solves,
            totals: Metrics::sum(days.iter().map(|d| &d.metrics)),
            days,
            trips: count_trips(&schedule),
            net_power_kw,
            vehicle_counts,
            fleet_soc_kwh,
            schedule,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Run one scenario. The true prices are the scenario mean; Counterfactual
/// plans on their cross-location mean and is settled on the true prices.
pub fn run_scenario(
    config: &FleetConfig,
    scenarios: &ScenarioSet,
    travel: &TravelTimeTable,
    which: Scenario,
    limits: &MilpLimits,
) -> Result<ScenarioReport, SimError> {
    let truth = mean_panel(scenarios);
    let planning = which.planning_panel(&truth);
    let plan = plan(config, &planning, travel, which.mode(), limits)?;
    ScenarioReport::assemble(which, plan, config, travel, &truth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fleet::{Horizon, Location, VehicleSpec};

    #[test]
    fn flat_prices_leave_the_fleet_idle() {
        let v = VehicleSpec::new(1, 700.0, 450.0, 0.9, 70.0, Location::A);
        let cfg = FleetConfig::new(vec![v], Horizon::new(6, 2, 0.25));
        let travel = TravelTimeTable::constant(1, &cfg.horizon);
        let set = ScenarioSet::single(PricePanel::flat(12, 0.05));
        let rep = run_scenario(&cfg, &set, &travel, Scenario::Stationary, &MilpLimits::default()).unwrap();
        assert_eq!(rep.solves.len(), 2);
        assert!(rep.totals.cost.abs() < 1e-9);
        assert_eq!(rep.totals.distance_mi, 0.0);
        assert_eq!(rep.fleet_soc_kwh.len(), 12);
    }

    #[test]
    fn scenario_names_parse() {
        for s in Scenario::ALL {
            assert_eq!(s.name().parse::<Scenario>().unwrap(), s);
        }
        assert!("both".parse::<Scenario>().is_err());
    }
}
