//! Scenario runs, schedule accounting and auditing.

mod account;
mod audit;
mod replay;
mod scenario;
mod schedule;

pub use account::{account, account_days, count_trips, trips, Metrics, Trip};
pub use audit::{audit, AuditReport, Violation, ENERGY_TOL, POWER_TOL};
pub use replay::{forecast_replay, ReplayDay, ReplayReport};
pub use scenario::{
    day_config, plan, run_scenario, DayReport, Plan, Scenario, ScenarioReport, SolveRecord, THROUGHPUT_DEFINITION,
};
pub use schedule::{FleetSchedule, VehicleSchedule};
