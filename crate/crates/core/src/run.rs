//! End-to-end commands behind the command-line front end.
//!
//! Everything the binary does is reachable from here, so the binary only
//! parses flags and maps errors to exit codes.

use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;

use crate::data::{load_prices_file, load_travel_times_file, PricePanel, ScenarioSet, SyntheticPrices, TravelTimeTable};
use crate::error::{BuildError, ConfigError, Error, SimError, SolveError};
use crate::fleet::{parse_config, FleetConfig};
use crate::model::{build_with_panel, export_mps};
use crate::report::{summary_table, write_replay_report, write_scenario_report, write_summary};
use crate::sim::{audit, day_config, forecast_replay, run_scenario, AuditReport, FleetSchedule, ReplayReport, Scenario, ScenarioReport};
use crate::solver::{oracle_solve, solve_milp, MilpLimits, MilpStatus, MAX_ORACLE_BINARIES};

/// Everything one invocation needs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunManifest {
    pub config: PathBuf,
    /// Real-time prices; synthetic prices from `seed` when absent.
    pub prices_real: Option<PathBuf>,
    /// Day-ahead prices; enables the forecast replay.
    pub prices_dayahead: Option<PathBuf>,
    pub traffic: Option<PathBuf>,
    pub scenarios: Vec<Scenario>,
    /// Overrides the configured number of days.
    pub days: Option<usize>,
    pub seed: u64,
    pub gap: f64,
    pub time_limit_s: Option<f64>,
    pub out_dir: PathBuf,
}

impl RunManifest {
    pub fn new(config: impl Into<PathBuf>, out_dir: impl Into<PathBuf>) -> Self {
        Self {
            config: config.into(),
            prices_real: None,
            prices_dayahead: None,
            traffic: None,
            scenarios: Scenario::ALL.to_vec(),
            days: None,
            seed: 0,
            gap: 1e-4,
            time_limit_s: None,
            out_dir: out_dir.into(),
        }
    }

    /// Per-solve limits. The time limit applies to each MILP separately.
    pub fn limits(&self) -> MilpLimits {
        MilpLimits {
            time_limit: self.time_limit_s.map(Duration::from_secs_f64),
            gap: self.gap,
            node_limit: None,
        }
    }

    pub fn load(&self) -> Result<Inputs, Error> {
        let text = std::fs::read_to_string(&self.config)
            .map_err(|e| ConfigError::invalid(format!("{}: {e}", self.config.display())))?;
        let mut config = parse_config(&text)?;
        if let Some(days) = self.days {
            if days == 0 {
                return Err(ConfigError::invalid("--days must be positive").into());
            }
            config.horizon.num_days = days;
        }
        let h = config.horizon;
        let synthetic = SyntheticPrices::for_horizon(h.steps_per_day, h.num_days).generate_pair(self.seed);
        let real_time = match &self.prices_real {
            Some(p) => load_prices_file(p, &h, &config.location_names)?,
            None => synthetic.real_time,
        };
        let day_ahead = match &self.prices_dayahead {
            Some(p) => Some(load_prices_file(p, &h, &config.location_names)?),
            None => None,
        };
        let travel = match &self.traffic {
            Some(p) => load_travel_times_file(p, &config)?,
            None => TravelTimeTable::from_distances(&config.distances_mi, &h),
        };
        Ok(Inputs { config, real_time, day_ahead, travel })
    }
}

/// Loaded and validated inputs of a manifest.
#[derive(Clone, Debug)]
pub struct Inputs {
    pub config: FleetConfig,
    pub real_time: PricePanel,
    pub day_ahead: Option<PricePanel>,
    pub travel: TravelTimeTable,
}

impl Inputs {
    pub fn scenarios(&self) -> ScenarioSet {
        ScenarioSet::single(self.real_time.clone())
    }
}

pub struct RunOutcome {
    pub reports: Vec<ScenarioReport>,
    pub replay: Option<ReplayReport>,
    pub summary: String,
}

impl RunOutcome {
    pub fn limit_reached(&self) -> bool {
        self.reports.iter().any(|r| r.limit_reached)
            || self.replay.as_ref().is_some_and(|r| r.solves.iter().any(|s| s.limit_reached))
    }
}

/// Run the selected scenarios (and the replay when day-ahead prices are
/// given) and write every report under `out_dir`.
pub fn cmd_run(manifest: &RunManifest) -> Result<RunOutcome, Error> {
    let inputs = manifest.load()?;
    let limits = manifest.limits();
    let set = inputs.scenarios();
    std::fs::create_dir_all(&manifest.out_dir)?;
    let mut reports = Vec::new();
    for &which in &manifest.scenarios {
        let report = run_scenario(&inputs.config, &set, &inputs.travel, which, &limits)?;
        write_scenario_report(&report, &inputs.config, &manifest.out_dir)?;
        reports.push(report);
    }
    write_summary(&reports, &manifest.out_dir)?;
    let replay = match &inputs.day_ahead {
        Some(da) => {
            let r = forecast_replay(&inputs.config, da, &inputs.real_time, &inputs.travel, &limits)?;
            write_replay_report(&r, &manifest.out_dir)?;
            Some(r)
        }
        None => None,
    };
    Ok(RunOutcome { summary: summary_table(&reports), reports, replay })
}

/// Single-day (or whole-horizon, when days do not decouple) config and its prices.
fn day_problem(inputs: &Inputs, day: usize) -> Result<(FleetConfig, PricePanel), Error> {
    let h = inputs.config.horizon;
    if day >= h.num_days {
        return Err(ConfigError::invalid(format!("day out of range: {day} (horizon has {} days)", h.num_days)).into());
    }
    if inputs.config.days_decouple() {
        let panel = inputs.real_time.day(day, h.steps_per_day);
        Ok((day_config(&inputs.config, day), panel))
    } else {
        Ok((inputs.config.clone(), inputs.real_time.clone()))
    }
}

/// Write the MILP of `day` for the first selected scenario to `out_dir/day{day}.mps`.
pub fn cmd_export(manifest: &RunManifest, day: usize) -> Result<PathBuf, Error> {
    let inputs = manifest.load()?;
    let (cfg, truth) = day_problem(&inputs, day)?;
    let which = manifest.scenarios.first().copied().unwrap_or(Scenario::Spatial);
    let instance = build_with_panel::<f64>(&cfg, &which.planning_panel(&truth), &inputs.travel, which.mode())?;
    std::fs::create_dir_all(&manifest.out_dir)?;
    let path = manifest.out_dir.join(format!("day{day}.mps"));
    export_mps(&instance, &path)?;
    Ok(path)
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyDay {
    pub day: usize,
    pub milp_objective: f64,
    pub oracle_objective: f64,
    pub difference: f64,
    pub audit: AuditReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyOutcome {
    pub scenario: Scenario,
    pub days: Vec<VerifyDay>,
}

impl VerifyOutcome {
    pub fn passed(&self) -> bool {
        self.days.iter().all(|d| d.difference <= 1e-6 * d.oracle_objective.abs().max(1.0) && d.audit.is_ok())
    }
}

impl std::fmt::Display for VerifyOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for d in &self.days {
            writeln!(
                f,
                "day {}: milp {:.6} oracle {:.6} |diff| {:.3e}; {}",
                d.day,
                d.milp_objective,
                d.oracle_objective,
                d.difference,
                d.audit.to_string().trim_end()
            )?;
        }
        write!(f, "{}", if self.passed() { "PASS" } else { "FAIL" })
    }
}

/// Solve each day with branch and bound and with the exhaustive oracle,
/// compare objectives and audit the branch-and-bound schedule.
pub fn cmd_verify(manifest: &RunManifest, max_binaries: usize) -> Result<VerifyOutcome, Error> {
    if max_binaries > MAX_ORACLE_BINARIES {
        return Err(SolveError::TooManyBinaries { found: max_binaries, max: MAX_ORACLE_BINARIES }.into());
    }
    let inputs = manifest.load()?;
    let which = manifest.scenarios.first().copied().unwrap_or(Scenario::Spatial);
    let chunks = if inputs.config.days_decouple() { inputs.config.horizon.num_days } else { 1 };
    let mut days = Vec::new();
    for day in 0..chunks {
        let (cfg, truth) = day_problem(&inputs, day)?;
        let instance = build_with_panel::<f64>(&cfg, &which.planning_panel(&truth), &inputs.travel, which.mode())?;
        let oracle = oracle_solve(&instance, max_binaries)?;
        let milp = solve_milp(&instance, &MilpLimits::default(), None)?;
        match (oracle.status, milp.status) {
            (MilpStatus::Infeasible, MilpStatus::Infeasible) => return Err(SimError::Infeasible { day }.into()),
            (_, MilpStatus::Infeasible | MilpStatus::NoIncumbent) | (MilpStatus::Infeasible, _) => {
                days.push(VerifyDay {
                    day,
                    milp_objective: milp.objective,
                    oracle_objective: oracle.objective,
                    difference: f64::INFINITY,
                    audit: AuditReport::default(),
                });
                continue;
            }
            _ => {}
        }
        let mut schedule = FleetSchedule::from_solution(&cfg, which.mode(), &milp.x)?;
        schedule.cancel_overlap(&cfg);
        days.push(VerifyDay {
            day,
            milp_objective: milp.objective,
            oracle_objective: oracle.objective,
            difference: (milp.objective - oracle.objective).abs(),
            audit: audit(&schedule, &cfg, &inputs.travel, which.mode()),
        });
    }
    Ok(VerifyOutcome { scenario: which, days })
}

/// Audit a saved schedule document against the manifest's fleet.
pub fn verify_schedule(manifest: &RunManifest, schedule: &Path) -> Result<AuditReport, Error> {
    let inputs = manifest.load()?;
    let text = std::fs::read_to_string(schedule)?;
    let schedule = FleetSchedule::from_json(&text)?;
    let which = manifest.scenarios.first().copied().unwrap_or(Scenario::Spatial);
    Ok(audit(&schedule, &inputs.config, &inputs.travel, which.mode()))
}

impl Error {
    /// Process exit code: 2 config, 3 data, 4 infeasible, 5 limit reached, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Data(_) => 3,
            Error::Build(BuildError::Infeasible(_)) => 4,
            Error::Build(BuildError::Dimension(_)) => 3,
            Error::Sim(SimError::Infeasible { .. }) | Error::Sim(SimError::Build(BuildError::Infeasible(_))) => 4,
            Error::Sim(SimError::NoIncumbent { .. }) | Error::Sim(SimError::LimitReached { .. }) => 5,
            Error::Sim(SimError::Dimension(_)) | Error::Sim(SimError::Build(BuildError::Dimension(_))) => 3,
            Error::Sim(SimError::Malformed(_)) => 3,
            Error::Solve(SolveError::TooManyBinaries { .. }) => 2,
            _ => 1,
        }
    }
}
