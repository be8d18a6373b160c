//! Independent feasibility check of a schedule against the model's rules.
//!
//! Violations are named after the model row they break so a failure can be
//! traced straight back to the instance.

use serde::{Deserialize, Serialize};

use super::schedule::{step_flow, FleetSchedule};
use crate::data::TravelTimeTable;
use crate::fleet::{FleetConfig, Location};
use crate::model::{window_steps, BuildMode};

/// Slack allowed on energy equalities and bounds, kWh.
pub const ENERGY_TOL: f64 = 1e-6;
/// Slack allowed on power bounds, kW.
pub const POWER_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub row: String,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub violations: Vec<Violation>,
}

impl AuditReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn fail(&mut self, row: String, detail: String) {
        self.violations.push(Violation { row, detail });
    }
}

impl std::fmt::Display for AuditReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_ok() {
            return write!(f, "audit passed");
        }
        writeln!(f, "audit failed with {} violation(s)", self.violations.len())?;
        for v in &self.violations {
            writeln!(f, "  {}: {}", v.row, v.detail)?;
        }
        Ok(())
    }
}

/// Check every constraint family of the `mode` model on `schedule`.
pub fn audit(schedule: &FleetSchedule, config: &FleetConfig, travel: &TravelTimeTable, mode: BuildMode) -> AuditReport {
    let mut rep = AuditReport::default();
    let h = &config.horizon;
    let steps = h.total_steps();
    if schedule.vehicles.len() != config.num_vehicles() {
        rep.fail(
            "shape".into(),
            format!("{} vehicles scheduled, config has {}", schedule.vehicles.len(), config.num_vehicles()),
        );
        return rep;
    }
    for (n, v) in schedule.vehicles.iter().enumerate() {
        let lens = [v.ind.len(), v.charge_kw.len(), v.discharge_kw.len(), v.soc_kwh.len()];
        if lens.iter().any(|&l| l != steps) {
            rep.fail(format!("shape_n{n}"), format!("series lengths {lens:?}, horizon has {steps} steps"));
            return rep;
        }
    }
    if (schedule.dt_hours - h.dt_hours).abs() > 1e-12 {
        rep.fail("shape".into(), format!("step length {} h, config has {} h", schedule.dt_hours, h.dt_hours));
        return rep;
    }
    let spatial = mode == BuildMode::Spatial;
    let (pc, pd) = (config.charger.p_c_max_kw, config.charger.p_d_max_kw);

    for (n, (v, spec)) in schedule.vehicles.iter().zip(&config.vehicles).enumerate() {
        let mut prev = spec.e_init_kwh;
        for t in 0..steps {
            let ind = v.ind[t];
            if ind.iter().any(|&b| b > 1) || ind.iter().map(|&b| u32::from(b)).sum::<u32>() > 1 {
                rep.fail(format!("one_n{n}_t{t}"), format!("indicators {ind:?}"));
            }
            if !spatial && ind != [1, 0, 0] {
                rep.fail(format!("stationary_n{n}_t{t}"), format!("indicators {ind:?}, expected warehouse A"));
            }
            for loc in Location::ALL {
                let l = loc.index();
                let (c, d) = (v.charge_kw[t][l], v.discharge_kw[t][l]);
                if !(c >= -POWER_TOL && c <= pc + POWER_TOL) {
                    rep.fail(format!("c_{loc}_n{n}_t{t}"), format!("charge {c} kW outside [0, {pc}]"));
                }
                if !(d >= -POWER_TOL && d <= pd + POWER_TOL) {
                    rep.fail(format!("d_{loc}_n{n}_t{t}"), format!("discharge {d} kW outside [0, {pd}]"));
                }
                if ind[l] == 0 && c > POWER_TOL {
                    rep.fail(format!("gate_c_{loc}_n{n}_t{t}"), format!("charging {c} kW while away"));
                }
                if ind[l] == 0 && d > POWER_TOL {
                    rep.fail(format!("gate_d_{loc}_n{n}_t{t}"), format!("discharging {d} kW while away"));
                }
            }
            let e = v.soc_kwh[t];
            let expect = prev + h.dt_hours * step_flow(spec.eta_c, spec.eta_d, spec.p_drive_kw, v, t);
            if !((e - expect).abs() <= ENERGY_TOL) {
                rep.fail(format!("dyn_n{n}_t{t}"), format!("soc {e} kWh, recursion gives {expect}"));
            }
            if !(e >= spec.e_min_kwh - ENERGY_TOL && e <= spec.capacity_kwh + ENERGY_TOL) {
                rep.fail(
                    format!("soc_n{n}_t{t}"),
                    format!("soc {e} kWh outside [{}, {}]", spec.e_min_kwh, spec.capacity_kwh),
                );
            }
            prev = e;
        }
        for k in 0..h.num_days {
            let last = (k + 1) * h.steps_per_day - 1;
            let e = v.soc_kwh[last];
            if !((e - spec.e_final_kwh).abs() <= ENERGY_TOL) {
                rep.fail(format!("eod_n{n}_d{k}"), format!("end-of-day soc {e} kWh, target {}", spec.e_final_kwh));
            }
        }

        if !spatial {
            continue;
        }
        let at = |loc: Location, t: usize| v.ind[t][loc.index()] == 1;
        for t1 in 0..steps {
            for from in Location::ALL.into_iter().filter(|&l| at(l, t1)) {
                for to in Location::ALL.into_iter().filter(|&l| l != from) {
                    let dur = travel.steps(from, to, t1) as usize;
                    for tau in (1..=dur).take_while(|tau| t1 + tau < steps) {
                        if at(to, t1 + tau) {
                            rep.fail(
                                format!("travel_{from}{to}_n{n}_t{t1}_k{tau}"),
                                format!("at {to} {tau} step(s) after leaving {from}, trip takes {dur}"),
                            );
                        }
                    }
                }
            }
        }
        if !at(spec.home, 0) {
            rep.fail(format!("start_n{n}"), format!("does not start at home {}", spec.home));
        }
        if config.home_return {
            for k in 0..h.num_days {
                if k > 0 && !at(spec.home, k * h.steps_per_day) {
                    rep.fail(format!("start_n{n}_d{k}"), format!("day does not begin at home {}", spec.home));
                }
                if !at(spec.home, (k + 1) * h.steps_per_day - 1) {
                    rep.fail(format!("home_n{n}_d{k}"), format!("day does not end at home {}", spec.home));
                }
            }
        }
    }

    if spatial {
        let windows = crate::model::column_map(config, mode).windows;
        for w in 0..windows {
            let range = window_steps(config, w);
            for loc in Location::ALL {
                let need = config.delivery.min_visits(loc) as usize;
                let visitors = schedule
                    .vehicles
                    .iter()
                    .filter(|v| range.clone().any(|t| v.ind[t][loc.index()] == 1))
                    .count();
                if visitors < need {
                    rep.fail(format!("deliver_{loc}_d{w}"), format!("{visitors} vehicle(s) visit {loc}, need {need}"));
                }
            }
        }
    }
    rep
}
