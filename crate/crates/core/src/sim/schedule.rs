//! Solved fleet schedules.

use serde::{Deserialize, Serialize};

use crate::error::SimError;
use crate::fleet::{FleetConfig, Location};
use crate::model::{column_map, BuildMode, VarKind};

/// Per-step plan of one vehicle. Powers are grid-side kW indexed by location.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VehicleSchedule {
    pub vehicle_id: u32,
    /// Location indicators `[A, B, C]`; all zero means driving.
    pub ind: Vec<[u8; 3]>,
    pub charge_kw: Vec<[f64; 3]>,
    pub discharge_kw: Vec<[f64; 3]>,
    /// Energy after each step's actions.
    pub soc_kwh: Vec<f64>,
}

impl VehicleSchedule {
    /// Location at `t`, or `None` while driving.
    pub fn location(&self, t: usize) -> Option<Location> {
        let [a, b, c] = self.ind[t];
        match (a, b, c) {
            (1, 0, 0) => Some(Location::A),
            (0, 1, 0) => Some(Location::B),
            (0, 0, 1) => Some(Location::C),
            _ => None,
        }
    }

    pub fn is_driving(&self, t: usize) -> bool {
        self.ind[t] == [0, 0, 0]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FleetSchedule {
    pub dt_hours: f64,
    pub vehicles: Vec<VehicleSchedule>,
}

impl FleetSchedule {
    pub fn steps(&self) -> usize {
        self.vehicles.first().map_or(0, |v| v.soc_kwh.len())
    }

    /// Read a schedule out of a solution vector of the instance built for
    /// `config` in `mode`. Indicators are rounded; powers below zero are clipped.
    pub fn from_solution(config: &FleetConfig, mode: BuildMode, x: &[f64]) -> Result<Self, SimError> {
        let map = column_map(config, mode);
        if x.len() != map.num_cols() {
            return Err(SimError::Dimension(format!(
                "solution has {} values, layout expects {}",
                x.len(),
                map.num_cols()
            )));
        }
        let steps = map.steps;
        let vehicles = config
            .vehicles
            .iter()
            .enumerate()
            .map(|(n, spec)| {
                let mut v = VehicleSchedule {
                    vehicle_id: spec.id,
                    ind: Vec::with_capacity(steps),
                    charge_kw: Vec::with_capacity(steps),
                    discharge_kw: Vec::with_capacity(steps),
                    soc_kwh: Vec::with_capacity(steps),
                };
                for t in 0..steps {
                    let mut ind = [0u8; 3];
                    let mut c = [0.0; 3];
                    let mut d = [0.0; 3];
                    for l in Location::ALL {
                        let i = l.index();
                        ind[i] = if map.with_locations {
                            u8::from(x[map.at(VarKind::Ind(l), n, t)] > 0.5)
                        } else {
                            u8::from(l == Location::A)
                        };
                        c[i] = x[map.at(VarKind::Charge(l), n, t)].max(0.0);
                        d[i] = x[map.at(VarKind::Discharge(l), n, t)].max(0.0);
                    }
                    v.ind.push(ind);
                    v.charge_kw.push(c);
                    v.discharge_kw.push(d);
                    v.soc_kwh.push(x[map.at(VarKind::Soc, n, t)]);
                }
                v
            })
            .collect();
        Ok(Self { dt_hours: config.horizon.dt_hours, vehicles })
    }

    /// Remove simultaneous charge and discharge at one location.
    ///
    /// The smaller flow is netted against the larger in battery-side energy,
    /// so `η_c·c − d/η_d` and hence the SOC trajectory are unchanged. With
    /// `η_c = η_d = 1` this is the plain net `c − d`.
    pub fn cancel_overlap(&mut self, config: &FleetConfig) {
        for (v, spec) in self.vehicles.iter_mut().zip(&config.vehicles) {
            let (ec, ed) = (spec.eta_c, spec.eta_d);
            for (c, d) in v.charge_kw.iter_mut().zip(v.discharge_kw.iter_mut()) {
                for l in 0..3 {
                    if c[l] <= 0.0 || d[l] <= 0.0 {
                        continue;
                    }
                    if ec * c[l] >= d[l] / ed {
                        c[l] = (c[l] - d[l] / (ec * ed)).max(0.0);
                        d[l] = 0.0;
                    } else {
                        d[l] = (d[l] - ec * ed * c[l]).max(0.0);
                        c[l] = 0.0;
                    }
                }
            }
        }
    }

    /// Join consecutive day schedules of the same fleet.
    pub fn concat(days: Vec<FleetSchedule>) -> Result<Self, SimError> {
        let mut iter = days.into_iter();
        let Some(mut out) = iter.next() else {
            return Err(SimError::Dimension("no schedules to join".into()));
        };
        for day in iter {
            if day.vehicles.len() != out.vehicles.len() || day.dt_hours != out.dt_hours {
                return Err(SimError::Dimension("day schedules disagree on fleet or step length".into()));
            }
            for (acc, v) in out.vehicles.iter_mut().zip(day.vehicles) {
                acc.ind.extend(v.ind);
                acc.charge_kw.extend(v.charge_kw);
                acc.discharge_kw.extend(v.discharge_kw);
                acc.soc_kwh.extend(v.soc_kwh);
            }
        }
        Ok(out)
    }

    /// The do-nothing plan: every vehicle parked at `home` with constant SOC.
    pub fn idle(config: &FleetConfig) -> Self {
        let steps = config.horizon.total_steps();
        let vehicles = config
            .vehicles
            .iter()
            .map(|spec| {
                let mut ind = [0u8; 3];
                ind[spec.home.index()] = 1;
                VehicleSchedule {
                    vehicle_id: spec.id,
                    ind: vec![ind; steps],
                    charge_kw: vec![[0.0; 3]; steps],
                    discharge_kw: vec![[0.0; 3]; steps],
                    soc_kwh: vec![spec.e_init_kwh; steps],
                }
            })
            .collect();
        Self { dt_hours: config.horizon.dt_hours, vehicles }
    }

    /// Fill `soc_kwh` from the powers and indicators by running the battery recursion.
    pub fn recompute_soc(&mut self, config: &FleetConfig) {
        let dt = self.dt_hours;
        for (v, spec) in self.vehicles.iter_mut().zip(&config.vehicles) {
            let mut e = spec.e_init_kwh;
            for t in 0..v.soc_kwh.len() {
                e += dt * step_flow(spec.eta_c, spec.eta_d, spec.p_drive_kw, v, t);
                v.soc_kwh[t] = e;
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schedule serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, SimError> {
        serde_json::from_str(text).map_err(|e| SimError::Malformed(format!("schedule document: {e}")))
    }
}

/// Battery-side power at step `t`: `η_c Σc − Σd/η_d − P_drive·driving`.
pub(crate) fn step_flow(eta_c: f64, eta_d: f64, p_drive: f64, v: &VehicleSchedule, t: usize) -> f64 {
    let c: f64 = v.charge_kw[t].iter().sum();
    let d: f64 = v.discharge_kw[t].iter().sum();
    let drive = if v.is_driving(t) { p_drive } else { 0.0 };
    eta_c * c - d / eta_d - drive
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fleet::{Horizon, VehicleSpec};

    fn config(roundtrip: f64) -> FleetConfig {
        let v = VehicleSpec::new(7, 700.0, 450.0, roundtrip, 70.0, Location::A);
        FleetConfig::new(vec![v], Horizon::new(4, 1, 0.25))
    }

    #[test]
    fn overlap_cancellation_preserves_battery_flow() {
        let cfg = config(0.81);
        let mut s = FleetSchedule::idle(&cfg);
        s.vehicles[0].charge_kw[1] = [100.0, 0.0, 0.0];
        s.vehicles[0].discharge_kw[1] = [40.0, 0.0, 0.0];
        s.vehicles[0].charge_kw[2] = [10.0, 0.0, 0.0];
        s.vehicles[0].discharge_kw[2] = [40.0, 0.0, 0.0];
        let before: Vec<f64> = (0..4).map(|t| step_flow(0.9, 0.9, 70.0, &s.vehicles[0], t)).collect();
        s.cancel_overlap(&cfg);
        let v = &s.vehicles[0];
        assert_eq!(v.discharge_kw[1][0], 0.0);
        assert_eq!(v.charge_kw[2][0], 0.0);
        for (t, b) in before.iter().enumerate() {
            assert!((step_flow(0.9, 0.9, 70.0, v, t) - b).abs() < 1e-12);
        }
    }

    #[test]
    fn unit_efficiency_cancellation_is_the_net() {
        let cfg = config(1.0);
        let mut s = FleetSchedule::idle(&cfg);
        s.vehicles[0].charge_kw[0] = [0.0, 0.0, 120.0];
        s.vehicles[0].discharge_kw[0] = [0.0, 0.0, 50.0];
        s.cancel_overlap(&cfg);
        assert_eq!(s.vehicles[0].charge_kw[0][2], 70.0);
        assert_eq!(s.vehicles[0].discharge_kw[0][2], 0.0);
    }

    #[test]
    fn concat_and_json_round_trip() {
        let cfg = config(1.0);
        let joined = FleetSchedule::concat(vec![FleetSchedule::idle(&cfg), FleetSchedule::idle(&cfg)]).unwrap();
        assert_eq!(joined.steps(), 8);
        assert_eq!(FleetSchedule::from_json(&joined.to_json()).unwrap(), joined);
    }
}
