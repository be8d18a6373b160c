//! Trip detection and per-run metrics.

use serde::{Deserialize, Serialize};

use super::schedule::FleetSchedule;
use crate::data::{PricePanel, TravelTimeTable};
use crate::error::SimError;
use crate::fleet::{FleetConfig, Location};
use crate::model::evaluate_cost;

/// A move between two sites: located at `from` on `depart_step`, at `to` on
/// `arrive_step`, driving on every step in between.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trip {
    pub vehicle: usize,
    pub from: Location,
    pub to: Location,
    pub depart_step: usize,
    pub arrive_step: usize,
}

impl Trip {
    /// Driving steps between departure and arrival.
    pub fn gap(&self) -> usize {
        self.arrive_step - self.depart_step - 1
    }
}

/// Every trip in the schedule, ordered by vehicle then departure.
///
/// Driving runs that return to the site they left are not trips.
pub fn trips(schedule: &FleetSchedule) -> Vec<Trip> {
    let mut out = Vec::new();
    for (n, v) in schedule.vehicles.iter().enumerate() {
        let mut last: Option<(Location, usize)> = None;
        for t in 0..v.ind.len() {
            let Some(here) = v.location(t) else { continue };
            if let Some((from, depart)) = last {
                if from != here {
                    out.push(Trip { vehicle: n, from, to: here, depart_step: depart, arrive_step: t });
                }
            }
            last = Some((here, t));
        }
    }
    out
}

/// Trip counts by ordered pair `[from][to]`; the diagonal stays zero.
pub fn count_trips(schedule: &FleetSchedule) -> [[u32; 3]; 3] {
    let mut m = [[0; 3]; 3];
    for trip in trips(schedule) {
        m[trip.from.index()][trip.to.index()] += 1;
    }
    m
}

/// Run totals in dollars, miles and kWh.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    /// Settled energy cost; negative is profit.
    pub cost: f64,
    pub distance_mi: f64,
    /// Charged, discharged and driving energy on the battery side.
    pub throughput_kwh: f64,
    pub charged_kwh: f64,
    pub discharged_kwh: f64,
    pub driving_kwh: f64,
    /// Grid energy charged minus discharged.
    pub net_grid_kwh: f64,
    pub trips: u32,
}

impl Metrics {
    pub fn add(&mut self, o: &Metrics) {
        self.cost += o.cost;
        self.distance_mi += o.distance_mi;
        self.throughput_kwh += o.throughput_kwh;
        self.charged_kwh += o.charged_kwh;
        self.discharged_kwh += o.discharged_kwh;
        self.driving_kwh += o.driving_kwh;
        self.net_grid_kwh += o.net_grid_kwh;
        self.trips += o.trips;
    }

    pub fn sum<'a>(items: impl IntoIterator<Item = &'a Metrics>) -> Metrics {
        let mut total = Metrics::default();
        for m in items {
            total.add(m);
        }
        total
    }
}

/// Metrics for each day of the schedule. Trips count toward their departure day.
pub fn account_days(
    schedule: &FleetSchedule,
    config: &FleetConfig,
    travel: &TravelTimeTable,
    panel: &PricePanel,
) -> Result<Vec<Metrics>, SimError> {
    let steps = schedule.steps();
    let h = &config.horizon;
    if steps != h.total_steps() || schedule.vehicles.len() != config.num_vehicles() {
        return Err(SimError::Dimension(format!(
            "schedule is {} vehicles x {steps} steps, config is {} x {}",
            schedule.vehicles.len(),
            config.num_vehicles(),
            h.total_steps()
        )));
    }
    evaluate_cost(schedule, panel)?;
    let dt = schedule.dt_hours;
    let mut days = vec![Metrics::default(); h.num_days];

    for trip in trips(schedule) {
        let need = travel.steps(trip.from, trip.to, trip.depart_step) as usize;
        if trip.gap() < need {
            return Err(SimError::Malformed(format!(
                "vehicle {} goes {}->{} in {} steps, travel needs {need}",
                trip.vehicle,
                trip.from,
                trip.to,
                trip.gap()
            )));
        }
        let m = &mut days[h.day_of(trip.depart_step)];
        m.distance_mi += config.distances_mi.get(trip.from, trip.to);
        m.trips += 1;
    }

    for (v, spec) in schedule.vehicles.iter().zip(&config.vehicles) {
        for t in 0..steps {
            let m = &mut days[h.day_of(t)];
            for loc in Location::ALL {
                let l = loc.index();
                let (c, d) = (v.charge_kw[t][l], v.discharge_kw[t][l]);
                m.cost += panel.price(loc, t) * (c - d) * dt;
                m.charged_kwh += spec.eta_c * c * dt;
                m.discharged_kwh += d / spec.eta_d * dt;
                m.net_grid_kwh += (c - d) * dt;
            }
            if v.is_driving(t) {
                m.driving_kwh += spec.p_drive_kw * dt;
            }
        }
    }
    for m in &mut days {
        m.throughput_kwh = m.charged_kwh + m.discharged_kwh + m.driving_kwh;
    }
    Ok(days)
}

/// Whole-run metrics; equal to the sum of [`account_days`].
pub fn account(
    schedule: &FleetSchedule,
    config: &FleetConfig,
    travel: &TravelTimeTable,
    panel: &PricePanel,
) -> Result<Metrics, SimError> {
    Ok(Metrics::sum(&account_days(schedule, config, travel, panel)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fleet::{Horizon, VehicleSpec};

    fn setup(steps: usize) -> (FleetConfig, TravelTimeTable, FleetSchedule) {
        let v = VehicleSpec::new(1, 700.0, 450.0, 1.0, 70.0, Location::A);
        let cfg = FleetConfig::new(vec![v], Horizon::new(steps, 1, 0.25));
        let travel = TravelTimeTable::from_distances(&cfg.distances_mi, &cfg.horizon);
        let s = FleetSchedule::idle(&cfg);
        (cfg, travel, s)
    }

    #[test]
    fn idle_schedule_has_zero_metrics() {
        let (cfg, travel, s) = setup(8);
        let m = account(&s, &cfg, &travel, &PricePanel::flat(8, 0.05)).unwrap();
        assert_eq!(m, Metrics::default());
        assert_eq!(count_trips(&s), [[0; 3]; 3]);
    }

    #[test]
    fn round_trip_counts_both_legs() {
        let (cfg, travel, mut s) = setup(12);
        // A-B takes 4 steps: A at 0, drive 1..=4, B at 5..=6, drive 7..=10, A at 11.
        for t in [1, 2, 3, 4, 7, 8, 9, 10] {
            s.vehicles[0].ind[t] = [0, 0, 0];
        }
        for t in [5, 6] {
            s.vehicles[0].ind[t] = [0, 1, 0];
        }
        let m = account(&s, &cfg, &travel, &PricePanel::flat(12, 0.0)).unwrap();
        assert_eq!(count_trips(&s), [[0, 1, 0], [1, 0, 0], [0, 0, 0]]);
        assert_eq!(m.distance_mi, 2.0 * cfg.distances_mi.ab);
        assert!((m.driving_kwh - 8.0 * 70.0 * 0.25).abs() < 1e-12);
    }

    #[test]
    fn short_gap_is_malformed() {
        let (cfg, travel, mut s) = setup(8);
        s.vehicles[0].ind[1] = [0, 0, 0];
        s.vehicles[0].ind[2] = [0, 1, 0];
        let err = account(&s, &cfg, &travel, &PricePanel::flat(8, 0.0)).unwrap_err();
        assert!(matches!(err, SimError::Malformed(_)));
    }

    #[test]
    fn one_charge_step_throughput() {
        let (cfg, travel, mut s) = setup(4);
        s.vehicles[0].charge_kw[0] = [150.0, 0.0, 0.0];
        let m = account(&s, &cfg, &travel, &PricePanel::flat(4, 0.04)).unwrap();
        assert!((m.throughput_kwh - 37.5).abs() < 1e-12);
        assert!((m.cost - 1.5).abs() < 1e-12);
    }
}
