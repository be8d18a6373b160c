//! Assemble the fleet charging / travel MILP.

use serde::{Deserialize, Serialize};

use super::instance::{MilpInstance, Sense};
use super::vars::{ColumnMap, VarIndex, VarKind};
use crate::data::{mean_panel, time_only_panel, PricePanel, ScenarioSet, TravelTimeTable};
use crate::error::BuildError;
use crate::fleet::{FleetConfig, Location, TravelRows, VisitWindow};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuildMode {
    /// Vehicles choose where to be at every step.
    Spatial,
    /// Every vehicle stays at the warehouse (location A); no delivery rows.
    Stationary,
}

/// Column layout the builder uses for `config` in `mode`.
pub fn column_map(config: &FleetConfig, mode: BuildMode) -> ColumnMap {
    let windows = match config.delivery.window {
        VisitWindow::PerDay => config.horizon.num_days,
        VisitWindow::WholeHorizon => 1,
    };
    ColumnMap::new(
        config.num_vehicles(),
        config.horizon.total_steps(),
        windows,
        mode == BuildMode::Spatial,
    )
}

/// Build the instance whose objective prices each step at the scenario mean.
pub fn build<S: Scalar>(
    config: &FleetConfig,
    scenarios: &ScenarioSet,
    travel: &TravelTimeTable,
    mode: BuildMode,
) -> Result<MilpInstance<S>, BuildError> {
    check_scenarios(config, scenarios)?;
    build_with_panel(config, &mean_panel(scenarios), travel, mode)
}

/// Spatial instance planned against location-collapsed prices.
pub fn build_counterfactual<S: Scalar>(
    config: &FleetConfig,
    scenarios: &ScenarioSet,
    travel: &TravelTimeTable,
) -> Result<MilpInstance<S>, BuildError> {
    check_scenarios(config, scenarios)?;
    let planning = time_only_panel(&mean_panel(scenarios));
    build_with_panel(config, &planning, travel, BuildMode::Spatial)
}

fn check_scenarios(config: &FleetConfig, scenarios: &ScenarioSet) -> Result<(), BuildError> {
    let t = config.horizon.total_steps();
    if scenarios.horizon_len() != t {
        return Err(BuildError::Dimension(format!(
            "scenarios span {} steps, horizon has {t}",
            scenarios.horizon_len()
        )));
    }
    Ok(())
}

/// Build with an explicit objective price panel.
pub fn build_with_panel<S: Scalar>(
    config: &FleetConfig,
    prices: &PricePanel,
    travel: &TravelTimeTable,
    mode: BuildMode,
) -> Result<MilpInstance<S>, BuildError> {
    let h = &config.horizon;
    let steps = h.total_steps();
    let nv = config.num_vehicles();
    if nv == 0 {
        return Err(BuildError::Dimension("fleet has no vehicles".into()));
    }
    if prices.len() != steps {
        return Err(BuildError::Dimension(format!("prices span {} steps, horizon has {steps}", prices.len())));
    }
    if travel.steps_per_day() != h.steps_per_day {
        return Err(BuildError::Dimension(format!(
            "travel table has {} steps per day, horizon has {}",
            travel.steps_per_day(),
            h.steps_per_day
        )));
    }
    if mode == BuildMode::Spatial {
        for loc in Location::ALL {
            let need = config.delivery.min_visits(loc) as usize;
            if need > nv {
                return Err(BuildError::Infeasible(format!(
                    "{need} vehicles must visit {loc} but the fleet has {nv}"
                )));
            }
        }
    }

    let map = column_map(config, mode);
    let spatial = map.with_locations;
    let dt = h.dt_hours;
    let pc = config.charger.p_c_max_kw;
    let pd = config.charger.p_d_max_kw;
    let s = S::of;
    let mut m = MilpInstance::<S>::new(if spatial { "fleet_spatial" } else { "fleet_stationary" });

    for col in 0..map.num_cols() {
        let var = map.var(col).expect("dense layout");
        let vehicle = &config.vehicles[var.vehicle];
        let t = var.step;
        let (lo, hi, cost) = match var.kind {
            VarKind::Charge(l) => {
                let open = spatial || l == Location::A;
                (0.0, if open { pc } else { 0.0 }, prices.price(l, t) * dt)
            }
            VarKind::Discharge(l) => {
                let open = spatial || l == Location::A;
                (0.0, if open { pd } else { 0.0 }, -prices.price(l, t) * dt)
            }
            VarKind::Ind(_) | VarKind::Visit(_) => (0.0, 1.0, 0.0),
            VarKind::Soc => (vehicle.e_min_kwh, vehicle.capacity_kwh, 0.0),
        };
        m.add_col(var.name(), s(lo), s(hi), s(cost), var.kind.is_integer());
    }

    let at = |kind, n, t| map.at(kind, n, t);
    for (n, v) in config.vehicles.iter().enumerate() {
        // Charger gating by presence.
        if spatial {
            for t in 0..steps {
                for l in Location::ALL {
                    let ind = at(VarKind::Ind(l), n, t);
                    m.add_row(
                        format!("gate_c_{l}_n{n}_t{t}"),
                        vec![(at(VarKind::Charge(l), n, t), s(1.0)), (ind, s(-pc))],
                        Sense::Le,
                        s(0.0),
                    );
                    m.add_row(
                        format!("gate_d_{l}_n{n}_t{t}"),
                        vec![(at(VarKind::Discharge(l), n, t), s(1.0)), (ind, s(-pd))],
                        Sense::Le,
                        s(0.0),
                    );
                }
            }
        }

        // Battery dynamics. Driving draw applies whenever no indicator is set.
        for t in 0..steps {
            let mut coeffs = vec![(at(VarKind::Soc, n, t), s(1.0))];
            if t > 0 {
                coeffs.push((at(VarKind::Soc, n, t - 1), s(-1.0)));
            }
            for l in Location::ALL {
                coeffs.push((at(VarKind::Charge(l), n, t), s(-dt * v.eta_c)));
                coeffs.push((at(VarKind::Discharge(l), n, t), s(dt / v.eta_d)));
            }
            let mut rhs = 0.0;
            if spatial {
                for l in Location::ALL {
                    coeffs.push((at(VarKind::Ind(l), n, t), s(-dt * v.p_drive_kw)));
                }
                rhs -= dt * v.p_drive_kw;
            }
            if t == 0 {
                rhs += v.e_init_kwh;
            }
            m.add_row(format!("dyn_n{n}_t{t}"), coeffs, Sense::Eq, s(rhs));
        }

        // End-of-day energy target.
        for k in 0..h.num_days {
            let last = (k + 1) * h.steps_per_day - 1;
            m.add_row(
                format!("eod_n{n}_d{k}"),
                vec![(at(VarKind::Soc, n, last), s(1.0))],
                Sense::Eq,
                s(v.e_final_kwh),
            );
        }

        if !spatial {
            continue;
        }

        for t in 0..steps {
            m.add_row(
                format!("one_n{n}_t{t}"),
                Location::ALL.iter().map(|&l| (at(VarKind::Ind(l), n, t), s(1.0))).collect(),
                Sense::Le,
                s(1.0),
            );
        }

        // No arrival at another site before the trip could have finished.
        let ind = |l: Location, t: usize| (at(VarKind::Ind(l), n, t), s(1.0));
        match config.travel_rows {
            TravelRows::Pairwise => {
                for (from, t, to, tau) in travel_conflicts(travel, steps) {
                    m.add_row(
                        format!("travel_{from}{to}_n{n}_t{t}_k{tau}"),
                        vec![ind(from, t), ind(to, t + tau)],
                        Sense::Le,
                        s(1.0),
                    );
                }
            }
            TravelRows::Clique => {
                let reach = max_travel(travel);
                let window = |t: usize| t.saturating_sub(reach)..(t + reach + 1).min(steps);
                for ta in 0..steps {
                    for tb in window(ta) {
                        if !conflict(travel, (Location::A, ta), (Location::B, tb)) {
                            continue;
                        }
                        for tc in window(ta) {
                            if (ta == tb && tb == tc)
                                || !conflict(travel, (Location::A, ta), (Location::C, tc))
                                || !conflict(travel, (Location::B, tb), (Location::C, tc))
                            {
                                continue;
                            }
                            m.add_row(
                                format!("clique_n{n}_a{ta}_b{tb}_c{tc}"),
                                vec![ind(Location::A, ta), ind(Location::B, tb), ind(Location::C, tc)],
                                Sense::Le,
                                s(1.0),
                            );
                        }
                    }
                }
                for (from, t, to, tau) in travel_conflicts(travel, steps) {
                    let third = Location::ALL.into_iter().find(|&l| l != from && l != to).expect("three sites");
                    let covered = window(t).any(|t3| {
                        conflict(travel, (from, t), (third, t3)) && conflict(travel, (to, t + tau), (third, t3))
                    });
                    if !covered {
                        m.add_row(
                            format!("travel_{from}{to}_n{n}_t{t}_k{tau}"),
                            vec![ind(from, t), ind(to, t + tau)],
                            Sense::Le,
                            s(1.0),
                        );
                    }
                }
            }
        }

        for w in 0..map.windows {
            let range = window_steps(config, w);
            for l in Location::ALL {
                let visit = at(VarKind::Visit(l), n, w);
                for t in range.clone() {
                    m.add_row(
                        format!("vis_lb_{l}_n{n}_t{t}"),
                        vec![(at(VarKind::Ind(l), n, t), s(1.0)), (visit, s(-1.0))],
                        Sense::Le,
                        s(0.0),
                    );
                }
                let mut coeffs = vec![(visit, s(1.0))];
                coeffs.extend(range.clone().map(|t| (at(VarKind::Ind(l), n, t), s(-1.0))));
                m.add_row(format!("vis_ub_{l}_n{n}_d{w}"), coeffs, Sense::Le, s(0.0));
            }
        }

        m.add_row(
            format!("start_n{n}"),
            vec![(at(VarKind::Ind(v.home), n, 0), s(1.0))],
            Sense::Eq,
            s(1.0),
        );
        if config.home_return {
            // Each later day also begins at home, so days decouple exactly.
            for k in 1..h.num_days {
                m.add_row(
                    format!("start_n{n}_d{k}"),
                    vec![(at(VarKind::Ind(v.home), n, k * h.steps_per_day), s(1.0))],
                    Sense::Eq,
                    s(1.0),
                );
            }
            for k in 0..h.num_days {
                let last = (k + 1) * h.steps_per_day - 1;
                m.add_row(
                    format!("home_n{n}_d{k}"),
                    vec![(at(VarKind::Ind(v.home), n, last), s(1.0))],
                    Sense::Eq,
                    s(1.0),
                );
            }
        }
    }

    if spatial {
        for w in 0..map.windows {
            for l in Location::ALL {
                let need = config.delivery.min_visits(l);
                m.add_row(
                    format!("deliver_{l}_d{w}"),
                    (0..nv).map(|n| (at(VarKind::Visit(l), n, w), s(1.0))).collect(),
                    Sense::Ge,
                    s(f64::from(need)),
                );
            }
        }
    }

    debug_assert!(m.validate().is_ok());
    Ok(m)
}

/// Every `(from, t, to, tau)` such that being at `from` at step `t` rules out
/// being at `to` at step `t + tau`.
fn travel_conflicts(travel: &TravelTimeTable, steps: usize) -> Vec<(Location, usize, Location, usize)> {
    let mut out = Vec::new();
    for t in 0..steps {
        for from in Location::ALL {
            for to in Location::ALL {
                if from == to {
                    continue;
                }
                let dur = travel.steps(from, to, t) as usize;
                out.extend((1..=dur).take_while(|tau| t + tau < steps).map(|tau| (from, t, to, tau)));
            }
        }
    }
    out
}

/// Whether two distinct-location indicators cannot both be 1.
fn conflict(travel: &TravelTimeTable, (l1, t1): (Location, usize), (l2, t2): (Location, usize)) -> bool {
    if l1 == l2 {
        return false;
    }
    match t1.cmp(&t2) {
        std::cmp::Ordering::Equal => true,
        std::cmp::Ordering::Less => t2 - t1 <= travel.steps(l1, l2, t1) as usize,
        std::cmp::Ordering::Greater => t1 - t2 <= travel.steps(l2, l1, t2) as usize,
    }
}

fn max_travel(travel: &TravelTimeTable) -> usize {
    let mut reach = 0;
    for t in 0..travel.steps_per_day() {
        for from in Location::ALL {
            for to in Location::ALL {
                if from != to {
                    reach = reach.max(travel.steps(from, to, t) as usize);
                }
            }
        }
    }
    reach
}

/// Steps covered by visit window `w`.
pub fn window_steps(config: &FleetConfig, w: usize) -> std::ops::Range<usize> {
    let h = &config.horizon;
    match config.delivery.window {
        VisitWindow::PerDay => w * h.steps_per_day..(w + 1) * h.steps_per_day,
        VisitWindow::WholeHorizon => 0..h.total_steps(),
    }
}

/// Look up a variable's column, for callers holding a built instance.
pub fn column(config: &FleetConfig, mode: BuildMode, var: VarIndex) -> Option<usize> {
    column_map(config, mode).col(var)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fleet::{Horizon, VehicleSpec};

    fn tiny(steps: usize) -> FleetConfig {
        let v = VehicleSpec::new(0, 700.0, 450.0, 1.0, 70.0, Location::A);
        FleetConfig::new(vec![v], Horizon::new(steps, 1, 0.25))
    }

    #[test]
    fn counts_for_one_vehicle_eight_steps() {
        let mut cfg = tiny(8);
        cfg.travel_rows = TravelRows::Pairwise;
        let travel = TravelTimeTable::constant(1, &cfg.horizon);
        let set = ScenarioSet::single(PricePanel::flat(8, 0.03));
        let m: MilpInstance<f64> = build(&cfg, &set, &travel, BuildMode::Spatial).unwrap();
        let count = |pred: &dyn Fn(&str) -> bool| m.col_names.iter().filter(|n| pred(n)).count();
        assert_eq!(count(&|n| n.starts_with("ind_")), 24);
        assert_eq!(count(&|n| n.starts_with("c_") || n.starts_with("d_")), 48);
        assert_eq!(count(&|n| n.starts_with("soc_")), 8);
        for j in 0..m.num_cols() {
            if m.col_names[j].starts_with("ind_") {
                assert!(m.integer[j]);
                assert_eq!((m.lower[j], m.upper[j]), (0.0, 1.0));
            }
        }
        // 6 ordered pairs, 7 departures that still have a later step.
        let travel_rows = m.rows.iter().filter(|r| r.name.starts_with("travel_")).count();
        assert_eq!(travel_rows, 6 * 7);
    }

    /// Rows that only involve location indicators.
    fn location_rows(m: &MilpInstance<f64>) -> Vec<&crate::model::Row<f64>> {
        m.rows
            .iter()
            .filter(|r| r.name.starts_with("travel_") || r.name.starts_with("clique_") || r.name.starts_with("one_"))
            .collect()
    }

    #[test]
    fn clique_rows_admit_the_same_integer_schedules() {
        let mut cfg = tiny(5);
        cfg.home_return = false;
        let travel = TravelTimeTable::from_distances(
            &crate::fleet::Distances { ab: 20.0, ac: 40.0, bc: 10.0 },
            &cfg.horizon,
        );
        let set = ScenarioSet::single(PricePanel::flat(5, 0.03));
        cfg.travel_rows = TravelRows::Pairwise;
        let pair: MilpInstance<f64> = build(&cfg, &set, &travel, BuildMode::Spatial).unwrap();
        cfg.travel_rows = TravelRows::Clique;
        let clique: MilpInstance<f64> = build(&cfg, &set, &travel, BuildMode::Spatial).unwrap();
        assert!(clique.rows.iter().any(|r| r.name.starts_with("clique_")));
        let map = column_map(&cfg, BuildMode::Spatial);
        let (pr, cr) = (location_rows(&pair), location_rows(&clique));
        let mut x = vec![0.0; pair.num_cols()];
        let mut feasible = 0;
        for mask in 0u32..1 << 15 {
            for t in 0..5 {
                for l in Location::ALL {
                    let bit = (mask >> (3 * t + l.index())) & 1;
                    x[map.at(VarKind::Ind(l), 0, t)] = f64::from(bit);
                }
            }
            let ok = |rows: &[&crate::model::Row<f64>]| rows.iter().all(|r| r.violation(&x) <= 0.0);
            assert_eq!(ok(&pr), ok(&cr), "mask {mask:#b}");
            feasible += usize::from(ok(&pr));
        }
        assert!(feasible > 100);
    }

    #[test]
    fn stationary_has_no_integer_columns() {
        let mut cfg = tiny(8);
        cfg.delivery.min_visits = [0, 1, 0];
        let travel = TravelTimeTable::constant(1, &cfg.horizon);
        let set = ScenarioSet::single(PricePanel::flat(8, 0.03));
        let m: MilpInstance<f64> = build(&cfg, &set, &travel, BuildMode::Stationary).unwrap();
        assert!(m.free_integer_cols().is_empty());
        assert!(m.integer.iter().all(|&f| !f));
        assert!(!m.rows.iter().any(|r| r.name.starts_with("deliver_")));
        let cb = m.col_index("c_B_n0_t3").unwrap();
        assert_eq!(m.upper[cb], 0.0);
    }

    #[test]
    fn pigeonhole_is_caught_before_solving() {
        let mut cfg = tiny(8);
        cfg.delivery.min_visits = [2, 0, 0];
        let travel = TravelTimeTable::constant(1, &cfg.horizon);
        let set = ScenarioSet::single(PricePanel::flat(8, 0.03));
        let err = build::<f64>(&cfg, &set, &travel, BuildMode::Spatial).unwrap_err();
        assert!(matches!(err, BuildError::Infeasible(_)));
    }

    #[test]
    fn horizon_mismatch_is_rejected() {
        let cfg = tiny(8);
        let travel = TravelTimeTable::constant(1, &cfg.horizon);
        let set = ScenarioSet::single(PricePanel::flat(7, 0.03));
        assert!(matches!(
            build::<f64>(&cfg, &set, &travel, BuildMode::Spatial),
            Err(BuildError::Dimension(_))
        ));
    }

    #[test]
    fn counterfactual_prices_the_cross_location_mean() {
        let cfg = tiny(2);
        let travel = TravelTimeTable::constant(1, &cfg.horizon);
        let panel = PricePanel::new([vec![0.0, 0.01], vec![0.03, 0.01], vec![0.06, 0.01]]).unwrap();
        let set = ScenarioSet::single(panel);
        let cf: MilpInstance<f64> = build_counterfactual(&cfg, &set, &travel).unwrap();
        let sp: MilpInstance<f64> = build(&cfg, &set, &travel, BuildMode::Spatial).unwrap();
        assert_eq!(cf.rows, sp.rows);
        for l in Location::ALL {
            let c = cf.col_index(&format!("c_{l}_n0_t0")).unwrap();
            let d = cf.col_index(&format!("d_{l}_n0_t0")).unwrap();
            assert!((cf.objective[c] - 0.03 * 0.25).abs() < 1e-15);
            assert!((cf.objective[d] + 0.03 * 0.25).abs() < 1e-15);
        }
    }
}
