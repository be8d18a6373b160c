use chrono::NaiveDate;
use fleetarb::data::{load_prices, write_prices, PricePanel};
use fleetarb::fleet::{parse_config, serialize_config, sample_fleet, FleetConfig, Horizon, Location, VehicleSpec};
use fleetarb::model::{evaluate_cost, to_mps_string};
use fleetarb::sim::{FleetSchedule, VehicleSchedule};
use proptest::prelude::*;

fn names() -> [String; 3] {
    ["San Antonio", "San Marcos", "Austin"].map(String::from)
}

fn parked_schedule(cfg: &FleetConfig, powers: &[(f64, f64)]) -> FleetSchedule {
    let mut s = FleetSchedule {
        dt_hours: cfg.horizon.dt_hours,
        vehicles: vec![VehicleSchedule {
            vehicle_id: 0,
            ind: vec![[1, 0, 0]; powers.len()],
            charge_kw: powers.iter().map(|&(c, _)| [c, 0.0, 0.0]).collect(),
            discharge_kw: powers.iter().map(|&(_, d)| [d, 0.0, 0.0]).collect(),
            soc_kwh: vec![0.0; powers.len()],
        }],
    };
    s.recompute_soc(cfg);
    s
}

proptest! {
    #[test]
    fn overlap_cancellation_keeps_soc(
        roundtrip in 0.9f64..=1.0,
        powers in prop::collection::vec((0.0f64..150.0, 0.0f64..150.0), 1..12),
    ) {
        let v = VehicleSpec::new(0, 700.0, 450.0, roundtrip, 70.0, Location::A);
        let cfg = FleetConfig::new(vec![v], Horizon::new(powers.len(), 1, 0.25));
        let before = parked_schedule(&cfg, &powers);
        let mut after = before.clone();
        after.cancel_overlap(&cfg);
        let v = &after.vehicles[0];
        for t in 0..powers.len() {
            prop_assert!(v.charge_kw[t][0] == 0.0 || v.discharge_kw[t][0] == 0.0);
            prop_assert!(v.charge_kw[t][0] >= 0.0 && v.discharge_kw[t][0] >= 0.0);
            prop_assert!((v.soc_kwh[t] - before.vehicles[0].soc_kwh[t]).abs() < 1e-9);
        }
        let mut recomputed = after.clone();
        recomputed.recompute_soc(&cfg);
        for t in 0..powers.len() {
            prop_assert!((recomputed.vehicles[0].soc_kwh[t] - v.soc_kwh[t]).abs() < 1e-9);
        }
    }

    #[test]
    fn lossless_cancellation_keeps_cost(
        powers in prop::collection::vec((0.0f64..150.0, 0.0f64..150.0), 1..12),
        price in -0.05f64..0.2,
    ) {
        let v = VehicleSpec::new(0, 700.0, 450.0, 1.0, 70.0, Location::A);
        let cfg = FleetConfig::new(vec![v], Horizon::new(powers.len(), 1, 0.25));
        let panel = PricePanel::flat(powers.len(), price);
        let before = parked_schedule(&cfg, &powers);
        let mut after = before.clone();
        after.cancel_overlap(&cfg);
        let (a, b) = (evaluate_cost(&before, &panel).unwrap(), evaluate_cost(&after, &panel).unwrap());
        prop_assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn price_files_round_trip(values in prop::collection::vec((-50.0f64..500.0, -50.0f64..500.0, -50.0f64..500.0), 1..20)) {
        let panel = PricePanel::new([
            values.iter().map(|v| v.0 / 1000.0).collect(),
            values.iter().map(|v| v.1 / 1000.0).collect(),
            values.iter().map(|v| v.2 / 1000.0).collect(),
        ]).unwrap();
        let start = NaiveDate::from_ymd_opt(2024, 3, 1).unwrap().and_hms_opt(0, 0, 0).unwrap();
        let mut buf = Vec::new();
        write_prices(&panel, start, 0.25, &names(), &mut buf).unwrap();
        let horizon = Horizon::new(values.len(), 1, 0.25);
        let back = load_prices(buf.as_slice(), "memory", &horizon, &names()).unwrap();
        for l in Location::ALL {
            for t in 0..values.len() {
                // Files carry four decimals of $/MWh.
                prop_assert!((back.price(l, t) - panel.price(l, t)).abs() <= 5.1e-8);
            }
        }
    }

    #[test]
    fn configs_round_trip(seed in any::<u64>(), n in 1usize..6, home_return in any::<bool>(), visits in 0u32..2) {
        let mut cfg = FleetConfig::new(sample_fleet(seed, n), Horizon::new(24, 2, 1.0));
        cfg.home_return = home_return;
        cfg.delivery.min_visits[Location::C.index()] = visits;
        let text = serialize_config(&cfg);
        prop_assert_eq!(parse_config(&text).unwrap(), cfg);
    }
}

#[test]
fn mps_numbers_parse_back_exactly() {
    let mut m = fleetarb::Instance::new("nums");
    let values = [0.1, 1.0 / 3.0, -2.5e-7, 1e12, 150.0 * 0.25, f64::MIN_POSITIVE];
    for (j, &v) in values.iter().enumerate() {
        m.add_col(format!("x{j}"), 0.0, 10.0, v, false);
    }
    let text = to_mps_string(&m);
    for (j, &v) in values.iter().enumerate() {
        let line = text.lines().find(|l| l.trim_start().starts_with(&format!("x{j} "))).unwrap();
        let field = line.split_whitespace().last().unwrap();
        assert_eq!(field.parse::<f64>().unwrap(), v, "{line}");
    }
}
