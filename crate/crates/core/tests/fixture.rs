//! The bundled price files are exactly what the synthetic generator produces.
//! Set `FLEETARB_REGEN=1` to rewrite them.

use std::path::PathBuf;

use chrono::NaiveDate;
use fleetarb::data::{load_prices_file, write_prices, SyntheticPrices};
use fleetarb::fleet::{Horizon, DEFAULT_LOCATION_NAMES};

fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

#[test]
fn bundled_prices_match_the_generator() {
    let syn = SyntheticPrices::fixture();
    let pair = syn.generate_pair(SyntheticPrices::FIXTURE_SEED);
    let names = DEFAULT_LOCATION_NAMES.map(String::from);
    let start = NaiveDate::from_ymd_opt(2024, 1, 1).unwrap().and_hms_opt(0, 0, 0).unwrap();
    let files = [("prices_realtime.csv", &pair.real_time), ("prices_dayahead.csv", &pair.day_ahead)];
    for (file, panel) in files {
        let mut text = Vec::new();
        write_prices(panel, start, 0.25, &names, &mut text).unwrap();
        let path = data_dir().join(file);
        if std::env::var("FLEETARB_REGEN").is_ok() {
            std::fs::write(&path, &text).unwrap();
        }
        let on_disk = std::fs::read(&path).expect("bundled price file");
        assert!(on_disk == text, "{file} is stale; rerun with FLEETARB_REGEN=1");

        let horizon = Horizon::new(syn.steps_per_day, syn.num_days, 0.25);
        let loaded = load_prices_file(&path, &horizon, &names).unwrap();
        for loc in fleetarb::fleet::Location::ALL {
            for (a, b) in loaded.series(loc).iter().zip(panel.series(loc)) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }
}
