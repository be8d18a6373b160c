use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn fleetarb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fleetarb")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn tiny_run(out: &Path, extra: &[&str]) -> Output {
    let config = data("fleet_tiny.toml");
    let prices = data("prices_realtime.csv");
    let mut args = vec![
        "--config",
        config.to_str().unwrap(),
        "--prices-real",
        prices.to_str().unwrap(),
        "--out-dir",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    fleetarb(&args)
}

fn read_tree(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push((p.strip_prefix(dir).unwrap().to_path_buf(), fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn all_scenarios_print_three_summary_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let o = tiny_run(tmp.path(), &["--days", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    for name in ["spatial", "counterfactual", "stationary"] {
        assert_eq!(text.lines().filter(|l| l.starts_with(name)).count(), 1, "{text}");
        for file in ["report.json", "schedule.json", "net_power.csv", "vehicle_counts.csv", "soc.csv", "trips.csv", "metrics.csv"] {
            assert!(tmp.path().join(name).join(file).is_file(), "{name}/{file}");
        }
    }
    let summary = fs::read_to_string(tmp.path().join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 4);
}

#[test]
fn single_scenario_emits_one_report() {
    let tmp = tempfile::tempdir().unwrap();
    let o = tiny_run(tmp.path(), &["--scenario", "stationary"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let dirs: Vec<_> = fs::read_dir(tmp.path()).unwrap().filter_map(|e| e.ok()).filter(|e| e.path().is_dir()).collect();
    assert_eq!(dirs.len(), 1);
    assert_eq!(dirs[0].file_name(), "stationary");
}

#[test]
fn repeated_runs_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&a, &b] {
        let o = tiny_run(dir.path(), &["--days", "2", "--prices-dayahead", data("prices_dayahead.csv").to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let (ta, tb) = (read_tree(a.path()), read_tree(b.path()));
    assert!(ta.len() >= 24);
    assert_eq!(ta, tb);
    assert!(a.path().join("replay.csv").is_file());
}

#[test]
fn synthetic_prices_follow_the_seed() {
    let config = data("fleet_tiny.toml");
    let run = |seed: &str, dir: &Path| {
        let o = fleetarb(&[
            "--config",
            config.to_str().unwrap(),
            "--scenario",
            "stationary",
            "--seed",
            seed,
            "--out-dir",
            dir.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        fs::read(dir.join("stationary/report.json")).unwrap()
    };
    let (a, b, c) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert_eq!(run("5", a.path()), run("5", b.path()));
    assert_ne!(run("5", a.path()), run("6", c.path()));
}

#[test]
fn export_writes_a_minimisation_mps() {
    let tmp = tempfile::tempdir().unwrap();
    let o = tiny_run(tmp.path(), &["--export-mps", "0"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(tmp.path().join("day0.mps")).unwrap();
    assert!(text.contains("OBJSENSE\n    MIN\n"));
    assert!(text.contains("'INTORG'"));
    assert!(text.trim_end().ends_with("ENDATA"));
}

#[test]
fn export_rejects_day_past_horizon() {
    let tmp = tempfile::tempdir().unwrap();
    let o = tiny_run(tmp.path(), &["--export-mps", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("day out of range"), "{}", stderr(&o));
}

#[test]
fn verify_passes_on_the_tiny_instance() {
    let tmp = tempfile::tempdir().unwrap();
    let o = tiny_run(tmp.path(), &["--verify", "24"]);
    assert!(o.status.success(), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).trim_end().ends_with("PASS"));
}

#[test]
fn verify_on_flat_prices_finds_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let prices = tmp.path().join("flat.csv");
    let mut text = String::from("timestamp,zone,price_per_mwh\n");
    for t in 0..6 {
        for zone in ["San Antonio", "San Marcos", "Austin"] {
            text += &format!("2024-01-01T{:02}:{:02}:00,{zone},40\n", t / 4, 15 * (t % 4));
        }
    }
    fs::write(&prices, text).unwrap();
    let config = data("fleet_tiny.toml");
    let o = fleetarb(&[
        "--config",
        config.to_str().unwrap(),
        "--prices-real",
        prices.to_str().unwrap(),
        "--verify",
        "24",
    ]);
    assert!(o.status.success(), "{}{}", stdout(&o), stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("milp 0.000000 oracle 0.000000") || out.contains("milp -0.000000"), "{out}");
    assert!(out.trim_end().ends_with("PASS"));
}

#[test]
fn verify_names_the_row_a_corrupted_schedule_breaks() {
    let tmp = tempfile::tempdir().unwrap();
    let o = tiny_run(tmp.path(), &["--scenario", "spatial"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let path = tmp.path().join("spatial/schedule.json");
    let mut doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    let soc = &mut doc["vehicles"][0]["soc_kwh"][3];
    *soc = serde_json::json!(soc.as_f64().unwrap() + 5.0);
    let bad = tmp.path().join("bad.json");
    fs::write(&bad, serde_json::to_string(&doc).unwrap()).unwrap();

    let clean = tiny_run(tmp.path(), &["--scenario", "spatial", "--verify", "24", "--schedule", path.to_str().unwrap()]);
    assert!(clean.status.success(), "{}", stdout(&clean));
    let o = tiny_run(tmp.path(), &["--scenario", "spatial", "--verify", "24", "--schedule", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("dyn_n0_t3") && out.contains("dyn_n0_t4"), "{out}");
    assert!(out.trim_end().ends_with("FAIL"));
}

#[test]
fn verify_rejects_oversized_requests() {
    let o = fleetarb(&["--config", data("fleet_tiny.toml").to_str().unwrap(), "--verify", "40"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn error_classes_map_to_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let bad_config = tmp.path().join("bad.toml");
    fs::write(&bad_config, "[horizon]\nsteps_per_day = 4\nnum_days = 1\ndt_hours = 0.25\n[[vehicle]]\nid = 0\ncapacity_kwh = 100.0\ne_init_kwh = 150.0\np_drive_kw = 10.0\n").unwrap();
    let o = fleetarb(&["--config", bad_config.to_str().unwrap(), "--out-dir", tmp.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));

    let bad_prices = tmp.path().join("prices.csv");
    fs::write(&bad_prices, "timestamp,zone,price_per_mwh\n2024-01-01T00:00:00,Nowhere,30\n").unwrap();
    let o = fleetarb(&[
        "--config",
        data("fleet_tiny.toml").to_str().unwrap(),
        "--prices-real",
        bad_prices.to_str().unwrap(),
        "--out-dir",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));

    let infeasible = tmp.path().join("infeasible.toml");
    let text = fs::read_to_string(data("fleet_tiny.toml")).unwrap() + "\n[delivery.min_visits]\nB = 1\nC = 1\n";
    fs::write(&infeasible, text).unwrap();
    let o = fleetarb(&[
        "--config",
        infeasible.to_str().unwrap(),
        "--scenario",
        "spatial",
        "--out-dir",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
}
