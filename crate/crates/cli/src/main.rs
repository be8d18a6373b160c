use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use fleetarb::run::{cmd_export, cmd_run, cmd_verify, verify_schedule, RunManifest};
use fleetarb::sim::Scenario;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Which {
    Spatial,
    Counterfactual,
    Stationary,
    All,
}

/// Plan fleet charging, discharging and travel across three priced sites.
///
/// Runs the selected scenarios and writes JSON and CSV reports. With
/// `--export-mps` or `--verify` it does only that instead.
#[derive(Debug, Parser)]
#[command(name = "fleetarb", version)]
struct Args {
    /// Fleet configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Real-time price CSV; synthetic prices from --seed when omitted.
    #[arg(long)]
    prices_real: Option<PathBuf>,
    /// Day-ahead price CSV; adds the forecast replay.
    #[arg(long)]
    prices_dayahead: Option<PathBuf>,
    /// Typical-traffic CSV; travel times come from distances when omitted.
    #[arg(long)]
    traffic: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "all")]
    scenario: Which,
    /// Number of days to plan, overriding the config.
    #[arg(long)]
    days: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Relative optimality gap at which each solve stops.
    #[arg(long, default_value_t = 1e-4)]
    gap: f64,
    /// Time limit per MILP solve, in seconds.
    #[arg(long)]
    time_limit_s: Option<f64>,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// Write the MILP of this day as MPS and exit.
    #[arg(long, value_name = "DAY")]
    export_mps: Option<usize>,
    /// Compare branch and bound against the exhaustive oracle (up to MAXBIN binaries) and audit.
    #[arg(long, value_name = "MAXBIN")]
    verify: Option<usize>,
    /// With --verify: audit this schedule document instead of solving.
    #[arg(long, requires = "verify")]
    schedule: Option<PathBuf>,
}

impl Args {
    fn manifest(&self) -> RunManifest {
        RunManifest {
            config: self.config.clone(),
            prices_real: self.prices_real.clone(),
            prices_dayahead: self.prices_dayahead.clone(),
            traffic: self.traffic.clone(),
            scenarios: match self.scenario {
                Which::Spatial => vec![Scenario::Spatial],
                Which::Counterfactual => vec![Scenario::Counterfactual],
                Which::Stationary => vec![Scenario::Stationary],
                Which::All => Scenario::ALL.to_vec(),
            },
            days: self.days,
            seed: self.seed,
            gap: self.gap,
            time_limit_s: self.time_limit_s,
            out_dir: self.out_dir.clone(),
        }
    }
}

fn run(args: &Args) -> Result<u8, fleetarb::Error> {
    let manifest = args.manifest();
    if let Some(day) = args.export_mps {
        let path = cmd_export(&manifest, day)?;
        println!("wrote {}", path.display());
        return Ok(0);
    }
    if let Some(max_binaries) = args.verify {
        if let Some(schedule) = &args.schedule {
            let report = verify_schedule(&manifest, schedule)?;
            println!("{}", report.to_string().trim_end());
            println!("{}", if report.is_ok() { "PASS" } else { "FAIL" });
            return Ok(if report.is_ok() { 0 } else { 1 });
        }
        let outcome = cmd_verify(&manifest, max_binaries)?;
        println!("{outcome}");
        return Ok(if outcome.passed() { 0 } else { 1 });
    }
    let outcome = cmd_run(&manifest)?;
    print!("{}", outcome.summary);
    if let Some(replay) = &outcome.replay {
        println!(
            "forecast replay: planned {:.2}  settled {:.2}  delta {:.2}",
            replay.planned, replay.settled, replay.delta
        );
    }
    println!("reports written to {}", manifest.out_dir.display());
    if outcome.limit_reached() {
        eprintln!("warning: a solve stopped on its time limit before reaching the gap target");
        return Ok(5);
    }
    Ok(0)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
