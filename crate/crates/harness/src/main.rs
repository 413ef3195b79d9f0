use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use dr_core::aggregator::SgConfig;
use dr_core::home_solver::DEFAULT_VITAL_WEIGHT;
use dr_core::reference::default_capacity_grid;
use dr_core::SolverOptions;
use dr_harness::oracle::check_home_solver;
use dr_harness::{export_trace, parse_capacities, parse_scenario, run_sweep_with, write_csv, Scheme, SweepConfig};

/// Capacity sweeps of the demand-response schemes over a scenario file.
#[derive(Parser, Debug)]
#[command(name = "drsim", version)]
struct Cli {
    /// Scenario JSON file.
    #[arg(long, required_unless_present = "oracle_check")]
    scenario: Option<PathBuf>,

    /// Schemes to run (gm, lm, sg1, sg2), repeated or comma-separated.
    #[arg(long, value_delimiter = ',', default_values_t = [Scheme::Lm, Scheme::Sg1, Scheme::Sg2])]
    scheme: Vec<Scheme>,

    /// Total capacities in W: `c1,c2,...` or `lo:hi:n` log-spaced. Defaults
    /// to 20 points over 100 to 2000 W per home.
    #[arg(long, allow_hyphen_values = true)]
    capacity: Option<String>,

    #[arg(long, default_value_t = 100)]
    kmax: usize,

    /// Diminishing step constant of SG-1.
    #[arg(long, default_value_t = SgConfig::A1)]
    a1: f64,

    /// Step length of SG-2.
    #[arg(long, default_value_t = SgConfig::A2)]
    a2: f64,

    /// Weight of a vital unit against a comfort unit in greedients.
    #[arg(long, default_value_t = DEFAULT_VITAL_WEIGHT)]
    wv: f64,

    /// Temperature cell width of the home solver, °C.
    #[arg(long, default_value_t = 0.25)]
    temp_grid: f64,

    /// Restrict home appliances to a power grid of this many watts.
    #[arg(long)]
    quantum: Option<f64>,

    /// Power grid of the joint optimum, W.
    #[arg(long, default_value_t = 50.0)]
    gm_grid: f64,

    /// Output CSV (standard output when absent).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Per-iteration CSV of the SG run; needs exactly one SG scheme and one capacity.
    #[arg(long)]
    trace: Option<PathBuf>,

    /// Record wall-clock seconds in the CSV (the file is then no longer reproducible).
    #[arg(long)]
    timing: bool,

    /// Check the home solver against exhaustive search on random small homes.
    #[arg(long)]
    oracle_check: bool,

    #[arg(long, default_value_t = 100)]
    oracle_cases: usize,

    #[arg(long, default_value_t = 1)]
    seed: u64,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("drsim: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Box<dyn std::error::Error>> {
    let solver = SolverOptions {
        temp_grid: cli.temp_grid,
        power_quantum: cli.quantum,
        ..SolverOptions::default()
    };
    if !(cli.temp_grid > 0.0) {
        return Err("--temp-grid must be positive".into());
    }

    if cli.oracle_check {
        let r = check_home_solver(cli.oracle_cases, cli.seed, &solver);
        println!(
            "home solver oracle: {} cases, worst vital gap {:.4}, {} failures",
            r.cases,
            r.worst_gap,
            r.failures.len()
        );
        for f in &r.failures {
            println!("  {f}");
        }
        if !r.failures.is_empty() {
            return Ok(ExitCode::FAILURE);
        }
        if cli.scenario.is_none() {
            return Ok(ExitCode::SUCCESS);
        }
    }

    let path = cli.scenario.as_ref().expect("clap requires a scenario");
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let scenario = parse_scenario(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let capacities = match &cli.capacity {
        Some(c) => parse_capacities(c)?,
        None => default_capacity_grid(scenario.homes.len(), 20),
    };
    let config = SweepConfig {
        gm_grid: cli.gm_grid,
        timing: cli.timing,
        ..SweepConfig::with_sg(cli.kmax, cli.a1, cli.a2, cli.wv, solver)
    };
    if cli.kmax == 0 {
        return Err("--kmax must be at least 1".into());
    }

    let sg_runs = cli.scheme.iter().filter(|s| matches!(s, Scheme::Sg1 | Scheme::Sg2)).count() * capacities.len();
    if cli.trace.is_some() && sg_runs != 1 {
        return Err(format!("--trace needs exactly one SG run, got {sg_runs}").into());
    }
    let mut trace_err = None;
    let mut on_trace = |_: Scheme, _: f64, trace: &dr_core::SgTrace| {
        if let Some(p) = &cli.trace {
            let written = File::create(p)
                .map_err(Into::into)
                .and_then(|f| export_trace(trace, BufWriter::new(f)));
            if let Err(e) = written {
                trace_err = Some(format!("{}: {e}", p.display()));
            }
        }
    };
    let result = run_sweep_with(&scenario, &cli.scheme, &capacities, &config, &mut on_trace)?;
    if let Some(e) = trace_err {
        return Err(e.into());
    }

    let rows = result.rows();
    match &cli.out {
        Some(p) => {
            let f = File::create(p).map_err(|e| format!("{}: {e}", p.display()))?;
            write_csv(&rows, BufWriter::new(f))?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write_csv(&rows, &mut lock)?;
            lock.flush()?;
        }
    }
    Ok(ExitCode::SUCCESS)
}
