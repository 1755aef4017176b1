//! Command-line runner for reversible agreement system scenarios.

mod config;
mod plot;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use config::ScenarioConfig;

/// Environment variable naming the default output directory.
const OUT_ENV: &str = "RAS_SIM_OUT";

#[derive(Parser)]
#[command(name = "ras-sim", about = "Simulate reversible agreement systems", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct ScenarioArgs {
    /// Scenario config file (flat key = value lines).
    #[arg(long)]
    config: PathBuf,
    /// Master seed, overriding the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (default: config `out`, then $RAS_SIM_OUT, then ./out).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Replica count, overriding the config.
    #[arg(long)]
    replicas: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write trace/summary artifacts.
    Run(ScenarioArgs),
    /// Run a lower-bound scenario across its sweep_n agent counts.
    Sweep(ScenarioArgs),
    /// Run the randomized library invariant suites.
    Check {
        /// Seed for the randomized suites.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Derive plot-ready tables from a finished run's artifacts.
    PlotData {
        /// Directory holding trace.csv (and positions.csv for swarm runs).
        #[arg(long)]
        dir: PathBuf,
    },
}

fn load_config(args: &ScenarioArgs) -> Result<(ScenarioConfig, PathBuf)> {
    let text = std::fs::read_to_string(&args.config)
        .with_context(|| format!("reading config {}", args.config.display()))?;
    let mut config = ScenarioConfig::parse(&text)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(replicas) = args.replicas {
        config.replicas = replicas;
        config.validate()?;
    }
    let out_dir = args
        .out
        .clone()
        .or_else(|| config.out.as_ref().map(PathBuf::from))
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("./out"));
    Ok((config, out_dir))
}

/// Exit status for failed invariant checks, distinct from usage errors.
const CHECK_FAILURE: u8 = 2;

fn main() -> ExitCode {
    // Remap clap usage errors onto exit code 1 so 2 stays reserved for
    // invariant-check failures; --help/--version still exit 0.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.exit_code() == 0 { 0 } else { 1 };
            let _ = err.print();
            return ExitCode::from(code as u8);
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run(args) => {
            let (config, out_dir) = load_config(&args)?;
            run::run_scenario(&config, &out_dir)?;
            println!("wrote artifacts to {}", out_dir.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep(args) => {
            let (config, out_dir) = load_config(&args)?;
            let out_dir = out_dir.join("sweep");
            run::run_sweep(&config, &out_dir)?;
            println!("wrote sweep artifacts to {}", out_dir.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Check { seed } => {
            if run::run_checks(seed)? {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(CHECK_FAILURE))
            }
        }
        Command::PlotData { dir } => {
            plot::emit_plot_data(&dir)?;
            println!("wrote plot tables to {}", dir.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}
