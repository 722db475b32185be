use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use elaa_isac::runner::{load_scenario, run_experiment, write_output, Experiment};

/// Near-field ELAA / ISAC experiment runner.
#[derive(Debug, Parser)]
#[command(name = "elaa-isac-sim", version)]
struct Cli {
    /// fig3a | fig3b | fig4 | fig5 | tradeoff
    experiment: String,
    /// Scenario file (TOML key-value).
    #[arg(long)]
    config: PathBuf,
    /// Overrides the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the number of detection trials per point.
    #[arg(long)]
    trials: Option<u64>,
    /// Overrides the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write SVG plots.
    #[arg(long)]
    svg: bool,
    /// Lift the desk-scale caps on antennas and trials.
    #[arg(long)]
    full: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let experiment = match Experiment::parse(&cli.experiment) {
        Ok(e) => e,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let mut scenario = match load_scenario(&cli.config) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(seed) = cli.seed {
        scenario.seed = seed;
    }
    if let Some(trials) = cli.trials {
        scenario.trials = trials;
    }
    if let Some(out) = cli.out {
        scenario.output_dir = out;
    }
    if let Err(e) = scenario.validate() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let result = run_experiment(experiment, &scenario, cli.full).and_then(|out| write_output(&out, &scenario.output_dir, cli.svg));
    match result {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config_error() { 2 } else { 3 })
        }
    }
}
