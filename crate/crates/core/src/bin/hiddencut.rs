use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use log::info;
use serde_json::json;

use hiddencut::experiments::{write_artifacts, ExperimentConfig, Verb};
use hiddencut::Error;

/// Log filter variable, e.g. `HIDDENCUT_LOG=info`.
const LOG_ENV: &str = "HIDDENCUT_LOG";

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Command {
    PurityScan,
    DistScan,
    PlantedSweep,
    EstimatorDemo,
    AbelianDemo,
}

impl From<Command> for Verb {
    fn from(c: Command) -> Self {
        match c {
            Command::PurityScan => Verb::PurityScan,
            Command::DistScan => Verb::DistScan,
            Command::PlantedSweep => Verb::PlantedSweep,
            Command::EstimatorDemo => Verb::EstimatorDemo,
            Command::AbelianDemo => Verb::AbelianDemo,
        }
    }
}

/// Hidden-cut simulations and postprocessing experiments.
#[derive(Debug, Parser)]
#[command(version, about)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// JSON experiment config; defaults are used for missing fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (overrides the config; default `out`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Config field override, e.g. `recipe.phi=1.0`; repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn run(cli: &Cli) -> Result<Vec<PathBuf>, Error> {
    let base = match &cli.config {
        Some(path) => ExperimentConfig::from_path(path)?,
        None => ExperimentConfig::default(),
    };
    let mut overrides = cli.overrides.clone();
    if let Some(seed) = cli.seed {
        overrides.push(format!("seed={seed}"));
    }
    let mut cfg = base.with_overrides(&overrides)?;
    // the destination is not part of the experiment, so it stays out of the artifacts
    let dir = cli
        .out
        .clone()
        .or(cfg.out.take())
        .unwrap_or_else(|| PathBuf::from("out"));
    let verb = Verb::from(cli.command);
    info!("running {verb} with seed {}", cfg.seed);
    let artifacts = verb.run(&cfg)?;
    write_artifacts(&dir, &artifacts)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or(LOG_ENV, "warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            let report = json!({
                "error": {
                    "kind": e.kind(),
                    "message": e.to_string(),
                    "command": Verb::from(cli.command).name(),
                }
            });
            eprintln!("{report}");
            ExitCode::FAILURE
        }
    }
}
