//! trajlab: synthesize, train on, sample, evaluate, cluster, and screen
//! driving-scenario trajectories from the command line.

mod commands;
mod config;
mod errors;
mod svg;

use clap::{Parser, Subcommand};
use commands::train::TrainStage;
use config::RunConfig;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "trajlab",
    about = "Driving-scenario trajectory generation and analysis pipeline",
    version
)]
struct Cli {
    /// Flat key=value configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Root seed; overrides the config's `seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; relative config paths resolve against it.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Config override, repeatable: --override key=value
    #[arg(long = "override", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Print every config key with its default and exit.
    #[arg(long, global = true)]
    help_config: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a labeled synthetic scenario dataset.
    Synth,
    /// Train a pipeline stage.
    Train {
        #[arg(value_enum)]
        which: TrainStage,
    },
    /// Sample trajectories from trained generators.
    Sample,
    /// Compare a generated set against a real set (or baseline-split).
    Eval,
    /// Embed, cluster, and score latent representations.
    Cluster,
    /// Rank trajectories by outlier probability.
    Outliers,
    /// Render an SVG from a dataset or CSV artifact.
    Plot,
}

fn run(cli: &Cli) -> errors::Result<()> {
    if cli.help_config {
        for (key, default, help) in config::SCHEMA {
            println!("{key:<28} {default:<16} {help}");
        }
        return Ok(());
    }
    let cfg = RunConfig::resolve(
        cli.config.as_deref(),
        &cli.overrides,
        cli.seed,
        &cli.out,
    )?;
    cfg.write_resolved()?;
    match &cli.command {
        Command::Synth => commands::synth::run(&cfg),
        Command::Train { which } => commands::train::run(&cfg, *which),
        Command::Sample => commands::sample::run(&cfg),
        Command::Eval => commands::eval::run(&cfg),
        Command::Cluster => commands::cluster::run(&cfg),
        Command::Outliers => commands::outliers::run(&cfg),
        Command::Plot => commands::plot::run(&cfg),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(&cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
