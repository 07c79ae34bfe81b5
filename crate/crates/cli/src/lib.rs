//! Command-line front end: config parsing, subcommands and file outputs.

pub mod commands;
pub mod config;
pub mod output;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::{cmd_reward_curve, cmd_solve, cmd_table, cmd_validate, CliError};
pub use config::{parse_config, ConfigError, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "voterbudget",
    version,
    about = "Optimal budget allocation under voter-model dynamics"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Directory for output files (overrides `output_dir` in the config).
    #[arg(long, global = true)]
    pub output_dir: Option<PathBuf>,

    /// Simulation seed (overrides `sim.seed`).
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Monte Carlo samples per estimate (overrides `sim.samples`).
    #[arg(long, global = true)]
    pub samples: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve by backward induction; write values.tsv and policy.tsv.
    Solve { config: PathBuf },
    /// Print the first-epoch allocation per initial state.
    Table { config: PathBuf },
    /// Expected reward at the horizon per initial supporter count, as CSV.
    RewardCurve { config: PathBuf },
    /// Run the self-check suite; exit status 5 on any failure.
    Validate { config: PathBuf },
}

impl Command {
    fn config_path(&self) -> &PathBuf {
        match self {
            Command::Solve { config }
            | Command::Table { config }
            | Command::RewardCurve { config }
            | Command::Validate { config } => config,
        }
    }
}

/// Loads the config named by the subcommand and applies flag overrides.
pub fn load_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut config = parse_config(cli.command.config_path())?;
    if cli.seed.is_some() || cli.samples.is_some() {
        let mut sim = config.sim.unwrap_or(config::SimSection {
            samples: config::DEFAULT_SAMPLES,
            seed: config::DEFAULT_SEED,
        });
        if let Some(seed) = cli.seed {
            sim.seed = seed;
        }
        if let Some(samples) = cli.samples {
            sim.samples = samples;
        }
        config.sim = Some(sim);
        config.validate()?;
    }
    if let Some(dir) = &cli.output_dir {
        config.output_dir = Some(dir.clone());
    }
    Ok(config)
}

/// Runs one invocation, writing human-readable output to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let config = load_config(cli)?;
    let dir = config.output_dir();
    let text = match &cli.command {
        Command::Solve { .. } => cmd_solve(&config, &dir)?.summary,
        Command::Table { .. } => cmd_table(&config, &dir)?,
        Command::RewardCurve { .. } => cmd_reward_curve(&config, &dir)?,
        Command::Validate { .. } => cmd_validate(&config, &dir)?,
    };
    out.write_all(text.as_bytes())
        .map_err(|source| CliError::Io {
            path: "<stdout>".into(),
            source,
        })
}
