//! Library side of the `adiakit` command-line tool.

pub mod commands;
pub mod config;
pub mod output;
pub mod plot;

use std::path::{Path, PathBuf};

use adiakit::AdiaError;
use clap::{Args, Parser, Subcommand};

pub use config::{ConfigError, ExperimentConfig};

#[derive(Debug, Parser)]
#[command(name = "adiakit", version, about = "Adiabatic error analysis for Lindblad schedules")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tracked eigenvalue moduli, gap and semisimplicity defect along s.
    Spectrum(CommonArgs),
    /// Adiabatic error over a ladder of total times, with a power-law fit.
    Sweep(CommonArgs),
    /// Property suites; exits with 1 if any fails.
    Verify(CommonArgs),
    /// The constant C and per-row verdicts error ≤ safety·C/T.
    Bound(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

impl Command {
    pub fn args(&self) -> &CommonArgs {
        match self {
            Command::Spectrum(a) | Command::Sweep(a) | Command::Verify(a) | Command::Bound(a) => a,
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Core(AdiaError),
    Io(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(e) => e.fmt(f),
            CliError::Core(e) => write!(f, "computation failed: {e}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<AdiaError> for CliError {
    fn from(e: AdiaError) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            _ => 1,
        }
    }
}

/// Files written by a command and whether its checks passed.
#[derive(Debug)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub passed: bool,
    pub summary: String,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.passed { 0 } else { 1 }
    }
}

pub fn run_config(command: &Command, cfg: &ExperimentConfig, out: &Path) -> Result<Outcome, CliError> {
    match command {
        Command::Spectrum(_) => commands::spectrum(cfg, out),
        Command::Sweep(_) => commands::sweep(cfg, out),
        Command::Verify(_) => commands::verify(cfg, out),
        Command::Bound(_) => commands::bound(cfg, out),
    }
}

pub fn run(command: &Command) -> Result<Outcome, CliError> {
    let args = command.args();
    let cfg = ExperimentConfig::load(&args.config)?.with_seed(args.seed);
    run_config(command, &cfg, &args.out)
}
