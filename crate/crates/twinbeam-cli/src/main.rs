//! `twinbeam`: seeded scenario runner for chaotic-light pairs and biphoton
//! coincidence profiles under dispersion.
//!
//! Exit codes: 0 on success, 2 for configuration errors, 3 when a numerical
//! guard trips (aliasing, unresolved coherence, truncated window), 1 for
//! i/o failures.

use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use twinbeam::scenario::{
    run_fields, run_hbt, run_identical_beams, run_pulse, run_quantum, run_sweep, Overrides,
    ScenarioConfig,
};

#[derive(Parser)]
#[command(
    name = "twinbeam",
    version,
    about = "Chaotic-light pair and biphoton dispersion scenarios",
    after_help = "Each scenario writes plot-ready CSV curves and a JSON summary that echoes\n\
                  the fully resolved configuration. Outputs are byte-identical across runs\n\
                  and thread counts for a fixed seed."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct CommonArgs {
    /// Base seed for the realization substreams.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Modes per beam.
    #[arg(long, global = true)]
    modes: Option<usize>,
    /// Ensemble size for correlation scenarios.
    #[arg(long, global = true)]
    realizations: Option<usize>,
    /// Dimensionless dispersion of medium 1.
    #[arg(long, global = true, allow_negative_numbers = true)]
    d1: Option<f64>,
    /// Dimensionless dispersion of medium 2.
    #[arg(long, global = true, allow_negative_numbers = true)]
    d2: Option<f64>,
    /// Correlation curves span [-lag-max, lag-max].
    #[arg(long, global = true)]
    lag_max: Option<f64>,
    /// Output directory for CSV/JSON files.
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    /// TOML config file; flags override file values, which override
    /// defaults. Unknown keys are rejected.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Cross-correlation of the conjugate beam pair, with and without media.
    Hbt,
    /// Intensity traces of one realization, before and after the media.
    Fields,
    /// Deficit sweep over media pairs plus the quadratic surface fit.
    Sweep,
    /// Short-pulse widths before/after media, classical and biphoton.
    Pulse,
    /// Beam 2 an identical copy of beam 1 instead of the conjugate.
    IdenticalBeams,
    /// Biphoton coincidence profile for the configured media.
    Quantum,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

enum CliError {
    Config(String),
    Scenario(twinbeam::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Scenario(e) if e.is_numerical_guard() => 3,
            CliError::Scenario(twinbeam::Error::Io(_)) => 1,
            CliError::Scenario(twinbeam::Error::Json(_)) => 1,
            CliError::Scenario(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "{msg}"),
            CliError::Scenario(e) => write!(f, "{e}"),
        }
    }
}

impl From<twinbeam::Error> for CliError {
    fn from(e: twinbeam::Error) -> Self {
        CliError::Scenario(e)
    }
}

fn run(cli: &Cli) -> Result<Vec<PathBuf>, CliError> {
    let config = resolve_config(&cli.common)?;
    let dir: &Path = &cli.common.out_dir;
    let files = match cli.command {
        Command::Hbt => run_hbt(&config)?.write(dir)?,
        Command::Fields => run_fields(&config)?.write(dir)?,
        Command::Sweep => run_sweep(&config)?.write(dir)?,
        Command::Pulse => run_pulse(&config)?.write(dir)?,
        Command::IdenticalBeams => run_identical_beams(&config)?.write(dir)?,
        Command::Quantum => run_quantum(&config)?.write(dir)?,
    };
    Ok(files)
}

fn resolve_config(common: &CommonArgs) -> Result<ScenarioConfig, CliError> {
    let mut config = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::Config(format!("cannot read config {}: {e}", path.display()))
            })?;
            toml::from_str(&text).map_err(|e| {
                CliError::Config(format!("config {}: {e}", path.display()))
            })?
        }
        None => ScenarioConfig::default(),
    };
    config.apply(&Overrides {
        seed: common.seed,
        modes: common.modes,
        realizations: common.realizations,
        d1: common.d1,
        d2: common.d2,
        lag_max: common.lag_max,
    });
    Ok(config)
}
