//! `solwave`: batch driver for branch continuation, invariant checks and
//! the small analytic tools around them.

mod checks;
mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{ConfigError, Overrides, RunConfig};

pub const EXIT_SOLVER: u8 = 2;
pub const EXIT_USAGE: u8 = 64;
pub const EXIT_NO_INPUT: u8 = 66;
pub const EXIT_CANT_CREATE: u8 = 73;

#[derive(Debug, Parser)]
#[command(name = "solwave", version, about = "Solitary waves on flows of constant vorticity")]
struct Cli {
    /// JSON run configuration
    #[arg(long, global = true, env = "SOLWAVE_CONFIG")]
    config: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Trace the solitary-wave branch and write branch.csv, diagnostics.ndjson and solutions/
    Continue,
    /// Recompute every check on a solution file and print a pass/fail table
    Invariants { file: PathBuf },
    /// Critical and conjugate depths of the uniform flow at (γ, α)
    Conjugate {
        #[arg(long)]
        alpha: f64,
        /// Rows in the Q̂/Ŝ table
        #[arg(long, default_value_t = 11)]
        samples: usize,
    },
    /// Positive root of k coth k = γ + α
    Dispersion {
        #[arg(long)]
        alpha: f64,
    },
    /// Phase-portrait samples of the reduced ODE along its homoclinic orbit
    ReducedOde {
        /// Integrate over [-span, span]
        #[arg(long, default_value_t = 10.0)]
        span: f64,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
    },
    /// Physical surface and interior velocity field of a solution file
    Profile {
        file: PathBuf,
        /// Surface samples on [-L, L]
        #[arg(long, default_value_t = 257)]
        samples: usize,
        #[arg(long, default_value_t = 65)]
        nx: usize,
        #[arg(long, default_value_t = 17)]
        ny: usize,
    },
}

/// A failure carrying its exit status.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn new(code: u8, message: impl std::fmt::Display) -> Self {
        Self {
            code,
            message: message.to_string(),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Unreadable(m) => Failure::new(EXIT_NO_INPUT, m),
            ConfigError::Invalid(m) => Failure::new(EXIT_USAGE, m),
        }
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let config = RunConfig::load(cli.config.as_deref(), &cli.overrides)?;
    match cli.command {
        Command::Continue => commands::continue_branch(&config),
        Command::Invariants { file } => commands::invariants(&file),
        Command::Conjugate { alpha, samples } => commands::conjugate(config.gamma, alpha, samples),
        Command::Dispersion { alpha } => commands::dispersion(config.gamma, alpha),
        Command::ReducedOde { span, step } => commands::reduced_ode(&config, span, step),
        Command::Profile { file, samples, nx, ny } => commands::profile(&config, &file, samples, nx, ny),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("solwave: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
