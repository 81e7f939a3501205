//! Batch front end: one JSON config in, data files plus `.meta.json`
//! sidecars out.

pub mod commands;
pub mod config;
mod output;

use thiserror::Error;

pub use commands::{cmd_pole, cmd_profile, cmd_scan, cmd_selftest, cmd_smatrix, cmd_survival};
pub use config::RunConfig;
pub use output::{format_number, Table};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{0}")]
    Compute(#[from] crate::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 1,
            Self::Compute(_) | Self::Io(_) => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Pole,
    Survival,
    Smatrix,
    Scan,
    Profile,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Pole => "pole",
            Self::Survival => "survival",
            Self::Smatrix => "smatrix",
            Self::Scan => "scan",
            Self::Profile => "profile",
        }
    }
}

/// Runs one command; returns the written data files.
pub fn run(command: Command, config: &RunConfig) -> Result<Vec<std::path::PathBuf>, CliError> {
    match command {
        Command::Pole => cmd_pole(config),
        Command::Survival => cmd_survival(config),
        Command::Smatrix => cmd_smatrix(config),
        Command::Scan => cmd_scan(config),
        Command::Profile => cmd_profile(config),
    }
}

/// Applies `STARK_THREADS` to the global thread pool.
pub fn configure_threads(value: Option<&str>) -> Result<(), CliError> {
    let Some(v) = value else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Config(format!("STARK_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("STARK_THREADS: {e}")))
}
