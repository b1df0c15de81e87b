//! Scenario runner around `scargrow-core`: TOML configs, figure-style
//! pipelines and plot-ready CSV/JSON outputs.

pub mod commands;
pub mod config;
pub mod emit;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Compute(#[from] scargrow_core::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// Process exit code: 2 config, 3 non-convergence, 4 invariant failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Compute(scargrow_core::Error::NonConvergence { .. }) => 3,
            CliError::Compute(_) => 4,
            CliError::Io(_) | CliError::Json(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Scarcheck,
    Evolve,
    Omega,
    Fcs,
    Quantumness,
    Spectrum,
    Dualcheck,
    U1check,
    Catreport,
}

pub fn run(command: Command, config: &config::ScenarioConfig) -> Result<()> {
    match command {
        Command::Scarcheck => commands::scarcheck(config),
        Command::Evolve => commands::evolve(config),
        Command::Omega => commands::omega(config),
        Command::Fcs => commands::fcs(config),
        Command::Quantumness => commands::quantumness(config),
        Command::Spectrum => commands::spectrum(config),
        Command::Dualcheck => commands::dualcheck(config),
        Command::U1check => commands::u1check(config),
        Command::Catreport => commands::catreport(config),
    }
}
