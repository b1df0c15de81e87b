use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use scargrow_cli::config::ScenarioConfig;
use scargrow_cli::{run, Command};

#[derive(Parser)]
#[command(
    name = "scargrow",
    about = "Exact state-vector lab for measurement-seeded entanglement growth in spin chains",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Args)]
struct Common {
    /// Scenario config (TOML)
    config: PathBuf,
    /// Override the outputs directory from the config
    #[arg(long)]
    outputs: Option<String>,
}

#[derive(Subcommand)]
enum Sub {
    /// Verify the polarized eigenstate and report conservation-law commutators
    Scarcheck(Common),
    /// Evolve the post-measurement state and emit magnetization series
    Evolve(Common),
    /// Track the effective region grown by the measurement
    Omega(Common),
    /// Full counting statistics of the magnetization per requested time
    Fcs(Common),
    /// Quantumness lower bound over the effective region, with growth fit
    Quantumness(Common),
    /// Pooled level-spacing statistics of the dual chain
    Spectrum(Common),
    /// Spectrum equivalence between the transistor chain and its dual
    Dualcheck(Common),
    /// Numerical U(1) bounds after flipping spins in the polarized state
    U1check(Common),
    /// Composite cat-state report: evolve + omega + fcs + quantumness + verdict
    Catreport(Common),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, common) = match &cli.command {
        Sub::Scarcheck(c) => (Command::Scarcheck, c),
        Sub::Evolve(c) => (Command::Evolve, c),
        Sub::Omega(c) => (Command::Omega, c),
        Sub::Fcs(c) => (Command::Fcs, c),
        Sub::Quantumness(c) => (Command::Quantumness, c),
        Sub::Spectrum(c) => (Command::Spectrum, c),
        Sub::Dualcheck(c) => (Command::Dualcheck, c),
        Sub::U1check(c) => (Command::U1check, c),
        Sub::Catreport(c) => (Command::Catreport, c),
    };
    let mut config = match ScenarioConfig::load(&common.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("scargrow: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if let Some(outputs) = &common.outputs {
        config.outputs = outputs.clone();
    }
    match run(command, &config) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("scargrow: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
