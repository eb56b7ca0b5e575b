//! `fgs`: batch runner for fermionic Gaussian state experiments.

mod commands;
mod config;
mod error;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::{CommonArgs, ExperimentConfig};
use crate::error::CliError;

#[derive(Parser)]
#[command(name = "fgs", version, about = "Fermionic Gaussian state experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Single-particle spectrum, with the closed form alongside when one exists.
    #[command(allow_negative_numbers = true)]
    Spectrum(CommonArgs),
    /// Ground-state correlation matrix and observables, or a TFI splitting sweep.
    #[command(allow_negative_numbers = true)]
    GroundState(CommonArgs),
    /// Thermal state at fixed beta or fixed energy.
    #[command(allow_negative_numbers = true)]
    Thermal(CommonArgs),
    /// Time series after a quench.
    #[command(allow_negative_numbers = true)]
    Quench(CommonArgs),
    /// Entanglement contour of a block of the ground state.
    #[command(allow_negative_numbers = true)]
    Contour(CommonArgs),
    /// Bond-dimension reduction report.
    #[command(allow_negative_numbers = true)]
    Rbd(CommonArgs),
}

fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("FGS_NUM_THREADS") else {
        return Ok(());
    };
    let threads: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Config(format!("FGS_NUM_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Config(format!("cannot start worker pool: {e}")))
}

fn run(cli: Cli) -> Result<(), CliError> {
    init_threads()?;
    let (args, cmd): (CommonArgs, fn(&ExperimentConfig) -> Result<(), CliError>) = match cli.command {
        Command::Spectrum(a) => (a, commands::spectrum),
        Command::GroundState(a) => (a, commands::ground_state),
        Command::Thermal(a) => (a, commands::thermal),
        Command::Quench(a) => (a, commands::quench),
        Command::Contour(a) => (a, commands::contour_cmd),
        Command::Rbd(a) => (a, commands::rbd_cmd),
    };
    cmd(&ExperimentConfig::resolve(args)?)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
