//! `qedlat`: emitter-in-a-cavity-array runs from the command line.
//!
//! Exit status is 0 on success, 2 for a bad configuration and 1 when the
//! computation itself fails.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Overrides, RunConfig, SEED_ENV};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Run(#[from] qedlat::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "qedlat", version, about = "Non-Markovian emission of an atom in a disordered cavity array")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// One realization: trajectory.csv and measure.json
    Single(Overrides),
    /// Disorder average at one (sigma, g): ensemble.json and realizations.csv
    Ensemble(Overrides),
    /// Disorder averages over a sigma x g grid: sweep.csv and manifest.json
    Sweep(Overrides),
    /// Bound states of the clean array for each g: boundstates.json
    Boundstates(Overrides),
}

fn run(cli: Cli) -> Result<(), CliError> {
    let env_seed = std::env::var(SEED_ENV).ok();
    match cli.command {
        Command::Single(ov) => commands::single(&RunConfig::resolve(&ov, env_seed)?),
        Command::Ensemble(ov) => commands::ensemble(&RunConfig::resolve(&ov, env_seed)?),
        Command::Sweep(ov) => commands::sweep(&RunConfig::resolve(&ov, env_seed)?),
        Command::Boundstates(ov) => commands::boundstates(&RunConfig::resolve(&ov, env_seed)?),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qedlat: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
