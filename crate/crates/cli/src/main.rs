//! Reproducible experiment runner.
//!
//! Exit codes: 0 pass, 1 failed assertion, 2 usage error, 3 budget exceeded.

mod chain;
mod check_bounds;
mod error;
mod generate;
mod manifest;
mod output;
mod sep_demo;
mod simulate;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use error::CliResult;
use manifest::{load, Common};

#[derive(Parser, Debug)]
#[command(
    name = "qpurify",
    version,
    about = "Space/time separation experiments for oracle circuits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Measurement algorithm and its purification: space, time, success per t
    SepDemo {
        #[command(flatten)]
        common: Common,
    },
    /// Run the bound checkers and emit one JSON report per line
    CheckBounds {
        #[command(flatten)]
        common: Common,
    },
    /// Exact output distribution of a circuit file
    Simulate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        flags: simulate::Overrides,
    },
    /// Real oracle, counting, copy and symmetric simulators, compared stage by stage
    SimulatorChain {
        #[command(flatten)]
        common: Common,
    },
    /// Write an instance or circuit JSON file
    Generate {
        #[command(flatten)]
        args: generate::GenerateArgs,
        #[command(flatten)]
        common: Common,
    },
}

fn dispatch(cmd: Command) -> CliResult<()> {
    match cmd {
        Command::SepDemo { common } => sep_demo::run(&load("sep-demo", &common)?),
        Command::CheckBounds { common } => check_bounds::run(&load("check-bounds", &common)?),
        Command::Simulate { common, flags } => simulate::run(&load("simulate", &common)?, &flags),
        Command::SimulatorChain { common } => chain::run(&load("simulator-chain", &common)?),
        Command::Generate { args, common } => generate::run(&args, &common),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
