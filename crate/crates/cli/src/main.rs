//! `eglab`: bound tables, gadget runs, EG sweeps and learning curves.

mod commands;
mod output;
mod settings;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use settings::{Flags, Settings};

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Assertion(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Assertion(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Assertion(m) | CliError::Io(m) => m,
        }
    }
}

impl From<eg_core::Error> for CliError {
    fn from(e: eg_core::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

#[derive(Parser)]
#[command(name = "eglab", version, about = "Surrogate-loss error guarantee lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form and recipe bounds for every (loss, nu, B) combination.
    Bounds {
        #[command(flatten)]
        flags: Flags,
    },
    /// Build a gadget distribution, minimize the loss on it and report risks.
    Gadget {
        /// prop1 or thm3
        kind: Option<String>,
        #[command(flatten)]
        flags: Flags,
    },
    /// Empirical EG over the gadget family for one (loss, nu, B).
    EgSweep {
        #[command(flatten)]
        flags: Flags,
    },
    /// Learning curve of norm-capped ERM on samples from a source distribution.
    Estimate {
        /// Distribution JSON file.
        #[arg(long)]
        source: Option<String>,
        /// Comma-separated sample sizes.
        #[arg(long)]
        n: Option<String>,
        #[arg(long)]
        trials: Option<String>,
        #[command(flatten)]
        flags: Flags,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Bounds { flags } => commands::bounds(&Settings::load(flags)?),
        Command::Gadget { kind, flags } => {
            commands::gadget(&Settings::load(flags)?.with("kind", kind))
        }
        Command::EgSweep { flags } => commands::eg_sweep(&Settings::load(flags)?),
        Command::Estimate {
            source,
            n,
            trials,
            flags,
        } => commands::estimate(
            &Settings::load(flags)?
                .with("source", source)
                .with("n", n)
                .with("trials", trials),
        ),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("eglab: error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
