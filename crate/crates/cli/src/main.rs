//! `qss`: command-line front end for the quantum-counting supersampling
//! workbench.
//!
//! Exit codes: 0 success, 1 runtime or tolerance failure, 2 usage error.

mod args;
mod commands;
mod output;
mod spec;

use std::fmt::Display;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    pub fn usage(e: impl Display) -> Self {
        Self::Usage(e.to_string())
    }

    pub fn runtime(e: impl Display) -> Self {
        Self::Runtime(e.to_string())
    }
}

/// Options shared by every subcommand.
pub struct Global {
    pub seed: u64,
    pub out: Option<PathBuf>,
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(CliError::runtime)?;
    }
    let g = Global {
        seed: cli.seed,
        out: cli.out,
    };
    match &cli.command {
        Command::Pmf(a) => commands::pmf(a, &g),
        Command::Estimate(a) => commands::estimate(a, &g),
        Command::Sweep(a) => commands::sweep(a, &g),
        Command::Pattern(a) => commands::pattern(a, &g),
        Command::Disk(a) => commands::disk(a, &g),
        Command::Hdr(a) => commands::hdr(a, &g),
        Command::Verify(a) => commands::verify(a, &g),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("qss: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("qss: {msg}");
            ExitCode::from(1)
        }
    }
}
