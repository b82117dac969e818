//! `plgnet`: simulate, fit, select, evaluate and benchmark sparse binary
//! pairwise Markov networks.
//!
//! Exit codes: 0 success, 2 usage or validation error, 3 infeasible
//! configuration, 4 solver failure.

mod args;
mod commands;
mod manifest;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::{CliError, EXIT_USAGE};

fn run(cli: &Cli) -> Result<(), CliError> {
    if cli.global.threads == 0 {
        return Err(CliError::usage("--threads must be at least 1"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.global.threads)
        .build_global()
        .map_err(|e| CliError::usage(e.to_string()))?;
    commands::ensure_output_dir(&cli.global.output_dir)?;
    match &cli.command {
        Command::Simulate(a) => commands::simulate(&cli.global, a),
        Command::Fit(a) => commands::fit(&cli.global, a),
        Command::Select(a) => commands::select(&cli.global, a),
        Command::Roc(a) => commands::roc(&cli.global, a),
        Command::Bench(a) => commands::bench(&cli.global, a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
