use std::process::ExitCode;

use clap::Parser;
use kappa_bounds::{run, Cli, EXIT_USAGE};

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(outcome) => ExitCode::from(outcome.exit_code()),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
