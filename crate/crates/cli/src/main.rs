use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use sqdiv_cli::{run, Cli, CliError, RunConfig};

fn main() -> ExitCode {
    let config = RunConfig::from(Cli::parse());
    let outcome = match run(&config) {
        Ok(outcome) => outcome,
        Err(err) => {
            eprintln!("error: {err}");
            return match err {
                CliError::Core(sqdiv_core::Error::Invariant(_)) => ExitCode::from(1),
                CliError::Usage(_) | CliError::Core(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            };
        }
    };
    let written = match &config.out {
        Some(path) => std::fs::write(path, &outcome.bytes),
        None => std::io::stdout().lock().write_all(&outcome.bytes),
    };
    if let Err(err) = written {
        eprintln!("error: {err}");
        return ExitCode::from(1);
    }
    if outcome.ok {
        ExitCode::SUCCESS
    } else {
        eprintln!("check failed");
        ExitCode::from(1)
    }
}
