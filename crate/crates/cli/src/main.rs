mod args;
mod commands;
mod error;

use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use crate::args::{Cli, Command, RunConfig};
use crate::commands::Outcome;
use crate::error::CliError;

fn run(cli: &Cli) -> Result<(Outcome, Option<std::path::PathBuf>), CliError> {
    let (outcome, cfg) = match &cli.command {
        Command::CriticalPoints(a) => {
            let cfg = RunConfig::try_from(a)?;
            (commands::critical_points(&cfg)?, cfg)
        }
        Command::Polynomials(a) => {
            let cfg = RunConfig::try_from(a)?;
            (commands::polynomials(&cfg)?, cfg)
        }
        Command::Verify(a) => {
            let cfg = RunConfig::try_from(a)?;
            (commands::verify(&cfg)?, cfg)
        }
        Command::Flow(a) => {
            let cfg = RunConfig::try_from(&a.run)?;
            (commands::flow(a, &cfg)?, cfg)
        }
    };
    Ok((outcome, cfg.out))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((outcome, out)) => {
            let written = match out {
                Some(path) => {
                    fs::write(&path, &outcome.text).map_err(|e| format!("{}: {e}", path.display()))
                }
                None => std::io::stdout()
                    .write_all(outcome.text.as_bytes())
                    .map_err(|e| e.to_string()),
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(error::exit::IO);
            }
            ExitCode::from(outcome.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
