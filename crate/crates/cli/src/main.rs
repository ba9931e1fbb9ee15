mod args;
mod commands;
mod config;
mod error;
mod output;

use std::process::ExitCode;

use clap::Parser;

use crate::args::Cli;
use crate::error::CliError;

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("raest: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run() -> Result<(), CliError> {
    let raw = std::env::args_os()
        .map(|a| {
            a.into_string()
                .map_err(|a| CliError::Config(format!("argument {a:?} is not UTF-8")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let cli = match Cli::try_parse_from(config::expand(raw)?) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                Err(CliError::Config("invalid arguments".into()))
            } else {
                Ok(())
            };
        }
    };
    commands::run(cli.command)
}
