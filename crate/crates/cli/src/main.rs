mod args;
mod commands;
mod config;
mod error;
mod manifest;

use args::Cli;
use clap::FromArgMatches;
use error::{CliError, CliResult};

fn run(argv: Vec<String>) -> CliResult<()> {
    let argv = config::merge(argv)?;
    execute(&argv)
}

/// Parses an already-merged argument list and runs the command.
fn execute(argv: &[String]) -> CliResult<()> {
    let matches = config::try_matches(argv)?;
    let cli = Cli::from_arg_matches(&matches).map_err(config::usage)?;
    commands::dispatch(cli.command, argv)
}

fn main() {
    let argv: Vec<String> = std::env::args().collect();
    if let Err(e) = run(argv) {
        match &e {
            CliError::Usage(m) => eprint!("{m}"),
            other => eprintln!("fcd: error: {other}"),
        }
        std::process::exit(e.exit_code());
    }
}
