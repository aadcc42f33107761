//! Command-line front end: simulation studies, stability curves, streaming
//! selection over CSV input and quantile bands.
//!
//! Exit status is 0 on success, 1 for configuration errors, 2 for data errors
//! and 3 when an estimator diverges.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod svg;

use std::ffi::OsString;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::experiment::Preset;
pub use error::{CliError, CliResult};

pub fn dispatch(command: Command) -> CliResult<()> {
    match command {
        Command::Example1(a) => commands::experiment::run(Preset::Example1, a),
        Command::Example2(a) => commands::experiment::run(Preset::Example2, a),
        Command::Stability(a) => commands::stability::run(a),
        Command::Stream(a) => commands::stream::run(a),
        Command::Quantile(a) => commands::quantile::run(a),
    }
}

/// Parses `args` (program name first), runs the command and maps the outcome
/// to an exit status.
pub fn run_cli<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("wrv: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
