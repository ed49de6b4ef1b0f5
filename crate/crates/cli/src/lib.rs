//! Command-line front end: manifests, report documents and the five commands.

pub mod args;
pub mod commands;
pub mod error;
pub mod manifest;
pub mod report;

pub use args::Cli;
pub use error::{exit, CliError, CliResult};

/// Runs a parsed command line.
pub fn run(cli: Cli) -> CliResult<()> {
    commands::dispatch(cli.command)
}
