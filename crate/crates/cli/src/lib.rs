//! Command-line front end: gate reports, scans, campaigns, fits and exports.

pub mod args;
pub mod commands;
pub mod error;
pub mod io;
pub mod spec;

pub use args::Cli;
pub use error::{CliError, CliResult};
pub use spec::GateSpec;

use clap::Parser;

/// Parses `args` and runs the command; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match commands::run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
