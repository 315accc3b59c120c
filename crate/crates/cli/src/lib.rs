//! Command-line front end of the `gcflab` flow laboratory.

use std::io::Write;

pub mod config;
pub mod error;
pub mod execute;
mod svg;

pub use config::{parse_config, parse_config_text, Command, Formats, RunConfig, SweepSpec};
pub use error::{CliError, CliResult};
pub use execute::{execute, load_report, run_one, Outcome, OUT_ENV};

/// Parses `args` and runs the command; returns the process exit code.
pub fn run_cli<I, S>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    match parse_config(args).and_then(|config| execute(&config, stdout)) {
        Ok(()) => 0,
        Err(CliError::Help(text)) => {
            let _ = stdout.write_all(text.as_bytes());
            0
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
