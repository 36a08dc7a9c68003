//! Command-line driver and HTTP service for the schema matching workbench.

pub mod args;
pub mod commands;
pub mod service;

use std::fmt;
use std::io::Write;

use clap::Parser;

pub use args::Cli;

/// Failure of a command, split by who has to act on it.
#[derive(Debug)]
pub enum CliError {
    /// Bad input: missing files, malformed documents, illegal requests.
    User(anyhow::Error),
    /// Anything the user could not have caused.
    Internal(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::User(_) => 1,
            CliError::Internal(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // one line: the error chain joined by ": "
        let e = match self {
            CliError::User(e) | CliError::Internal(e) => e,
        };
        write!(f, "{e:#}")
    }
}

impl From<concordia_core::Error> for CliError {
    fn from(e: concordia_core::Error) -> Self {
        CliError::User(e.into())
    }
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::User(e)
    }
}

pub type CliResult<T = ()> = std::result::Result<T, CliError>;

/// Parses `argv`, runs the command and returns the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if code == 0 {
                write!(out, "{e}")
            } else {
                write!(err, "{e}")
            };
            return code;
        }
    };
    match commands::dispatch(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
