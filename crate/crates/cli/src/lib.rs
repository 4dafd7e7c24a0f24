//! Command-line front end for `hardy-core`: parses run configurations,
//! dispatches the commands and formats their tables.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod output;
pub mod report;

use std::fmt;

pub use commands::{run, Outcome};
pub use config::{Args, Command, Format, RunConfig};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NONCONVERGENCE: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Core(hardy_core::error::Error),
    /// A numerical failure reported as text by a sweep.
    Numeric(String),
    Io(String),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn io(e: impl fmt::Display) -> Self {
        CliError::Io(e.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        use hardy_core::error::Error;
        match self {
            CliError::Core(e) if e.is_convergence_failure() || matches!(e, Error::Overflow(_)) => EXIT_NONCONVERGENCE,
            CliError::Numeric(_) => EXIT_NONCONVERGENCE,
            _ => EXIT_CONFIG,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Numeric(m) => write!(f, "{m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<hardy_core::error::Error> for CliError {
    fn from(e: hardy_core::error::Error) -> Self {
        CliError::Core(e)
    }
}

/// Renders an outcome in the configured format.
pub fn render(cfg: &RunConfig, out: &Outcome) -> Result<String, CliError> {
    match cfg.format {
        Format::Csv => out.table.to_csv(),
        Format::Json => Ok(out.table.to_json(cfg.command.as_str(), &cfg.echo)),
    }
}
