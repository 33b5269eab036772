//! Command-line front end: model ingestion, the `analyze`, `simulate`,
//! `verify`, `path`, `phase` and `plot` commands, and CSV/SVG emission.
//!
//! Exit codes: 0 success, 1 validation error, 2 verification failure,
//! 3 verification with skipped checks only.

pub mod args;
mod commands;
pub mod output;
pub mod svg;
pub mod verify;

use std::fmt;

pub use args::{Cli, Command};
pub use commands::{analyze, path, phase, plot, simulate};
pub use verify::{run_verify, CheckRow, Status, VerifyReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_VERIFY_FAILED: i32 = 2;
pub const EXIT_SKIPPED: i32 = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn validation(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_VALIDATION,
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self::validation(message)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<bpre_core::Error> for CliError {
    fn from(e: bpre_core::Error) -> Self {
        Self::validation(e.to_string())
    }
}

/// Result of a command: exit code and text for standard output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
}

impl Outcome {
    pub fn ok(stdout: String) -> Self {
        Self {
            code: EXIT_OK,
            stdout,
        }
    }
}

pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Analyze(a) => analyze(a),
        Command::Simulate(a) => simulate(a),
        Command::Verify(a) => {
            let report = run_verify(a)?;
            Ok(report.outcome())
        }
        Command::Path(a) => path(a),
        Command::Phase(a) => phase(a),
        Command::Plot(a) => plot(a),
    }
}
