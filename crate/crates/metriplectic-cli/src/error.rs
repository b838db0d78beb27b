//! CLI-level errors carrying their process exit code.
//!
//! Exit code map: 0 success, 1 configuration or usage error, 2 numerical
//! or I/O failure during a run, 3 reproduction-tolerance failure (the
//! run completed but a checked value missed its target).

use std::fmt;

#[derive(Debug)]
pub enum CliError {
    /// Bad config file, bad flag value, unknown preset: exit code 1.
    Config(String),
    /// Integration, eigensolver, or output failure mid-run: exit code 2.
    Numeric(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numeric(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Numeric(msg) => write!(f, "run failed: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

/// Output-file writes map to the numeric-failure code: the run itself was
/// sound but its results could not be delivered.
pub fn io_err(context: &str, e: std::io::Error) -> CliError {
    CliError::Numeric(format!("{context}: {e}"))
}
