//! Command-line driver: argument handling, command dispatch and table output.
//!
//! Exit codes: 0 success, 1 verification failure, 2 configuration error,
//! 3 numerical-accuracy failure.

pub mod commands;
pub mod config;
pub mod output;
pub mod verify;

pub use config::{Cli, Command, OutputFormat, ReportKind, RunConfig, OUT_DIR_ENV};

use thiserror::Error;

/// Tolerance below which a negative margin counts as a violation.
pub const MARGIN_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical accuracy failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<supnorm::Error> for CliError {
    fn from(e: supnorm::Error) -> Self {
        use supnorm::Error as E;
        match e {
            E::InvalidInput(_) | E::Precondition(_) | E::Unsupported(_) | E::NotUnimodular { .. } | E::Json(_) => {
                CliError::Config(e.to_string())
            }
            E::Io(io) => CliError::Io(io),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}

/// Outcome of a run that produced its output.
#[derive(Debug, Clone, PartialEq)]
pub enum Status {
    Passed,
    /// Output was written but a check failed.
    Failed(Vec<String>),
}

impl Status {
    pub fn exit_code(&self) -> i32 {
        match self {
            Status::Passed => 0,
            Status::Failed(_) => 1,
        }
    }
}

/// Run one command inside a worker pool of the configured size.
pub fn run(cfg: &RunConfig) -> Result<Status, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| CliError::Config(format!("--threads {}: {e}", cfg.threads)))?;
    pool.install(|| commands::dispatch(cfg))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(Status::Passed.exit_code(), 0);
        assert_eq!(Status::Failed(vec!["x".into()]).exit_code(), 1);
        assert_eq!(CliError::Config("x".into()).exit_code(), 2);
        assert_eq!(CliError::Numerical("x".into()).exit_code(), 3);
    }

    #[test]
    fn core_errors_map_to_exit_codes() {
        let bad = supnorm::hyperbolic::UpperHalfPoint::new(0.0, -1.0).unwrap_err();
        assert_eq!(CliError::from(bad).exit_code(), 2);
    }
}
