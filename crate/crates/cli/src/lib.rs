//! Command-line driver: configs and presets, the sweep, diagnostics and
//! bounds runners, and their CSV/JSON artifacts.

pub mod config;
pub mod output;
pub mod run;

use thiserror::Error;

pub use config::{ExperimentConfig, PRESETS};
pub use run::{run_bounds, run_diagnostics, run_sweep, RunOptions};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error(transparent)]
    Core(#[from] bcanneal::Error),
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("cannot write CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("cannot encode JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// Process exit code; every fatal error maps to 1.
    pub fn exit_code(&self) -> i32 {
        1
    }
}

/// Exit code for a run whose rows partly failed.
pub const EXIT_PARTIAL: i32 = 2;
