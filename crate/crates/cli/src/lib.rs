//! Configuration, orchestration and output for the `geocomm` command.

pub mod config;
pub mod report;
pub mod run;

use std::path::Path;

use geocomm::Error;

pub use config::{ExperimentConfig, Overrides};
pub use run::{ResultRow, RunOptions, CSV_COLUMNS};

/// Version string stamped into every CSV row and JSON report.
pub fn version() -> &'static str {
    concat!("geocomm-", env!("CARGO_PKG_VERSION"))
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }

    /// Errors that stop a sweep rather than being recorded in a row.
    pub fn is_fatal(&self) -> bool {
        matches!(self, CliError::Io(_))
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::Precondition(_) | Error::Format(_) => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => CliError::Io(io),
            other => CliError::Config(format!("csv: {other:?}")),
        }
    }
}

/// Runs the grid of `cfg` (a single point when it has no sweep axes) and
/// writes the CSV to `cfg.out` or stdout.
pub fn sweep(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<run::RunSummary, CliError> {
    let grid = cfg.grid()?;
    let (mut sink, done) = run::open_sink(cfg.out.as_deref(), opts.resume)?;
    run::run_grid(cfg, &grid, opts, &mut sink, &done)
}

/// Runs only the `[model]` point of `cfg`.
pub fn test(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<run::RunSummary, CliError> {
    let mut single = cfg.clone();
    single.sweep = Default::default();
    sweep(&single, opts)
}

/// Writes `value` as pretty JSON to `out` or stdout.
pub fn emit_json<T: serde::Serialize>(value: &T, out: Option<&Path>) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Numerical(e.to_string()))?;
    match out {
        Some(p) => std::fs::write(p, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}
