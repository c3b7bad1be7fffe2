//! Experiment runner behind the `miptlab` binary.
//!
//! A run turns one [`config::ExperimentConfig`] into data files (CSV and JSON)
//! plus a `manifest.json` recording the effective config, code version, RNG
//! algorithm, per-cell accounting and SHA-256 checksums of every data file.
//! Data files depend only on the config and seed, never on the worker count or
//! the clock.

pub mod config;
pub mod output;
pub mod runner;

use std::path::Path;
use std::time::Instant;

use config::{ExperimentConfig, Mode};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            _ => 2,
        }
    }
}

/// Run `mode` and write its files into `cfg.out`. Returns whether any cell
/// failed.
pub fn run_to_dir(mode: Mode, cfg: &ExperimentConfig, workers: usize) -> Result<bool, CliError> {
    cfg.validate(mode)?;
    let start = Instant::now();
    let report = output::run(mode, cfg, workers)?;
    let failed = report.cells.iter().any(|c| c.failed);
    output::write_report(
        Path::new(&cfg.out),
        mode,
        cfg,
        &report,
        start.elapsed().as_secs_f64(),
    )?;
    Ok(failed)
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}
