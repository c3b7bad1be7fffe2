use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use miptlab::config::{ExperimentConfig, Mode};
use miptlab::CliError;

#[derive(Parser)]
#[command(
    name = "miptlab",
    version,
    about = "Spectra of measurement-sandwich operators"
)]
struct Cli {
    #[arg(value_enum)]
    mode: Mode,
    /// JSON config; every field is optional.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, env = "MIPTLAB_WORKERS")]
    workers: Option<usize>,
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = cli.out {
        cfg.out = o;
    }
    if cli.workers.is_some() {
        cfg.workers = cli.workers;
    }
    let workers = cfg.workers.unwrap_or_else(miptlab::default_workers);
    miptlab::run_to_dir(cli.mode, &cfg, workers)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => {
            eprintln!("miptlab: at least one cell failed; see manifest.json");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("miptlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
