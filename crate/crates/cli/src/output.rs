use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use miptlab_core::rng::RNG_ALGORITHM;
use miptlab_core::spectral::SpectralHistogram;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{ExperimentConfig, Mode, Source};
use crate::runner::{self, CellRecord, EnsembleSummary};
use crate::CliError;

pub struct Report {
    /// `(file name, bytes)` in emission order.
    pub files: Vec<(String, Vec<u8>)>,
    pub cells: Vec<CellRecord>,
}

/// Shortest round-trip form; exponent notation for very small or large values.
fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn histogram_csv(h: &SpectralHistogram) -> String {
    let mut s = String::from("bin_left,bin_right,count,density\n");
    let (a0, a1) = h.atom_fractions();
    writeln!(s, "0.0,0.0,{},{}", h.atom0, num(a0)).unwrap();
    for k in 0..h.bins {
        let (l, r) = h.edges(k);
        writeln!(
            s,
            "{},{},{},{}",
            num(l),
            num(r),
            h.counts[k],
            num(h.density(k))
        )
        .unwrap();
    }
    writeln!(s, "1.0,1.0,{},{}", h.atom1, num(a1)).unwrap();
    s
}

fn json<T: Serialize>(v: &T) -> Vec<u8> {
    let mut b = serde_json::to_vec_pretty(v).expect("serializable");
    b.push(b'\n');
    b
}

#[derive(Serialize)]
struct SpectraSummaryFile<'a> {
    #[serde(flatten)]
    summary: &'a EnsembleSummary,
    failed_realizations: usize,
}

fn source_label(source: Source, cfg: &ExperimentConfig) -> String {
    match source {
        Source::Rmt => format!(
            "rmt dim={} gamma={} b={}",
            cfg.rmt.dim, cfg.rmt.gamma, cfg.rmt.b
        ),
        Source::Chain1d => format!(
            "chain1d l={} k={} b={}",
            cfg.chain.l, cfg.chain.k, cfg.chain.b
        ),
        Source::Grid2d => format!(
            "grid2d {}x{} n={} k={} m={}",
            cfg.grid.rows,
            cfg.grid.cols,
            cfg.grid.sites.unwrap_or(cfg.grid.rows * cfg.grid.cols),
            cfg.grid.k,
            cfg.grid.accepted
        ),
    }
}

pub fn run(mode: Mode, cfg: &ExperimentConfig, workers: usize) -> Result<Report, CliError> {
    let mut files = Vec::new();
    let mut cells = Vec::new();
    match mode {
        Mode::Rmt | Mode::Chain1d | Mode::Grid2d => {
            let source = match mode {
                Mode::Rmt => Source::Rmt,
                Mode::Chain1d => Source::Chain1d,
                _ => Source::Grid2d,
            };
            let cell = runner::run_spectra(cfg, source, workers, &source_label(source, cfg))?;
            let summary = cell.ensemble(cfg.seed);
            files.push((
                "histogram.csv".into(),
                histogram_csv(&cell.hist).into_bytes(),
            ));
            files.push((
                "summary.json".into(),
                json(&SpectraSummaryFile {
                    summary: &summary,
                    failed_realizations: cell.record.failures.len(),
                }),
            ));
            cells.push(cell.record);
        }
        Mode::Trajectory => {
            let (out, record) =
                runner::run_trajectory(cfg, workers, &source_label(cfg.trajectory.source, cfg))?;
            let mut s = String::from("d,w,stderr\n");
            for k in 0..out.series.d.len() {
                writeln!(
                    s,
                    "{},{},{}",
                    out.series.d[k],
                    num(out.series.w[k]),
                    num(out.stderr[k])
                )
                .unwrap();
            }
            files.push(("series.csv".into(), s.into_bytes()));
            #[derive(Serialize)]
            struct TrajectorySummary<'a> {
                rho0: &'a str,
                realizations: usize,
                classification: &'a Option<miptlab_core::spectral::DecayClassification>,
                classification_error: &'a Option<String>,
            }
            files.push((
                "summary.json".into(),
                json(&TrajectorySummary {
                    rho0: &out.series.rho0,
                    realizations: out.realizations,
                    classification: &out.classification,
                    classification_error: &out.classification_error,
                }),
            ));
            cells.push(record);
        }
        Mode::Theory => {
            let label = format!("theory b={} gamma={}", cfg.theory.b, cfg.theory.gamma);
            match runner::run_theory(cfg) {
                Ok(t) => {
                    let mut s = String::from("lambda,density\n");
                    for (x, r) in t.grid.iter().zip(&t.density) {
                        writeln!(s, "{},{}", num(*x), num(*r)).unwrap();
                    }
                    files.push(("density.csv".into(), s.into_bytes()));
                    #[derive(Serialize)]
                    struct TheorySummary<'a> {
                        b: f64,
                        gamma: f64,
                        atom0: f64,
                        atom1: f64,
                        moments: &'a [f64],
                        gamma_c: f64,
                        near1_gap: f64,
                        near0_gap: Option<f64>,
                        w01_prediction: miptlab_core::theory::PredictedDecay,
                    }
                    files.push((
                        "summary.json".into(),
                        json(&TheorySummary {
                            b: t.b,
                            gamma: t.gamma,
                            atom0: t.atom0,
                            atom1: t.atom1,
                            moments: &t.moments,
                            gamma_c: t.gamma_c,
                            near1_gap: t.near1_gap,
                            near0_gap: t.near0_gap,
                            w01_prediction: t.w01_prediction,
                        }),
                    ));
                    cells.push(CellRecord {
                        label,
                        requested: 1,
                        completed: 1,
                        accumulated_counts: t.grid.len() as u64,
                        failed: false,
                        failures: vec![],
                    });
                }
                Err(e) => cells.push(CellRecord {
                    label,
                    requested: 1,
                    completed: 0,
                    accumulated_counts: 0,
                    failed: true,
                    failures: vec![runner::Failure {
                        realization: 0,
                        error: e.to_string(),
                    }],
                }),
            }
        }
        Mode::Sweep => {
            let over = cfg.sweep.over;
            let mut csv = String::from(
                "b,gamma,realizations,atom0,atom1,continuum_edge,gap,a1,atom1_stderr,gap_stderr,a1_stderr,failed\n",
            );
            let mut rows = Vec::new();
            for cell_cfg in cfg.sweep_cells() {
                let (b, gamma) = match over {
                    Source::Rmt => (cell_cfg.rmt.b, Some(cell_cfg.rmt.gamma)),
                    Source::Chain1d => (cell_cfg.chain.b, None),
                    Source::Grid2d => (cell_cfg.grid.accepted as f64 / 8.0, None),
                };
                let mut c = cell_cfg.clone();
                c.k_max = c.k_max.max(1);
                let cell = runner::run_spectra(&c, over, workers, &source_label(over, &c))?;
                let s = cell.ensemble(cfg.seed);
                writeln!(
                    csv,
                    "{},{},{},{},{},{},{},{},{},{},{},{}",
                    num(b),
                    gamma.map(num).unwrap_or_default(),
                    s.realizations,
                    num(s.atom0),
                    num(s.atom1),
                    num(s.continuum_edge),
                    num(s.gap),
                    num(s.moments[1]),
                    num(s.stderr.atom1),
                    num(s.stderr.gap),
                    num(s.stderr.moments[1]),
                    cell.record.failed
                )
                .unwrap();
                #[derive(Serialize)]
                struct Row {
                    b: f64,
                    gamma: Option<f64>,
                    #[serde(flatten)]
                    summary: EnsembleSummary,
                }
                rows.push(Row {
                    b,
                    gamma,
                    summary: s,
                });
                cells.push(cell.record);
            }
            files.push(("sweep.csv".into(), csv.into_bytes()));
            files.push(("summary.json".into(), json(&rows)));
        }
    }
    Ok(Report { files, cells })
}

#[derive(Serialize)]
struct FileChecksum<'a> {
    name: &'a str,
    sha256: String,
    bytes: usize,
}

#[derive(Serialize)]
struct Manifest<'a> {
    mode: Mode,
    config: &'a ExperimentConfig,
    code_version: &'a str,
    rng_algorithm: &'a str,
    wall_time_seconds: f64,
    cells: &'a [CellRecord],
    files: Vec<FileChecksum<'a>>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub fn write_report(
    dir: &Path,
    mode: Mode,
    cfg: &ExperimentConfig,
    report: &Report,
    wall: f64,
) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    for (name, bytes) in &report.files {
        fs::write(dir.join(name), bytes)?;
    }
    let mut effective = cfg.clone();
    effective.mode = Some(mode);
    let manifest = Manifest {
        mode,
        config: &effective,
        code_version: env!("CARGO_PKG_VERSION"),
        rng_algorithm: RNG_ALGORITHM,
        wall_time_seconds: wall,
        cells: &report.cells,
        files: report
            .files
            .iter()
            .map(|(n, b)| FileChecksum {
                name: n,
                sha256: sha256_hex(b),
                bytes: b.len(),
            })
            .collect(),
    };
    fs::write(dir.join("manifest.json"), json(&manifest))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn histogram_csv_layout() {
        let mut h = SpectralHistogram::new(2, 4, 1e-3).unwrap();
        h.add(&miptlab_core::EigenSpectrum::new(vec![
            0.0, 0.25, 0.75, 1.0,
        ]))
        .unwrap();
        let csv = histogram_csv(&h);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "bin_left,bin_right,count,density");
        assert_eq!(lines[1], "0.0,0.0,1,0.25");
        assert_eq!(lines[2], "0.0,0.5,1,0.5");
        assert_eq!(lines[4], "1.0,1.0,1,0.25");
    }

    #[test]
    fn sha_of_empty() {
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }

    #[test]
    fn sweep_has_one_row_per_b() {
        let mut cfg = ExperimentConfig::default();
        cfg.rmt.dim = 16;
        cfg.realizations = 2;
        let r = run(Mode::Sweep, &cfg, 1).unwrap();
        let csv = String::from_utf8(r.files[0].1.clone()).unwrap();
        assert_eq!(csv.lines().count(), 1 + 7);
    }

    #[test]
    fn theory_density_matches_haar() {
        let mut cfg = ExperimentConfig::default();
        cfg.theory.b = 0.25;
        cfg.theory.points = 400;
        let t = runner::run_theory(&cfg).unwrap();
        let edge = miptlab_core::theory::haar_edge(0.25);
        for (x, r) in t.grid.iter().zip(&t.density) {
            if (x - edge).abs() > 0.02 && *x > 0.02 {
                assert!(
                    (r - miptlab_core::theory::haar_density(*x, 0.25)).abs() < 1e-3,
                    "{x}: {r}"
                );
            }
        }
    }
}
