use std::sync::Arc;

use miptlab_core::circuit::chain::{
    chain_support_block, default_chain_projector, ChainSpec, DEFAULT_MAX_QUBITS,
};
use miptlab_core::circuit::grid::{
    build_grid_unitary, grid_projector, GridSpec, DEFAULT_MAX_SITES,
};
use miptlab_core::ensemble::sample_support_block;
use miptlab_core::measurement::{
    build_projector, projector_from_qubits, Projector, SandwichKind, SandwichOperator,
};
use miptlab_core::rng::RngSeed;
use miptlab_core::spectral::{
    classify_decay, summarize, trajectory_probability, DecayClassification, SpectralHistogram,
    SpectrumSummary, TrajectorySeries,
};
use miptlab_core::theory::{
    analytic_density, contour_moments, gamma_c, near0_gap, near1_gap, w01_asymptotics_prediction,
    PredictedDecay, TheoryParams,
};
use miptlab_core::{ComplexMatrix, EigenSpectrum};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ChainConfig, ExperimentConfig, GridConfig, Source};
use crate::CliError;

/// Stream reserved for bootstrap resampling, disjoint from realization streams.
pub const BOOTSTRAP_STREAM: u64 = u64::MAX;
pub const BOOTSTRAP_RESAMPLES: usize = 200;

pub fn chain_spec(c: &ChainConfig, master: u64, stream: u64) -> ChainSpec {
    ChainSpec {
        l: c.l,
        k: c.k,
        theta: c.theta,
        phi: c.phi,
        beta: c.beta,
        seed: RngSeed::new(master, stream),
        max_qubits: DEFAULT_MAX_QUBITS,
    }
}

pub fn chain_projector(c: &ChainConfig) -> miptlab_core::Result<Projector> {
    match (&c.measured, &c.accepted) {
        (Some(m), Some(a)) => projector_from_qubits(c.l, m, a),
        _ => default_chain_projector(c.l, c.b),
    }
}

pub fn grid_spec(g: &GridConfig, master: u64, stream: u64) -> GridSpec {
    GridSpec {
        rows: g.rows,
        cols: g.cols,
        sites: g.sites,
        k: g.k,
        theta: g.theta,
        measured: g.measured.clone(),
        accepted: g.accepted,
        randomize: g.randomize,
        seed: RngSeed::new(master, stream),
        max_sites: DEFAULT_MAX_SITES,
    }
}

/// A system that yields one sandwich operator per realization index.
pub enum System {
    Rmt {
        params: miptlab_core::ensemble::EnsembleParams,
        projector: Projector,
    },
    Chain {
        cfg: ChainConfig,
        projector: Projector,
    },
    /// The grid drive has no randomness, so `U` is built once.
    Grid {
        cfg: GridConfig,
        u: Arc<ComplexMatrix>,
        projector: Option<Projector>,
    },
}

impl System {
    pub fn build(cfg: &ExperimentConfig, source: Source) -> Result<Self, CliError> {
        let num = |e: miptlab_core::Error| CliError::Numerical(e.to_string());
        Ok(match source {
            Source::Rmt => {
                let projector = build_projector(cfg.rmt.dim, cfg.rmt.rank()?).map_err(num)?;
                System::Rmt {
                    params: cfg.rmt.params(),
                    projector,
                }
            }
            Source::Chain1d => {
                let projector =
                    chain_projector(&cfg.chain).map_err(|e| CliError::Config(e.to_string()))?;
                System::Chain {
                    cfg: cfg.chain.clone(),
                    projector,
                }
            }
            Source::Grid2d => {
                let spec = grid_spec(&cfg.grid, cfg.seed, 0);
                let u = Arc::new(build_grid_unitary(&spec).map_err(num)?);
                let projector = if cfg.grid.randomize {
                    None
                } else {
                    Some(grid_projector(&spec).map_err(num)?)
                };
                System::Grid {
                    cfg: cfg.grid.clone(),
                    u,
                    projector,
                }
            }
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            System::Rmt { params, .. } => params.dim,
            System::Chain { projector, .. } => projector.dim(),
            System::Grid { u, .. } => u.dim(),
        }
    }

    /// Operator of realization `i`, seeded by `(master, i)`.
    pub fn operator(
        &self,
        master: u64,
        i: u64,
        kind: SandwichKind,
    ) -> miptlab_core::Result<SandwichOperator> {
        let seed = RngSeed::new(master, i);
        match self {
            System::Rmt { params, projector } => {
                let a = sample_support_block(params, seed, projector.support())?;
                SandwichOperator::from_compressed(
                    params.dim,
                    projector.support().to_vec(),
                    a.as_ref(),
                    kind,
                )
            }
            System::Chain { cfg, projector } => {
                let a = chain_support_block(&chain_spec(cfg, master, i), projector)?;
                SandwichOperator::from_compressed(
                    projector.dim(),
                    projector.support().to_vec(),
                    a.as_ref(),
                    kind,
                )
            }
            System::Grid { cfg, u, projector } => {
                let p = match projector {
                    Some(p) => p.clone(),
                    None => grid_projector(&grid_spec(cfg, master, i))?,
                };
                let a = u.principal_block(p.support());
                SandwichOperator::from_compressed(u.dim(), p.support().to_vec(), a.as_ref(), kind)
            }
        }
    }
}

/// `f(0..n)` on a pool of `workers` threads, results in index order.
pub fn map_realizations<T: Send>(
    n: usize,
    workers: usize,
    f: impl Fn(usize) -> T + Sync + Send,
) -> Vec<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("thread pool");
    pool.install(|| (0..n).into_par_iter().map(f).collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct Failure {
    pub realization: usize,
    pub error: String,
}

/// Per-cell bookkeeping echoed into the manifest.
#[derive(Clone, Debug, Serialize)]
pub struct CellRecord {
    pub label: String,
    pub requested: usize,
    pub completed: usize,
    pub accumulated_counts: u64,
    pub failed: bool,
    pub failures: Vec<Failure>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryStderr {
    pub atom0: f64,
    pub atom1: f64,
    pub continuum_edge: f64,
    pub gap: f64,
    pub moments: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnsembleSummary {
    pub atom0: f64,
    pub atom1: f64,
    pub continuum_edge: f64,
    pub gap: f64,
    pub moments: Vec<f64>,
    pub realizations: usize,
    pub stderr: SummaryStderr,
}

pub struct SpectraCell {
    pub hist: SpectralHistogram,
    pub summaries: Vec<SpectrumSummary>,
    pub spectra: Vec<EigenSpectrum>,
    pub record: CellRecord,
}

impl SpectraCell {
    pub fn ensemble(&self, master: u64) -> EnsembleSummary {
        ensemble_summary(&self.summaries, master)
    }
}

/// Histogram and per-realization summaries of one configuration.
pub fn run_spectra(
    cfg: &ExperimentConfig,
    source: Source,
    workers: usize,
    label: &str,
) -> Result<SpectraCell, CliError> {
    let system = System::build(cfg, source)?;
    let results = map_realizations(cfg.realizations, workers, |i| {
        system
            .operator(cfg.seed, i as u64, cfg.operator)
            .and_then(|op| op.spectrum())
    });
    let mut hist = SpectralHistogram::new(cfg.bins, system.dim(), cfg.eps_atom)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let mut summaries = Vec::new();
    let mut spectra = Vec::new();
    let mut failures = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        match r.and_then(|s| hist.add(&s).map(|_| s)) {
            Ok(s) => {
                summaries.push(summarize(&s, cfg.eps_atom, cfg.k_max));
                spectra.push(s);
            }
            Err(e) => failures.push(Failure {
                realization: i,
                error: e.to_string(),
            }),
        }
    }
    let record = CellRecord {
        label: label.to_string(),
        requested: cfg.realizations,
        completed: summaries.len(),
        accumulated_counts: hist.total(),
        failed: !failures.is_empty(),
        failures,
    };
    Ok(SpectraCell {
        hist,
        summaries,
        spectra,
        record,
    })
}

fn mean(x: &[f64]) -> f64 {
    if x.is_empty() {
        f64::NAN
    } else {
        x.iter().sum::<f64>() / x.len() as f64
    }
}

/// Standard deviation of the mean over `BOOTSTRAP_RESAMPLES` resamples.
pub fn bootstrap_stderr(x: &[f64], seed: RngSeed) -> f64 {
    let n = x.len();
    if n < 2 {
        return f64::NAN;
    }
    let mut rng = seed.rng();
    let means: Vec<f64> = (0..BOOTSTRAP_RESAMPLES)
        .map(|_| (0..n).map(|_| x[rng.index(n)]).sum::<f64>() / n as f64)
        .collect();
    let m = mean(&means);
    (means.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (means.len() - 1) as f64).sqrt()
}

pub fn ensemble_summary(summaries: &[SpectrumSummary], master: u64) -> EnsembleSummary {
    let seed = RngSeed::new(master, BOOTSTRAP_STREAM);
    let col =
        |f: &dyn Fn(&SpectrumSummary) -> f64| -> Vec<f64> { summaries.iter().map(f).collect() };
    let k = summaries.first().map_or(0, |s| s.moments.len());
    let stat = |v: Vec<f64>| (mean(&v), bootstrap_stderr(&v, seed));
    let (atom0, e0) = stat(col(&|s| s.atom0));
    let (atom1, e1) = stat(col(&|s| s.atom1));
    let (edge, ee) = stat(col(&|s| s.continuum_edge));
    let (gap, eg) = stat(col(&|s| s.gap));
    let (moments, em): (Vec<f64>, Vec<f64>) = (0..k).map(|j| stat(col(&|s| s.moments[j]))).unzip();
    EnsembleSummary {
        atom0,
        atom1,
        continuum_edge: edge,
        gap,
        moments,
        realizations: summaries.len(),
        stderr: SummaryStderr {
            atom0: e0,
            atom1: e1,
            continuum_edge: ee,
            gap: eg,
            moments: em,
        },
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TrajectoryOutcome {
    pub series: TrajectorySeries,
    pub stderr: Vec<f64>,
    pub realizations: usize,
    pub classification: Option<DecayClassification>,
    pub classification_error: Option<String>,
}

pub fn run_trajectory(
    cfg: &ExperimentConfig,
    workers: usize,
    label: &str,
) -> Result<(TrajectoryOutcome, CellRecord), CliError> {
    let t = &cfg.trajectory;
    let system = System::build(cfg, t.source)?;
    let rho0 = t.rho0.to_rho0();
    let results = map_realizations(cfg.realizations, workers, |i| {
        system
            .operator(cfg.seed, i as u64, cfg.operator)
            .and_then(|op| trajectory_probability(&op, &rho0, &t.d_list))
    });
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(s) => rows.push(s.w),
            Err(e) => failures.push(Failure {
                realization: i,
                error: e.to_string(),
            }),
        }
    }
    let n = rows.len();
    let w: Vec<f64> = (0..t.d_list.len())
        .map(|k| mean(&rows.iter().map(|r| r[k]).collect::<Vec<_>>()))
        .collect();
    let stderr: Vec<f64> = (0..t.d_list.len())
        .map(|k| {
            if n < 2 {
                return f64::NAN;
            }
            let m = w[k];
            (rows.iter().map(|r| (r[k] - m).powi(2)).sum::<f64>() / ((n - 1) * n) as f64).sqrt()
        })
        .collect();
    let series = TrajectorySeries {
        d: t.d_list.clone(),
        w,
        rho0: rho0.label(),
    };
    let (classification, classification_error) = match classify_decay(&series) {
        Ok(c) => (Some(c), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let record = CellRecord {
        label: label.to_string(),
        requested: cfg.realizations,
        completed: n,
        accumulated_counts: (n * t.d_list.len()) as u64,
        failed: !failures.is_empty() || n == 0,
        failures,
    };
    Ok((
        TrajectoryOutcome {
            series,
            stderr,
            realizations: n,
            classification,
            classification_error,
        },
        record,
    ))
}

#[derive(Clone, Debug, Serialize)]
pub struct TheoryOutcome {
    pub b: f64,
    pub gamma: f64,
    pub grid: Vec<f64>,
    pub density: Vec<f64>,
    pub atom0: f64,
    pub atom1: f64,
    pub moments: Vec<f64>,
    pub gamma_c: f64,
    pub near1_gap: f64,
    pub near0_gap: Option<f64>,
    pub w01_prediction: PredictedDecay,
}

pub fn run_theory(cfg: &ExperimentConfig) -> miptlab_core::Result<TheoryOutcome> {
    let t = &cfg.theory;
    let params = TheoryParams {
        b: t.b,
        gamma: t.gamma,
        im_shift: t.im_shift,
    };
    let grid: Vec<f64> = (0..t.points)
        .map(|k| (k as f64 + 0.5) / t.points as f64)
        .collect();
    let prof = analytic_density(&grid, &params)?;
    let moments = contour_moments(&params, cfg.k_max, 10.0, 128)?;
    Ok(TheoryOutcome {
        b: t.b,
        gamma: t.gamma,
        grid,
        density: prof.density,
        atom0: prof.atom0,
        atom1: prof.atom1,
        moments,
        gamma_c: gamma_c(t.b),
        near1_gap: near1_gap(&params),
        near0_gap: ((t.b - 0.5).abs() < 1e-12).then(|| near0_gap(t.gamma)),
        w01_prediction: w01_asymptotics_prediction(&params),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExperimentConfig {
        let mut c = ExperimentConfig::default();
        c.rmt.dim = 32;
        c.rmt.b = 0.75;
        c.realizations = 4;
        c
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let c = small();
        let a = run_spectra(&c, Source::Rmt, 1, "a").unwrap();
        let b = run_spectra(&c, Source::Rmt, 3, "b").unwrap();
        assert_eq!(a.hist, b.hist);
        assert_eq!(a.summaries, b.summaries);
    }

    #[test]
    fn merge_of_single_runs_equals_batch() {
        let c = small();
        let batch = run_spectra(&c, Source::Rmt, 1, "batch").unwrap().hist;
        let system = System::build(&c, Source::Rmt).unwrap();
        let mut merged = SpectralHistogram::new(c.bins, 32, c.eps_atom).unwrap();
        for i in 0..4 {
            let mut h = SpectralHistogram::new(c.bins, 32, c.eps_atom).unwrap();
            h.add(
                &system
                    .operator(c.seed, i, c.operator)
                    .unwrap()
                    .spectrum()
                    .unwrap(),
            )
            .unwrap();
            merged = merged.merge(&h).unwrap();
        }
        assert_eq!(merged, batch);
    }

    #[test]
    fn bootstrap_is_deterministic_and_sane() {
        let x: Vec<f64> = (0..50).map(|k| (k % 7) as f64).collect();
        let s = RngSeed::new(1, BOOTSTRAP_STREAM);
        let e = bootstrap_stderr(&x, s);
        assert_eq!(e, bootstrap_stderr(&x, s));
        let m = mean(&x);
        let sd = (x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / 49.0).sqrt();
        let naive = sd / 50f64.sqrt();
        assert!((e / naive - 1.0).abs() < 0.3, "{e} vs {naive}");
        assert!(bootstrap_stderr(&[1.0], s).is_nan());
    }

    #[test]
    fn grid_and_chain_systems_run() {
        let mut c = ExperimentConfig::default();
        c.realizations = 2;
        c.grid.rows = 2;
        c.grid.cols = 3;
        c.chain.l = 5;
        c.chain.k = 2;
        for s in [Source::Chain1d, Source::Grid2d] {
            let cell = run_spectra(&c, s, 1, "x").unwrap();
            assert_eq!(cell.record.completed, 2);
            assert_eq!(cell.hist.total() as usize, 2 * cell.hist.dim);
        }
    }
}
