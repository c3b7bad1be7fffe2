use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use miptlab_core::ensemble::{EnsembleKind, EnsembleParams};
use miptlab_core::measurement::SandwichKind;
use miptlab_core::spectral::{Rho0, DEFAULT_BINS};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Rmt,
    Chain1d,
    Grid2d,
    Theory,
    Trajectory,
    Sweep,
}

/// Systems that produce a sandwich operator per realization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Rmt,
    Chain1d,
    Grid2d,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    /// Must agree with the subcommand when given.
    pub mode: Option<Mode>,
    pub seed: u64,
    pub out: PathBuf,
    pub workers: Option<usize>,
    pub realizations: usize,
    pub bins: usize,
    pub eps_atom: f64,
    pub k_max: usize,
    pub operator: SandwichKind,
    pub rmt: RmtConfig,
    pub chain: ChainConfig,
    pub grid: GridConfig,
    pub theory: TheoryConfig,
    pub trajectory: TrajectoryConfig,
    pub sweep: SweepConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            mode: None,
            seed: 0,
            out: PathBuf::from("out"),
            workers: None,
            realizations: 10,
            bins: DEFAULT_BINS,
            eps_atom: 1e-3,
            k_max: 3,
            operator: SandwichKind::LambdaP,
            rmt: RmtConfig::default(),
            chain: ChainConfig::default(),
            grid: GridConfig::default(),
            theory: TheoryConfig::default(),
            trajectory: TrajectoryConfig::default(),
            sweep: SweepConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RmtConfig {
    pub ensemble: EnsembleKind,
    pub dim: usize,
    pub gamma: f64,
    /// Fill fraction; the projector rank is `b · dim` rounded to the nearest
    /// integer.
    pub b: f64,
}

impl Default for RmtConfig {
    fn default() -> Self {
        Self {
            ensemble: EnsembleKind::CayleyGue,
            dim: 256,
            gamma: 2.0,
            b: 0.5,
        }
    }
}

impl RmtConfig {
    pub fn params(&self) -> EnsembleParams {
        match self.ensemble {
            EnsembleKind::CayleyGue => EnsembleParams::cayley(self.dim, self.gamma),
            EnsembleKind::Haar => EnsembleParams::haar(self.dim),
        }
    }

    pub fn rank(&self) -> Result<usize, CliError> {
        if !(self.b >= 0.0 && self.b <= 1.0) {
            return Err(field("rmt.b", format!("{} is outside [0, 1]", self.b)));
        }
        Ok((self.b * self.dim as f64).round() as usize)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChainConfig {
    pub l: usize,
    pub k: usize,
    pub theta: f64,
    pub phi: f64,
    pub beta: f64,
    /// One of 1/4, 1/2, 3/4, realized on the first qubits. Ignored when
    /// `measured` is set.
    pub b: f64,
    pub measured: Option<Vec<usize>>,
    pub accepted: Option<Vec<String>>,
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self {
            l: 9,
            k: 4,
            theta: PI / 6.0,
            phi: 2.0 * PI / 3.0,
            beta: 0.0,
            b: 0.5,
            measured: None,
            accepted: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub rows: usize,
    pub cols: usize,
    pub sites: Option<usize>,
    pub k: usize,
    pub theta: f64,
    /// Accepted outcomes `M` of the eight on three measured sites.
    pub accepted: usize,
    pub measured: Option<Vec<usize>>,
    /// Draw the measured sites and outcomes per realization.
    pub randomize: bool,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            rows: 3,
            cols: 3,
            sites: None,
            k: 20,
            theta: PI / 8.0,
            accepted: 4,
            measured: None,
            randomize: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TheoryConfig {
    pub b: f64,
    pub gamma: f64,
    /// Interior grid points `(k + 1/2)/points`.
    pub points: usize,
    pub im_shift: f64,
}

impl Default for TheoryConfig {
    fn default() -> Self {
        Self {
            b: 0.5,
            gamma: 2.0,
            points: 400,
            im_shift: miptlab_core::theory::DEFAULT_IM_SHIFT,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Rho0Config {
    MaximallyMixed,
    ProjectorNormalized,
    PureState { index: usize },
}

impl Rho0Config {
    pub fn to_rho0(&self) -> Rho0 {
        match self {
            Rho0Config::MaximallyMixed => Rho0::MaximallyMixed,
            Rho0Config::ProjectorNormalized => Rho0::ProjectorNormalized,
            Rho0Config::PureState { index } => Rho0::PureState(*index),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrajectoryConfig {
    pub source: Source,
    pub d_list: Vec<u64>,
    pub rho0: Rho0Config,
}

/// 0 followed by about 40 log-spaced values up to 1000.
pub fn default_d_list() -> Vec<u64> {
    let mut d = vec![0];
    for k in 0..=40 {
        let x = 10f64.powf(3.0 * k as f64 / 40.0).round() as u64;
        if d.last() != Some(&x) {
            d.push(x);
        }
    }
    d
}

impl Default for TrajectoryConfig {
    fn default() -> Self {
        Self {
            source: Source::Rmt,
            d_list: default_d_list(),
            rho0: Rho0Config::MaximallyMixed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub over: Source,
    /// For `chain1d` only 1/4, 1/2, 3/4; for `grid2d`, `8b` must be an integer.
    pub b: Vec<f64>,
    /// Used by `rmt` only.
    pub gamma: Vec<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            over: Source::Rmt,
            b: (1..8).map(|k| k as f64 / 8.0).collect(),
            gamma: vec![2.0],
        }
    }
}

fn field(name: &str, msg: impl Into<String>) -> CliError {
    CliError::Config(format!("{name}: {}", msg.into()))
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Field-level checks that do not need any sampling.
    pub fn validate(&self, mode: Mode) -> Result<(), CliError> {
        if let Some(m) = self.mode {
            if m != mode {
                return Err(field(
                    "mode",
                    format!("config says {m:?} but the command is {mode:?}"),
                ));
            }
        }
        if self.workers == Some(0) {
            return Err(field("workers", "must be at least 1"));
        }
        if self.realizations == 0 {
            return Err(field("realizations", "must be at least 1"));
        }
        if self.bins == 0 {
            return Err(field("bins", "must be at least 1"));
        }
        if !(self.eps_atom > 0.0 && self.eps_atom < 0.5) {
            return Err(field("eps_atom", "must lie in (0, 0.5)"));
        }
        match mode {
            Mode::Rmt => self.validate_source(Source::Rmt),
            Mode::Chain1d => self.validate_source(Source::Chain1d),
            Mode::Grid2d => self.validate_source(Source::Grid2d),
            Mode::Theory => self.validate_theory(),
            Mode::Trajectory => {
                let d = &self.trajectory.d_list;
                if d.is_empty() {
                    return Err(field("trajectory.d_list", "must not be empty"));
                }
                if d.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(field("trajectory.d_list", "must be strictly ascending"));
                }
                self.validate_source(self.trajectory.source)
            }
            Mode::Sweep => {
                if self.sweep.b.is_empty() {
                    return Err(field("sweep.b", "must not be empty"));
                }
                if self.sweep.over == Source::Rmt && self.sweep.gamma.is_empty() {
                    return Err(field("sweep.gamma", "must not be empty"));
                }
                for cell in self.sweep_cells() {
                    cell.validate_source(self.sweep.over)?;
                }
                Ok(())
            }
        }
    }

    fn validate_theory(&self) -> Result<(), CliError> {
        let t = &self.theory;
        if !(t.b > 0.0 && t.b < 1.0) {
            return Err(field("theory.b", "must lie in (0, 1)"));
        }
        if !(t.gamma > 0.0 && t.gamma.is_finite()) {
            return Err(field("theory.gamma", "must be positive"));
        }
        if t.points == 0 {
            return Err(field("theory.points", "must be at least 1"));
        }
        if !(t.im_shift > 0.0) {
            return Err(field("theory.im_shift", "must be positive"));
        }
        Ok(())
    }

    fn validate_source(&self, source: Source) -> Result<(), CliError> {
        match source {
            Source::Rmt => {
                self.rmt
                    .params()
                    .validate()
                    .map_err(|e| field("rmt", e.to_string()))?;
                self.rmt.rank()?;
            }
            Source::Chain1d => {
                let c = &self.chain;
                if c.measured.is_some() != c.accepted.is_some() {
                    return Err(field(
                        "chain.measured",
                        "measured and accepted must be given together",
                    ));
                }
                crate::runner::chain_projector(c).map_err(|e| field("chain", e.to_string()))?;
                crate::runner::chain_spec(c, 0, 0)
                    .validate()
                    .map_err(|e| field("chain", e.to_string()))?;
            }
            Source::Grid2d => {
                crate::runner::grid_spec(&self.grid, 0, 0)
                    .validate()
                    .map_err(|e| field("grid", e.to_string()))?;
            }
        }
        Ok(())
    }

    /// One config per cell of the sweep, in row-major `(b, gamma)` order.
    pub fn sweep_cells(&self) -> Vec<ExperimentConfig> {
        let mut out = Vec::new();
        for &b in &self.sweep.b {
            let gammas: Vec<Option<f64>> = match self.sweep.over {
                Source::Rmt => self.sweep.gamma.iter().map(|&g| Some(g)).collect(),
                _ => vec![None],
            };
            for g in gammas {
                let mut c = self.clone();
                match self.sweep.over {
                    Source::Rmt => {
                        c.rmt.b = b;
                        c.rmt.gamma = g.unwrap_or(c.rmt.gamma);
                    }
                    Source::Chain1d => {
                        c.chain.b = b;
                        c.chain.measured = None;
                        c.chain.accepted = None;
                    }
                    Source::Grid2d => c.grid.accepted = (8.0 * b).round() as usize,
                }
                out.push(c);
            }
        }
        out
    }
}
