//! 2D grid of qubits driven by `U = u^K`, where `u` applies `fSim(θ, 0, 0)` once
//! to every nearest-neighbour bond.
//!
//! Sites are numbered row-major, `q = r * cols + c`. A ragged grid keeps only
//! the first `sites` positions, which allows qubit counts that are not a
//! product (e.g. 11 on a 3 x 4 frame).

use std::f64::consts::PI;

use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

use super::gates::fsim;
use super::{square_block, Circuit, Op};
use crate::error::{invalid, Result};
use crate::linalg::ComplexMatrix;
use crate::measurement::{projector_from_qubits, Projector};
use crate::rng::RngSeed;

pub const DEFAULT_MAX_SITES: usize = 14;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub rows: usize,
    pub cols: usize,
    /// Number of occupied sites; `None` fills the frame.
    pub sites: Option<usize>,
    pub k: usize,
    pub theta: f64,
    /// Three measured sites; `None` picks defaults near the centre.
    pub measured: Option<Vec<usize>>,
    /// Number of accepted outcomes `M` of the eight, so `b = M / 8`.
    pub accepted: usize,
    /// Draw the measured sites and accepted outcomes from `seed` instead.
    pub randomize: bool,
    pub seed: RngSeed,
    pub max_sites: usize,
}

impl GridSpec {
    pub fn new(rows: usize, cols: usize, accepted: usize) -> Self {
        Self {
            rows,
            cols,
            sites: None,
            k: 20,
            theta: PI / 8.0,
            measured: None,
            accepted,
            randomize: false,
            seed: RngSeed::new(0, 0),
            max_sites: DEFAULT_MAX_SITES,
        }
    }

    pub fn n(&self) -> usize {
        self.sites.unwrap_or(self.rows * self.cols)
    }

    pub fn b(&self) -> f64 {
        self.accepted as f64 / 8.0
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if n > self.rows * self.cols {
            return Err(invalid(format!(
                "{n} sites do not fit a {}x{} frame",
                self.rows, self.cols
            )));
        }
        if n < 4 {
            return Err(invalid(format!("grid needs at least 4 sites, got {n}")));
        }
        if n > self.max_sites {
            return Err(invalid(format!(
                "grid of {n} sites exceeds the dense limit {}",
                self.max_sites
            )));
        }
        if !(1..=7).contains(&self.accepted) {
            return Err(invalid(format!(
                "accepted outcome count must be in 1..=7, got {}",
                self.accepted
            )));
        }
        if let Some(m) = &self.measured {
            if m.len() != 3 {
                return Err(invalid("exactly three sites are measured"));
            }
        }
        Ok(())
    }
}

/// Every edge of the `rows x cols` grid once, in four groups: horizontal bonds
/// starting in even columns, in odd columns, vertical bonds starting in even
/// rows, in odd rows. Row-major within each group.
pub fn bond_order(rows: usize, cols: usize) -> Vec<(usize, usize)> {
    bond_order_sites(rows, cols, rows * cols)
}

pub fn bond_order_sites(rows: usize, cols: usize, sites: usize) -> Vec<(usize, usize)> {
    let id = |r: usize, c: usize| r * cols + c;
    let mut out = Vec::new();
    for parity in 0..2 {
        for r in 0..rows {
            for c in (parity..cols.saturating_sub(1)).step_by(2) {
                out.push((id(r, c), id(r, c + 1)));
            }
        }
    }
    for parity in 0..2 {
        for r in (parity..rows.saturating_sub(1)).step_by(2) {
            for c in 0..cols {
                out.push((id(r, c), id(r + 1, c)));
            }
        }
    }
    out.retain(|&(a, b)| a < sites && b < sites);
    out
}

/// One period `u` of the grid drive.
pub fn grid_period(spec: &GridSpec) -> Result<Circuit> {
    spec.validate()?;
    let g = fsim(spec.theta, 0.0, 0.0);
    let mut circ = Circuit::new(spec.n());
    for (a, b) in bond_order_sites(spec.rows, spec.cols, spec.n()) {
        circ.push(Op::Two { a, b, gate: g });
    }
    Ok(circ)
}

pub fn build_grid_unitary(spec: &GridSpec) -> Result<ComplexMatrix> {
    let circ = grid_period(spec)?;
    let cols: Vec<usize> = (0..circ.dim()).collect();
    Ok(ComplexMatrix::from_mat_unchecked(
        circ.unitary_columns(&cols, spec.k)?,
    ))
}

/// `U[S, S]` for the projector support.
pub fn grid_support_block(spec: &GridSpec, p: &Projector) -> Result<Mat<c64>> {
    let circ = grid_period(spec)?;
    if p.dim() != circ.dim() {
        return Err(invalid("projector dimension does not match the grid"));
    }
    let cols = circ.unitary_columns(p.support(), spec.k)?;
    Ok(square_block(&cols, p.support()))
}

/// Three pairwise non-adjacent sites, greedily closest to the frame centre.
pub fn default_measured_sites(rows: usize, cols: usize, sites: usize) -> Vec<usize> {
    let (cr, cc) = ((rows as f64 - 1.0) / 2.0, (cols as f64 - 1.0) / 2.0);
    let dist = |q: usize| {
        let (r, c) = ((q / cols) as f64, (q % cols) as f64);
        (r - cr).powi(2) + (c - cc).powi(2)
    };
    let mut order: Vec<usize> = (0..sites).collect();
    order.sort_by(|&a, &b| dist(a).total_cmp(&dist(b)).then(a.cmp(&b)));
    let adjacent = |a: usize, b: usize| {
        let (ra, ca, rb, cb) = (a / cols, a % cols, b / cols, b % cols);
        ra.abs_diff(rb) + ca.abs_diff(cb) == 1
    };
    let mut chosen: Vec<usize> = Vec::new();
    for q in order.iter().copied() {
        if chosen.len() == 3 {
            break;
        }
        if chosen.iter().all(|&c| !adjacent(c, q)) {
            chosen.push(q);
        }
    }
    // tiny frames may not admit three independent sites
    for q in order {
        if chosen.len() == 3 {
            break;
        }
        if !chosen.contains(&q) {
            chosen.push(q);
        }
    }
    chosen
}

fn outcome(code: usize) -> String {
    (0..3)
        .map(|k| if code >> k & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Projector of the grid measurement. Deterministic mode accepts outcome codes
/// `0..M` on the chosen sites; randomized mode draws the codes, then the sites,
/// from `spec.seed`.
pub fn grid_projector(spec: &GridSpec) -> Result<Projector> {
    spec.validate()?;
    let n = spec.n();
    let (sites, codes) = if spec.randomize {
        // codes first, so a seed accepts the same outcomes at every size
        let mut rng = spec.seed.rng();
        let mut codes = rng.choose_distinct(8, spec.accepted);
        codes.sort_unstable();
        let sites = rng.choose_distinct(n, 3);
        (sites, codes)
    } else {
        let sites = spec
            .measured
            .clone()
            .unwrap_or_else(|| default_measured_sites(spec.rows, spec.cols, n));
        (sites, (0..spec.accepted).collect())
    };
    let accepted: Vec<String> = codes.into_iter().map(outcome).collect();
    projector_from_qubits(n, &sites, &accepted)
}
