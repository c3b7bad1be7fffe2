//! Self-consistent random-matrix theory for the spectrum of `Λ_P` when `U` is
//! the Cayley transform of a GUE matrix with variance `γ/D`, together with its
//! closed-form limits.

pub mod closed;
pub mod density;
pub mod moments;
pub mod solver;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

pub use closed::{
    ansatz_v_minus, ansatz_xy, gamma_c, haar_atoms, haar_density, haar_edge, moments_cue,
    moments_theory, near0_density, near0_gap, near1_atom, near1_density, near1_gap, near1_valid,
    w01_asymptotics_prediction, PredictedDecay,
};
pub use density::{analytic_density, atoms, continuum_density, DensityProfile};
pub use moments::contour_moments;
pub use solver::{f_pm, green_trace, solve_vpm, SelfConsistentPoint};

pub const DEFAULT_IM_SHIFT: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoryParams {
    pub b: f64,
    pub gamma: f64,
    /// Base shift `η`; evaluation at `x` uses `η · max(1, |x|)`.
    pub im_shift: f64,
}

impl TheoryParams {
    pub fn new(b: f64, gamma: f64) -> Self {
        Self {
            b,
            gamma,
            im_shift: DEFAULT_IM_SHIFT,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.b > 0.0 && self.b < 1.0) {
            return Err(invalid(format!("theory needs 0 < b < 1, got {}", self.b)));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(invalid(format!(
                "theory needs gamma > 0, got {}",
                self.gamma
            )));
        }
        if !(self.im_shift > 0.0) {
            return Err(invalid("im_shift must be positive"));
        }
        Ok(())
    }
}
