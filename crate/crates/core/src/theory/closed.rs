//! Closed-form limits of the theory.

use std::f64::consts::PI;

use faer::c64;
use serde::{Deserialize, Serialize};

use super::TheoryParams;

/// Below this distance from `b = 1/2` the removable singularities are
/// evaluated from their series.
pub const HALF_FILLING_SERIES: f64 = 1e-6;

/// Continuum density for Haar `U`: `√((4bb̄ − λ)/λ) / (2π(1 − λ))` on `(0, 4bb̄)`.
pub fn haar_density(lambda: f64, b: f64) -> f64 {
    let edge = 4.0 * b * (1.0 - b);
    if !(lambda > 0.0 && lambda < edge) {
        return 0.0;
    }
    ((edge - lambda) / lambda).sqrt() / (2.0 * PI * (1.0 - lambda))
}

/// Atom weights `(at 0, at 1)` for Haar `U`.
pub fn haar_atoms(b: f64) -> (f64, f64) {
    (1.0 - b, (2.0 * b - 1.0).max(0.0))
}

/// Upper continuum edge `4bb̄` for Haar `U`.
pub fn haar_edge(b: f64) -> f64 {
    4.0 * b * (1.0 - b)
}

/// Distance of the continuum from `λ = 1` near half filling:
/// `8γ(1 − 4bb̄)/(γ + 2)²`.
pub fn near1_gap(params: &TheoryParams) -> f64 {
    let (b, g) = (params.b, params.gamma);
    8.0 * g * (1.0 - 4.0 * b * (1.0 - b)) / ((g + 2.0) * (g + 2.0))
}

/// Whether `b` lies in the calibrated window `|b − 1/2| ≤ 0.15` of the near-1 forms.
pub fn near1_valid(b: f64) -> bool {
    (b - 0.5).abs() <= 0.15 + 1e-12
}

/// Continuum part of the near-1 density,
/// `(γ + 2)/(4π√(2γ)) · √(1 − λ* − λ)/(1 − λ)` below `1 − λ*`.
pub fn near1_density(lambda: f64, params: &TheoryParams) -> f64 {
    let g = params.gamma;
    let top = 1.0 - near1_gap(params);
    if !(lambda < top) || lambda >= 1.0 {
        return 0.0;
    }
    (g + 2.0) / (4.0 * PI * (2.0 * g).sqrt()) * (top - lambda).sqrt() / (1.0 - lambda)
}

/// Atom at `λ = 1`: `(b − b̄) θ(b − b̄)`.
pub fn near1_atom(b: f64) -> f64 {
    (2.0 * b - 1.0).max(0.0)
}

/// Coefficients of `v₋ ≈ f₋x + √(f₋²x² + f₋y)` as `λ → 1`.
pub fn ansatz_xy(params: &TheoryParams) -> (f64, f64) {
    let (b, g) = (params.b, params.gamma);
    let bb = 1.0 - b;
    let delta = b - 0.5;
    if delta.abs() < HALF_FILLING_SERIES {
        return (2.0 * g / (g + 2.0) * delta, g / 2.0);
    }
    let x = 0.25 * (-(g * bb + 1.0) + ((g * bb - 1.0).powi(2) + 4.0 * g * b).sqrt());
    let num = 2.0 * b + bb * (g * b - 1.0 + (4.0 * g * bb + (g * b - 1.0).powi(2)).sqrt());
    (x, -x * num / (bb - b))
}

pub fn ansatz_v_minus(f_minus: c64, params: &TheoryParams) -> c64 {
    let (x, y) = ansatz_xy(params);
    f_minus * x + (f_minus * f_minus * x * x + f_minus * y).sqrt()
}

/// Lower continuum edge at half filling, `(4/27)(1 − γ)³`, zero for `γ ≥ 1`.
pub fn near0_gap(gamma: f64) -> f64 {
    if gamma >= 1.0 {
        0.0
    } else {
        4.0 / 27.0 * (1.0 - gamma).powi(3)
    }
}

/// Small-`λ` continuum density at `b = 1/2` in each phase.
pub fn near0_density(lambda: f64, gamma: f64) -> f64 {
    if lambda <= 0.0 {
        return 0.0;
    }
    if (gamma - 1.0).abs() < 1e-12 {
        3f64.sqrt() / (2.0 * PI) * lambda.powf(-1.0 / 3.0)
    } else if gamma > 1.0 {
        ((gamma - 1.0) / lambda).sqrt() / PI
    } else {
        let l0 = near0_gap(gamma);
        if lambda <= l0 {
            0.0
        } else {
            9.0 / (4.0 * PI * (1.0 - gamma).powf(2.5)) * (lambda - l0).sqrt()
        }
    }
}

/// Critical `γ` for the small-`λ` transition, `(1/2 − √(bb̄))/(b − 1/2)²`.
///
/// Since `(b − 1/2)² = 1/4 − bb̄`, this equals `1/(1/2 + √(bb̄))`, which is
/// evaluated instead: no cancellation, and the `b = 1/2` limit is exact.
pub fn gamma_c(b: f64) -> f64 {
    1.0 / (0.5 + (b * (1.0 - b)).sqrt())
}

/// `(a₀, a₁)` with `a₁ = b[1 − 32γb̄/(1 + √(1 + 4γ))³]`.
pub fn moments_theory(params: &TheoryParams) -> (f64, f64) {
    let (b, g) = (params.b, params.gamma);
    let s = 1.0 + (1.0 + 4.0 * g).sqrt();
    (1.0, b * (1.0 - 32.0 * g * (1.0 - b) / (s * s * s)))
}

/// `(a₂, a₃)` for `γ = 2`: `b³(2 − b)` and `b⁴(2b² − 6b + 5)`.
pub fn moments_cue(b: f64) -> (f64, f64) {
    (
        b.powi(3) * (2.0 - b),
        b.powi(4) * (2.0 * b * b - 6.0 * b + 5.0),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "regime", rename_all = "snake_case")]
pub enum PredictedDecay {
    /// `w ~ e^{−rate d}`; the rate is only known in closed form at half filling.
    Exponential {
        rate: Option<f64>,
    },
    PowerLaw {
        exponent: f64,
    },
}

/// Large-`d` behaviour of `Tr[Λ₀₁^d ρ₀]`.
pub fn w01_asymptotics_prediction(params: &TheoryParams) -> PredictedDecay {
    let gc = gamma_c(params.b);
    let half = (params.b - 0.5).abs() < HALF_FILLING_SERIES;
    let g = params.gamma;
    if (g - gc).abs() < 1e-9 {
        PredictedDecay::PowerLaw {
            exponent: 1.0 / 3.0,
        }
    } else if g > gc {
        PredictedDecay::PowerLaw { exponent: 0.5 }
    } else {
        PredictedDecay::Exponential {
            rate: half.then(|| near0_gap(g)),
        }
    }
}
