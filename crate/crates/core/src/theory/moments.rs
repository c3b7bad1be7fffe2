//! Moments `a_k = ∫ λ^k ρ dλ` read off the resolvent on a circle.
//!
//! `Tr G(λ)/D = Σ_k a_k λ^{−k−1}` outside the unit disk, so
//! `a_k = (R^{k+1}/π) Re ∫₀^π g(Re^{iθ}) e^{i(k+1)θ} dθ`, using
//! `g(λ̄) = conj g(λ)` to stay in the upper half plane. The midpoint rule is
//! spectrally accurate for this periodic integrand.

use std::f64::consts::PI;

use faer::c64;

use super::solver::green_trace;
use super::TheoryParams;
use crate::error::{invalid, Result};

pub const DEFAULT_RADIUS: f64 = 10.0;
pub const DEFAULT_NODES: usize = 128;

pub fn contour_moments(
    params: &TheoryParams,
    k_max: usize,
    radius: f64,
    nodes: usize,
) -> Result<Vec<f64>> {
    params.validate()?;
    if !(radius > 1.0) || nodes == 0 {
        return Err(invalid("contour needs radius > 1 and at least one node"));
    }
    let h = PI / nodes as f64;
    let samples = (0..nodes)
        .map(|j| {
            let th = (j as f64 + 0.5) * h;
            green_trace(c64::from_polar(radius, th), params).map(|g| (th, g))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((0..=k_max)
        .map(|k| {
            let m = (k + 1) as f64;
            let s: f64 = samples
                .iter()
                .map(|(th, g)| (g * c64::from_polar(1.0, m * th)).re)
                .sum();
            radius.powi(k as i32 + 1) * s * h / PI
        })
        .collect())
}
