//! Density of states `ρ(λ) = −Im Tr G(λ + i0⁺) / (πD)` from the solver.
//!
//! The atoms at `λ = 0, 1` are measured as residues of the resolvent trace and
//! their poles are removed before taking the imaginary part, so their
//! Lorentzian tails do not leak into the continuum. The continuum is then
//! evaluated at two shifts `η` and `10η` and extrapolated linearly to `η → 0`.

use std::f64::consts::PI;

use faer::c64;
use serde::{Deserialize, Serialize};

use super::solver::green_trace;
use super::TheoryParams;
use crate::error::{invalid, Error, Result};
use crate::quad;

/// Values below this (after extrapolation) signal a wrong branch.
pub const NEGATIVE_DENSITY_TOL: f64 = -1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityProfile {
    pub grid: Vec<f64>,
    pub density: Vec<f64>,
    pub atom0: f64,
    pub atom1: f64,
}

/// Residue `lim_{η→0} iη Tr G(λ₀ + iη)/D`, extrapolated in `√η` from two shifts.
pub fn atom_weight(at: f64, params: &TheoryParams) -> Result<f64> {
    let (e1, e2) = (1e-8, 1e-10);
    let w = |eta: f64| -> Result<f64> {
        Ok((c64::new(0.0, eta) * green_trace(c64::new(at, eta), params)?).re)
    };
    let (w1, w2) = (w(e1)?, w(e2)?);
    let (s1, s2) = (e1.sqrt(), e2.sqrt());
    let est = (w2 * s1 - w1 * s2) / (s1 - s2);
    let est = est.clamp(0.0, 1.0);
    Ok(if est < 1e-9 { 0.0 } else { est })
}

/// `(weight at 0, weight at 1)`.
pub fn atoms(params: &TheoryParams) -> Result<(f64, f64)> {
    Ok((atom_weight(0.0, params)?, atom_weight(1.0, params)?))
}

/// Continuum density at a single shift, atoms `(w0, w1)` removed.
pub fn continuum_at_shift(x: f64, eta: f64, params: &TheoryParams, w: (f64, f64)) -> Result<f64> {
    let lam = c64::new(x, eta);
    let tr = green_trace(lam, params)?;
    let cont = tr - w.0 / lam - w.1 / (lam - 1.0);
    Ok(-cont.im / PI)
}

/// Distance from an atom below which the shift is reduced in proportion.
const ATOM_CLEARANCE: f64 = 1e-3;

/// Extrapolated continuum density at `x`, given the atom weights.
///
/// The shift is `im_shift · max(1, |x|)`, reduced by `d / 10⁻³` when `x` is a
/// distance `d < 10⁻³` from 0 or 1 so that `η ≪ d` holds up to the edges.
pub fn continuum_density(x: f64, params: &TheoryParams, w: (f64, f64)) -> Result<f64> {
    let d = x.abs().min((1.0 - x).abs());
    let eta = params.im_shift * x.abs().max(1.0) * (d / ATOM_CLEARANCE).min(1.0);
    if !(eta > 0.0) {
        return Err(invalid(format!("density requested on an atom at {x}")));
    }
    let small = continuum_at_shift(x, eta, params, w)?;
    let large = continuum_at_shift(x, 10.0 * eta, params, w)?;
    let rho = (10.0 * small - large) / 9.0;
    if rho < NEGATIVE_DENSITY_TOL || !rho.is_finite() {
        return Err(Error::NegativeDensity {
            lambda: x,
            value: rho,
        });
    }
    Ok(rho.max(0.0))
}

/// Continuum density on `grid ⊂ (0, 1)` plus the two atoms.
pub fn analytic_density(grid: &[f64], params: &TheoryParams) -> Result<DensityProfile> {
    params.validate()?;
    if let Some(&bad) = grid.iter().find(|&&x| !(x > 0.0 && x < 1.0)) {
        return Err(invalid(format!("density grid point {bad} outside (0, 1)")));
    }
    let w = atoms(params)?;
    let density = grid
        .iter()
        .map(|&x| continuum_density(x, params, w))
        .collect::<Result<Vec<_>>>()?;
    Ok(DensityProfile {
        grid: grid.to_vec(),
        density,
        atom0: w.0,
        atom1: w.1,
    })
}

/// `∫ λ^k ρ_cont dλ` over `(lo, hi)` by clustered quadrature.
pub fn continuum_moment(
    params: &TheoryParams,
    k: i32,
    lo: f64,
    hi: f64,
    panels: usize,
) -> Result<f64> {
    let w = atoms(params)?;
    let mut s = 0.0;
    for (x, wt) in quad::nodes(lo, hi, panels) {
        s += wt * x.powi(k) * continuum_density(x, params, w)?;
    }
    Ok(s)
}

/// Total spectral mass (continuum plus atoms); should be 1.
pub fn total_mass(params: &TheoryParams, panels: usize) -> Result<f64> {
    let (a0, a1) = atoms(params)?;
    Ok(continuum_moment(params, 0, 0.0, 1.0, panels)? + a0 + a1)
}

/// Mean `∫ λ ρ dλ` including the atom at 1.
pub fn first_moment(params: &TheoryParams, panels: usize) -> Result<f64> {
    let (_, a1) = atoms(params)?;
    Ok(continuum_moment(params, 1, 0.0, 1.0, panels)? + a1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::closed::{haar_atoms, haar_density, moments_theory};

    #[test]
    fn gamma_two_matches_haar() {
        for b in [0.25, 0.5, 0.875] {
            let p = TheoryParams::new(b, 2.0);
            let edge = 4.0 * b * (1.0 - b);
            let grid: Vec<f64> = (1..40)
                .map(|k| k as f64 / 40.0)
                .filter(|&x| (x - edge).abs() > 0.02)
                .collect();
            let prof = analytic_density(&grid, &p).unwrap();
            for (x, rho) in grid.iter().zip(&prof.density) {
                assert!(
                    (rho - haar_density(*x, b)).abs() < 1e-3,
                    "b={b} x={x}: {rho}"
                );
            }
            let (a0, a1) = haar_atoms(b);
            assert!((prof.atom0 - a0).abs() < 1e-6 && (prof.atom1 - a1).abs() < 1e-6);
        }
    }

    #[test]
    fn gapless_at_half_filling_gamma_one() {
        let p = TheoryParams::new(0.5, 1.0);
        let prof = analytic_density(&[1e-3, 0.999], &p).unwrap();
        assert!(prof.density.iter().all(|&r| r > 0.1));
        assert_eq!(prof.atom1, 0.0);
    }

    #[test]
    fn normalization_and_mean() {
        for (b, g) in [(0.5, 1.0), (0.7, 0.5), (0.3, 3.0)] {
            let p = TheoryParams::new(b, g);
            let m = total_mass(&p, 128).unwrap();
            assert!((m - 1.0).abs() < 1e-3, "({b},{g}) mass {m}");
            let a1 = first_moment(&p, 128).unwrap();
            assert!(
                (a1 - moments_theory(&p).1).abs() < 1e-3,
                "({b},{g}) a1 {a1}"
            );
        }
    }

    #[test]
    fn rejects_grid_outside() {
        assert!(analytic_density(&[0.0], &TheoryParams::new(0.5, 1.0)).is_err());
        assert!(analytic_density(&[1.0], &TheoryParams::new(0.5, 1.0)).is_err());
    }
}
