//! The self-consistency pair for `v±` and the resolvent trace built from it.
//!
//! ```text
//! v₊/γ = b̄/(v₋ + 1) + b/(v₋ + f₋)
//! v₋/γ = b̄/(v₊ + 1) + b/(v₊ + f₊)        f± = (√λ ∓ 1)/(√λ ± 1)
//! ```
//!
//! The physical root is tracked from `|λ| → ∞`, where `f± → 1` and both
//! unknowns equal `(√(1 + 4γ) − 1)/2`. Starting high above the real axis at
//! `Re λ + iH`, the imaginary part is lowered geometrically to the target with
//! Newton at each stop; the step shrinks whenever Newton fails or the root
//! jumps.

use faer::c64;

use super::TheoryParams;
use crate::error::{Error, Result};

pub const RESIDUAL_TOL: f64 = 1e-10;

const ONE: c64 = c64::new(1.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SelfConsistentPoint {
    pub lambda: c64,
    pub v_plus: c64,
    pub v_minus: c64,
    pub f_plus: c64,
    pub f_minus: c64,
    /// Max over both equations of `|lhs − rhs|`, each divided by
    /// `max(1, sum of its term magnitudes)`.
    pub residual: f64,
}

/// `(f₊, f₋)` on the principal square-root branch.
pub fn f_pm(lambda: c64) -> Result<(c64, c64)> {
    if lambda == ONE {
        return Err(Error::InvalidParameter("f± has poles at λ = 1".into()));
    }
    let s = lambda.sqrt();
    Ok(((s - 1.0) / (s + 1.0), (s + 1.0) / (s - 1.0)))
}

/// Value of `v±` at `|λ| = ∞`.
pub fn v_infinity(gamma: f64) -> f64 {
    ((1.0 + 4.0 * gamma).sqrt() - 1.0) / 2.0
}

fn residuals(v: [c64; 2], f: (c64, c64), b: f64, g: f64) -> [c64; 2] {
    let bb = 1.0 - b;
    let [vp, vm] = v;
    let (fp, fm) = f;
    [
        vp / g - bb / (vm + 1.0) - b / (vm + fm),
        vm / g - bb / (vp + 1.0) - b / (vp + fp),
    ]
}

fn norm(r: [c64; 2]) -> f64 {
    r[0].norm().max(r[1].norm())
}

/// Residual of each equation relative to the size of its terms, so that it
/// measures lost digits rather than the magnitude of `v±` near `λ = 1`.
fn scaled_residual(v: [c64; 2], f: (c64, c64), b: f64, g: f64) -> f64 {
    let bb = 1.0 - b;
    let r = residuals(v, f, b, g);
    let s0 = v[0].norm() / g + (bb / (v[1] + 1.0)).norm() + (b / (v[1] + f.1)).norm();
    let s1 = v[1].norm() / g + (bb / (v[0] + 1.0)).norm() + (b / (v[0] + f.0)).norm();
    (r[0].norm() / s0.max(1.0)).max(r[1].norm() / s1.max(1.0))
}

/// Newton iteration at fixed `λ`; `None` when it does not converge.
fn newton(mut v: [c64; 2], f: (c64, c64), b: f64, g: f64) -> Option<([c64; 2], f64)> {
    let bb = 1.0 - b;
    let (fp, fm) = f;
    let mut r = residuals(v, f, b, g);
    let mut best = norm(r);
    for _ in 0..60 {
        // the Jacobian is [[1/γ, c], [d, 1/γ]]
        let c = bb / ((v[1] + 1.0) * (v[1] + 1.0)) + b / ((v[1] + fm) * (v[1] + fm));
        let d = bb / ((v[0] + 1.0) * (v[0] + 1.0)) + b / ((v[0] + fp) * (v[0] + fp));
        let ig = c64::new(1.0 / g, 0.0);
        let det = ig * ig - c * d;
        if det.norm() == 0.0 || !det.re.is_finite() {
            return None;
        }
        let dp = (-r[0] * ig + c * r[1]) / det;
        let dm = (-r[1] * ig + d * r[0]) / det;
        v = [v[0] + dp, v[1] + dm];
        if !(v.iter().all(|z| z.re.is_finite() && z.im.is_finite())) {
            return None;
        }
        r = residuals(v, f, b, g);
        let n = norm(r);
        let scale = 1.0 + (v[0].norm() + v[1].norm()) / g;
        if n < 1e-15 * scale || (dp.norm() + dm.norm()) < 1e-15 * (1.0 + v[0].norm() + v[1].norm())
        {
            return Some((v, n));
        }
        if n > 1e8 * best.max(1e-300) && n > 1.0 {
            return None;
        }
        best = best.min(n);
    }
    let n = scaled_residual(v, f, b, g);
    (n < RESIDUAL_TOL).then_some((v, n))
}

/// Solve at `lambda` (which must have `Im λ > 0`) by vertical continuation.
pub fn solve_vpm(lambda: c64, params: &TheoryParams) -> Result<SelfConsistentPoint> {
    params.validate()?;
    if !(lambda.im > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "solver needs Im λ > 0, got {lambda}"
        )));
    }
    let (b, g) = (params.b, params.gamma);
    let fail = |detail: String| Error::NoConvergence { lambda, detail };
    let x = lambda.re;
    let target = lambda.im;
    let mut h = (1e4 * lambda.norm().max(1.0)).max(target);
    let v0 = c64::new(v_infinity(g), 0.0);
    let start = c64::new(x, h);
    let (mut v, _) = newton([v0, v0], f_pm(start)?, b, g)
        .ok_or_else(|| fail(format!("no root at the starting point {start}")))?;
    let mut ratio: f64 = 1.5;
    let mut trace: Vec<f64> = Vec::new();
    while h > target {
        let next = (h / ratio).max(target);
        let f = f_pm(c64::new(x, next))?;
        let accepted = newton(v, f, b, g).filter(|(w, _)| {
            let jump = (w[0] - v[0]).norm().max((w[1] - v[1]).norm());
            jump <= 0.5 * (1.0 + v[0].norm().max(v[1].norm()))
        });
        match accepted {
            Some((w, _)) => {
                v = w;
                h = next;
                ratio = (ratio * ratio).min(1.5);
            }
            None => {
                trace.push(next);
                ratio = ratio.sqrt();
                if ratio < 1.0 + 1e-9 {
                    return Err(fail(format!(
                        "continuation stalled at Im λ = {h:e}; rejected steps at {:?}",
                        &trace[trace.len().saturating_sub(8)..]
                    )));
                }
            }
        }
    }
    let f = f_pm(lambda)?;
    let residual = scaled_residual(v, f, b, g);
    if !(residual < RESIDUAL_TOL) {
        return Err(fail(format!("final residual {residual:e}")));
    }
    Ok(SelfConsistentPoint {
        lambda,
        v_plus: v[0],
        v_minus: v[1],
        f_plus: f.0,
        f_minus: f.1,
        residual,
    })
}

/// `Tr G(λ) / D` from a solved point.
pub fn green_trace_at(p: &SelfConsistentPoint, params: &TheoryParams) -> c64 {
    let (b, g) = (params.b, params.gamma);
    let bb = 1.0 - b;
    let (vp, vm, fp, fm, lam) = (p.v_plus, p.v_minus, p.f_plus, p.f_minus, p.lambda);
    let big_f = (vm + 1.0) * (vp + 1.0) * (vp + fp) * (vm + fm) / g
        - bb * (vp + fp) * (vm + fm)
        - b * (vm + 1.0) * (vp + 1.0);
    let l1 = lam - 1.0;
    (ONE + b / l1 * (ONE - 4.0 * bb * lam / (l1 * big_f))) / lam
}

pub fn green_trace(lambda: c64, params: &TheoryParams) -> Result<c64> {
    let p = solve_vpm(lambda, params)?;
    Ok(green_trace_at(&p, params))
}
