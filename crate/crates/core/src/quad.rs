//! Composite Gauss-Legendre quadrature with endpoint clustering.
//!
//! `integrate` maps `[a, b]` through `x = a + (b − a)(1 − cos πt)/2`, whose
//! Jacobian vanishes at both ends, so integrable endpoint singularities such
//! as `1/√x` or `x^{-1/3}` are handled without special casing.

use std::f64::consts::PI;
use std::sync::OnceLock;

const ORDER: usize = 16;

/// Nodes and weights on `[-1, 1]`, from Newton on the Legendre recurrence.
fn rule() -> &'static [(f64, f64); ORDER] {
    static RULE: OnceLock<[(f64, f64); ORDER]> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = ORDER;
        let mut out = [(0.0, 0.0); ORDER];
        for (i, slot) in out.iter_mut().enumerate() {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            *slot = (x, 2.0 / ((1.0 - x * x) * dp * dp));
        }
        out
    })
}

/// Plain composite rule on `[a, b]`.
pub fn integrate_plain(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut s = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for &(x, w) in rule() {
            s += w * f(mid + 0.5 * h * x);
        }
    }
    0.5 * h * s
}

/// Composite rule on `[a, b]` in the clustered variable.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let half = 0.5 * (b - a);
    integrate_plain(
        |t| {
            let x = a + half * (1.0 - (PI * t).cos());
            f(x) * half * PI * (PI * t).sin()
        },
        0.0,
        1.0,
        panels,
    )
}

/// Clustered nodes and weights for `[a, b]`, for callers that evaluate the
/// integrand in bulk.
pub fn nodes(a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
    let half = 0.5 * (b - a);
    let h = 1.0 / panels as f64;
    let mut out = Vec::with_capacity(panels * ORDER);
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * h;
        for &(x, w) in rule() {
            let t = mid + 0.5 * h * x;
            out.push((
                a + half * (1.0 - (PI * t).cos()),
                0.5 * h * w * half * PI * (PI * t).sin(),
            ));
        }
    }
    out
}
