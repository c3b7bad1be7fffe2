//! Reductions of spectra to observables: histograms, atoms, edges, moments,
//! repeated-measurement probabilities and their decay regime.

use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{ComplexMatrix, EigenSpectrum};
use crate::measurement::{Projector, SandwichKind, SandwichOperator};

pub const DEFAULT_BINS: usize = 100;

/// Uniform histogram on `[0, 1]` with the atoms at 0 and 1 counted apart.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralHistogram {
    pub bins: usize,
    pub dim: usize,
    pub eps: f64,
    pub realizations: u64,
    pub counts: Vec<u64>,
    pub atom0: u64,
    pub atom1: u64,
}

impl SpectralHistogram {
    pub fn new(bins: usize, dim: usize, eps: f64) -> Result<Self> {
        if bins == 0 || dim == 0 || !(eps > 0.0) {
            return Err(invalid("histogram needs bins, dim and eps positive"));
        }
        Ok(Self {
            bins,
            dim,
            eps,
            realizations: 0,
            counts: vec![0; bins],
            atom0: 0,
            atom1: 0,
        })
    }

    pub fn width(&self) -> f64 {
        1.0 / self.bins as f64
    }

    pub fn edges(&self, k: usize) -> (f64, f64) {
        (k as f64 * self.width(), (k + 1) as f64 * self.width())
    }

    pub fn add(&mut self, spectrum: &EigenSpectrum) -> Result<()> {
        if spectrum.dim() != self.dim {
            return Err(Error::Incompatible(format!(
                "spectrum of dimension {} added to histogram of dimension {}",
                spectrum.dim(),
                self.dim
            )));
        }
        for &x in spectrum.values() {
            if x.abs() <= self.eps {
                self.atom0 += 1;
            } else if (x - 1.0).abs() <= self.eps {
                self.atom1 += 1;
            } else {
                let k = ((x * self.bins as f64).floor().max(0.0) as usize).min(self.bins - 1);
                self.counts[k] += 1;
            }
        }
        self.realizations += 1;
        Ok(())
    }

    pub fn merge(&self, other: &Self) -> Result<Self> {
        if self.bins != other.bins || self.dim != other.dim || self.eps != other.eps {
            return Err(Error::Incompatible(format!(
                "({}, {}, {}) vs ({}, {}, {})",
                self.bins, self.dim, self.eps, other.bins, other.dim, other.eps
            )));
        }
        Ok(Self {
            bins: self.bins,
            dim: self.dim,
            eps: self.eps,
            realizations: self.realizations + other.realizations,
            counts: self
                .counts
                .iter()
                .zip(&other.counts)
                .map(|(a, b)| a + b)
                .collect(),
            atom0: self.atom0 + other.atom0,
            atom1: self.atom1 + other.atom1,
        })
    }

    fn norm(&self) -> f64 {
        (self.realizations as f64 * self.dim as f64).max(1.0)
    }

    /// `count / (realizations · dim · width)`.
    pub fn density(&self, k: usize) -> f64 {
        self.counts[k] as f64 / (self.norm() * self.width())
    }

    pub fn atom_fractions(&self) -> (f64, f64) {
        (
            self.atom0 as f64 / self.norm(),
            self.atom1 as f64 / self.norm(),
        )
    }

    pub fn continuum_mass(&self) -> f64 {
        self.counts.iter().sum::<u64>() as f64 / self.norm()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum::<u64>() + self.atom0 + self.atom1
    }

    /// `Σ_k |h_k − m_k| · width`, where `m_k` is the model's mean continuum
    /// density over bin `k`.
    pub fn l1_distance(&self, bin_mean: impl Fn(f64, f64) -> f64, lo: f64, hi: f64) -> f64 {
        let mut s = 0.0;
        for k in 0..self.bins {
            let (a, b) = self.edges(k);
            if a >= lo - 1e-12 && b <= hi + 1e-12 {
                s += (self.density(k) - bin_mean(a, b)).abs() * self.width();
            }
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSummary {
    pub atom0: f64,
    pub atom1: f64,
    pub continuum_edge: f64,
    pub gap: f64,
    pub moments: Vec<f64>,
}

/// Fraction of eigenvalues within `eps` of `at`.
pub fn atom_density(spectrum: &EigenSpectrum, at: f64, eps: f64) -> f64 {
    let n = spectrum
        .values()
        .iter()
        .filter(|&&x| (x - at).abs() <= eps)
        .count();
    n as f64 / spectrum.dim() as f64
}

/// Largest eigenvalue below `1 − eps`, and `1 −` that; `(0, 1)` if none.
pub fn continuum_edge_and_gap(spectrum: &EigenSpectrum, eps: f64) -> (f64, f64) {
    let edge = spectrum
        .values()
        .iter()
        .rev()
        .find(|&&x| x < 1.0 - eps)
        .copied()
        .unwrap_or(0.0)
        .max(0.0);
    (edge, 1.0 - edge)
}

/// `a_k = (1/D) Σ λ_i^k` for `k = 0..=k_max`.
pub fn empirical_moments(spectrum: &EigenSpectrum, k_max: usize) -> Vec<f64> {
    let d = spectrum.dim() as f64;
    let mut out = vec![0.0; k_max + 1];
    for &x in spectrum.values() {
        let mut p = 1.0;
        for slot in out.iter_mut() {
            *slot += p;
            p *= x;
        }
    }
    out.iter_mut().for_each(|a| *a /= d);
    out
}

pub fn summarize(spectrum: &EigenSpectrum, eps: f64, k_max: usize) -> SpectrumSummary {
    let (continuum_edge, gap) = continuum_edge_and_gap(spectrum, eps);
    SpectrumSummary {
        atom0: atom_density(spectrum, 0.0, eps),
        atom1: atom_density(spectrum, 1.0, eps),
        continuum_edge,
        gap,
        moments: empirical_moments(spectrum, k_max),
    }
}

/// Initial state of a repeated-measurement trajectory.
#[derive(Clone, Debug)]
pub enum Rho0 {
    /// `1/D`
    MaximallyMixed,
    /// `P / Tr P`
    ProjectorNormalized,
    /// `|i⟩⟨i|`
    PureState(usize),
    Density(ComplexMatrix),
}

impl Rho0 {
    pub fn label(&self) -> String {
        match self {
            Rho0::MaximallyMixed => "maximally_mixed".into(),
            Rho0::ProjectorNormalized => "projector_normalized".into(),
            Rho0::PureState(i) => format!("pure_state:{i}"),
            Rho0::Density(_) => "density".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySeries {
    pub d: Vec<u64>,
    pub w: Vec<f64>,
    pub rho0: String,
}

/// Spectral weights `⟨v_k|ρ₀|v_k⟩` on the support eigenvectors, plus the weight
/// on the null space of the operator's complement.
fn spectral_weights(
    op: &SandwichOperator,
    vectors: &Mat<c64>,
    rho0: &Rho0,
) -> Result<(Vec<f64>, f64)> {
    let r = op.support().len();
    let d = op.dim();
    match rho0 {
        Rho0::MaximallyMixed => Ok((vec![1.0 / d as f64; r], (d - r) as f64 / d as f64)),
        Rho0::ProjectorNormalized => {
            if r == 0 {
                return Err(invalid("P / Tr P is undefined for an empty projector"));
            }
            Ok((vec![1.0 / r as f64; r], 0.0))
        }
        Rho0::PureState(i) => {
            if *i >= d {
                return Err(invalid(format!("basis state {i} outside dimension {d}")));
            }
            match op.support().binary_search(i) {
                Ok(p) => {
                    let w: Vec<f64> = (0..r).map(|k| vectors[(p, k)].norm_sqr()).collect();
                    let rest = (1.0 - w.iter().sum::<f64>()).max(0.0);
                    Ok((w, rest))
                }
                Err(_) => Ok((vec![0.0; r], 1.0)),
            }
        }
        Rho0::Density(rho) => {
            if rho.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: rho.dim(),
                });
            }
            let trace = rho.trace();
            if (trace - 1.0).norm() > 1e-12 {
                return Err(Error::NotNormalized { trace: trace.re });
            }
            let s = op.support();
            let sub = Mat::<c64>::from_fn(r, r, |i, j| rho.get(s[i], s[j]));
            let rv = &sub * vectors;
            let w: Vec<f64> = (0..r)
                .map(|k| {
                    (0..r)
                        .map(|i| vectors[(i, k)].conj() * rv[(i, k)])
                        .sum::<c64>()
                        .re
                })
                .collect();
            let rest = 1.0 - w.iter().sum::<f64>();
            Ok((w, rest))
        }
    }
}

/// `w(d) = Tr[Λ^d ρ₀]` from one eigendecomposition, for every `d` at once.
pub fn trajectory_probability(
    op: &SandwichOperator,
    rho0: &Rho0,
    d_list: &[u64],
) -> Result<TrajectorySeries> {
    if d_list.is_empty() {
        return Err(invalid("d_list is empty"));
    }
    if d_list.windows(2).any(|w| w[0] > w[1]) {
        return Err(invalid("d_list must be ascending"));
    }
    let e = op.support_eigen()?;
    let (weights, null) = spectral_weights(op, &e.vectors, rho0)?;
    let lambdas: Vec<f64> = e.values.iter().map(|x| x.clamp(0.0, 1.0)).collect();
    let w = d_list
        .iter()
        .map(|&d| {
            let cont: f64 = lambdas
                .iter()
                .zip(&weights)
                .map(|(l, w)| w * powu(*l, d))
                .sum();
            if d == 0 {
                cont + null
            } else {
                cont
            }
        })
        .collect();
    Ok(TrajectorySeries {
        d: d_list.to_vec(),
        w,
        rho0: rho0.label(),
    })
}

fn powu(x: f64, d: u64) -> f64 {
    if d <= i32::MAX as u64 {
        x.powi(d as i32)
    } else {
        x.powf(d as f64)
    }
}

/// Sizes of the `λ = 1` eigenspace of `Λ_P^(n)` for `n = 1..=n_max`.
pub fn unitary_subspace_dimension(
    u: &ComplexMatrix,
    p: &Projector,
    n_max: u32,
    eps: f64,
) -> Result<Vec<usize>> {
    if n_max < 1 {
        return Err(invalid("n_max must be at least 1"));
    }
    (1..=n_max)
        .map(|n| {
            let s = crate::measurement::sandwich(u, p, SandwichKind::LambdaPn(n))?.spectrum()?;
            Ok(s.values()
                .iter()
                .filter(|&&x| (x - 1.0).abs() <= eps)
                .count())
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "regime", rename_all = "snake_case")]
pub enum DecayRegime {
    Exponential { rate: f64 },
    PowerLaw { exponent: f64 },
    Saturating { plateau: f64, rate: Option<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayClassification {
    pub regime: DecayRegime,
    /// `(first d, last d)` of the tail window.
    pub window: (u64, u64),
    pub points: usize,
    pub exp_rate: f64,
    pub exp_mse: f64,
    pub power_exponent: f64,
    pub power_mse: f64,
    /// Change of `ln w` across the window.
    pub tail_log_drop: f64,
    /// t statistic of the slope of `ln w` against `d` in the window.
    pub tail_t: f64,
}

struct LineFit {
    slope: f64,
    intercept: f64,
    mse: f64,
    t: f64,
}

fn ols(x: &[f64], y: &[f64]) -> LineFit {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let sse: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let mse = sse / n;
    let se = if n > 2.0 && sxx > 0.0 {
        (sse / (n - 2.0) / sxx).sqrt()
    } else {
        f64::INFINITY
    };
    let t = if se > 0.0 {
        slope / se
    } else if slope == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    LineFit {
        slope,
        intercept,
        mse,
        t,
    }
}

/// Two-sided 5% critical value of Student's t (Cornish-Fisher expansion).
fn t_critical(df: f64) -> f64 {
    let z: f64 = 1.959_963_984_540_054;
    let z3 = z.powi(3);
    let z5 = z.powi(5);
    let z7 = z.powi(7);
    z + (z3 + z) / (4.0 * df)
        + (5.0 * z5 + 16.0 * z3 + 3.0 * z) / (96.0 * df * df)
        + (3.0 * z7 + 19.0 * z5 + 17.0 * z3 - 15.0 * z) / (384.0 * df.powi(3))
}

/// Below this drop of `ln w` across the tail window the series counts as flat.
pub const FLAT_LOG_DROP: f64 = 0.01;

/// Choose between exponential decay, power-law decay and saturation.
///
/// The tail window is the last decade of `d` (`d ≥ d_max/10`), or the last half
/// of the points if that decade holds fewer than 6. The series saturates if
/// `ln w` is flat there: a drop below [`FLAT_LOG_DROP`] or a slope that fails a
/// two-sided 5% t-test. Otherwise `ln w` is fitted against `d` and against
/// `ln d`; the smaller mean squared residual wins if it is at least 5% smaller,
/// and the smaller one is returned regardless in a near tie.
pub fn classify_decay(series: &TrajectorySeries) -> Result<DecayClassification> {
    let pts: Vec<(u64, f64)> = series
        .d
        .iter()
        .copied()
        .zip(series.w.iter().copied())
        .filter(|p| p.0 >= 1)
        .collect();
    if pts.len() < 12 {
        return Err(Error::Fit(format!(
            "need at least 12 points with d >= 1, got {}",
            pts.len()
        )));
    }
    let (d_min, d_max) = (pts[0].0, pts[pts.len() - 1].0);
    if d_max < 10 * d_min {
        return Err(Error::Fit(format!(
            "d spans {d_min}..{d_max}, less than a decade"
        )));
    }
    let mut window: Vec<(u64, f64)> = pts.iter().copied().filter(|p| p.0 * 10 >= d_max).collect();
    if window.len() < 6 {
        window = pts[pts.len() / 2..].to_vec();
    }
    if let Some(bad) = window.iter().find(|p| !(p.1 > 0.0)) {
        return Err(Error::Fit(format!(
            "w({}) = {:e} is not positive inside the fit window",
            bad.0, bad.1
        )));
    }
    let d: Vec<f64> = window.iter().map(|p| p.0 as f64).collect();
    let ld: Vec<f64> = d.iter().map(|x| x.ln()).collect();
    let lw: Vec<f64> = window.iter().map(|p| p.1.ln()).collect();
    let exp = ols(&d, &lw);
    let pow = ols(&ld, &lw);
    let drop = lw[0] - lw[lw.len() - 1];
    let df = (d.len() - 2) as f64;
    let flat = drop.abs() < FLAT_LOG_DROP || exp.t.abs() < t_critical(df);
    let regime = if flat {
        let plateau = window.iter().map(|p| p.1).sum::<f64>() / window.len() as f64;
        let (x, y): (Vec<f64>, Vec<f64>) = pts
            .iter()
            .filter(|p| p.1 - plateau > 1e-8 * plateau)
            .map(|p| (p.0 as f64, (p.1 - plateau).ln()))
            .unzip();
        let rate = (x.len() >= 3).then(|| -ols(&x, &y).slope);
        DecayRegime::Saturating { plateau, rate }
    } else if pow.mse < 0.95 * exp.mse || (pow.mse <= exp.mse && exp.mse <= pow.mse / 0.95) {
        DecayRegime::PowerLaw {
            exponent: -pow.slope,
        }
    } else {
        DecayRegime::Exponential { rate: -exp.slope }
    };
    Ok(DecayClassification {
        regime,
        window: (window[0].0, window[window.len() - 1].0),
        points: window.len(),
        exp_rate: -exp.slope,
        exp_mse: exp.mse,
        power_exponent: -pow.slope,
        power_mse: pow.mse,
        tail_log_drop: drop,
        tail_t: exp.t,
    })
}

/// Power of `x` in `y ∝ x^p`, by least squares in log-log coordinates.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    let (lx, ly): (Vec<f64>, Vec<f64>) = x
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0)
        .map(|(a, b)| (a.ln(), b.ln()))
        .unzip();
    if lx.len() < 2 {
        return Err(Error::Fit(
            "fewer than two positive points for a log-log slope".into(),
        ));
    }
    Ok(ols(&lx, &ly).slope)
}

/// Root of a straight-line fit to `(x, y)`: for a density `ρ ≈ C√(e − λ)/(1 − λ)`
/// pass `y = (ρ(1 − λ))²`, which is linear in `λ` and vanishes at the edge `e`.
pub fn linear_root(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() < 3 {
        return Err(Error::Fit(
            "need at least three points to locate an edge".into(),
        ));
    }
    let f = ols(x, y);
    if f.slope == 0.0 {
        return Err(Error::Fit("flat edge fit".into()));
    }
    Ok(-f.intercept / f.slope)
}

/// Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<(f64, f64)> {
    if a.is_empty() || b.is_empty() {
        return Err(invalid("KS test needs two nonempty samples"));
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut dmax) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        dmax = dmax.max((i as f64 / na - j as f64 / nb).abs());
    }
    let ne = (na * nb / (na + nb)).sqrt();
    let lam = (ne + 0.12 + 0.11 / ne) * dmax;
    Ok((dmax, kolmogorov_q(lam)))
}

fn kolmogorov_q(lam: f64) -> f64 {
    if lam < 1e-3 {
        return 1.0;
    }
    let mut s = 0.0;
    for k in 1..=100 {
        let term =
            2.0 * if k % 2 == 1 { 1.0 } else { -1.0 } * (-2.0 * (k * k) as f64 * lam * lam).exp();
        s += term;
        if term.abs() < 1e-12 {
            break;
        }
    }
    s.clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{sample_unitary, EnsembleParams};
    use crate::measurement::{build_projector, lambda_p, DEFAULT_ATOM_EPS};
    use crate::rng::RngSeed;
    use proptest::prelude::*;

    fn series(d: Vec<u64>, f: impl Fn(f64) -> f64) -> TrajectorySeries {
        let w = d.iter().map(|&x| f(x as f64)).collect();
        TrajectorySeries {
            d,
            w,
            rho0: "test".into(),
        }
    }

    fn logspace(n: usize, hi: f64) -> Vec<u64> {
        let mut v: Vec<u64> = (0..n)
            .map(|k| hi.powf(k as f64 / (n - 1) as f64).round() as u64)
            .collect();
        v.dedup();
        v
    }

    #[test]
    fn atoms_and_edges_examples() {
        let zeros = EigenSpectrum::new(vec![0.0; 5]);
        assert_eq!(atom_density(&zeros, 0.0, 1e-3), 1.0);
        assert_eq!(continuum_edge_and_gap(&zeros, 1e-3), (0.0, 1.0));
        let s = EigenSpectrum::new(vec![0.0, 0.2, 0.7, 0.9995, 1.0]);
        assert_eq!(continuum_edge_and_gap(&s, 1e-3), (0.7, 1.0 - 0.7));
        assert_eq!(atom_density(&s, 1.0, 1e-3), 0.4);
        assert_eq!(empirical_moments(&s, 0)[0], 1.0);
    }

    #[test]
    fn histogram_accounting() {
        let mut h = SpectralHistogram::new(10, 5, 1e-3).unwrap();
        h.add(&EigenSpectrum::new(vec![0.0, 0.05, 0.55, 0.999999, 0.9]))
            .unwrap();
        assert_eq!(h.total(), 5);
        assert_eq!((h.atom0, h.atom1), (1, 1));
        assert_eq!(h.counts[0] + h.counts[5] + h.counts[9], 3);
        let mut mass = h.continuum_mass();
        let (a0, a1) = h.atom_fractions();
        mass += a0 + a1;
        assert!((mass - 1.0).abs() < 1e-15);
        let integral: f64 = (0..10).map(|k| h.density(k) * h.width()).sum();
        assert!((integral - 0.6).abs() < 1e-15);
        assert!(h.add(&EigenSpectrum::new(vec![0.0; 4])).is_err());
    }

    #[test]
    fn merge_laws() {
        let mk = |vals: Vec<f64>| {
            let mut h = SpectralHistogram::new(4, 3, 1e-3).unwrap();
            h.add(&EigenSpectrum::new(vals)).unwrap();
            h
        };
        let a = mk(vec![0.1, 0.5, 1.0]);
        let b = mk(vec![0.0, 0.3, 0.8]);
        let empty = SpectralHistogram::new(4, 3, 1e-3).unwrap();
        assert_eq!(a.merge(&empty).unwrap(), a);
        assert_eq!(a.merge(&b).unwrap(), b.merge(&a).unwrap());
        let c = mk(vec![0.9, 0.9, 0.9]);
        assert_eq!(
            a.merge(&b).unwrap().merge(&c).unwrap(),
            a.merge(&b.merge(&c).unwrap()).unwrap()
        );
        assert!(a
            .merge(&SpectralHistogram::new(5, 3, 1e-3).unwrap())
            .is_err());
    }

    #[test]
    fn projector_trajectory_is_flat() {
        let p = build_projector(8, 3).unwrap();
        let op = lambda_p(&ComplexMatrix::identity(8), &p).unwrap();
        let s = trajectory_probability(&op, &Rho0::MaximallyMixed, &[0, 1, 2, 10]).unwrap();
        assert!((s.w[0] - 1.0).abs() < 1e-15);
        for w in &s.w[1..] {
            assert!((w - 3.0 / 8.0).abs() < 1e-15);
        }
    }

    #[test]
    fn unnormalized_density_rejected() {
        let p = build_projector(4, 2).unwrap();
        let op = lambda_p(&ComplexMatrix::identity(4), &p).unwrap();
        let rho = ComplexMatrix::identity(4).scale(c64::new(0.5, 0.0));
        assert!(matches!(
            trajectory_probability(&op, &Rho0::Density(rho), &[1]),
            Err(Error::NotNormalized { .. })
        ));
        assert!(trajectory_probability(&op, &Rho0::MaximallyMixed, &[]).is_err());
        assert!(trajectory_probability(&op, &Rho0::MaximallyMixed, &[3, 1]).is_err());
    }

    fn brute_force(op: &SandwichOperator, rho: &ComplexMatrix, d: u64) -> f64 {
        let m = op.matrix();
        let mut acc = ComplexMatrix::identity(m.dim());
        for _ in 0..d {
            acc = acc.mul(&m).unwrap();
        }
        acc.mul(rho).unwrap().trace().re
    }

    fn dense_rho(kind: &Rho0, p: &Projector) -> ComplexMatrix {
        let n = p.dim();
        match kind {
            Rho0::MaximallyMixed => ComplexMatrix::identity(n).scale(c64::new(1.0 / n as f64, 0.0)),
            Rho0::ProjectorNormalized => p.to_matrix().scale(c64::new(1.0 / p.rank() as f64, 0.0)),
            Rho0::PureState(i) => ComplexMatrix::from_fn(n, |a, b| {
                if a == *i && b == *i {
                    c64::new(1.0, 0.0)
                } else {
                    c64::new(0.0, 0.0)
                }
            })
            .unwrap(),
            Rho0::Density(m) => m.clone(),
        }
    }

    #[test]
    fn trajectory_matches_dense_powers() {
        let n = 24;
        let u = sample_unitary(&EnsembleParams::cayley(n, 1.3), RngSeed::new(3, 3)).unwrap();
        let p = build_projector(n, 15).unwrap();
        // a mixed state that is not diagonal in the eigenbasis
        let g = sample_unitary(&EnsembleParams::haar(n), RngSeed::new(4, 4)).unwrap();
        let diag = ComplexMatrix::from_fn(n, |i, j| {
            if i == j {
                c64::new((i + 1) as f64, 0.0)
            } else {
                c64::new(0.0, 0.0)
            }
        })
        .unwrap();
        let raw = g.mul(&diag).unwrap().mul(&g.adjoint()).unwrap();
        let tr = raw.trace().re;
        let rho = ComplexMatrix::from_fn(n, |i, j| {
            let z = (raw.get(i, j) + raw.get(j, i).conj()) * 0.5 / tr;
            z
        })
        .unwrap();
        let mut rho = rho;
        let fix = 1.0 - rho.trace().re;
        rho = rho.add_identity(fix / n as f64);
        for kind in [SandwichKind::LambdaP, SandwichKind::Lambda01] {
            let op = crate::measurement::sandwich(&u, &p, kind).unwrap();
            for r0 in [
                Rho0::MaximallyMixed,
                Rho0::ProjectorNormalized,
                Rho0::PureState(2),
                Rho0::PureState(20),
                Rho0::Density(rho.clone()),
            ] {
                let dense = dense_rho(&r0, &p);
                let d: Vec<u64> = (0..=8).collect();
                let s = trajectory_probability(&op, &r0, &d).unwrap();
                for (k, &dd) in d.iter().enumerate() {
                    let b = brute_force(&op, &dense, dd);
                    assert!(
                        (s.w[k] - b).abs() < 1e-10,
                        "{kind:?} {} d={dd}: {} vs {b}",
                        r0.label(),
                        s.w[k]
                    );
                }
            }
        }
    }

    #[test]
    fn classify_examples() {
        let d = logspace(30, 200.0);
        let c = classify_decay(&series(d.clone(), |x| 0.8f64.powf(x))).unwrap();
        match c.regime {
            DecayRegime::Exponential { rate } => assert!((rate - (1.0f64 / 0.8).ln()).abs() < 1e-9),
            r => panic!("{r:?}"),
        }
        let c = classify_decay(&series(logspace(30, 1000.0), |x| x.powf(-0.5))).unwrap();
        match c.regime {
            DecayRegime::PowerLaw { exponent } => assert!((exponent - 0.5).abs() < 1e-9),
            r => panic!("{r:?}"),
        }
        let c = classify_decay(&series(d, |x| 0.3 + 0.5 * (-x).exp())).unwrap();
        match c.regime {
            DecayRegime::Saturating { plateau, rate } => {
                assert!((plateau - 0.3).abs() < 1e-9);
                assert!((rate.unwrap() - 1.0).abs() < 1e-3, "{rate:?}");
            }
            r => panic!("{r:?}"),
        }
    }

    #[test]
    fn classify_preconditions() {
        assert!(classify_decay(&series((1..=5).collect(), |x| x)).is_err());
        assert!(classify_decay(&series((5..=40).collect(), |x| 1.0 / x)).is_err());
        assert!(
            classify_decay(&series(logspace(30, 1000.0), |x| if x > 500.0 {
                0.0
            } else {
                1.0 / x
            }))
            .is_err()
        );
    }

    #[test]
    fn t_critical_reference_values() {
        assert!((t_critical(10.0) - 2.228).abs() < 2e-3);
        assert!((t_critical(30.0) - 2.042).abs() < 1e-3);
    }

    #[test]
    fn ks_detects_shift() {
        let a: Vec<f64> = (0..500).map(|k| k as f64 / 500.0).collect();
        let b: Vec<f64> = a.iter().map(|x| x + 0.2).collect();
        assert!(ks_two_sample(&a, &b).unwrap().1 < 1e-6);
        let c: Vec<f64> = (0..400).map(|k| (k as f64 + 0.5) / 400.0).collect();
        assert!(ks_two_sample(&a, &c).unwrap().1 > 0.5);
    }

    #[test]
    fn subspace_of_identity() {
        let p = build_projector(10, 4).unwrap();
        assert_eq!(
            unitary_subspace_dimension(&ComplexMatrix::identity(10), &p, 3, DEFAULT_ATOM_EPS)
                .unwrap(),
            vec![4, 4, 4]
        );
    }

    #[test]
    fn subspace_empty_below_half() {
        let u = sample_unitary(&EnsembleParams::cayley(64, 2.0), RngSeed::new(1, 1)).unwrap();
        let p = build_projector(64, 16).unwrap();
        assert_eq!(
            unitary_subspace_dimension(&u, &p, 3, DEFAULT_ATOM_EPS).unwrap(),
            vec![0, 0, 0]
        );
    }

    #[test]
    fn edge_root() {
        let x: Vec<f64> = (0..10).map(|k| 0.8 + 0.01 * k as f64).collect();
        let y: Vec<f64> = x.iter().map(|l| 3.0 * (0.95 - l)).collect();
        assert!((linear_root(&x, &y).unwrap() - 0.95).abs() < 1e-12);
        let s = loglog_slope(&[1.0, 10.0, 100.0], &[1.0, 0.1, 0.01]).unwrap();
        assert!((s + 1.0).abs() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn trajectory_nonincreasing(seed in any::<u64>(), n in 2usize..32, frac in 0.05f64..1.0, pure in 0usize..32) {
            let u = sample_unitary(&EnsembleParams::cayley(n, 2.0), RngSeed::new(seed, 0)).unwrap();
            let p = build_projector(n, ((n as f64 * frac).ceil() as usize).min(n)).unwrap();
            let op = lambda_p(&u, &p).unwrap();
            let d: Vec<u64> = (0..40).collect();
            for r0 in [Rho0::MaximallyMixed, Rho0::ProjectorNormalized, Rho0::PureState(pure % n)] {
                let s = trajectory_probability(&op, &r0, &d).unwrap();
                prop_assert!((s.w[0] - 1.0).abs() < 1e-12);
                for k in 1..s.w.len() {
                    prop_assert!(s.w[k] <= s.w[k - 1] + 1e-14);
                    prop_assert!(s.w[k] >= 0.0 && s.w[k] <= 1.0 + 1e-12);
                }
            }
        }

        #[test]
        fn summary_bounds(vals in prop::collection::vec(0.0f64..=1.0, 1..64)) {
            let s = summarize(&EigenSpectrum::new(vals), 1e-3, 3);
            prop_assert!(s.atom0 >= 0.0 && s.atom1 >= 0.0 && s.atom0 + s.atom1 <= 1.0 + 1e-15);
            prop_assert!(s.gap >= 0.0 && s.gap <= 1.0);
            prop_assert!((s.moments[0] - 1.0).abs() < 1e-12);
        }

        #[test]
        fn histogram_counts_everything(vals in prop::collection::vec(0.0f64..=1.0, 1..64), bins in 1usize..50) {
            let n = vals.len();
            let mut h = SpectralHistogram::new(bins, n, 1e-3).unwrap();
            h.add(&EigenSpectrum::new(vals)).unwrap();
            prop_assert_eq!(h.total(), n as u64);
        }
    }
}
