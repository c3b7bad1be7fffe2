//! Random unitaries: Cayley transforms of scaled GUE matrices, and Haar.

use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::ComplexMatrix;
use crate::rng::RngSeed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleKind {
    CayleyGue,
    Haar,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleParams {
    pub dim: usize,
    pub gamma: f64,
    pub kind: EnsembleKind,
}

impl EnsembleParams {
    pub fn cayley(dim: usize, gamma: f64) -> Self {
        Self {
            dim,
            gamma,
            kind: EnsembleKind::CayleyGue,
        }
    }

    pub fn haar(dim: usize) -> Self {
        Self {
            dim,
            gamma: 2.0,
            kind: EnsembleKind::Haar,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(invalid("ensemble dimension must be at least 1"));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(invalid(format!(
                "gamma must be finite and >= 0, got {}",
                self.gamma
            )));
        }
        Ok(())
    }
}

/// Hermitian `H` with `E|H_ij|^2 = gamma / dim`.
///
/// The upper triangle is filled column by column (`i <= j`), diagonal entry
/// last in each column; real diagonal, circular complex off-diagonal.
pub fn sample_gue(params: &EnsembleParams, seed: RngSeed) -> Result<ComplexMatrix> {
    params.validate()?;
    if params.kind != EnsembleKind::CayleyGue {
        return Err(invalid("sample_gue requires the cayley_gue ensemble"));
    }
    let n = params.dim;
    let var = params.gamma / n as f64;
    let sd = var.sqrt();
    let mut rng = seed.rng();
    let mut h = Mat::<c64>::zeros(n, n);
    for j in 0..n {
        for i in 0..j {
            let z = rng.complex_normal(var);
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
        }
        h[(j, j)] = c64::new(sd * rng.normal(), 0.0);
    }
    Ok(ComplexMatrix::from_mat_unchecked(h))
}

/// `U = (1 - iH)(1 + iH)^{-1} = 2 (1 + iH)^{-1} - 1`.
pub fn cayley_unitary(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = h.dim();
    let cols: Vec<usize> = (0..n).collect();
    Ok(ComplexMatrix::from_mat_unchecked(cayley_columns(h, &cols)?))
}

/// Columns `cols` of the Cayley transform, as an `n x cols.len()` matrix.
pub fn cayley_columns(h: &ComplexMatrix, cols: &[usize]) -> Result<Mat<c64>> {
    let n = h.dim();
    if let Some(&bad) = cols.iter().find(|&&c| c >= n) {
        return Err(invalid(format!(
            "column {bad} out of range for dimension {n}"
        )));
    }
    let hm = h.as_mat();
    let a = Mat::<c64>::from_fn(n, n, |i, j| {
        let z = hm[(i, j)] * c64::new(0.0, 1.0);
        if i == j {
            z + c64::new(1.0, 0.0)
        } else {
            z
        }
    });
    let rhs = Mat::<c64>::from_fn(n, cols.len(), |i, k| {
        if i == cols[k] {
            c64::new(1.0, 0.0)
        } else {
            c64::new(0.0, 0.0)
        }
    });
    let lu = a.partial_piv_lu();
    let x = faer::linalg::solvers::Solve::solve(&lu, &rhs);
    let out = Mat::<c64>::from_fn(n, cols.len(), |i, k| {
        let v = x[(i, k)] * 2.0;
        if i == cols[k] {
            v - c64::new(1.0, 0.0)
        } else {
            v
        }
    });
    for k in 0..out.ncols() {
        for i in 0..n {
            if !(out[(i, k)].re.is_finite() && out[(i, k)].im.is_finite()) {
                return Err(Error::Numerical("Cayley transform linear solve".into()));
            }
        }
    }
    Ok(out)
}

/// Haar unitary: QR of a complex Ginibre matrix, each column of `Q` multiplied
/// by the phase of the matching diagonal entry of `R`.
pub fn sample_haar(dim: usize, seed: RngSeed) -> Result<ComplexMatrix> {
    if dim == 0 {
        return Err(invalid("ensemble dimension must be at least 1"));
    }
    let mut rng = seed.rng();
    let mut g = Mat::<c64>::zeros(dim, dim);
    for j in 0..dim {
        for i in 0..dim {
            g[(i, j)] = rng.complex_normal(1.0);
        }
    }
    let qr = g.qr();
    let r = qr.R();
    let mut q = qr.compute_Q();
    for j in 0..dim {
        let d = r[(j, j)];
        let nrm = d.norm();
        let phase = if nrm > 0.0 {
            d / nrm
        } else {
            c64::new(1.0, 0.0)
        };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    Ok(ComplexMatrix::from_mat_unchecked(q))
}

/// Full unitary drawn from `params`.
pub fn sample_unitary(params: &EnsembleParams, seed: RngSeed) -> Result<ComplexMatrix> {
    params.validate()?;
    match params.kind {
        EnsembleKind::CayleyGue => cayley_unitary(&sample_gue(params, seed)?),
        EnsembleKind::Haar => sample_haar(params.dim, seed),
    }
}

/// Block `U[S, S]` for support `s`, computing only what is needed.
pub fn sample_support_block(
    params: &EnsembleParams,
    seed: RngSeed,
    s: &[usize],
) -> Result<Mat<c64>> {
    params.validate()?;
    match params.kind {
        EnsembleKind::CayleyGue => {
            let h = sample_gue(params, seed)?;
            let cols = cayley_columns(&h, s)?;
            Ok(Mat::from_fn(s.len(), s.len(), |i, j| cols[(s[i], j)]))
        }
        EnsembleKind::Haar => {
            let u = sample_haar(params.dim, seed)?;
            let m = u.as_mat();
            Ok(Mat::from_fn(s.len(), s.len(), |i, j| m[(s[i], s[j])]))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{gram_defect, hermitian_eigen, unitarity_defect};
    use proptest::prelude::*;

    #[test]
    fn zero_gamma_gives_zero() {
        let h = sample_gue(&EnsembleParams::cayley(6, 0.0), RngSeed::new(1, 0)).unwrap();
        assert_eq!(h.max_abs(), 0.0);
        let u = cayley_unitary(&h).unwrap();
        assert_eq!(u.max_diff(&ComplexMatrix::identity(6)), 0.0);
    }

    #[test]
    fn rejects_negative_gamma() {
        assert!(sample_gue(&EnsembleParams::cayley(4, -1.0), RngSeed::new(1, 0)).is_err());
    }

    #[test]
    fn gue_is_exactly_hermitian() {
        let h = sample_gue(&EnsembleParams::cayley(40, 2.0), RngSeed::new(3, 1)).unwrap();
        assert_eq!(h.hermiticity_defect(), 0.0);
    }

    #[test]
    fn one_by_one_cayley() {
        let h = ComplexMatrix::from_fn(1, |_, _| c64::new(1.0, 0.0)).unwrap();
        let u = cayley_unitary(&h).unwrap().get(0, 0);
        assert!((u - c64::new(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn large_scale_tends_to_minus_identity() {
        let h = ComplexMatrix::from_rows(&[
            vec![c64::new(2.0, 0.0), c64::new(1.0, 0.0)],
            vec![c64::new(1.0, 0.0), c64::new(-2.0, 0.0)],
        ])
        .unwrap();
        let u = cayley_unitary(&h.scale(c64::new(1e3, 0.0))).unwrap();
        let minus_one = ComplexMatrix::identity(2).scale(c64::new(-1.0, 0.0));
        assert!(u.max_diff(&minus_one) < 1e-3);
    }

    #[test]
    fn gue_variance() {
        let n = 1024;
        let h = sample_gue(&EnsembleParams::cayley(n, 2.0), RngSeed::new(2024, 0)).unwrap();
        let mut xs = Vec::with_capacity(n * (n - 1) / 2);
        for j in 0..n {
            for i in 0..j {
                xs.push(n as f64 * h.get(i, j).norm_sqr());
            }
        }
        let m = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / m;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
        let se = (var / m).sqrt();
        assert!((mean - 2.0).abs() < 3.0 * se, "mean {mean} se {se}");
    }

    #[test]
    fn haar_columns_normalized() {
        let u = sample_haar(64, RngSeed::new(5, 2)).unwrap();
        assert!(unitarity_defect(&u) < 1e-12);
        for j in 0..64 {
            let nrm: f64 = (0..64).map(|i| u.get(i, j).norm_sqr()).sum();
            assert!((nrm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn haar_one_dim_phase() {
        let mut phases = Vec::new();
        for s in 0..400 {
            let u = sample_haar(1, RngSeed::new(11, s)).unwrap().get(0, 0);
            assert!((u.norm() - 1.0).abs() < 1e-14);
            phases.push(u.arg());
        }
        let mean_cos = phases.iter().map(|p| p.cos()).sum::<f64>() / 400.0;
        assert!(mean_cos.abs() < 0.15);
    }

    #[test]
    fn support_block_matches_full() {
        let p = EnsembleParams::cayley(20, 1.5);
        let seed = RngSeed::new(4, 4);
        let u = sample_unitary(&p, seed).unwrap();
        let s = [0usize, 3, 7, 19];
        let blk = sample_support_block(&p, seed, &s).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!((blk[(i, j)] - u.get(s[i], s[j])).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn cayley_mean_entry_vanishes_at_gamma_two() {
        let n = 64;
        let mut acc = c64::new(0.0, 0.0);
        let reps = 20;
        for s in 0..reps {
            let u = sample_unitary(&EnsembleParams::cayley(n, 2.0), RngSeed::new(77, s)).unwrap();
            for j in 0..n {
                for i in 0..n {
                    acc += u.get(i, j);
                }
            }
        }
        let mean = acc / (reps as f64 * (n * n) as f64);
        // each entry has variance ~1/n, so the mean has std ~ 1/(n sqrt(reps n))
        let se = 1.0 / (n as f64 * ((reps * n as u64) as f64).sqrt());
        assert!(mean.norm() < 4.0 * se, "{mean} vs {se}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn cayley_is_unitary_with_unit_circle_spectrum(master in any::<u64>(), n in 1usize..24, gamma in 0.0f64..8.0) {
            let h = sample_gue(&EnsembleParams::cayley(n, gamma), RngSeed::new(master, 0)).unwrap();
            let u = cayley_unitary(&h).unwrap();
            prop_assert!(unitarity_defect(&u) < 1e-12);
            // U is normal with the same eigenvectors as H: eigenvalues (1 - i h)/(1 + i h)
            let e = hermitian_eigen(&h).unwrap();
            let uv = u.as_mat() * &e.vectors;
            for k in 0..n {
                let z = c64::new(1.0, -e.values[k]) / c64::new(1.0, e.values[k]);
                prop_assert!((z.norm() - 1.0).abs() < 1e-10);
                for i in 0..n {
                    prop_assert!((uv[(i, k)] - e.vectors[(i, k)] * z).norm() < 1e-10);
                }
            }
        }

        #[test]
        fn same_seed_same_bits(master in any::<u64>(), stream in any::<u64>()) {
            let p = EnsembleParams::cayley(8, 2.0);
            let a = sample_gue(&p, RngSeed::new(master, stream)).unwrap();
            let b = sample_gue(&p, RngSeed::new(master, stream)).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn haar_is_unitary(master in any::<u64>(), n in 1usize..24) {
            let u = sample_haar(n, RngSeed::new(master, 1)).unwrap();
            prop_assert!(gram_defect(u.as_mat()) < 1e-12);
        }
    }

    #[test]
    fn streams_uncorrelated() {
        let p = EnsembleParams::cayley(48, 2.0);
        let a = sample_gue(&p, RngSeed::new(1, 0)).unwrap();
        let b = sample_gue(&p, RngSeed::new(1, 1)).unwrap();
        let (mut num, mut na, mut nb) = (c64::new(0.0, 0.0), 0.0, 0.0);
        for j in 0..48 {
            for i in 0..j {
                num += a.get(i, j) * b.get(i, j).conj();
                na += a.get(i, j).norm_sqr();
                nb += b.get(i, j).norm_sqr();
            }
        }
        let corr = num.norm() / (na * nb).sqrt();
        let m = (48 * 47 / 2) as f64;
        assert!(corr < 4.0 / m.sqrt(), "{corr}");
    }
}
