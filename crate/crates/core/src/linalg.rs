//! Dense complex matrices and a deterministic Hermitian eigensolver.
//!
//! The eigensolver is faer's dense self-adjoint routine (Householder
//! tridiagonalization followed by an implicit-shift QR sweep), run without
//! threading, so identical input bits give identical output bits.

use faer::{c64, Mat, MatRef, Side};

use crate::error::{Error, Result};

/// Largest tolerated `max |A - A†|` for input to the Hermitian solvers.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Dense `dim x dim` complex matrix with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    inner: Mat<c64>,
}

impl ComplexMatrix {
    pub fn from_mat(mat: Mat<c64>) -> Result<Self> {
        let (rows, cols) = (mat.nrows(), mat.ncols());
        if rows != cols || rows == 0 {
            return Err(Error::Shape { rows, cols });
        }
        for j in 0..cols {
            for i in 0..rows {
                let z = mat[(i, j)];
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(Self { inner: mat })
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> c64) -> Result<Self> {
        Self::from_mat(Mat::from_fn(dim, dim, f))
    }

    /// Row-major construction, mostly for tests and small literals.
    pub fn from_rows(rows: &[Vec<c64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::Shape {
                rows: n,
                cols: bad.len(),
            });
        }
        Self::from_fn(n, |i, j| rows[i][j])
    }

    pub fn identity(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        Self {
            inner: Mat::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        Self {
            inner: Mat::zeros(dim, dim),
        }
    }

    /// Wrap a matrix already known to be square and finite.
    pub(crate) fn from_mat_unchecked(inner: Mat<c64>) -> Self {
        debug_assert_eq!(inner.nrows(), inner.ncols());
        Self { inner }
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn as_mat(&self) -> MatRef<'_, c64> {
        self.inner.as_ref()
    }

    pub fn into_mat(self) -> Mat<c64> {
        self.inner
    }

    pub fn get(&self, i: usize, j: usize) -> c64 {
        self.inner[(i, j)]
    }

    /// `A[S, S]` for an index set `S`.
    pub fn principal_block(&self, s: &[usize]) -> Mat<c64> {
        Mat::from_fn(s.len(), s.len(), |i, j| self.inner[(s[i], s[j])])
    }

    pub fn adjoint(&self) -> Self {
        Self {
            inner: self.inner.adjoint().to_owned(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.dim() != rhs.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: rhs.dim(),
            });
        }
        Ok(Self {
            inner: &self.inner * &rhs.inner,
        })
    }

    pub fn scale(&self, s: c64) -> Self {
        let n = self.dim();
        Self {
            inner: Mat::from_fn(n, n, |i, j| self.inner[(i, j)] * s),
        }
    }

    pub fn add_identity(&self, c: f64) -> Self {
        let mut inner = self.inner.clone();
        for i in 0..self.dim() {
            inner[(i, i)] += c64::new(c, 0.0);
        }
        Self { inner }
    }

    pub fn trace(&self) -> c64 {
        (0..self.dim()).map(|i| self.inner[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(self.inner.as_ref())
    }

    /// `max |A - A†|`.
    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(self.inner.as_ref())
    }

    /// `max |A - B|`.
    pub fn max_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim());
        let n = self.dim();
        let mut m = 0.0f64;
        for j in 0..n {
            for i in 0..n {
                m = m.max((self.inner[(i, j)] - other.inner[(i, j)]).norm());
            }
        }
        m
    }
}

pub(crate) fn max_abs(a: MatRef<'_, c64>) -> f64 {
    let mut m = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max(a[(i, j)].norm());
        }
    }
    m
}

pub(crate) fn hermiticity_defect(a: MatRef<'_, c64>) -> f64 {
    let n = a.nrows();
    let mut m = 0.0f64;
    for j in 0..n {
        for i in 0..=j {
            m = m.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    m
}

/// Eigenvalues sorted ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenSpectrum {
    values: Vec<f64>,
}

impl EigenSpectrum {
    /// Sorts the input, so any order is accepted.
    pub fn new(mut values: Vec<f64>) -> Self {
        values.sort_by(f64::total_cmp);
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// Eigenvalues (ascending) with the matching orthonormal eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: Mat<c64>,
}

fn check_hermitian(a: MatRef<'_, c64>) -> Result<()> {
    let deviation = hermiticity_defect(a);
    if deviation >= HERMITIAN_TOL {
        return Err(Error::NotHermitian {
            deviation,
            tolerance: HERMITIAN_TOL,
        });
    }
    Ok(())
}

pub fn hermitian_eigenvalues(a: &ComplexMatrix) -> Result<EigenSpectrum> {
    check_hermitian(a.as_mat())?;
    Ok(EigenSpectrum::new(eigenvalues_raw(a.as_mat())?))
}

pub fn hermitian_eigen(a: &ComplexMatrix) -> Result<EigenDecomposition> {
    check_hermitian(a.as_mat())?;
    eigen_raw(a.as_mat())
}

/// Eigenvalues of a block whose Hermiticity the caller guarantees by construction.
pub(crate) fn eigenvalues_raw(a: MatRef<'_, c64>) -> Result<Vec<f64>> {
    if a.nrows() == 0 {
        return Ok(Vec::new());
    }
    let mut v = a
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| Error::EigenSolver)?;
    v.sort_by(f64::total_cmp);
    Ok(v)
}

pub(crate) fn eigen_raw(a: MatRef<'_, c64>) -> Result<EigenDecomposition> {
    let n = a.nrows();
    if n == 0 {
        return Ok(EigenDecomposition {
            values: Vec::new(),
            vectors: Mat::zeros(0, 0),
        });
    }
    let evd = a
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::EigenSolver)?;
    let s = evd.S().column_vector();
    let values: Vec<f64> = (0..n).map(|i| s[i].re).collect();
    Ok(EigenDecomposition {
        values,
        vectors: evd.U().to_owned(),
    })
}

/// `max |U†U - 1|`.
pub fn unitarity_defect(u: &ComplexMatrix) -> f64 {
    gram_defect(u.as_mat())
}

/// `max |A†A - 1|` for a (possibly rectangular) matrix with orthonormal columns.
pub(crate) fn gram_defect(a: MatRef<'_, c64>) -> f64 {
    let g = a.adjoint() * a;
    let mut m = 0.0f64;
    for j in 0..g.ncols() {
        for i in 0..g.nrows() {
            let target = if i == j {
                c64::new(1.0, 0.0)
            } else {
                c64::new(0.0, 0.0)
            };
            m = m.max((g[(i, j)] - target).norm());
        }
    }
    m
}

/// Connected components of the graph whose edges are the exactly nonzero
/// entries of a square matrix. Components come out sorted by smallest index,
/// each with ascending members.
pub fn connected_blocks(a: MatRef<'_, c64>) -> Vec<Vec<usize>> {
    let n = a.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for j in 0..n {
        for i in 0..n {
            if i != j && a[(i, j)] != c64::new(0.0, 0.0) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut label = vec![usize::MAX; n];
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        if label[r] == usize::MAX {
            label[r] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[label[r]].push(i);
    }
    blocks
}
