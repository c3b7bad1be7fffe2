//! Projectors and the sandwich operators built from them.
//!
//! A projector is diagonal in the computational basis, so `P X P` is just the
//! restriction of `X` to the support rows and columns. Every sandwich operator
//! here vanishes outside the support of `P`; only the `rank x rank` support
//! block is stored and diagonalized, and the remaining `dim - rank` eigenvalues
//! are exact zeros.
//!
//! Basis states are little-endian in the qubit index: qubit `q` is bit `q` of
//! the basis label.

use faer::{c64, Mat, MatRef};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{
    connected_blocks, eigen_raw, eigenvalues_raw, gram_defect, ComplexMatrix, EigenSpectrum,
};

/// Half-width of the window used to count eigenvalues as sitting on an atom.
pub const DEFAULT_ATOM_EPS: f64 = 1e-3;

/// Largest tolerated `max |U†U - 1|` for sandwich construction.
pub const UNITARY_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Projector {
    indicator: Vec<bool>,
    support: Vec<usize>,
}

impl Projector {
    pub fn from_indicator(indicator: Vec<bool>) -> Result<Self> {
        if indicator.is_empty() {
            return Err(invalid("projector dimension must be at least 1"));
        }
        let support = indicator
            .iter()
            .enumerate()
            .filter(|(_, &x)| x)
            .map(|(i, _)| i)
            .collect();
        Ok(Self { indicator, support })
    }

    pub fn dim(&self) -> usize {
        self.indicator.len()
    }

    pub fn rank(&self) -> usize {
        self.support.len()
    }

    pub fn indicator(&self) -> &[bool] {
        &self.indicator
    }

    /// Basis states kept by the projector, ascending.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn b(&self) -> f64 {
        self.rank() as f64 / self.dim() as f64
    }

    pub fn b_bar(&self) -> f64 {
        1.0 - self.b()
    }

    pub fn complement(&self) -> Self {
        Self::from_indicator(self.indicator.iter().map(|x| !x).collect()).expect("nonempty")
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        let n = self.dim();
        ComplexMatrix::from_mat_unchecked(Mat::from_fn(n, n, |i, j| {
            if i == j && self.indicator[i] {
                c64::new(1.0, 0.0)
            } else {
                c64::new(0.0, 0.0)
            }
        }))
    }
}

/// Projector onto the first `rank` basis states.
pub fn build_projector(dim: usize, rank: usize) -> Result<Projector> {
    if dim == 0 {
        return Err(invalid("projector dimension must be at least 1"));
    }
    if rank > dim {
        return Err(invalid(format!("rank {rank} exceeds dimension {dim}")));
    }
    Projector::from_indicator((0..dim).map(|i| i < rank).collect())
}

/// Projector accepting the listed outcomes on the `measured` qubits of an
/// `l`-qubit register. Character `k` of each outcome string is the value of
/// qubit `measured[k]`.
pub fn projector_from_qubits<S: AsRef<str>>(
    l: usize,
    measured: &[usize],
    accepted: &[S],
) -> Result<Projector> {
    if l == 0 || l >= usize::BITS as usize {
        return Err(invalid(format!("register size {l} is out of range")));
    }
    if measured.is_empty() {
        return Err(invalid("at least one qubit must be measured"));
    }
    let mut seen = vec![false; l];
    for &q in measured {
        if q >= l {
            return Err(invalid(format!("measured qubit {q} outside 0..{l}")));
        }
        if std::mem::replace(&mut seen[q], true) {
            return Err(invalid(format!("qubit {q} listed twice")));
        }
    }
    if accepted.is_empty() {
        return Err(invalid("accepted outcome set is empty"));
    }
    let m = measured.len();
    let mut ok = vec![false; 1 << m];
    for s in accepted {
        let s = s.as_ref();
        if s.len() != m {
            return Err(invalid(format!("outcome {s:?} must have {m} characters")));
        }
        let mut code = 0usize;
        for (k, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => code |= 1 << k,
                _ => return Err(invalid(format!("outcome {s:?} is not a bitstring"))),
            }
        }
        ok[code] = true;
    }
    let dim = 1usize << l;
    let indicator = (0..dim)
        .map(|x| {
            let code = measured
                .iter()
                .enumerate()
                .fold(0usize, |acc, (k, &q)| acc | (((x >> q) & 1) << k));
            ok[code]
        })
        .collect();
    Projector::from_indicator(indicator)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "n")]
pub enum SandwichKind {
    /// `P U† P U P`
    LambdaP,
    /// `(W†)^n W^n` with `W = P U P`
    LambdaPn(u32),
    /// `P U† (1 - P) U P = P - Λ_P`
    Lambda01,
}

/// Hermitian operator supported on a projector, stored as its support block.
#[derive(Clone, Debug)]
pub struct SandwichOperator {
    dim: usize,
    support: Vec<usize>,
    block: Mat<c64>,
    blocks: Vec<Vec<usize>>,
    kind: SandwichKind,
}

/// Eigenpairs of a sandwich operator restricted to its support. Vectors are
/// columns in support coordinates; the complement is an exact null space.
#[derive(Clone, Debug)]
pub struct SupportEigen {
    pub values: Vec<f64>,
    pub vectors: Mat<c64>,
}

impl SandwichOperator {
    /// Build from the support block `A = U[S, S]` of a unitary.
    ///
    /// The caller vouches that `A` is a compression of a unitary; no unitarity
    /// check is possible from the block alone.
    pub fn from_compressed(
        dim: usize,
        support: Vec<usize>,
        a: MatRef<'_, c64>,
        kind: SandwichKind,
    ) -> Result<Self> {
        let r = support.len();
        if a.nrows() != r || a.ncols() != r {
            return Err(Error::DimensionMismatch {
                expected: r,
                found: a.nrows(),
            });
        }
        if r > dim {
            return Err(invalid("support larger than the space"));
        }
        if let SandwichKind::LambdaPn(0) = kind {
            return Err(invalid("sandwich power must be at least 1"));
        }
        // sectors of A (exact zeros, e.g. from a conserved charge) stay sectors
        // of every product, so each is processed on its own
        let blocks = connected_blocks(a);
        let mut block = Mat::<c64>::zeros(r, r);
        for idx in &blocks {
            let sub = extract(a, idx);
            let local = compress(sub.as_ref(), kind);
            for (jj, &j) in idx.iter().enumerate() {
                for (ii, &i) in idx.iter().enumerate() {
                    block[(i, j)] = local[(ii, jj)];
                }
            }
        }
        Ok(Self {
            dim,
            support,
            block,
            blocks,
            kind,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> SandwichKind {
        self.kind
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn block(&self) -> MatRef<'_, c64> {
        self.block.as_ref()
    }

    /// Index sets (into the support) of the independent sectors of the block.
    pub fn sectors(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Dense `dim x dim` operator.
    pub fn matrix(&self) -> ComplexMatrix {
        let mut m = Mat::<c64>::zeros(self.dim, self.dim);
        for (jj, &j) in self.support.iter().enumerate() {
            for (ii, &i) in self.support.iter().enumerate() {
                m[(i, j)] = self.block[(ii, jj)];
            }
        }
        ComplexMatrix::from_mat_unchecked(m)
    }

    /// Full spectrum: support eigenvalues plus `dim - rank` exact zeros.
    pub fn spectrum(&self) -> Result<EigenSpectrum> {
        let mut values = Vec::with_capacity(self.dim);
        for blk in &self.blocks {
            let sub = extract(self.block.as_ref(), blk);
            values.extend(eigenvalues_raw(sub.as_ref())?);
        }
        values.resize(self.dim, 0.0);
        Ok(EigenSpectrum::new(values))
    }

    /// Eigenpairs of the support block, eigenvalues ascending.
    pub fn support_eigen(&self) -> Result<SupportEigen> {
        let r = self.support.len();
        let mut pairs: Vec<(f64, Vec<(usize, c64)>)> = Vec::with_capacity(r);
        for blk in &self.blocks {
            let e = eigen_raw(extract(self.block.as_ref(), blk).as_ref())?;
            for k in 0..blk.len() {
                let v = blk
                    .iter()
                    .enumerate()
                    .map(|(ii, &i)| (i, e.vectors[(ii, k)]))
                    .collect();
                pairs.push((e.values[k], v));
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut vectors = Mat::<c64>::zeros(r, r);
        let mut values = Vec::with_capacity(r);
        for (k, (lam, v)) in pairs.into_iter().enumerate() {
            values.push(lam);
            for (i, z) in v {
                vectors[(i, k)] = z;
            }
        }
        Ok(SupportEigen { values, vectors })
    }
}

fn compress(a: MatRef<'_, c64>, kind: SandwichKind) -> Mat<c64> {
    match kind {
        SandwichKind::LambdaP => gram(a),
        SandwichKind::LambdaPn(n) => {
            let mut w = a.to_owned();
            for _ in 1..n {
                w = &w * a;
            }
            gram(w.as_ref())
        }
        SandwichKind::Lambda01 => {
            let mut g = gram(a);
            let r = g.nrows();
            for j in 0..r {
                for i in 0..r {
                    g[(i, j)] = -g[(i, j)];
                }
                g[(j, j)] += c64::new(1.0, 0.0);
            }
            g
        }
    }
}

/// `A† A`, made exactly Hermitian.
fn gram(a: MatRef<'_, c64>) -> Mat<c64> {
    let g = a.adjoint() * a;
    let n = g.nrows();
    Mat::from_fn(n, n, |i, j| {
        if i == j {
            c64::new(g[(i, i)].re, 0.0)
        } else {
            (g[(i, j)] + g[(j, i)].conj()) * 0.5
        }
    })
}

fn extract(a: MatRef<'_, c64>, idx: &[usize]) -> Mat<c64> {
    Mat::from_fn(idx.len(), idx.len(), |i, j| a[(idx[i], idx[j])])
}

fn support_block(u: &ComplexMatrix, p: &Projector) -> Result<Mat<c64>> {
    if u.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: u.dim(),
        });
    }
    let defect = gram_defect(u.as_mat());
    if defect >= UNITARY_TOL {
        return Err(Error::NotUnitary {
            defect,
            tolerance: UNITARY_TOL,
        });
    }
    let s = p.support();
    let m = u.as_mat();
    Ok(Mat::from_fn(s.len(), s.len(), |i, j| m[(s[i], s[j])]))
}

pub fn lambda_p(u: &ComplexMatrix, p: &Projector) -> Result<SandwichOperator> {
    sandwich(u, p, SandwichKind::LambdaP)
}

pub fn lambda_p_n(u: &ComplexMatrix, p: &Projector, n: u32) -> Result<SandwichOperator> {
    sandwich(u, p, SandwichKind::LambdaPn(n))
}

pub fn lambda_01(u: &ComplexMatrix, p: &Projector) -> Result<SandwichOperator> {
    sandwich(u, p, SandwichKind::Lambda01)
}

pub fn sandwich(u: &ComplexMatrix, p: &Projector, kind: SandwichKind) -> Result<SandwichOperator> {
    let a = support_block(u, p)?;
    SandwichOperator::from_compressed(p.dim(), p.support().to_vec(), a.as_ref(), kind)
}
