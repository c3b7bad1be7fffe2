use std::f64::consts::FRAC_1_SQRT_2;

use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

use crate::linalg::ComplexMatrix;

pub type Gate1 = [[c64; 2]; 2];
pub type Gate2 = [[c64; 4]; 4];

const ZERO: c64 = c64::new(0.0, 0.0);
const ONE: c64 = c64::new(1.0, 0.0);

/// Two-qubit fSim gate in the basis `|ab>` ordered `00, 01, 10, 11`.
pub fn fsim(theta: f64, phi: f64, beta: f64) -> Gate2 {
    let (s, c) = theta.sin_cos();
    let i = c64::new(0.0, 1.0);
    [
        [ONE, ZERO, ZERO, ZERO],
        [ZERO, c64::new(c, 0.0), i * c64::from_polar(s, beta), ZERO],
        [ZERO, i * c64::from_polar(s, -beta), c64::new(c, 0.0), ZERO],
        [ZERO, ZERO, ZERO, c64::from_polar(1.0, phi)],
    ]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PauliAxis {
    X,
    Y,
    /// `(X + Y) / √2`
    W,
    /// `(X - Y) / √2`
    V,
}

impl PauliAxis {
    pub const ALL: [PauliAxis; 4] = [PauliAxis::X, PauliAxis::Y, PauliAxis::W, PauliAxis::V];

    pub fn matrix(self) -> Gate1 {
        let r = FRAC_1_SQRT_2;
        match self {
            PauliAxis::X => [[ZERO, ONE], [ONE, ZERO]],
            PauliAxis::Y => [[ZERO, c64::new(0.0, -1.0)], [c64::new(0.0, 1.0), ZERO]],
            PauliAxis::W => [[ZERO, c64::new(r, -r)], [c64::new(r, r), ZERO]],
            PauliAxis::V => [[ZERO, c64::new(r, r)], [c64::new(r, -r), ZERO]],
        }
    }
}

/// `√A = e^{-iπ/4}(1 + iA)/√2` for an involution `A`; `sign < 0` gives the inverse.
pub fn sqrt_pauli_gate(axis: PauliAxis, sign: i8) -> Gate1 {
    let a = axis.matrix();
    let pre = c64::from_polar(FRAC_1_SQRT_2, -std::f64::consts::FRAC_PI_4);
    let i = c64::new(0.0, 1.0);
    let mut g = [[ZERO; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            let id = if r == c { ONE } else { ZERO };
            g[r][c] = pre * (id + i * a[r][c]);
        }
    }
    if sign < 0 {
        adjoint1(&g)
    } else {
        g
    }
}

pub fn adjoint1(g: &Gate1) -> Gate1 {
    [
        [g[0][0].conj(), g[1][0].conj()],
        [g[0][1].conj(), g[1][1].conj()],
    ]
}

pub fn gate1_matrix(g: &Gate1) -> ComplexMatrix {
    ComplexMatrix::from_fn(2, |i, j| g[i][j]).expect("finite gate")
}

pub fn gate2_matrix(g: &Gate2) -> ComplexMatrix {
    ComplexMatrix::from_fn(4, |i, j| g[i][j]).expect("finite gate")
}

/// Apply `g` on qubit `q` to every column of `psi`.
pub fn apply_1q(psi: &mut Mat<c64>, q: usize, g: &Gate1) {
    let dim = psi.nrows();
    let bit = 1usize << q;
    for col in 0..psi.ncols() {
        let v = psi.col_as_slice_mut(col);
        for x in 0..dim {
            if x & bit == 0 {
                let (a, b) = (v[x], v[x | bit]);
                v[x] = g[0][0] * a + g[0][1] * b;
                v[x | bit] = g[1][0] * a + g[1][1] * b;
            }
        }
    }
}

/// Apply `g` on qubits `(qa, qb)` (local index `2 * bit(qa) + bit(qb)`) to
/// every column of `psi`. Exact zeros of `g` are skipped.
pub fn apply_2q(psi: &mut Mat<c64>, qa: usize, qb: usize, g: &Gate2) {
    assert_ne!(qa, qb, "two-qubit gate needs distinct qubits");
    let dim = psi.nrows();
    let (ba, bb) = (1usize << qa, 1usize << qb);
    let offs = [0, bb, ba, ba | bb];
    let terms: Vec<Vec<(usize, c64)>> = (0..4)
        .map(|r| {
            (0..4)
                .filter(|&c| g[r][c] != ZERO)
                .map(|c| (c, g[r][c]))
                .collect()
        })
        .collect();
    for col in 0..psi.ncols() {
        let v = psi.col_as_slice_mut(col);
        for x in 0..dim {
            if x & (ba | bb) == 0 {
                let old = [v[x], v[x | bb], v[x | ba], v[x | ba | bb]];
                for r in 0..4 {
                    v[x | offs[r]] = terms[r].iter().fold(ZERO, |acc, &(c, z)| acc + z * old[c]);
                }
            }
        }
    }
}
