//! Qubit circuits acting on state columns.
//!
//! Gates act in place on a `2^n x k` block of column states, so forming a
//! few columns of the circuit unitary costs `O(2^n k)` per gate rather than a
//! dense matrix product.

pub mod chain;
pub mod gates;
pub mod grid;

use faer::{c64, Mat};

use crate::error::{invalid, Result};
use crate::linalg::ComplexMatrix;

pub use gates::{fsim, sqrt_pauli_gate, Gate1, Gate2, PauliAxis};

#[derive(Clone, Debug, PartialEq)]
pub enum Op {
    One { qubit: usize, gate: Gate1 },
    Two { a: usize, b: usize, gate: Gate2 },
}

/// Ordered gate list; the first op acts first.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    qubits: usize,
    ops: Vec<Op>,
}

impl Circuit {
    pub fn new(qubits: usize) -> Self {
        Self {
            qubits,
            ops: Vec::new(),
        }
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.qubits
    }

    pub fn ops(&self) -> &[Op] {
        &self.ops
    }

    pub fn push(&mut self, op: Op) {
        match op {
            Op::One { qubit, .. } => assert!(qubit < self.qubits),
            Op::Two { a, b, .. } => assert!(a < self.qubits && b < self.qubits && a != b),
        }
        self.ops.push(op);
    }

    pub fn apply_to_state(&self, psi: &mut Mat<c64>) {
        assert_eq!(psi.nrows(), self.dim());
        for op in &self.ops {
            match op {
                Op::One { qubit, gate } => gates::apply_1q(psi, *qubit, gate),
                Op::Two { a, b, gate } => gates::apply_2q(psi, *a, *b, gate),
            }
        }
    }

    /// Columns `cols` of the circuit unitary, repeated `reps` times.
    pub fn unitary_columns(&self, cols: &[usize], reps: usize) -> Result<Mat<c64>> {
        let d = self.dim();
        if let Some(&bad) = cols.iter().find(|&&c| c >= d) {
            return Err(invalid(format!(
                "column {bad} out of range for dimension {d}"
            )));
        }
        let mut psi = Mat::<c64>::from_fn(d, cols.len(), |i, k| {
            if i == cols[k] {
                c64::new(1.0, 0.0)
            } else {
                c64::new(0.0, 0.0)
            }
        });
        for _ in 0..reps {
            self.apply_to_state(&mut psi);
        }
        Ok(psi)
    }

    pub fn unitary(&self) -> ComplexMatrix {
        let cols: Vec<usize> = (0..self.dim()).collect();
        ComplexMatrix::from_mat_unchecked(self.unitary_columns(&cols, 1).expect("columns in range"))
    }
}

/// Rows `s` of a column block computed for the same index list.
pub(crate) fn square_block(cols: &Mat<c64>, s: &[usize]) -> Mat<c64> {
    Mat::from_fn(s.len(), s.len(), |i, j| cols[(s[i], j)])
}
