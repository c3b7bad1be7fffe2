//! Open brickwork chain: every layer puts a random `√A^{±1}` on each qubit,
//! then fSim on bonds `(i, i+1)` with `i ≡ layer (mod 2)`.

use std::f64::consts::PI;

use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

use super::gates::{fsim, sqrt_pauli_gate, PauliAxis};
use super::{square_block, Circuit, Op};
use crate::error::{invalid, Result};
use crate::linalg::ComplexMatrix;
use crate::measurement::{projector_from_qubits, Projector};
use crate::rng::RngSeed;

pub const DEFAULT_MAX_QUBITS: usize = 14;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    pub l: usize,
    pub k: usize,
    pub theta: f64,
    pub phi: f64,
    pub beta: f64,
    pub seed: RngSeed,
    pub max_qubits: usize,
}

impl ChainSpec {
    pub fn new(l: usize, k: usize, seed: RngSeed) -> Self {
        Self {
            l,
            k,
            theta: PI / 6.0,
            phi: 2.0 * PI / 3.0,
            beta: 0.0,
            seed,
            max_qubits: DEFAULT_MAX_QUBITS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.l < 2 {
            return Err(invalid(format!(
                "chain needs at least 2 qubits, got {}",
                self.l
            )));
        }
        if self.k < 1 {
            return Err(invalid("chain needs at least one layer"));
        }
        if self.l > self.max_qubits {
            return Err(invalid(format!(
                "chain of {} qubits exceeds the dense limit {}",
                self.l, self.max_qubits
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GateKind {
    Sqrt { axis: PauliAxis, inverse: bool },
    FSim,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateRecord {
    pub layer: usize,
    pub sites: Vec<usize>,
    pub kind: GateKind,
    pub params: Vec<f64>,
}

/// Gate index `0..8` drawn per qubit: axis `idx / 2`, inverse when `idx` is odd.
fn single_kind(idx: usize) -> GateKind {
    GateKind::Sqrt {
        axis: PauliAxis::ALL[idx / 2],
        inverse: idx % 2 == 1,
    }
}

pub fn build_chain(spec: &ChainSpec) -> Result<(Circuit, Vec<GateRecord>)> {
    spec.validate()?;
    let mut rng = spec.seed.rng();
    let mut circ = Circuit::new(spec.l);
    let mut log = Vec::new();
    let two = fsim(spec.theta, spec.phi, spec.beta);
    for layer in 0..spec.k {
        for q in 0..spec.l {
            let kind = single_kind(rng.index(8));
            let GateKind::Sqrt { axis, inverse } = kind else {
                unreachable!()
            };
            circ.push(Op::One {
                qubit: q,
                gate: sqrt_pauli_gate(axis, if inverse { -1 } else { 1 }),
            });
            log.push(GateRecord {
                layer,
                sites: vec![q],
                kind,
                params: Vec::new(),
            });
        }
        for i in (layer % 2..spec.l - 1).step_by(2) {
            circ.push(Op::Two {
                a: i,
                b: i + 1,
                gate: two,
            });
            log.push(GateRecord {
                layer,
                sites: vec![i, i + 1],
                kind: GateKind::FSim,
                params: vec![spec.theta, spec.phi, spec.beta],
            });
        }
    }
    Ok((circ, log))
}

pub fn build_chain_unitary(spec: &ChainSpec) -> Result<ComplexMatrix> {
    Ok(build_chain(spec)?.0.unitary())
}

/// `U[S, S]` for the projector support, from only the needed columns.
pub fn chain_support_block(spec: &ChainSpec, p: &Projector) -> Result<Mat<c64>> {
    let (circ, _) = build_chain(spec)?;
    if p.dim() != circ.dim() {
        return Err(invalid("projector dimension does not match the chain"));
    }
    let cols = circ.unitary_columns(p.support(), 1)?;
    Ok(square_block(&cols, p.support()))
}

/// Measurement on the first one or two qubits realizing `b ∈ {1/4, 1/2, 3/4}`.
pub fn default_chain_projector(l: usize, b: f64) -> Result<Projector> {
    let close = |x: f64| (b - x).abs() < 1e-12;
    if close(0.5) {
        projector_from_qubits(l, &[0], &["0"])
    } else if close(0.25) {
        projector_from_qubits(l, &[0, 1], &["00"])
    } else if close(0.75) {
        projector_from_qubits(l, &[0, 1], &["00", "01", "10"])
    } else {
        Err(invalid(format!(
            "no default chain measurement for b = {b}; give qubits explicitly"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::unitarity_defect;
    use crate::measurement::lambda_p;
    use proptest::prelude::*;

    #[test]
    fn two_qubit_one_layer_is_unitary() {
        let u = build_chain_unitary(&ChainSpec::new(2, 1, RngSeed::new(1, 0))).unwrap();
        assert_eq!(u.dim(), 4);
        assert!(unitarity_defect(&u) < 1e-14);
    }

    #[test]
    fn deterministic() {
        let s = ChainSpec::new(5, 3, RngSeed::new(42, 7));
        assert_eq!(
            build_chain_unitary(&s).unwrap(),
            build_chain_unitary(&s).unwrap()
        );
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(build_chain(&ChainSpec::new(1, 1, RngSeed::new(0, 0))).is_err());
        assert!(build_chain(&ChainSpec::new(4, 0, RngSeed::new(0, 0))).is_err());
        assert!(build_chain(&ChainSpec::new(15, 1, RngSeed::new(0, 0))).is_err());
    }

    #[test]
    fn layer_structure() {
        let (_, log) = build_chain(&ChainSpec::new(5, 2, RngSeed::new(3, 0))).unwrap();
        for layer in 0..2 {
            let mut singles: Vec<usize> = log
                .iter()
                .filter(|g| g.layer == layer && g.kind != GateKind::FSim)
                .map(|g| g.sites[0])
                .collect();
            singles.sort_unstable();
            assert_eq!(singles, vec![0, 1, 2, 3, 4]);
        }
        let bonds = |layer| -> Vec<Vec<usize>> {
            log.iter()
                .filter(|g| g.layer == layer && g.kind == GateKind::FSim)
                .map(|g| g.sites.clone())
                .collect()
        };
        assert_eq!(bonds(0), vec![vec![0, 1], vec![2, 3]]);
        assert_eq!(bonds(1), vec![vec![1, 2], vec![3, 4]]);
    }

    #[test]
    fn support_block_matches_full_unitary() {
        let spec = ChainSpec::new(4, 3, RngSeed::new(9, 1));
        let p = default_chain_projector(4, 0.75).unwrap();
        let u = build_chain_unitary(&spec).unwrap();
        let blk = chain_support_block(&spec, &p).unwrap();
        let s = p.support();
        for i in 0..s.len() {
            for j in 0..s.len() {
                assert_eq!(blk[(i, j)], u.get(s[i], s[j]));
            }
        }
    }

    #[test]
    fn default_projectors() {
        assert_eq!(default_chain_projector(3, 0.5).unwrap().b(), 0.5);
        assert_eq!(default_chain_projector(3, 0.25).unwrap().b(), 0.25);
        assert_eq!(default_chain_projector(3, 0.75).unwrap().b(), 0.75);
        assert!(default_chain_projector(3, 0.3).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn defect_bounded_by_depth(master in any::<u64>(), l in 2usize..9, k in 1usize..8) {
            let u = build_chain_unitary(&ChainSpec::new(l, k, RngSeed::new(master, 0))).unwrap();
            prop_assert!(unitarity_defect(&u) < 1e-11 * k as f64);
        }

        #[test]
        fn phase_irrelevant(master in any::<u64>(), phase in 0.0f64..6.3) {
            let spec = ChainSpec::new(5, 3, RngSeed::new(master, 0));
            let u = build_chain_unitary(&spec).unwrap();
            let p = default_chain_projector(5, 0.5).unwrap();
            let s0 = lambda_p(&u, &p).unwrap().spectrum().unwrap();
            let s1 = lambda_p(&u.scale(c64::from_polar(1.0, phase)), &p).unwrap().spectrum().unwrap();
            for (x, y) in s0.values().iter().zip(s1.values()) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }
    }
}
