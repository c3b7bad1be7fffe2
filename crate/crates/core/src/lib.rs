//! Spectra of measurement-sandwich operators `Λ_P = P U† P U P`.
//!
//! The crate samples unitaries (Cayley-transformed GUE, Haar, brickwork
//! chains, 2D fSim grids), forms the sandwich operators for a projective
//! measurement `P`, and reduces their spectra to atoms, gaps, moments and
//! repeated-measurement probabilities `w(d) = Tr[Λ_P^d ρ₀]`. The `theory`
//! module solves the self-consistent random-matrix description of the same
//! spectra and provides the closed-form limits used as oracles.

pub mod circuit;
pub mod ensemble;
pub mod error;
pub mod linalg;
pub mod measurement;
pub mod quad;
pub mod rng;
pub mod spectral;
pub mod theory;

pub use error::{Error, Result};
pub use faer::c64;
pub use linalg::{ComplexMatrix, EigenSpectrum};
