//! Polarization of two-mode quantum light on a truncated Fock space.
//!
//! The crate is organised bottom-up:
//!
//! - [`fock`]: basis indexing, states, ladder and Stokes operators.
//! - [`su2`]: SU(2) coherent states and rotations (matrix exponential and an
//!   independent Gauss-factorised construction).
//! - [`majorana`]: Majorana constellations and the maximum overlap with an
//!   SU(2) coherent state.
//! - [`polarization`]: Stokes vectors, degree of polarization, classification
//!   of perfectly polarized states and polarized/unpolarized decompositions.

pub mod error;
pub mod fock;
pub mod majorana;
pub mod polarization;
pub mod su2;

mod linalg;

pub use error::{Error, Result};
pub use fock::{
    DensityMatrix, OperatorMatrix, PureState, QuantumState, State, StokesOperators, Tolerances,
    TwoModeBasis, ValidationReport,
};
pub use majorana::{Constellation, FidelityResult, Star};
pub use polarization::{
    ClassificationReport, DecompositionResult, StokesVector, Strategy, TableRow,
};
pub use su2::{PolarizedPureSpec, Rotation};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
