use thiserror::Error;

/// Errors produced by the polarization toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("photon numbers (m={m}, n={n}) exceed cutoff nmax={nmax}")]
    CutoffExceeded { m: usize, n: usize, nmax: usize },

    #[error("photon number {n} exceeds cutoff nmax={nmax}")]
    BlockOutOfRange { n: usize, nmax: usize },

    #[error("flat index {index} out of range for basis of dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("basis mismatch: nmax {left} vs {right}")]
    BasisMismatch { left: usize, right: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("zero state cannot be normalized")]
    ZeroState,

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("weights sum to {sum}, expected 1")]
    WeightsNotNormalized { sum: f64 },

    #[error("state is supported on more than one photon-number block")]
    MultiBlockSupport,

    #[error("Gauss decomposition is singular within {margin} of theta = pi (theta = {theta}); use the exponential construction")]
    SingularDecomposition { theta: f64, margin: f64 },

    #[error("polarization direction undefined: {0}")]
    UndefinedPolarization(String),

    #[error("strategy inconsistent with state: {0}")]
    InconsistentStrategy(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
