//! Truncated two-mode Fock space.
//!
//! Kets |m, n⟩ hold `m` photons in mode a and `n` in mode b. The flat basis is
//! ordered in blocks of increasing total photon number N = m + n and, inside a
//! block, by increasing m:
//!
//! ```text
//! 0: |0,0⟩   1: |0,1⟩  2: |1,0⟩   3: |0,2⟩  4: |1,1⟩  5: |2,0⟩ ...
//! ```
//!
//! Stokes operators conserve N, so they are block diagonal in this ordering.

use std::ops::Range;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::C64;

/// Numerical tolerances used by validation and classification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub norm: f64,
    pub hermiticity: f64,
    pub trace: f64,
    /// Smallest eigenvalue accepted is `-positivity`.
    pub positivity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { norm: 1e-12, hermiticity: 1e-12, trace: 1e-12, positivity: 1e-10 }
    }
}

/// Basis of |m, n⟩ with m + n ≤ nmax.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TwoModeBasis {
    nmax: usize,
}

impl TwoModeBasis {
    pub fn new(nmax: usize) -> Self {
        Self { nmax }
    }

    pub fn nmax(&self) -> usize {
        self.nmax
    }

    pub fn dim(&self) -> usize {
        (self.nmax + 1) * (self.nmax + 2) / 2
    }

    fn block_start(n_total: usize) -> usize {
        n_total * (n_total + 1) / 2
    }

    /// Flat indices of the N-photon block.
    pub fn block(&self, n_total: usize) -> Result<Range<usize>> {
        if n_total > self.nmax {
            return Err(Error::BlockOutOfRange { n: n_total, nmax: self.nmax });
        }
        let start = Self::block_start(n_total);
        Ok(start..start + n_total + 1)
    }

    pub fn index(&self, m: usize, n: usize) -> Result<usize> {
        if m + n > self.nmax {
            return Err(Error::CutoffExceeded { m, n, nmax: self.nmax });
        }
        Ok(Self::block_start(m + n) + m)
    }

    /// Inverse of [`index`](Self::index): returns (m, n).
    pub fn label(&self, index: usize) -> Result<(usize, usize)> {
        if index >= self.dim() {
            return Err(Error::IndexOutOfRange { index, dim: self.dim() });
        }
        let mut n_total = 0;
        while Self::block_start(n_total + 1) <= index {
            n_total += 1;
        }
        let m = index - Self::block_start(n_total);
        Ok((m, n_total - m))
    }

    /// All (m, n) labels in basis order.
    pub fn labels(&self) -> impl Iterator<Item = (usize, usize)> {
        (0..=self.nmax).flat_map(|n_total| (0..=n_total).map(move |m| (m, n_total - m)))
    }

    fn check_same(&self, other: &TwoModeBasis) -> Result<()> {
        if self != other {
            return Err(Error::BasisMismatch { left: self.nmax, right: other.nmax });
        }
        Ok(())
    }
}

/// Complex square matrix over a basis.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    basis: TwoModeBasis,
    matrix: DMatrix<C64>,
    hermitian: bool,
}

impl OperatorMatrix {
    /// Wraps a matrix; `hermitian` is set only if it holds to 1e-12.
    pub fn new(basis: TwoModeBasis, matrix: DMatrix<C64>) -> Result<Self> {
        let dim = basis.dim();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: matrix.nrows() });
        }
        let hermitian = linalg::hermiticity_residual(&matrix) <= Tolerances::default().hermiticity;
        Ok(Self { basis, matrix, hermitian })
    }

    pub(crate) fn from_parts(basis: TwoModeBasis, matrix: DMatrix<C64>, hermitian: bool) -> Self {
        Self { basis, matrix, hermitian }
    }

    pub fn basis(&self) -> TwoModeBasis {
        self.basis
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn adjoint(&self) -> Self {
        Self::from_parts(self.basis, self.matrix.adjoint(), self.hermitian)
    }

    /// Applies the operator to a ket without renormalizing.
    pub fn apply(&self, amplitudes: &DVector<C64>) -> DVector<C64> {
        &self.matrix * amplitudes
    }

    /// The N-photon block of the matrix.
    pub fn block(&self, n_total: usize) -> Result<DMatrix<C64>> {
        let r = self.basis.block(n_total)?;
        Ok(self.matrix.view((r.start, r.start), (r.len(), r.len())).into_owned())
    }

    /// Largest matrix element connecting different photon-number blocks.
    pub fn off_block_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, (mi, ni)) in self.basis.labels().enumerate() {
            for (j, (mj, nj)) in self.basis.labels().enumerate() {
                if mi + ni != mj + nj {
                    worst = worst.max(self.matrix[(i, j)].norm());
                }
            }
        }
        worst
    }
}

/// Ladder operators a, a†, b, b† on the truncated space.
///
/// a† and b† drop transitions out of the top block, so [a, a†] = 1 holds
/// only on kets with N ≤ nmax − 1.
#[derive(Debug, Clone)]
pub struct LadderOperators {
    pub a: OperatorMatrix,
    pub a_dag: OperatorMatrix,
    pub b: OperatorMatrix,
    pub b_dag: OperatorMatrix,
}

pub fn ladder_operators(basis: TwoModeBasis) -> LadderOperators {
    let dim = basis.dim();
    let mut a = DMatrix::<C64>::zeros(dim, dim);
    let mut b = DMatrix::<C64>::zeros(dim, dim);
    for (col, (m, n)) in basis.labels().enumerate() {
        if m > 0 {
            let row = basis.index(m - 1, n).expect("lower ket is in range");
            a[(row, col)] = C64::new((m as f64).sqrt(), 0.0);
        }
        if n > 0 {
            let row = basis.index(m, n - 1).expect("lower ket is in range");
            b[(row, col)] = C64::new((n as f64).sqrt(), 0.0);
        }
    }
    LadderOperators {
        a_dag: OperatorMatrix::from_parts(basis, a.adjoint(), false),
        b_dag: OperatorMatrix::from_parts(basis, b.adjoint(), false),
        a: OperatorMatrix::from_parts(basis, a, false),
        b: OperatorMatrix::from_parts(basis, b, false),
    }
}

/// The four Stokes operators Ŝ0..Ŝ3.
#[derive(Debug, Clone)]
pub struct StokesOperators {
    pub s0: OperatorMatrix,
    pub s1: OperatorMatrix,
    pub s2: OperatorMatrix,
    pub s3: OperatorMatrix,
}

impl StokesOperators {
    pub fn new(basis: TwoModeBasis) -> Self {
        stokes_operators(basis)
    }

    /// (Ŝ1, Ŝ2, Ŝ3)
    pub fn vector(&self) -> [&OperatorMatrix; 3] {
        [&self.s1, &self.s2, &self.s3]
    }

    pub fn basis(&self) -> TwoModeBasis {
        self.s0.basis
    }
}

/// Builds the Stokes operators elementwise. They never leave an N block, so
/// they are exact on the truncated space.
pub fn stokes_operators(basis: TwoModeBasis) -> StokesOperators {
    let dim = basis.dim();
    let mut s0 = DMatrix::<C64>::zeros(dim, dim);
    let mut s1 = DMatrix::<C64>::zeros(dim, dim);
    // a†b, moves one photon from b to a
    let mut raise = DMatrix::<C64>::zeros(dim, dim);
    for (col, (m, n)) in basis.labels().enumerate() {
        s0[(col, col)] = C64::new((m + n) as f64, 0.0);
        s1[(col, col)] = C64::new(m as f64 - n as f64, 0.0);
        if n > 0 {
            let row = basis.index(m + 1, n - 1).expect("same block");
            raise[(row, col)] = C64::new(((m + 1) as f64 * n as f64).sqrt(), 0.0);
        }
    }
    let lower = raise.adjoint();
    let s2 = &raise + &lower;
    let s3 = (&raise - &lower) * C64::new(0.0, -1.0);
    StokesOperators {
        s0: OperatorMatrix::from_parts(basis, s0, true),
        s1: OperatorMatrix::from_parts(basis, s1, true),
        s2: OperatorMatrix::from_parts(basis, s2, true),
        s3: OperatorMatrix::from_parts(basis, s3, true),
    }
}

/// Normalized pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    basis: TwoModeBasis,
    amplitudes: DVector<C64>,
}

impl PureState {
    /// Normalizes `amplitudes`; fails on a zero vector or wrong length.
    pub fn new(basis: TwoModeBasis, amplitudes: DVector<C64>) -> Result<Self> {
        if amplitudes.len() != basis.dim() {
            return Err(Error::DimensionMismatch { expected: basis.dim(), got: amplitudes.len() });
        }
        let norm = amplitudes.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::ZeroState);
        }
        Ok(Self { basis, amplitudes: amplitudes.unscale(norm) })
    }

    /// Builds a state from (m, n, amplitude) triples.
    pub fn from_components(
        basis: TwoModeBasis,
        components: impl IntoIterator<Item = (usize, usize, C64)>,
    ) -> Result<Self> {
        let mut amps = DVector::zeros(basis.dim());
        for (m, n, c) in components {
            amps[basis.index(m, n)?] += c;
        }
        Self::new(basis, amps)
    }

    /// Fock ket |m, n⟩.
    pub fn fock(basis: TwoModeBasis, m: usize, n: usize) -> Result<Self> {
        Self::from_components(basis, [(m, n, C64::new(1.0, 0.0))])
    }

    pub fn vacuum(basis: TwoModeBasis) -> Self {
        Self::fock(basis, 0, 0).expect("vacuum is always in the basis")
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, m: usize, n: usize) -> Result<C64> {
        Ok(self.amplitudes[self.basis.index(m, n)?])
    }

    pub fn inner(&self, other: &PureState) -> Result<C64> {
        self.basis.check_same(&other.basis)?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// |⟨self|other⟩|, insensitive to global phase.
    pub fn fidelity(&self, other: &PureState) -> Result<f64> {
        Ok(self.inner(other)?.norm())
    }

    /// Weight of the N-photon block.
    pub fn block_population(&self, n_total: usize) -> Result<f64> {
        let r = self.basis.block(n_total)?;
        Ok(self.amplitudes.rows(r.start, r.len()).norm_squared())
    }

    pub fn block_amplitudes(&self, n_total: usize) -> Result<DVector<C64>> {
        let r = self.basis.block(n_total)?;
        Ok(self.amplitudes.rows(r.start, r.len()).into_owned())
    }

    /// Photon numbers whose block population exceeds `tol`.
    pub fn support(&self, tol: f64) -> Vec<usize> {
        (0..=self.basis.nmax)
            .filter(|&n| self.block_population(n).unwrap_or(0.0) > tol)
            .collect()
    }

    /// Normalized projection onto one N block.
    pub fn project_block(&self, n_total: usize) -> Result<PureState> {
        let r = self.basis.block(n_total)?;
        let mut amps = DVector::zeros(self.basis.dim());
        amps.rows_mut(r.start, r.len()).copy_from(&self.amplitudes.rows(r.start, r.len()));
        PureState::new(self.basis, amps)
    }

    pub fn projector(&self) -> DensityMatrix {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        DensityMatrix { basis: self.basis, matrix: m }
    }
}

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    basis: TwoModeBasis,
    matrix: DMatrix<C64>,
}

impl DensityMatrix {
    /// Checks the density-matrix invariants with default tolerances.
    pub fn new(basis: TwoModeBasis, matrix: DMatrix<C64>) -> Result<Self> {
        Self::with_tolerances(basis, matrix, &Tolerances::default())
    }

    pub fn with_tolerances(basis: TwoModeBasis, matrix: DMatrix<C64>, tol: &Tolerances) -> Result<Self> {
        let dim = basis.dim();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: matrix.nrows() });
        }
        let report = validate_matrix(&matrix);
        if let Some(problem) = report.problem(tol) {
            return Err(Error::InvalidState(problem));
        }
        // drop the anti-Hermitian residue
        let matrix = (&matrix + matrix.adjoint()).scale(0.5);
        Ok(Self { basis, matrix })
    }

    /// Convex mixture Σ w_i |ψ_i⟩⟨ψ_i|; weights are normalized.
    pub fn mixture(states: &[(f64, PureState)]) -> Result<Self> {
        let first = states.first().ok_or(Error::ZeroState)?;
        let basis = first.1.basis;
        let total: f64 = states.iter().map(|(w, _)| *w).sum();
        if !(total > 0.0) || states.iter().any(|(w, _)| *w < 0.0) {
            return Err(Error::InvalidState("mixture weights must be non-negative".into()));
        }
        let mut m = DMatrix::zeros(basis.dim(), basis.dim());
        for (w, psi) in states {
            basis.check_same(&psi.basis)?;
            m += psi.projector().matrix.scale(*w / total);
        }
        Ok(Self { basis, matrix: m })
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        linalg::min_eigenvalue(&self.matrix)
    }

    pub fn block_population(&self, n_total: usize) -> Result<f64> {
        let r = self.basis.block(n_total)?;
        Ok(r.map(|i| self.matrix[(i, i)].re).sum())
    }

    pub fn support(&self, tol: f64) -> Vec<usize> {
        (0..=self.basis.nmax)
            .filter(|&n| self.block_population(n).unwrap_or(0.0) > tol)
            .collect()
    }

    /// Trace distance ½‖ρ − σ‖₁.
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        self.basis.check_same(&other.basis)?;
        Ok(linalg::trace_distance(&self.matrix, &other.matrix))
    }

    pub(crate) fn from_trusted(basis: TwoModeBasis, matrix: DMatrix<C64>) -> Self {
        Self { basis, matrix }
    }
}

/// Either kind of state, as read from a file.
#[derive(Debug, Clone, PartialEq)]
pub enum State {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl From<PureState> for State {
    fn from(s: PureState) -> Self {
        State::Pure(s)
    }
}

impl From<DensityMatrix> for State {
    fn from(s: DensityMatrix) -> Self {
        State::Mixed(s)
    }
}

/// Common read-only interface of pure and mixed states.
pub trait QuantumState {
    fn basis(&self) -> TwoModeBasis;

    /// ⟨op⟩, complex in general.
    fn expectation(&self, op: &OperatorMatrix) -> Result<C64>;

    fn to_density(&self) -> DensityMatrix;

    fn is_pure(&self) -> bool;

    /// Real part of ⟨op⟩ for Hermitian operators.
    ///
    /// The discarded imaginary part is below 1e-10 for valid states.
    fn expectation_real(&self, op: &OperatorMatrix) -> Result<f64> {
        Ok(self.expectation(op)?.re)
    }
}

impl QuantumState for PureState {
    fn basis(&self) -> TwoModeBasis {
        self.basis
    }

    fn expectation(&self, op: &OperatorMatrix) -> Result<C64> {
        self.basis.check_same(&op.basis)?;
        Ok(self.amplitudes.dotc(&(&op.matrix * &self.amplitudes)))
    }

    fn to_density(&self) -> DensityMatrix {
        self.projector()
    }

    fn is_pure(&self) -> bool {
        true
    }
}

impl QuantumState for DensityMatrix {
    fn basis(&self) -> TwoModeBasis {
        self.basis
    }

    fn expectation(&self, op: &OperatorMatrix) -> Result<C64> {
        self.basis.check_same(&op.basis)?;
        // Tr(op ρ) without forming the product
        let n = self.basis.dim();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            for k in 0..n {
                acc += op.matrix[(i, k)] * self.matrix[(k, i)];
            }
        }
        Ok(acc)
    }

    fn to_density(&self) -> DensityMatrix {
        self.clone()
    }

    fn is_pure(&self) -> bool {
        false
    }
}

impl QuantumState for State {
    fn basis(&self) -> TwoModeBasis {
        match self {
            State::Pure(s) => s.basis(),
            State::Mixed(s) => s.basis(),
        }
    }

    fn expectation(&self, op: &OperatorMatrix) -> Result<C64> {
        match self {
            State::Pure(s) => s.expectation(op),
            State::Mixed(s) => s.expectation(op),
        }
    }

    fn to_density(&self) -> DensityMatrix {
        match self {
            State::Pure(s) => s.to_density(),
            State::Mixed(s) => s.clone(),
        }
    }

    fn is_pure(&self) -> bool {
        matches!(self, State::Pure(_))
    }
}

/// Residuals of each state invariant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidationReport {
    pub norm_residual: f64,
    pub hermiticity_residual: f64,
    pub trace_residual: f64,
    pub min_eigenvalue: f64,
    pub purity: f64,
}

impl ValidationReport {
    /// First violated invariant, if any.
    pub fn problem(&self, tol: &Tolerances) -> Option<String> {
        if self.norm_residual > tol.norm {
            return Some(format!("norm residual {:e} exceeds {:e}", self.norm_residual, tol.norm));
        }
        if self.hermiticity_residual > tol.hermiticity {
            return Some(format!(
                "hermiticity residual {:e} exceeds {:e}",
                self.hermiticity_residual, tol.hermiticity
            ));
        }
        if self.trace_residual > tol.trace {
            return Some(format!("trace residual {:e} exceeds {:e}", self.trace_residual, tol.trace));
        }
        if self.min_eigenvalue < -tol.positivity {
            return Some(format!("minimum eigenvalue {:e} below {:e}", self.min_eigenvalue, -tol.positivity));
        }
        None
    }

    pub fn is_valid(&self, tol: &Tolerances) -> bool {
        self.problem(tol).is_none()
    }
}

/// Residuals for a raw state vector (norm only; other entries are trivially satisfied).
pub fn validate_vector(amplitudes: &DVector<C64>) -> ValidationReport {
    let norm = amplitudes.norm();
    ValidationReport {
        norm_residual: (norm - 1.0).abs(),
        hermiticity_residual: 0.0,
        trace_residual: (norm * norm - 1.0).abs(),
        min_eigenvalue: 0.0,
        purity: norm.powi(4),
    }
}

/// Residuals for a raw candidate density matrix.
pub fn validate_matrix(matrix: &DMatrix<C64>) -> ValidationReport {
    let herm = linalg::hermiticity_residual(matrix);
    let tr = linalg::trace(matrix);
    let trace_residual = (tr - C64::new(1.0, 0.0)).norm();
    ValidationReport {
        norm_residual: 0.0,
        hermiticity_residual: herm,
        trace_residual,
        min_eigenvalue: linalg::min_eigenvalue(matrix),
        purity: (matrix * matrix).trace().re,
    }
}

pub fn validate(state: &State) -> ValidationReport {
    match state {
        State::Pure(s) => validate_vector(&s.amplitudes),
        State::Mixed(s) => validate_matrix(&s.matrix),
    }
}
