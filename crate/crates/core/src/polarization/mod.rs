//! Stokes vectors, degree of polarization and perfectly polarized states.
//!
//! Submodules cover the classical reference formulas ([`classical`]), the
//! split of a mixed state into polarized and unpolarized parts
//! ([`decompose`]) and the pure-state decomposition analysis
//! ([`feasibility`]).

pub mod classical;
pub mod decompose;
pub mod feasibility;

use nalgebra::{DMatrix, DVector, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{
    DensityMatrix, PureState, QuantumState, State, StokesOperators, TwoModeBasis,
};
use crate::linalg;
use crate::su2::{self, Rotation, RotationOperator};
use crate::C64;

pub use classical::{classical_decompose, classical_stokes};
pub use decompose::{decompose, DecompositionResult, Strategy};
pub use feasibility::{pure_decomposition_feasibility, FeasibilityReport, FeasibilityVerdict};

/// Mean photon numbers below this have no polarization direction.
pub const VACUUM_THRESHOLD: f64 = 1e-12;

/// (S0; S1, S2, S3).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StokesVector {
    pub s0: f64,
    pub vector: [f64; 3],
}

impl StokesVector {
    pub fn new(s0: f64, vector: [f64; 3]) -> Self {
        Self { s0, vector }
    }

    pub fn vec3(&self) -> Vector3<f64> {
        Vector3::from(self.vector)
    }

    /// |S⃗|
    pub fn magnitude(&self) -> f64 {
        self.vec3().norm()
    }

    /// |S⃗|/S0, or `None` when S0 vanishes.
    pub fn degree(&self) -> Option<f64> {
        if self.s0 <= VACUUM_THRESHOLD {
            None
        } else {
            Some(self.magnitude() / self.s0)
        }
    }

    /// Polar angles of S⃗/|S⃗|, if S⃗ ≠ 0.
    pub fn direction(&self) -> Option<Direction> {
        let v = self.vec3();
        if v.norm() <= VACUUM_THRESHOLD {
            return None;
        }
        let (theta, phi) = su2::angles_of(&v);
        Some(Direction { theta, phi })
    }
}

/// A point (θ, φ) on the Poincaré sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    pub theta: f64,
    pub phi: f64,
}

impl Direction {
    pub fn unit_vector(&self) -> Vector3<f64> {
        su2::unit_vector(self.theta, self.phi)
    }
}

/// ⟨Ŝμ⟩ for μ = 0..3.
pub fn stokes_vector<S: QuantumState + ?Sized>(state: &S) -> Result<StokesVector> {
    let ops = StokesOperators::new(state.basis());
    Ok(StokesVector {
        s0: state.expectation_real(&ops.s0)?,
        vector: [
            state.expectation_real(&ops.s1)?,
            state.expectation_real(&ops.s2)?,
            state.expectation_real(&ops.s3)?,
        ],
    })
}

/// p = |S⃗|/S0; `None` for the vacuum.
pub fn degree_of_polarization<S: QuantumState + ?Sized>(state: &S) -> Result<Option<f64>> {
    Ok(stokes_vector(state)?.degree())
}

/// Stokes 3-vector of one photon-number block, from its amplitudes c_m.
///
/// Uses ⟨â†b̂⟩ = Σ_m c*_{m+1} c_m √((m+1)(N−m)) directly rather than the
/// operator matrices, so it doubles as an independent check of them.
pub fn block_stokes(coeffs: &[C64]) -> [f64; 3] {
    let n = coeffs.len().saturating_sub(1);
    let mut s1 = 0.0;
    let mut raise = C64::new(0.0, 0.0);
    for (m, c) in coeffs.iter().enumerate() {
        s1 += c.norm_sqr() * (2.0 * m as f64 - n as f64);
        if m < n {
            raise += coeffs[m + 1].conj() * c * (((m + 1) * (n - m)) as f64).sqrt();
        }
    }
    [s1, 2.0 * raise.re, 2.0 * raise.im]
}

/// One block of [`SubspaceStokes`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockStokes {
    pub n: usize,
    /// Population q_N of the block.
    pub weight: f64,
    /// Stokes 3-vector of the normalized block state.
    pub vector: [f64; 3],
}

/// Per-block Stokes vectors of a pure state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubspaceStokes {
    pub blocks: Vec<BlockStokes>,
}

/// Splits a pure state into its photon-number blocks (empty blocks omitted).
pub fn per_subspace(psi: &PureState) -> SubspaceStokes {
    let basis = psi.basis();
    let blocks = (0..=basis.nmax())
        .filter_map(|n| {
            let amps = psi.block_amplitudes(n).ok()?;
            let weight = amps.norm_squared();
            if weight == 0.0 {
                return None;
            }
            let normalized: Vec<C64> = amps.iter().map(|z| z / weight.sqrt()).collect();
            Some(BlockStokes { n, weight, vector: block_stokes(&normalized) })
        })
        .collect();
    SubspaceStokes { blocks }
}

/// p = |Σ_N q_N S⃗⁽ᴺ⁾| / Σ_N q_N N; `None` when the denominator vanishes.
pub fn p_from_subspaces(s: &SubspaceStokes) -> Option<f64> {
    let mut total = Vector3::zeros();
    let mut s0 = 0.0;
    for b in &s.blocks {
        total += Vector3::from(b.vector) * b.weight;
        s0 += b.weight * b.n as f64;
    }
    if s0 <= VACUUM_THRESHOLD {
        None
    } else {
        Some(total.norm() / s0)
    }
}

fn check_sigma(sigma: &DMatrix<C64>) -> Result<()> {
    if sigma.nrows() != sigma.ncols() || sigma.nrows() == 0 {
        return Err(Error::InvalidMatrix("sigma must be square and non-empty".into()));
    }
    let herm = linalg::hermiticity_residual(sigma);
    if herm > 1e-12 {
        return Err(Error::InvalidMatrix(format!("sigma is not Hermitian (residual {herm:e})")));
    }
    let min = linalg::min_eigenvalue(sigma);
    if min < -1e-10 {
        return Err(Error::InvalidMatrix(format!("sigma is not positive semidefinite (eigenvalue {min:e})")));
    }
    Ok(())
}

/// ρ = Σ_{N,N'} σ_{N,N'} |θφ⁽ᴺ⁾⟩⟨θφ⁽ᴺ'⁾|, with σ indexed by `blocks`.
pub fn perfect_mixed_state(
    sigma: &DMatrix<C64>,
    blocks: &[usize],
    theta: f64,
    phi: f64,
    basis: TwoModeBasis,
) -> Result<DensityMatrix> {
    check_sigma(sigma)?;
    if sigma.nrows() != blocks.len() {
        return Err(Error::DimensionMismatch { expected: blocks.len(), got: sigma.nrows() });
    }
    for (i, n) in blocks.iter().enumerate() {
        if blocks[..i].contains(n) {
            return Err(Error::InvalidMatrix(format!("photon number {n} listed twice")));
        }
    }
    let tr = linalg::trace(sigma);
    if (tr - C64::new(1.0, 0.0)).norm() > 1e-12 {
        return Err(Error::InvalidMatrix(format!("sigma has trace {tr}, expected 1")));
    }
    let kets: Vec<DVector<C64>> = blocks
        .iter()
        .map(|&n| su2::su2_coherent(n, theta, phi, basis).map(|s| s.amplitudes().clone()))
        .collect::<Result<_>>()?;
    let mut rho = DMatrix::zeros(basis.dim(), basis.dim());
    for (i, ki) in kets.iter().enumerate() {
        for (j, kj) in kets.iter().enumerate() {
            rho += (ki * kj.adjoint()) * sigma[(i, j)];
        }
    }
    DensityMatrix::new(basis, rho)
}

/// Vectors λ⁽ⁱ⁾ with σ = Σ_i λ⁽ⁱ⁾ λ⁽ⁱ⁾†, one per non-zero eigenvalue.
pub fn ensemble_from_sigma(sigma: &DMatrix<C64>) -> Result<Vec<DVector<C64>>> {
    check_sigma(sigma)?;
    let (values, vectors) = linalg::hermitian_eigen(sigma);
    let scale = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    Ok(values
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, &v)| v > 1e-15 * scale.max(1.0))
        .map(|(i, &v)| vectors.column(i) * C64::new(v.sqrt(), 0.0))
        .collect())
}

/// Rows of the hierarchy of perfectly polarized states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TableRow {
    PureFixedN,
    PureIndeterminateN,
    MixedDiagonal,
    MixedGeneral,
    NotPerfect,
}

impl TableRow {
    pub fn as_str(&self) -> &'static str {
        match self {
            TableRow::PureFixedN => "pure-fixed-N",
            TableRow::PureIndeterminateN => "pure-indeterminate-N",
            TableRow::MixedDiagonal => "mixed-diagonal",
            TableRow::MixedGeneral => "mixed-general",
            TableRow::NotPerfect => "not-perfect",
        }
    }
}

/// Outcome of [`classify_perfect`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub stokes: StokesVector,
    /// `None` for the vacuum.
    pub p: Option<f64>,
    pub is_perfect: bool,
    pub aligned_direction: Option<Direction>,
    /// ⟨b̂†b̂⟩ after undoing the rotation that aligns S⃗ with the S1 axis.
    pub residual_b_occupation: Option<f64>,
    pub table_row: TableRow,
    pub purity: f64,
    /// Photon numbers with non-negligible population.
    pub photon_numbers: Vec<usize>,
}

/// Decides whether a state is perfectly polarized and which kind it is.
///
/// A state with |p − 1| ≤ `tol` is rotated so that S⃗ points along +S1; a
/// perfectly polarized state must then leave mode b̂ in the vacuum.
pub fn classify_perfect(state: &State, tol: f64) -> Result<ClassificationReport> {
    let stokes = stokes_vector(state)?;
    let p = stokes.degree();
    let rho = state.to_density();
    let purity = rho.purity();
    let photon_numbers = rho.support(1e-12);
    let not_perfect = |direction, residual| ClassificationReport {
        stokes,
        p,
        is_perfect: false,
        aligned_direction: direction,
        residual_b_occupation: residual,
        table_row: TableRow::NotPerfect,
        purity,
        photon_numbers: photon_numbers.clone(),
    };
    let direction = stokes.direction();
    let (Some(pv), Some(dir)) = (p, direction) else {
        return Ok(not_perfect(direction, None));
    };
    if (pv - 1.0).abs() > tol {
        return Ok(not_perfect(Some(dir), None));
    }
    let basis = state.basis();
    let rot = Rotation::new(dir.theta, dir.phi)?;
    let aligned = RotationOperator::new(rot, basis).apply_inverse_density(&rho)?;
    let b_occupation: f64 = basis
        .labels()
        .enumerate()
        .map(|(i, (_, n))| aligned.matrix()[(i, i)].re * n as f64)
        .sum();
    if b_occupation > tol * stokes.s0 {
        return Ok(not_perfect(Some(dir), Some(b_occupation)));
    }
    let is_pure = matches!(state, State::Pure(_)) || (purity - 1.0).abs() <= 1e-10;
    let table_row = if is_pure {
        if photon_numbers.len() == 1 {
            TableRow::PureFixedN
        } else {
            TableRow::PureIndeterminateN
        }
    } else {
        let m = aligned.matrix();
        let off_diagonal = (0..m.nrows())
            .flat_map(|i| (0..m.ncols()).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)].norm())
            .fold(0.0f64, f64::max);
        if off_diagonal <= tol {
            TableRow::MixedDiagonal
        } else {
            TableRow::MixedGeneral
        }
    };
    Ok(ClassificationReport {
        stokes,
        p,
        is_perfect: true,
        aligned_direction: Some(dir),
        residual_b_occupation: Some(b_occupation),
        table_row,
        purity,
        photon_numbers,
    })
}
