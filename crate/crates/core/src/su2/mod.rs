//! SU(2) coherent states and polarization rotations.
//!
//! A [`Rotation`] R(θ, φ) maps the S1 axis onto
//! n̂(θ, φ) = (cos θ, sin θ cos φ, sin θ sin φ) in (S1, S2, S3) coordinates and
//! sends |N,0⟩ to the SU(2) coherent state |θφ⁽ᴺ⁾⟩.
//!
//! Two independent Fock-space constructions are provided:
//! [`rotation_fock_exp`] exponentiates the Hermitian generator blockwise, and
//! [`rotation_fock_gauss`] multiplies the three Gauss factors
//! exp(a Ŝ−) exp(b Ŝ1) exp(c Ŝ+) exactly.

mod gauss;

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector, Matrix2, Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{
    DensityMatrix, OperatorMatrix, PureState, QuantumState, State, StokesOperators, TwoModeBasis,
};
use crate::linalg;
use crate::C64;

pub use gauss::GAUSS_SINGULAR_MARGIN;

/// Unit vector n̂(θ, φ) in (S1, S2, S3) order.
pub fn unit_vector(theta: f64, phi: f64) -> Vector3<f64> {
    Vector3::new(theta.cos(), theta.sin() * phi.cos(), theta.sin() * phi.sin())
}

/// Polar angles (θ, φ) of a non-zero vector, φ in [0, 2π).
///
/// At the poles φ is reported as 0.
pub fn angles_of(v: &Vector3<f64>) -> (f64, f64) {
    let r = v.norm();
    let theta = (v[0] / r).clamp(-1.0, 1.0).acos();
    let phi = if v[1] == 0.0 && v[2] == 0.0 { 0.0 } else { wrap_phi(v[2].atan2(v[1])) };
    (theta, phi)
}

pub(crate) fn wrap_phi(phi: f64) -> f64 {
    let w = phi.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Rotation R(θ, φ) of the Poincaré sphere, optionally followed by a phase
/// rotation χ about the target axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rotation {
    theta: f64,
    phi: f64,
    #[serde(default)]
    chi: f64,
}

impl Rotation {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() || !(-1e-12..=PI + 1e-12).contains(&theta) {
            return Err(Error::InvalidState(format!("rotation angle theta={theta} outside [0, pi]")));
        }
        Ok(Self { theta: theta.clamp(0.0, PI), phi: wrap_phi(phi), chi: 0.0 })
    }

    pub fn identity() -> Self {
        Self { theta: 0.0, phi: 0.0, chi: 0.0 }
    }

    /// Rotation taking the S1 axis onto `direction`.
    pub fn aligning(direction: &Vector3<f64>) -> Result<Self> {
        if !(direction.norm() > 0.0) {
            return Err(Error::UndefinedPolarization("zero direction vector".into()));
        }
        let (theta, phi) = angles_of(direction);
        Self::new(theta, phi)
    }

    /// Adds a third Euler angle. Multiplies SU(2) coherent states by a phase only.
    pub fn with_phase(mut self, chi: f64) -> Self {
        self.chi = chi;
        self
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn chi(&self) -> f64 {
        self.chi
    }

    /// Mode-space unitary acting on (â†, b̂†):
    /// ((cos θ/2, −e^{−iφ} sin θ/2), (e^{iφ} sin θ/2, cos θ/2)) · diag(e^{iχ/2}, e^{−iχ/2}).
    pub fn unitary(&self) -> Matrix2<C64> {
        let (s, c) = (self.theta / 2.0).sin_cos();
        let e = C64::from_polar(1.0, self.phi);
        let base = Matrix2::new(
            C64::new(c, 0.0),
            -e.conj() * s,
            e * s,
            C64::new(c, 0.0),
        );
        let p = C64::from_polar(1.0, self.chi / 2.0);
        base * Matrix2::new(p, C64::new(0.0, 0.0), C64::new(0.0, 0.0), p.conj())
    }

    /// SO(3) image acting on Stokes 3-vectors: S(RψR†) = M S(ψ).
    pub fn so3(&self) -> Matrix3<f64> {
        let u = self.unitary();
        let sigma = pauli();
        Matrix3::from_fn(|j, k| {
            let t = sigma[k] * u.adjoint() * sigma[j] * u;
            0.5 * t.trace().re
        })
    }

    pub fn inverse_so3(&self) -> Matrix3<f64> {
        self.so3().transpose()
    }
}

/// σ matrices matching (Ŝ1, Ŝ2, Ŝ3) in the (â, b̂) mode basis.
fn pauli() -> [Matrix2<C64>; 3] {
    let o = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    [
        Matrix2::new(one, o, o, -one),
        Matrix2::new(o, one, one, o),
        Matrix2::new(o, -i, i, o),
    ]
}

/// N-block coefficients c_m of |θφ⁽ᴺ⁾⟩ for m = 0..=N.
pub fn su2_coefficients(n_photons: usize, theta: f64, phi: f64) -> Vec<C64> {
    let (s, c) = (theta / 2.0).sin_cos();
    (0..=n_photons)
        .map(|m| {
            let k = n_photons - m;
            let mag = linalg::binomial(n_photons, m).sqrt() * c.powi(m as i32) * s.powi(k as i32);
            C64::from_polar(mag, phi * k as f64)
        })
        .collect()
}

/// SU(2) coherent state |θφ⁽ᴺ⁾⟩ with all N photons in the rotated mode.
pub fn su2_coherent(n_photons: usize, theta: f64, phi: f64, basis: TwoModeBasis) -> Result<PureState> {
    let range = basis.block(n_photons)?;
    let mut amps = DVector::zeros(basis.dim());
    for (m, c) in su2_coefficients(n_photons, theta, phi).into_iter().enumerate() {
        amps[range.start + m] = c;
    }
    PureState::new(basis, amps)
}

fn chi_phase(rot: &Rotation, block: &mut DMatrix<C64>, n_total: usize) {
    if rot.chi == 0.0 {
        return;
    }
    // right-multiply by exp(iχŜ1/2), diagonal with Ŝ1 = m − n
    for m in 0..=n_total {
        let s1 = m as f64 * 2.0 - n_total as f64;
        let ph = C64::from_polar(1.0, rot.chi * s1 / 2.0);
        for row in 0..=n_total {
            block[(row, m)] *= ph;
        }
    }
}

/// R(θ, φ) = exp[i(θ/2)(Ŝ2 sin φ − Ŝ3 cos φ)], exponentiated exactly per block.
pub fn rotation_fock_exp(rot: &Rotation, basis: TwoModeBasis) -> OperatorMatrix {
    let stokes = StokesOperators::new(basis);
    let dim = basis.dim();
    let mut out = DMatrix::<C64>::zeros(dim, dim);
    let (sp, cp) = rot.phi.sin_cos();
    for n_total in 0..=basis.nmax() {
        let r = basis.block(n_total).expect("in range");
        let s2 = stokes.s2.block(n_total).expect("in range");
        let s3 = stokes.s3.block(n_total).expect("in range");
        let h = (s2.scale(sp) - s3.scale(cp)).scale(rot.theta / 2.0);
        let mut blk = linalg::exp_i_hermitian(&h);
        chi_phase(rot, &mut blk, n_total);
        out.view_mut((r.start, r.start), (r.len(), r.len())).copy_from(&blk);
    }
    OperatorMatrix::from_parts(basis, out, false)
}

/// Gauss-factorised rotation exp(e^{iφ} tan(θ/2) Ŝ−) exp(ln cos(θ/2) Ŝ1) exp(−e^{−iφ} tan(θ/2) Ŝ+),
/// with Ŝ± = (Ŝ2 ± iŜ3)/2.
///
/// Each block product is summed in exact binary arithmetic because the
/// factors grow like tan(θ/2)^N and cancel almost completely near θ = π.
/// Fails within [`GAUSS_SINGULAR_MARGIN`] of θ = π.
pub fn rotation_fock_gauss(rot: &Rotation, basis: TwoModeBasis) -> Result<OperatorMatrix> {
    if rot.theta > PI - GAUSS_SINGULAR_MARGIN {
        return Err(Error::SingularDecomposition { theta: rot.theta, margin: GAUSS_SINGULAR_MARGIN });
    }
    let dim = basis.dim();
    let mut out = DMatrix::<C64>::zeros(dim, dim);
    let factors = gauss::GaussFactors::new(rot.theta, rot.phi);
    for n_total in 0..=basis.nmax() {
        let r = basis.block(n_total)?;
        let mut blk = factors.block(n_total);
        chi_phase(rot, &mut blk, n_total);
        out.view_mut((r.start, r.start), (r.len(), r.len())).copy_from(&blk);
    }
    Ok(OperatorMatrix::from_parts(basis, out, false))
}

/// A rotation materialised on a particular basis, reusable across states.
#[derive(Debug, Clone)]
pub struct RotationOperator {
    rotation: Rotation,
    matrix: OperatorMatrix,
}

impl RotationOperator {
    pub fn new(rotation: Rotation, basis: TwoModeBasis) -> Self {
        Self { rotation, matrix: rotation_fock_exp(&rotation, basis) }
    }

    pub fn rotation(&self) -> Rotation {
        self.rotation
    }

    pub fn matrix(&self) -> &OperatorMatrix {
        &self.matrix
    }

    pub fn apply_pure(&self, psi: &PureState) -> Result<PureState> {
        check_basis(self.matrix.basis(), psi.basis())?;
        PureState::new(psi.basis(), self.matrix.apply(psi.amplitudes()))
    }

    /// R†ψ
    pub fn apply_inverse_pure(&self, psi: &PureState) -> Result<PureState> {
        check_basis(self.matrix.basis(), psi.basis())?;
        PureState::new(psi.basis(), self.matrix.matrix().adjoint() * psi.amplitudes())
    }

    pub fn apply_density(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let basis = rho.basis();
        check_basis(self.matrix.basis(), basis)?;
        let r = self.matrix.matrix();
        Ok(DensityMatrix::from_trusted(basis, r * rho.matrix() * r.adjoint()))
    }

    /// R†ρR
    pub fn apply_inverse_density(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let basis = rho.basis();
        check_basis(self.matrix.basis(), basis)?;
        let r = self.matrix.matrix();
        Ok(DensityMatrix::from_trusted(basis, r.adjoint() * rho.matrix() * r))
    }

    pub fn apply(&self, state: &State) -> Result<State> {
        Ok(match state {
            State::Pure(s) => State::Pure(self.apply_pure(s)?),
            State::Mixed(s) => State::Mixed(self.apply_density(s)?),
        })
    }

    pub fn apply_inverse(&self, state: &State) -> Result<State> {
        Ok(match state {
            State::Pure(s) => State::Pure(self.apply_inverse_pure(s)?),
            State::Mixed(s) => State::Mixed(self.apply_inverse_density(s)?),
        })
    }
}

fn check_basis(a: TwoModeBasis, b: TwoModeBasis) -> Result<()> {
    if a != b {
        return Err(Error::BasisMismatch { left: a.nmax(), right: b.nmax() });
    }
    Ok(())
}

/// Applies R(θ, φ) to a pure or mixed state.
pub fn apply_rotation(rot: &Rotation, state: &State) -> Result<State> {
    let basis = state.basis();
    RotationOperator::new(*rot, basis).apply(state)
}

/// One (N, q_N, φ_N) term of a perfectly polarized pure state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarizedWeight {
    pub n: usize,
    pub q: f64,
    #[serde(default)]
    pub varphi: f64,
}

/// Σ_N e^{iφ_N} √q_N |θφ⁽ᴺ⁾⟩: SU(2) coherent states of different photon
/// numbers sharing one direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarizedPureSpec {
    pub theta: f64,
    pub phi: f64,
    pub weights: Vec<PolarizedWeight>,
}

impl PolarizedPureSpec {
    /// Two-mode Glauber coherent state truncated at `nmax` and renormalized:
    /// q_N ∝ r^{2N}/N!, φ_N = δN.
    pub fn glauber(r: f64, delta: f64, theta: f64, phi: f64, nmax: usize) -> Self {
        let log_w: Vec<f64> = (0..=nmax)
            .map(|n| {
                if r == 0.0 {
                    if n == 0 { 0.0 } else { f64::NEG_INFINITY }
                } else {
                    2.0 * n as f64 * r.ln() - linalg::ln_factorial(n)
                }
            })
            .collect();
        let top = log_w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let raw: Vec<f64> = log_w.iter().map(|l| (l - top).exp()).collect();
        let total: f64 = raw.iter().sum();
        let weights = raw
            .iter()
            .enumerate()
            .map(|(n, w)| PolarizedWeight { n, q: w / total, varphi: delta * n as f64 })
            .collect();
        Self { theta, phi, weights }
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().map(|w| w.q).sum()
    }
}

/// Builds the perfectly polarized pure state described by `spec`.
pub fn polarized_pure_state(spec: &PolarizedPureSpec, basis: TwoModeBasis) -> Result<PureState> {
    let sum = spec.total_weight();
    if (sum - 1.0).abs() > 1e-12 || spec.weights.iter().any(|w| !(w.q >= 0.0)) {
        return Err(Error::WeightsNotNormalized { sum });
    }
    let mut amps = DVector::<C64>::zeros(basis.dim());
    for w in &spec.weights {
        let r = basis.block(w.n)?;
        let amp = C64::from_polar(w.q.sqrt(), w.varphi);
        for (m, c) in su2_coefficients(w.n, spec.theta, spec.phi).into_iter().enumerate() {
            amps[r.start + m] += amp * c;
        }
    }
    PureState::new(basis, amps)
}
