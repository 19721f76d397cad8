//! ρ = (1 − p) ρ_A + p ρ_B with ρ_B perfectly polarized along S⃗ and S⃗_A = 0.
//!
//! ρ_B is fixed by the strategy and ρ_A follows by linearity. Whether ρ_A
//! is positive is reported, not enforced.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{DensityMatrix, QuantumState, TwoModeBasis};
use crate::linalg;
use crate::su2::{self, polarized_pure_state, PolarizedPureSpec};
use crate::C64;

use super::{stokes_vector, Direction, StokesVector};

/// p within this distance of 0 or 1 gives a one-sided result.
pub const TRIVIAL_P_MARGIN: f64 = 1e-10;

/// Tolerance for the fixed-N consistency check |N − S0|.
pub const FIXED_N_TOLERANCE: f64 = 1e-9;

/// Positivity threshold for declaring ρ_A physical.
pub const POSITIVITY_TOLERANCE: f64 = 1e-10;

/// How the polarized part ρ_B is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "name", content = "n")]
pub enum Strategy {
    /// SU(2) coherent state with exactly N photons; needs S0 = N.
    FixedN(usize),
    /// Mixture of the SU(2) coherent states at ⌊S0⌋ and ⌈S0⌉.
    #[default]
    Bracketed,
    /// Truncated two-mode Glauber coherent state with mean photon number S0.
    Glauber,
}

impl Strategy {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::FixedN(_) => "fixed-n",
            Strategy::Bracketed => "bracketed",
            Strategy::Glauber => "glauber",
        }
    }
}

/// Result of [`decompose`].
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionResult {
    pub basis: TwoModeBasis,
    pub strategy: Strategy,
    pub stokes: StokesVector,
    pub p: f64,
    /// Direction of S⃗; `None` when p = 0.
    pub direction: Option<Direction>,
    /// ρ_B; `None` when p = 0.
    pub polarized: Option<DensityMatrix>,
    /// ρ_A, Hermitian with unit trace but not necessarily positive; `None` when p = 1.
    pub unpolarized: Option<DMatrix<C64>>,
    pub min_eigenvalue_unpolarized: Option<f64>,
    pub physical: bool,
    /// Stokes 3-vector of ρ_A.
    pub unpolarized_vector: Option<[f64; 3]>,
    /// ‖(1 − p)ρ_A + pρ_B − ρ‖ (Frobenius).
    pub reconstruction_residual: f64,
}

/// Splits `rho` into polarized and unpolarized parts.
pub fn decompose(rho: &DensityMatrix, strategy: Strategy) -> Result<DecompositionResult> {
    let basis = rho.basis();
    let stokes = stokes_vector(rho)?;
    let p = stokes
        .degree()
        .ok_or_else(|| Error::UndefinedPolarization("the vacuum has no degree of polarization".into()))?;
    let mut out = DecompositionResult {
        basis,
        strategy,
        stokes,
        p,
        direction: stokes.direction(),
        polarized: None,
        unpolarized: None,
        min_eigenvalue_unpolarized: None,
        physical: true,
        unpolarized_vector: None,
        reconstruction_residual: 0.0,
    };
    if p <= TRIVIAL_P_MARGIN {
        out.p = 0.0;
        out.direction = None;
        out.min_eigenvalue_unpolarized = Some(rho.min_eigenvalue());
        out.unpolarized = Some(rho.matrix().clone());
        out.unpolarized_vector = Some(stokes.vector);
        return Ok(out);
    }
    if (p - 1.0).abs() <= TRIVIAL_P_MARGIN {
        out.p = 1.0;
        out.polarized = Some(rho.clone());
        return Ok(out);
    }
    let dir = out.direction.expect("p > 0 implies a direction");
    let polarized = polarized_part(basis, stokes.s0, dir, strategy)?;
    let unpolarized = (rho.matrix() - polarized.matrix() * C64::new(p, 0.0)) / C64::new(1.0 - p, 0.0);
    let unpolarized = (&unpolarized + unpolarized.adjoint()) * C64::new(0.5, 0.0);
    let min_eig = linalg::min_eigenvalue(&unpolarized);
    let a_state = DensityMatrix::from_trusted(basis, unpolarized.clone());
    let a_stokes = stokes_vector(&a_state)?;
    let rebuilt = &unpolarized * C64::new(1.0 - p, 0.0) + polarized.matrix() * C64::new(p, 0.0);
    out.reconstruction_residual = (rebuilt - rho.matrix()).norm();
    out.min_eigenvalue_unpolarized = Some(min_eig);
    out.physical = min_eig >= -POSITIVITY_TOLERANCE;
    out.unpolarized_vector = Some(a_stokes.vector);
    out.unpolarized = Some(unpolarized);
    out.polarized = Some(polarized);
    Ok(out)
}

/// ρ_B for the given strategy: perfectly polarized along `dir` with mean photon number `s0`.
pub fn polarized_part(basis: TwoModeBasis, s0: f64, dir: Direction, strategy: Strategy) -> Result<DensityMatrix> {
    let coherent = |n: usize| su2::su2_coherent(n, dir.theta, dir.phi, basis);
    match strategy {
        Strategy::FixedN(n) => {
            if (n as f64 - s0).abs() > FIXED_N_TOLERANCE {
                return Err(Error::InconsistentStrategy(format!(
                    "fixed photon number {n} differs from the mean photon number {s0}"
                )));
            }
            Ok(coherent(n)?.projector())
        }
        Strategy::Bracketed => {
            let nearest = s0.round();
            if (s0 - nearest).abs() <= FIXED_N_TOLERANCE {
                return Ok(coherent(nearest as usize)?.projector());
            }
            let lo = s0.floor() as usize;
            let hi = lo + 1;
            let w = hi as f64 - s0;
            DensityMatrix::mixture(&[(w, coherent(lo)?), (1.0 - w, coherent(hi)?)])
        }
        Strategy::Glauber => {
            let r = glauber_amplitude(s0, basis.nmax())?;
            let spec = PolarizedPureSpec::glauber(r, 0.0, dir.theta, dir.phi, basis.nmax());
            Ok(polarized_pure_state(&spec, basis)?.projector())
        }
    }
}

fn truncated_mean(ln_r2: f64, nmax: usize) -> f64 {
    // Poisson weights r^{2N}/N! restricted to N ≤ nmax
    let logs: Vec<f64> = (0..=nmax).map(|n| n as f64 * ln_r2 - linalg::ln_factorial(n)).collect();
    let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let (mut num, mut den) = (0.0, 0.0);
    for (n, l) in logs.iter().enumerate() {
        let w = (l - top).exp();
        num += n as f64 * w;
        den += w;
    }
    num / den
}

/// r such that the truncated Glauber state has mean photon number `s0`.
pub fn glauber_amplitude(s0: f64, nmax: usize) -> Result<f64> {
    if !(s0 > 0.0) || s0 >= nmax as f64 {
        return Err(Error::Numerical(format!(
            "mean photon number {s0} not reachable by a Glauber state truncated at {nmax}"
        )));
    }
    let (mut lo, mut hi) = (-60.0f64, 60.0f64);
    if truncated_mean(lo, nmax) > s0 || truncated_mean(hi, nmax) < s0 {
        return Err(Error::Numerical(format!("cannot bracket Glauber amplitude for S0 = {s0}")));
    }
    // bisect to the end of floating-point resolution
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if truncated_mean(mid, nmax) < s0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let ln_r2 = 0.5 * (lo + hi);
    let err = (truncated_mean(ln_r2, nmax) - s0).abs();
    if err > 1e-10 {
        return Err(Error::Numerical(format!("Glauber mean photon number off by {err:e}")));
    }
    Ok((0.5 * ln_r2).exp())
}
