//! Stokes parameters of a classical field with complex amplitudes (α, β).

use crate::error::{Error, Result};
use crate::C64;

use super::StokesVector;

/// S0 = |α|²+|β|², S1 = |α|²−|β|², S2 + iS3 = 2α*β.
pub fn classical_stokes(alpha: C64, beta: C64) -> Result<StokesVector> {
    let (ia, ib) = (alpha.norm_sqr(), beta.norm_sqr());
    if ia + ib == 0.0 {
        return Err(Error::UndefinedPolarization("both field amplitudes vanish".into()));
    }
    let cross = alpha.conj() * beta * 2.0;
    Ok(StokesVector::new(ia + ib, [ia - ib, cross.re, cross.im]))
}

/// The unique split into a fully polarized and an unpolarized beam.
pub fn classical_decompose(s: &StokesVector) -> Result<(StokesVector, StokesVector)> {
    if !(s.s0 > 0.0) {
        return Err(Error::UndefinedPolarization("S0 must be positive".into()));
    }
    let mag = s.magnitude();
    Ok((
        StokesVector::new(mag, s.vector),
        StokesVector::new(s.s0 - mag, [0.0; 3]),
    ))
}
