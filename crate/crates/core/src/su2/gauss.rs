//! Exact evaluation of the Gauss-factorised rotation.
//!
//! In the unnormalised monomial basis |m,n⟫ = â†ᵐ b̂†ⁿ|vac⟩ the three factors
//! have integer structure:
//!
//! ```text
//! exp(c Ŝ+)|m,n⟫ = Σ_k C(n,k) cᵏ |m+k, n−k⟫
//! exp(b Ŝ1)|m,n⟫ = E^{m−n} |m,n⟫,          E = e^b = cos(θ/2)
//! exp(a Ŝ−)|m,n⟫ = Σ_j C(m,j) aʲ |m−j, n+j⟫
//! ```
//!
//! The inputs a, c, E are binary floating point numbers, hence exact dyadic
//! rationals, so the sum over intermediate states can be carried out without
//! rounding. Only the final conversion back to f64 rounds.

use std::ops::{Add, Mul};

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::linalg;
use crate::C64;

/// Distance from θ = π inside which tan(θ/2) is treated as singular.
pub const GAUSS_SINGULAR_MARGIN: f64 = 0.01;

/// mantissa · 2^exponent
#[derive(Debug, Clone, PartialEq)]
struct Dyadic {
    mantissa: BigInt,
    exponent: i64,
}

impl Dyadic {
    fn zero() -> Self {
        Self { mantissa: BigInt::zero(), exponent: 0 }
    }

    fn from_f64(x: f64) -> Self {
        assert!(x.is_finite(), "non-finite Gauss parameter");
        if x == 0.0 {
            return Self::zero();
        }
        let bits = x.to_bits();
        let negative = bits >> 63 == 1;
        let biased = ((bits >> 52) & 0x7ff) as i64;
        let fraction = bits & 0x000f_ffff_ffff_ffff;
        let (mant, exp) = if biased == 0 {
            (fraction, -1074)
        } else {
            (fraction | 0x0010_0000_0000_0000, biased - 1075)
        };
        let mantissa = if negative { -BigInt::from(mant) } else { BigInt::from(mant) };
        Self { mantissa, exponent: exp }
    }

    fn scale_int(&self, k: &BigInt) -> Self {
        Self { mantissa: &self.mantissa * k, exponent: self.exponent }
    }

    fn to_f64(&self) -> f64 {
        if self.mantissa.is_zero() {
            return 0.0;
        }
        let bits = self.mantissa.bits() as i64;
        let shift = (bits - 96).max(0);
        let top = (&self.mantissa >> shift as usize).to_i128().expect("fits in 96 bits");
        ldexp(top as f64, self.exponent + shift)
    }
}

fn ldexp(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e as i32)
}

impl Add for &Dyadic {
    type Output = Dyadic;

    fn add(self, rhs: &Dyadic) -> Dyadic {
        if self.mantissa.is_zero() {
            return rhs.clone();
        }
        if rhs.mantissa.is_zero() {
            return self.clone();
        }
        let e = self.exponent.min(rhs.exponent);
        let a = &self.mantissa << (self.exponent - e) as usize;
        let b = &rhs.mantissa << (rhs.exponent - e) as usize;
        Dyadic { mantissa: a + b, exponent: e }
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;

    fn mul(self, rhs: &Dyadic) -> Dyadic {
        Dyadic { mantissa: &self.mantissa * &rhs.mantissa, exponent: self.exponent + rhs.exponent }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct ExactComplex {
    re: Dyadic,
    im: Dyadic,
}

impl ExactComplex {
    fn zero() -> Self {
        Self { re: Dyadic::zero(), im: Dyadic::zero() }
    }

    fn one() -> Self {
        Self::from_c64(C64::new(1.0, 0.0))
    }

    fn from_c64(z: C64) -> Self {
        Self { re: Dyadic::from_f64(z.re), im: Dyadic::from_f64(z.im) }
    }

    fn to_c64(&self) -> C64 {
        C64::new(self.re.to_f64(), self.im.to_f64())
    }

    fn scale_int(&self, k: &BigInt) -> Self {
        Self { re: self.re.scale_int(k), im: self.im.scale_int(k) }
    }

    fn mul(&self, rhs: &Self) -> Self {
        let rr = &self.re * &rhs.re;
        let ii = &self.im * &rhs.im;
        let ri = &self.re * &rhs.im;
        let ir = &self.im * &rhs.re;
        let neg_ii = Dyadic { mantissa: -ii.mantissa, exponent: ii.exponent };
        Self { re: &rr + &neg_ii, im: &ri + &ir }
    }

    fn add_assign(&mut self, rhs: &Self) {
        self.re = &self.re + &rhs.re;
        self.im = &self.im + &rhs.im;
    }

    fn powers(&self, count: usize) -> Vec<Self> {
        let mut out = Vec::with_capacity(count + 1);
        out.push(Self::one());
        for k in 1..=count {
            let next = out[k - 1].mul(self);
            out.push(next);
        }
        out
    }
}

fn binomial_big(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut acc = BigInt::from(1u32);
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Rounded Gauss parameters for one rotation.
pub(super) struct GaussFactors {
    cos_half: f64,
    upper_e2: ExactComplex,
    lower_exact: ExactComplex,
}

impl GaussFactors {
    pub(super) fn new(theta: f64, phi: f64) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        let t = s / c;
        let e = C64::from_polar(1.0, phi);
        let lower = e * t;
        let upper = -e.conj() * t;
        // c·E² is formed exactly from the rounded c and E
        let upper_exact = ExactComplex::from_c64(upper);
        let e_exact = ExactComplex::from_c64(C64::new(c, 0.0));
        let upper_e2 = upper_exact.mul(&e_exact).mul(&e_exact);
        Self { cos_half: c, upper_e2, lower_exact: ExactComplex::from_c64(lower) }
    }

    /// Normalised N-photon block, rows and columns ordered by m ascending.
    pub(super) fn block(&self, n_total: usize) -> DMatrix<C64> {
        let pow_upper = self.upper_e2.powers(n_total);
        let pow_lower = self.lower_exact.powers(n_total);
        let ln_fact: Vec<f64> = (0..=n_total).map(linalg::ln_factorial).collect();
        let mut out = DMatrix::<C64>::zeros(n_total + 1, n_total + 1);
        for m in 0..=n_total {
            let n = n_total - m;
            let diag = self.cos_half.powi(m as i32 - n as i32);
            for m_f in 0..=n_total {
                let n_f = n_total - m_f;
                let mut acc = ExactComplex::zero();
                for k in 0..=n {
                    if m + k < m_f {
                        continue;
                    }
                    let j = m + k - m_f;
                    let weight = binomial_big(n, k) * binomial_big(m + k, j);
                    let term = pow_upper[k].mul(&pow_lower[j]).scale_int(&weight);
                    acc.add_assign(&term);
                }
                let norm = (0.5 * (ln_fact[m_f] + ln_fact[n_f] - ln_fact[m] - ln_fact[n])).exp();
                out[(m_f, m)] = acc.to_c64() * (diag * norm);
            }
        }
        out
    }
}
