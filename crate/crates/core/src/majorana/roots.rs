//! Polynomial roots from companion-matrix eigenvalues.

use nalgebra::{DMatrix, Schur};

use crate::error::{Error, Result};
use crate::C64;

/// A root with the backward error left after one Newton step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolishedRoot {
    pub value: C64,
    pub residual: f64,
}

/// Roots of Σ_k coeffs[k] t^(deg−k) (coefficients in descending powers,
/// leading coefficient non-zero).
pub fn polynomial_roots(coeffs: &[C64]) -> Result<Vec<PolishedRoot>> {
    let degree = coeffs.len().saturating_sub(1);
    if degree == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[0];
    if lead.norm() == 0.0 {
        return Err(Error::Numerical("leading coefficient is zero".into()));
    }
    let monic: Vec<C64> = coeffs.iter().map(|c| c / lead).collect();
    let raw = if degree == 1 {
        vec![-monic[1]]
    } else {
        let mut companion = DMatrix::<C64>::zeros(degree, degree);
        for k in 0..degree {
            companion[(0, k)] = -monic[k + 1];
        }
        for i in 1..degree {
            companion[(i, i - 1)] = C64::new(1.0, 0.0);
        }
        balance(&mut companion);
        eigenvalues(companion)?
    };
    Ok(raw.into_iter().map(|t| polish(&monic, t)).collect())
}

/// Evaluates p and p' by Horner's rule.
fn horner(coeffs: &[C64], t: C64) -> (C64, C64) {
    let mut p = C64::new(0.0, 0.0);
    let mut dp = C64::new(0.0, 0.0);
    for &c in coeffs {
        dp = dp * t + p;
        p = p * t + c;
    }
    (p, dp)
}

fn backward_error(coeffs: &[C64], t: C64) -> f64 {
    let (p, _) = horner(coeffs, t);
    let r = t.norm();
    let scale: f64 = coeffs
        .iter()
        .rev()
        .enumerate()
        .map(|(k, c)| c.norm() * r.powi(k as i32))
        .sum();
    if scale == 0.0 {
        0.0
    } else {
        p.norm() / scale
    }
}

fn polish(coeffs: &[C64], t: C64) -> PolishedRoot {
    let (p, dp) = horner(coeffs, t);
    let mut value = t;
    if dp.norm() > 0.0 {
        let step = p / dp;
        let candidate = t - step;
        if candidate.re.is_finite() && candidate.im.is_finite()
            && backward_error(coeffs, candidate) <= backward_error(coeffs, t)
        {
            value = candidate;
        }
    }
    PolishedRoot { value, residual: backward_error(coeffs, value) }
}

/// Parlett–Reinsch diagonal balancing with radix 2.
fn balance(a: &mut DMatrix<C64>) {
    let n = a.nrows();
    let l1 = |z: C64| z.re.abs() + z.im.abs();
    loop {
        let mut done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += l1(a[(j, i)]);
                    r += l1(a[(i, j)]);
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / 2.0;
            while c < g {
                f *= 2.0;
                c *= 4.0;
            }
            g = r * 2.0;
            while c > g {
                f /= 2.0;
                c /= 4.0;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let inv = 1.0 / f;
                for j in 0..n {
                    a[(i, j)] *= inv;
                    a[(j, i)] *= f;
                }
            }
        }
        if done {
            break;
        }
    }
}

fn eigenvalues(a: DMatrix<C64>) -> Result<Vec<C64>> {
    let n = a.nrows();
    let schur = Schur::try_new(a, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numerical("Schur iteration did not converge".into()))?;
    let (_, t) = schur.unpack();
    let mut out = Vec::with_capacity(n);
    let mut i = 0;
    while i < n {
        let split = i + 1 == n
            || t[(i + 1, i)].norm() <= f64::EPSILON * (t[(i, i)].norm() + t[(i + 1, i + 1)].norm());
        if split {
            out.push(t[(i, i)]);
            i += 1;
        } else {
            // 2×2 block: eigenvalues of ((p, q), (r, s))
            let (p, q, r, s) = (t[(i, i)], t[(i, i + 1)], t[(i + 1, i)], t[(i + 1, i + 1)]);
            let half_tr = (p + s) / 2.0;
            let det = p * s - q * r;
            let disc = (half_tr * half_tr - det).sqrt();
            out.push(half_tr + disc);
            out.push(half_tr - disc);
            i += 2;
        }
    }
    Ok(out)
}
