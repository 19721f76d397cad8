//! Can a pure state be written as ψ = αΩ + √(1−|α|²)Φ with Ω perfectly
//! polarized and ⟨Φ|Ŝ⃗|Φ⟩ = 0?
//!
//! Up to normalization ⟨Φ|Ŝ⃗|Φ⟩ is
//!
//! ```text
//! V(α) = S⃗ + |α|² ⟨Ω|Ŝ⃗|Ω⟩ − 2 Re[α* ⟨Ω|Ŝ⃗|ψ⟩]
//! ```
//!
//! With ⟨Ω|Ŝ⃗|ψ⟩ = S⃗₁ + iS⃗₂ and Ω aligned with S⃗, a zero of V needs n̂_Ω,
//! S⃗₁ and S⃗₂ to be coplanar. The report gives that coplanarity residual and
//! the minimum of |V| found by a grid search followed by Levenberg–Marquardt.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector, Vector3};
use serde::Serialize;

use crate::error::Result;
use crate::fock::{PureState, QuantumState, StokesOperators};
use crate::su2::{self, PolarizedPureSpec};
use crate::C64;

use super::{stokes_vector, Direction, StokesVector};

/// Grid over |α| ∈ (0, 1).
pub const ALPHA_STEPS: usize = 200;
/// Grid over β ∈ [0, 2π).
pub const BETA_STEPS: usize = 256;
/// Minimum |V| above this fraction of S0 is reported as infeasible.
pub const INFEASIBLE_FRACTION: f64 = 1e-3;

/// Which polarized states Ω are tried.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum OmegaChoice {
    /// Along S⃗/|S⃗|, with the photon-number coefficients searched.
    #[default]
    AlongStokes,
    /// Along a given direction, with the coefficients searched.
    Direction(Direction),
    /// A fully specified Ω; only α is searched.
    Fixed(PolarizedPureSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeasibilityVerdict {
    /// S⃗ = 0 already.
    AlreadyUnpolarized,
    /// ψ is itself perfectly polarized: α = 1 leaves nothing.
    DegenerateFeasible,
    Feasible,
    Infeasible,
}

/// ⟨θφ⁽ᴺ⁾|Ŝ⃗|ψ⟩ = S⃗₁ + iS⃗₂ for one photon number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlockOverlap {
    pub n: usize,
    pub real: [f64; 3],
    pub imag: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OmegaCoefficient {
    pub n: usize,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub stokes: StokesVector,
    pub verdict: FeasibilityVerdict,
    pub omega_direction: Option<Direction>,
    /// Whether the coefficients of Ω were searched (otherwise supplied).
    pub coefficients_searched: bool,
    /// Coefficients c_N of Ω = Σ c_N |θφ⁽ᴺ⁾⟩ (supplied or best found).
    pub omega_coefficients: Vec<OmegaCoefficient>,
    /// ⟨Ω|Ŝ⃗|ψ⟩ = S⃗₁ + iS⃗₂.
    pub overlap_real: [f64; 3],
    pub overlap_imag: [f64; 3],
    /// |n̂_Ω · (S⃗₁ × S⃗₂)|
    pub triple_product: f64,
    /// Triple product divided by |S⃗₁||S⃗₂|: 1 for an orthogonal triple.
    pub triple_product_normalized: f64,
    pub block_overlaps: Vec<BlockOverlap>,
    /// Smallest |V| found.
    pub min_residual: f64,
    /// |⟨Φ|Ŝ⃗|Φ⟩| for the normalized Φ at the minimizer.
    pub min_residual_normalized: f64,
    pub alpha_abs: f64,
    /// α = |α| e^{−iβ}.
    pub beta: f64,
    pub threshold: f64,
}

/// Analyses whether ψ splits into a polarized part Ω and an unpolarized pure part.
pub fn pure_decomposition_feasibility(psi: &PureState, omega: &OmegaChoice) -> Result<FeasibilityReport> {
    let basis = psi.basis();
    let stokes = stokes_vector(psi)?;
    let s_vec = stokes.vec3();
    let threshold = INFEASIBLE_FRACTION * stokes.s0;
    let mut report = FeasibilityReport {
        stokes,
        verdict: FeasibilityVerdict::AlreadyUnpolarized,
        omega_direction: None,
        coefficients_searched: !matches!(omega, OmegaChoice::Fixed(_)),
        omega_coefficients: Vec::new(),
        overlap_real: [0.0; 3],
        overlap_imag: [0.0; 3],
        triple_product: 0.0,
        triple_product_normalized: 0.0,
        block_overlaps: Vec::new(),
        min_residual: s_vec.norm(),
        min_residual_normalized: s_vec.norm(),
        alpha_abs: 0.0,
        beta: 0.0,
        threshold,
    };
    if s_vec.norm() <= 1e-12 * stokes.s0.max(1.0) {
        return Ok(report);
    }

    let dir = match omega {
        OmegaChoice::AlongStokes => stokes.direction().expect("non-zero Stokes vector"),
        OmegaChoice::Direction(d) => *d,
        OmegaChoice::Fixed(spec) => Direction { theta: spec.theta, phi: spec.phi },
    };
    report.omega_direction = Some(dir);
    let n_hat = dir.unit_vector();

    let ops = StokesOperators::new(basis);
    let s_psi: Vec<DVector<C64>> = ops.vector().iter().map(|op| op.apply(psi.amplitudes())).collect();
    let kets: Vec<(usize, DVector<C64>)> = (1..=basis.nmax())
        .map(|n| Ok((n, su2::su2_coherent(n, dir.theta, dir.phi, basis)?.amplitudes().clone())))
        .collect::<Result<_>>()?;
    let overlaps: Vec<[C64; 3]> = kets
        .iter()
        .map(|(_, k)| [k.dotc(&s_psi[0]), k.dotc(&s_psi[1]), k.dotc(&s_psi[2])])
        .collect();
    report.block_overlaps = kets
        .iter()
        .zip(&overlaps)
        .map(|((n, _), o)| BlockOverlap {
            n: *n,
            real: [o[0].re, o[1].re, o[2].re],
            imag: [o[0].im, o[1].im, o[2].im],
        })
        .collect();
    let ket_psi: Vec<C64> = kets.iter().map(|(_, k)| k.dotc(psi.amplitudes())).collect();

    let p = stokes.degree().unwrap_or(0.0);
    let aligned = (n_hat - s_vec / s_vec.norm()).norm() < 1e-9;
    if (p - 1.0).abs() <= 1e-10 && aligned {
        // Ω = ψ and α = 1
        let coeffs: Vec<C64> = ket_psi.clone();
        fill_overlap(&mut report, &kets, &overlaps, &coeffs, n_hat);
        report.verdict = FeasibilityVerdict::DegenerateFeasible;
        report.min_residual = 0.0;
        report.min_residual_normalized = 0.0;
        report.alpha_abs = 1.0;
        return Ok(report);
    }

    // V(x) = S + Σ_k |γ_k|² w_k − 2 Σ_k Re(γ_k* O_k), x = (Re γ_k, Im γ_k)
    let (terms, fixed_coeffs): (Vec<Term>, Option<Vec<C64>>) = match omega {
        OmegaChoice::Fixed(spec) => {
            let total = spec.total_weight();
            let mut coeffs = vec![C64::new(0.0, 0.0); kets.len()];
            for w in &spec.weights {
                if w.n >= 1 && w.n <= kets.len() {
                    coeffs[w.n - 1] += C64::from_polar((w.q / total).sqrt(), w.varphi);
                }
            }
            let omega_ket = kets
                .iter()
                .zip(&coeffs)
                .fold(DVector::<C64>::zeros(basis.dim()), |acc, ((_, k), c)| acc + k * *c);
            let w = Vector3::from_fn(|mu, _| {
                omega_ket.dotc(&ops.vector()[mu].apply(&omega_ket)).re
            });
            let o = overlaps.iter().zip(&coeffs).fold([C64::new(0.0, 0.0); 3], |mut acc, (ov, c)| {
                for mu in 0..3 {
                    acc[mu] += c.conj() * ov[mu];
                }
                acc
            });
            let psi_overlap: C64 = coeffs.iter().zip(&ket_psi).map(|(c, kp)| c.conj() * kp).sum();
            (vec![Term { w, o, psi_overlap }], Some(coeffs))
        }
        _ => (
            kets.iter()
                .zip(&overlaps)
                .zip(&ket_psi)
                .map(|(((n, _), o), kp)| Term { w: n_hat * *n as f64, o: *o, psi_overlap: *kp })
                .collect(),
            None,
        ),
    };
    let problem = Problem { s: s_vec, terms };

    let best = problem.search();
    let gammas: Vec<C64> = (0..problem.terms.len()).map(|k| C64::new(best[2 * k], best[2 * k + 1])).collect();
    let alpha_abs = gammas.iter().map(|g| g.norm_sqr()).sum::<f64>().sqrt();
    let v = problem.residual(&best);
    report.min_residual = v.norm();
    report.min_residual_normalized = v.norm() / problem.phi_norm_sqr(&best).max(f64::MIN_POSITIVE);
    report.alpha_abs = alpha_abs;

    let coeffs = match fixed_coeffs {
        Some(c) => {
            report.beta = su2::wrap_phi(-gammas[0].arg());
            c
        }
        None => {
            if alpha_abs > 0.0 {
                gammas.iter().map(|g| g / alpha_abs).collect()
            } else {
                // no Ω helps; report the single block with the largest overlap
                let mut c = vec![C64::new(0.0, 0.0); kets.len()];
                let k = (0..overlaps.len())
                    .max_by(|&a, &b| norm3(&overlaps[a]).total_cmp(&norm3(&overlaps[b])))
                    .unwrap_or(0);
                if !c.is_empty() {
                    c[k] = C64::new(1.0, 0.0);
                }
                c
            }
        }
    };
    fill_overlap(&mut report, &kets, &overlaps, &coeffs, n_hat);
    report.verdict = if report.min_residual > threshold {
        FeasibilityVerdict::Infeasible
    } else {
        FeasibilityVerdict::Feasible
    };
    Ok(report)
}

fn norm3(v: &[C64; 3]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn fill_overlap(
    report: &mut FeasibilityReport,
    kets: &[(usize, DVector<C64>)],
    overlaps: &[[C64; 3]],
    coeffs: &[C64],
    n_hat: Vector3<f64>,
) {
    let mut o = [C64::new(0.0, 0.0); 3];
    for (ov, c) in overlaps.iter().zip(coeffs) {
        for mu in 0..3 {
            o[mu] += c.conj() * ov[mu];
        }
    }
    let s1 = Vector3::new(o[0].re, o[1].re, o[2].re);
    let s2 = Vector3::new(o[0].im, o[1].im, o[2].im);
    report.overlap_real = s1.into();
    report.overlap_imag = s2.into();
    report.triple_product = n_hat.dot(&s1.cross(&s2)).abs();
    let scale = s1.norm() * s2.norm();
    report.triple_product_normalized = if scale > 0.0 { report.triple_product / scale } else { 0.0 };
    report.omega_coefficients = kets
        .iter()
        .zip(coeffs)
        .filter(|(_, c)| c.norm() > 0.0)
        .map(|((n, _), c)| OmegaCoefficient { n: *n, re: c.re, im: c.im })
        .collect();
}

struct Term {
    /// ⟨Ω_k|Ŝ⃗|Ω_k⟩
    w: Vector3<f64>,
    /// ⟨Ω_k|Ŝ⃗|ψ⟩
    o: [C64; 3],
    /// ⟨Ω_k|ψ⟩
    psi_overlap: C64,
}

struct Problem {
    s: Vector3<f64>,
    terms: Vec<Term>,
}

/// Keeps Σ|γ_k|² strictly below 1.
const MAX_ALPHA: f64 = 1.0 - 1e-12;

impl Problem {
    fn residual(&self, x: &[f64]) -> Vector3<f64> {
        let mut v = self.s;
        for (k, t) in self.terms.iter().enumerate() {
            let (re, im) = (x[2 * k], x[2 * k + 1]);
            v += t.w * (re * re + im * im);
            for mu in 0..3 {
                v[mu] -= 2.0 * (re * t.o[mu].re + im * t.o[mu].im);
            }
        }
        v
    }

    fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        let mut j = DMatrix::zeros(3, x.len());
        for (k, t) in self.terms.iter().enumerate() {
            for mu in 0..3 {
                j[(mu, 2 * k)] = 2.0 * x[2 * k] * t.w[mu] - 2.0 * t.o[mu].re;
                j[(mu, 2 * k + 1)] = 2.0 * x[2 * k + 1] * t.w[mu] - 2.0 * t.o[mu].im;
            }
        }
        j
    }

    /// ‖ψ − Σ γ_k Ω_k‖², assuming the Ω_k are orthonormal.
    fn phi_norm_sqr(&self, x: &[f64]) -> f64 {
        let mut cross = 0.0;
        let mut sq = 0.0;
        for (k, t) in self.terms.iter().enumerate() {
            let g = C64::new(x[2 * k], x[2 * k + 1]);
            sq += g.norm_sqr();
            cross += (g.conj() * t.psi_overlap).re;
        }
        1.0 + sq - 2.0 * cross
    }

    fn project(x: &mut [f64]) {
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > MAX_ALPHA {
            for v in x.iter_mut() {
                *v *= MAX_ALPHA / norm;
            }
        }
    }

    /// Grid over (|α|, β) per term, then local refinement of the best seeds.
    fn search(&self) -> Vec<f64> {
        let dim = 2 * self.terms.len();
        let mut seeds: Vec<(f64, Vec<f64>)> = Vec::new();
        let mut x = vec![0.0; dim];
        for k in 0..self.terms.len() {
            let mut best: Option<(f64, f64, f64)> = None;
            for i in 1..=ALPHA_STEPS {
                let a = i as f64 / (ALPHA_STEPS + 1) as f64;
                for j in 0..BETA_STEPS {
                    let beta = TAU * j as f64 / BETA_STEPS as f64;
                    x[2 * k] = a * beta.cos();
                    x[2 * k + 1] = -a * beta.sin();
                    let r = self.residual(&x).norm();
                    if best.is_none_or(|b| r < b.0) {
                        best = Some((r, x[2 * k], x[2 * k + 1]));
                    }
                }
            }
            x[2 * k] = 0.0;
            x[2 * k + 1] = 0.0;
            if let Some((r, re, im)) = best {
                let mut seed = vec![0.0; dim];
                seed[2 * k] = re;
                seed[2 * k + 1] = im;
                seeds.push((r, seed));
            }
        }
        seeds.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut best_x = vec![0.0; dim];
        let mut best_r = self.residual(&best_x).norm();
        for (_, seed) in seeds.into_iter().take(8) {
            let refined = self.levenberg_marquardt(seed);
            let r = self.residual(&refined).norm();
            if r < best_r {
                best_r = r;
                best_x = refined;
            }
        }
        best_x
    }

    fn levenberg_marquardt(&self, mut x: Vec<f64>) -> Vec<f64> {
        let mut v = self.residual(&x);
        let mut cost = v.norm_squared();
        let mut mu = 1e-3;
        for _ in 0..500 {
            if cost < 1e-30 {
                break;
            }
            let j = self.jacobian(&x);
            let jt = j.transpose();
            let jtj = &jt * &j;
            let g = &jt * DVector::from_column_slice(v.as_slice());
            let mut improved = false;
            for _ in 0..40 {
                let mut a = jtj.clone();
                for d in 0..a.nrows() {
                    a[(d, d)] += mu * (1.0 + jtj[(d, d)]);
                }
                let Some(step) = a.cholesky().map(|c| c.solve(&g)) else {
                    mu *= 10.0;
                    continue;
                };
                let mut trial: Vec<f64> = x.iter().zip(step.iter()).map(|(xi, s)| xi - s).collect();
                Self::project(&mut trial);
                let tv = self.residual(&trial);
                let tc = tv.norm_squared();
                if tc < cost {
                    let gain = cost - tc;
                    x = trial;
                    v = tv;
                    cost = tc;
                    mu = (mu * 0.3).max(1e-15);
                    improved = gain > 1e-16 * cost.max(1e-300);
                    break;
                }
                mu *= 10.0;
            }
            if !improved {
                break;
            }
        }
        x
    }
}
