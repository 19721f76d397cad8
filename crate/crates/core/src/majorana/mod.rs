//! Majorana constellations of fixed-N blocks.
//!
//! An N-photon state is, up to a global phase, a product of N rotated
//! creation operators applied to the vacuum:
//!
//! ```text
//! |ψ⟩ ∝ Π_k (cos(θ_k/2) â† + e^{iφ_k} sin(θ_k/2) b̂†) |vac⟩
//! ```
//!
//! Each factor is a star (θ_k, φ_k) on the Poincaré sphere. Expanding the
//! product gives c_{N−j} ∝ √((N−j)! j!) e_j(ζ) Π_k cos(θ_k/2) with
//! ζ_k = e^{iφ_k} tan(θ_k/2) and e_j the elementary symmetric polynomials.
//! Stars are recovered as ζ = −t for the roots t of
//! Q(t) = Σ_j c_{N−j}/√((N−j)! j!) t^{N−j}; a degree deficit of d puts d
//! stars at θ = π.

mod roots;

use std::f64::consts::{PI, TAU};

use nalgebra::{DVector, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{PureState, TwoModeBasis};
use crate::linalg;
use crate::su2::{self, Rotation, RotationOperator};
use crate::C64;

/// Leading coefficients below this fraction of ‖c‖ are roots at infinity.
pub const INFINITE_ROOT_THRESHOLD: f64 = 1e-13;

/// One Majorana star.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Star {
    pub theta: f64,
    pub phi: f64,
}

impl Star {
    pub fn new(theta: f64, phi: f64) -> Self {
        Self { theta, phi: su2::wrap_phi(phi) }
    }

    pub fn from_vector(v: &Vector3<f64>) -> Self {
        let (theta, phi) = su2::angles_of(v);
        Self { theta, phi }
    }

    pub fn unit_vector(&self) -> Vector3<f64> {
        su2::unit_vector(self.theta, self.phi)
    }

    /// Great-circle distance to another star.
    pub fn angle_to(&self, other: &Star) -> f64 {
        self.unit_vector().dot(&other.unit_vector()).clamp(-1.0, 1.0).acos()
    }

    fn spinor(&self) -> (C64, C64) {
        let (s, c) = (self.theta / 2.0).sin_cos();
        (C64::new(c, 0.0), C64::from_polar(s, self.phi))
    }
}

/// N stars describing an N-photon block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constellation {
    pub n_photons: usize,
    pub stars: Vec<Star>,
}

impl Constellation {
    pub fn new(stars: Vec<Star>) -> Self {
        Self { n_photons: stars.len(), stars }
    }

    /// N copies of the same star.
    pub fn coincident(n_photons: usize, theta: f64, phi: f64) -> Self {
        Self::new(vec![Star::new(theta, phi); n_photons])
    }

    /// Applies the SO(3) image of `rot` to every star.
    pub fn rotated(&self, rot: &Rotation) -> Self {
        let m = rot.so3();
        Self::new(self.stars.iter().map(|s| Star::from_vector(&(m * s.unit_vector()))).collect())
    }

    /// Smallest pairwise great-circle distance (π for fewer than two stars).
    pub fn min_separation(&self) -> f64 {
        let mut best = PI;
        for (i, a) in self.stars.iter().enumerate() {
            for b in &self.stars[i + 1..] {
                best = best.min(a.angle_to(b));
            }
        }
        best
    }

    /// Largest distance between a star of `self` and its partner in `other`,
    /// after matching stars greedily by proximity.
    pub fn matched_distance(&self, other: &Constellation) -> Option<f64> {
        if self.stars.len() != other.stars.len() {
            return None;
        }
        let mut free: Vec<bool> = vec![true; other.stars.len()];
        let mut worst = 0.0f64;
        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        for (i, a) in self.stars.iter().enumerate() {
            for (j, b) in other.stars.iter().enumerate() {
                pairs.push(((a.unit_vector() - b.unit_vector()).norm(), i, j));
            }
        }
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut taken = vec![false; self.stars.len()];
        for (d, i, j) in pairs {
            if !taken[i] && free[j] {
                taken[i] = true;
                free[j] = false;
                worst = worst.max(d);
            }
        }
        Some(worst)
    }

    /// Π_k cos(Θ_k/2), with Θ_k the angle between (θ, φ) and star k.
    ///
    /// Proportional to |⟨θφ⁽ᴺ⁾|ψ⟩| with a direction-independent factor.
    pub fn coherent_overlap_product(&self, theta: f64, phi: f64) -> f64 {
        let n = su2::unit_vector(theta, phi);
        self.stars
            .iter()
            .map(|s| ((1.0 + n.dot(&s.unit_vector())).max(0.0) / 2.0).sqrt())
            .product()
    }
}

/// Unit-norm block amplitudes c_m (m = 0..=N) for a constellation.
pub fn constellation_coefficients(c: &Constellation) -> Vec<C64> {
    let n = c.stars.len();
    // d[j] multiplies â†^{N−j} b̂†^{j}
    let mut d = vec![C64::new(1.0, 0.0)];
    for star in &c.stars {
        let (u, v) = star.spinor();
        let mut next = vec![C64::new(0.0, 0.0); d.len() + 1];
        for (j, &dj) in d.iter().enumerate() {
            next[j] += dj * u;
            next[j + 1] += dj * v;
        }
        d = next;
    }
    let ln_fact: Vec<f64> = (0..=n).map(linalg::ln_factorial).collect();
    let mut coeffs = vec![C64::new(0.0, 0.0); n + 1];
    for (j, dj) in d.into_iter().enumerate() {
        let m = n - j;
        coeffs[m] = dj * (0.5 * (ln_fact[m] + ln_fact[j])).exp();
    }
    let norm = coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    coeffs.iter().map(|z| z / norm).collect()
}

/// Normalized N-block state whose constellation is `c`.
pub fn constellation_to_state(c: &Constellation, basis: TwoModeBasis) -> Result<PureState> {
    let range = basis.block(c.stars.len())?;
    let mut amps = DVector::zeros(basis.dim());
    for (m, z) in constellation_coefficients(c).into_iter().enumerate() {
        amps[range.start + m] = z;
    }
    PureState::new(basis, amps)
}

/// Stars plus per-root Newton residuals.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstellationFit {
    pub constellation: Constellation,
    pub residuals: Vec<f64>,
}

/// Constellation of block amplitudes c_m, m = 0..=N.
pub fn coefficients_to_constellation(coeffs: &[C64]) -> Result<ConstellationFit> {
    let n = coeffs.len().saturating_sub(1);
    let ln_fact: Vec<f64> = (0..=n).map(linalg::ln_factorial).collect();
    // descending powers of t: index j ↔ t^{N−j}
    let scaled: Vec<C64> = (0..=n)
        .map(|j| coeffs[n - j] / (0.5 * (ln_fact[n - j] + ln_fact[j])).exp())
        .collect();
    let norm = scaled.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if !(norm > 0.0) {
        return Err(Error::ZeroState);
    }
    let deficit = scaled
        .iter()
        .take_while(|z| z.norm() <= INFINITE_ROOT_THRESHOLD * norm)
        .count();
    let mut stars = vec![Star::new(PI, 0.0); deficit];
    let mut residuals = vec![0.0; deficit];
    let zeros = scaled
        .iter()
        .rev()
        .take_while(|z| z.norm() <= INFINITE_ROOT_THRESHOLD * norm)
        .count()
        .min(n - deficit);
    let reduced = &scaled[deficit..=n - zeros];
    stars.extend(std::iter::repeat_n(Star::new(0.0, 0.0), zeros));
    residuals.extend(std::iter::repeat_n(0.0, zeros));
    for root in roots::polynomial_roots(reduced)? {
        let zeta = -root.value;
        stars.push(Star::new(2.0 * zeta.norm().atan(), zeta.arg().rem_euclid(TAU)));
        residuals.push(root.residual);
    }
    Ok(ConstellationFit { constellation: Constellation::new(stars), residuals })
}

/// The single photon-number block a state lives on, with its amplitudes.
pub fn single_block(psi: &PureState) -> Result<(usize, Vec<C64>)> {
    let support = psi.support(1e-14);
    match support.as_slice() {
        [] => Err(Error::ZeroState),
        [n] => Ok((*n, psi.block_amplitudes(*n)?.iter().cloned().collect())),
        _ => Err(Error::MultiBlockSupport),
    }
}

/// Stars of a state supported on one N ≥ 1 block.
pub fn state_to_constellation(psi: &PureState) -> Result<Constellation> {
    Ok(state_to_constellation_fit(psi)?.constellation)
}

pub fn state_to_constellation_fit(psi: &PureState) -> Result<ConstellationFit> {
    let (n, coeffs) = single_block(psi)?;
    if n == 0 {
        return Err(Error::InvalidState("the vacuum has no Majorana stars".into()));
    }
    coefficients_to_constellation(&coeffs)
}

/// Maximum overlap with an SU(2) coherent state and where it is attained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FidelityResult {
    pub fidelity: f64,
    pub theta: f64,
    pub phi: f64,
    /// Norm of the surface gradient of |⟨θφ|ψ⟩| at the reported point.
    pub gradient_norm: f64,
}

/// Grid size and refinement settings for [`max_fidelity_su2`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelitySearch {
    pub theta_nodes: usize,
    pub phi_nodes: usize,
    /// Number of well-separated grid nodes refined locally.
    pub seeds: usize,
    pub gradient_tol: f64,
    pub max_iterations: usize,
}

impl Default for FidelitySearch {
    fn default() -> Self {
        Self { theta_nodes: 64, phi_nodes: 128, seeds: 6, gradient_tol: 1e-10, max_iterations: 200 }
    }
}

/// F = max_{θ,φ} |⟨θφ⁽ᴺ⁾|ψ⟩| for a single-block state.
pub fn max_fidelity_su2(psi: &PureState) -> Result<FidelityResult> {
    max_fidelity_su2_with(psi, &FidelitySearch::default())
}

pub fn max_fidelity_su2_with(psi: &PureState, search: &FidelitySearch) -> Result<FidelityResult> {
    let (n, coeffs) = single_block(psi)?;
    if n == 0 {
        return Err(Error::InvalidState("fidelity needs N >= 1".into()));
    }
    block_max_fidelity(&coeffs, search)
}

/// Overlap g(θ, φ) = ⟨θφ⁽ᴺ⁾|ψ⟩ and its first and second derivatives.
struct OverlapModel {
    n: usize,
    weighted: Vec<C64>,
}

struct Jet {
    f: f64,
    grad: [f64; 2],
    hess: [[f64; 2]; 2],
}

fn pow_or_zero(coef: f64, x: f64, e: i64) -> f64 {
    if coef == 0.0 {
        0.0
    } else {
        coef * x.powi(e as i32)
    }
}

impl OverlapModel {
    fn new(coeffs: &[C64]) -> Self {
        let n = coeffs.len() - 1;
        let weighted = coeffs
            .iter()
            .enumerate()
            .map(|(m, z)| z * linalg::binomial(n, m).sqrt())
            .collect();
        Self { n, weighted }
    }

    fn overlap(&self, theta: f64, phi: f64) -> C64 {
        let (s, c) = (theta / 2.0).sin_cos();
        self.weighted
            .iter()
            .enumerate()
            .map(|(m, w)| {
                let k = self.n - m;
                w * (c.powi(m as i32) * s.powi(k as i32)) * C64::from_polar(1.0, -phi * k as f64)
            })
            .sum()
    }

    fn value(&self, theta: f64, phi: f64) -> f64 {
        self.overlap(theta, phi).norm()
    }

    fn jet(&self, theta: f64, phi: f64) -> Jet {
        let (s, c) = (theta / 2.0).sin_cos();
        let zero = C64::new(0.0, 0.0);
        let (mut g, mut gt, mut gp, mut gtt, mut gtp, mut gpp) = (zero, zero, zero, zero, zero, zero);
        for (m, w) in self.weighted.iter().enumerate() {
            let (mi, ki) = (m as i64, (self.n - m) as i64);
            let (mf, kf) = (mi as f64, ki as f64);
            let a = c.powi(mi as i32) * s.powi(ki as i32);
            let da = pow_or_zero(-mf, c, mi - 1) * s.powi((ki + 1) as i32)
                + pow_or_zero(kf, s, ki - 1) * c.powi((mi + 1) as i32);
            let dda = pow_or_zero(mf * (mf - 1.0), c, mi - 2) * s.powi((ki + 2) as i32)
                - (mf * (kf + 1.0) + kf * (mf + 1.0)) * a
                + pow_or_zero(kf * (kf - 1.0), s, ki - 2) * c.powi((mi + 2) as i32);
            let e = *w * C64::from_polar(1.0, -phi * kf);
            let ik = C64::new(0.0, -kf);
            g += e * a;
            gt += e * (0.5 * da);
            gtt += e * (0.25 * dda);
            gp += e * ik * a;
            gpp += e * (-kf * kf) * a;
            gtp += e * ik * (0.5 * da);
        }
        let f = g.norm_sqr();
        let re = |z: C64| z.re;
        Jet {
            f,
            grad: [2.0 * re(gt * g.conj()), 2.0 * re(gp * g.conj())],
            hess: [
                [
                    2.0 * re(gtt * g.conj() + gt * gt.conj()),
                    2.0 * re(gtp * g.conj() + gt * gp.conj()),
                ],
                [
                    2.0 * re(gtp * g.conj() + gp * gt.conj()),
                    2.0 * re(gpp * g.conj() + gp * gp.conj()),
                ],
            ],
        }
    }
}

/// Surface gradient norm of √f.
fn surface_gradient(jet: &Jet, theta: f64) -> f64 {
    let big_f = jet.f.sqrt();
    if big_f == 0.0 {
        return 0.0;
    }
    let ft = jet.grad[0] / (2.0 * big_f);
    let fp = jet.grad[1] / (2.0 * big_f);
    let st = theta.sin();
    if st.abs() < 1e-300 {
        ft.abs()
    } else {
        (ft * ft + (fp / st) * (fp / st)).sqrt()
    }
}

/// Modified-Newton ascent on f = |g|² in (θ, φ) coordinates.
fn refine(model: &OverlapModel, theta0: f64, phi0: f64, search: &FidelitySearch) -> (f64, f64, f64) {
    let (mut theta, mut phi) = (theta0, phi0);
    for _ in 0..search.max_iterations {
        let jet = model.jet(theta, phi);
        if surface_gradient(&jet, theta) < search.gradient_tol {
            break;
        }
        let step = ascent_step(&jet);
        let mut alpha = 1.0;
        let mut moved = false;
        for _ in 0..60 {
            let (t, p) = (theta + alpha * step[0], phi + alpha * step[1]);
            if model.overlap(t, p).norm_sqr() > jet.f {
                theta = t;
                phi = p;
                moved = true;
                break;
            }
            alpha *= 0.5;
        }
        if !moved {
            break;
        }
    }
    let jet = model.jet(theta, phi);
    (theta, phi, surface_gradient(&jet, theta))
}

/// Newton step with the Hessian forced negative definite.
fn ascent_step(jet: &Jet) -> [f64; 2] {
    let [[a, b], [_, d]] = jet.hess;
    let mean = 0.5 * (a + d);
    let diff = 0.5 * (a - d);
    let rad = (diff * diff + b * b).sqrt();
    let (l1, l2) = (mean + rad, mean - rad);
    // eigenvector of l1
    let (v1x, v1y) = if b.abs() > 1e-300 {
        let (x, y) = (b, l1 - a);
        let n = (x * x + y * y).sqrt();
        (x / n, y / n)
    } else if a >= d {
        (1.0, 0.0)
    } else {
        (0.0, 1.0)
    };
    let (v2x, v2y) = (-v1y, v1x);
    let floor = 1e-6 * (l1.abs().max(l2.abs())).max(1e-300);
    let m1 = -(l1.abs().max(floor));
    let m2 = -(l2.abs().max(floor));
    let g = jet.grad;
    let p1 = (v1x * g[0] + v1y * g[1]) / m1;
    let p2 = (v2x * g[0] + v2y * g[1]) / m2;
    [-(p1 * v1x + p2 * v2x), -(p1 * v1y + p2 * v2y)]
}

fn block_max_fidelity(coeffs: &[C64], search: &FidelitySearch) -> Result<FidelityResult> {
    let model = OverlapModel::new(coeffs);

    // grid, θ rows include both poles
    let nt = search.theta_nodes.max(2);
    let np = search.phi_nodes.max(1);
    let mut nodes: Vec<(f64, f64, f64)> = Vec::with_capacity(nt * np);
    for i in 0..nt {
        let theta = PI * i as f64 / (nt - 1) as f64;
        for j in 0..np {
            let phi = TAU * j as f64 / np as f64;
            nodes.push((model.value(theta, phi), theta, phi));
        }
    }
    // values equal to 12 digits count as ties; the stable sort then keeps
    // the smallest θ, then φ
    nodes.sort_by_key(|n| std::cmp::Reverse((n.0 * 1e12).round() as i64));

    let mut seeds: Vec<(f64, f64)> = Vec::new();
    for &(_, theta, phi) in &nodes {
        if seeds.len() >= search.seeds.max(1) {
            break;
        }
        let here = su2::unit_vector(theta, phi);
        if seeds.iter().all(|&(t, p)| su2::unit_vector(t, p).dot(&here) < (0.3f64).cos()) {
            seeds.push((theta, phi));
        }
    }

    // charts centred on the equator avoid the coordinate singularity at the poles
    let tilt = Rotation::new(PI / 2.0, 0.0)?;
    let tilted = tilted_model(coeffs, &tilt)?;
    let tilt_m = tilt.so3();

    let mut best: Option<FidelityResult> = None;
    for (theta, phi) in seeds {
        let (theta, phi, grad) = if theta.sin() < 0.5 {
            let v = tilt_m * su2::unit_vector(theta, phi);
            let (t0, p0) = su2::angles_of(&v);
            let (t1, p1, g) = refine(&tilted, t0, p0, search);
            let back = tilt_m.transpose() * su2::unit_vector(t1, p1);
            let (t2, p2) = su2::angles_of(&back);
            (t2, p2, g)
        } else {
            let (t1, p1, g) = refine(&model, theta, phi, search);
            (t1, su2::wrap_phi(p1), g)
        };
        let candidate = FidelityResult {
            fidelity: model.value(theta, phi),
            theta,
            phi,
            gradient_norm: grad,
        };
        best = Some(match best {
            None => candidate,
            Some(b) if candidate.fidelity > b.fidelity + 1e-13 => candidate,
            Some(b) => b,
        });
    }
    let mut out = best.expect("at least one seed");
    // rounding can leave the optimum a hair above 1
    out.fidelity = out.fidelity.min(1.0);
    Ok(out)
}

fn tilted_model(coeffs: &[C64], rot: &Rotation) -> Result<OverlapModel> {
    let n = coeffs.len() - 1;
    let basis = TwoModeBasis::new(n);
    let range = basis.block(n)?;
    let mut amps = DVector::zeros(basis.dim());
    for (m, z) in coeffs.iter().enumerate() {
        amps[range.start + m] = *z;
    }
    let psi = PureState::new(basis, amps)?;
    let rotated = RotationOperator::new(*rot, basis).apply_pure(&psi)?;
    let block: Vec<C64> = rotated.block_amplitudes(n)?.iter().cloned().collect();
    Ok(OverlapModel::new(&block))
}
