//! Acceptance suite: one pass/fail line per criterion.
//!
//! Every randomized check draws from a fixed-seed ChaCha stream, so the
//! suite is reproducible. Where possible the library is compared with
//! oracles written independently here (Stokes operators from the Fock
//! matrix elements, closed-form coherent-state overlaps, brute-force grids).

mod common;

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use qpolar_core::majorana::{constellation_to_state, max_fidelity_su2, state_to_constellation};
use qpolar_core::polarization::feasibility::{pure_decomposition_feasibility, FeasibilityVerdict, OmegaChoice};
use qpolar_core::polarization::{
    classify_perfect, decompose, degree_of_polarization, p_from_subspaces, per_subspace, perfect_mixed_state,
    stokes_vector,
};
use qpolar_core::su2::{
    self, polarized_pure_state, rotation_fock_exp, rotation_fock_gauss, su2_coherent, PolarizedWeight,
    RotationOperator,
};
use qpolar_core::{
    Constellation, DensityMatrix, PolarizedPureSpec, PureState, Rotation, StokesOperators, Star, State, Strategy,
    TwoModeBasis, C64,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rng(criterion: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x5eed_0000 + criterion)
}

fn gaussian(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn random_vector(rng: &mut ChaCha8Rng, dim: usize) -> DVector<C64> {
    let v = DVector::from_fn(dim, |_, _| gaussian(rng));
    let norm = v.norm();
    v / C64::new(norm, 0.0)
}

/// Uniform direction on the sphere.
fn random_angles(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let u: f64 = rng.random();
    ((1.0 - 2.0 * u).clamp(-1.0, 1.0).acos(), rng.random::<f64>() * TAU)
}

/// Wishart-type density matrix of the given rank.
fn random_density(rng: &mut ChaCha8Rng, dim: usize, rank: usize) -> DMatrix<C64> {
    let g = DMatrix::from_fn(dim, rank, |_, _| gaussian(rng));
    let m = &g * g.adjoint();
    let tr = m.trace();
    m / tr
}

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().fold(0.0, |a, z| a.max(z.norm()))
}

/// Stokes operators assembled directly from ⟨m+1, n−1| â†b̂ |m, n⟩ = √((m+1)n).
struct Oracle {
    ops: [DMatrix<C64>; 4],
}

impl Oracle {
    fn new(basis: TwoModeBasis) -> Self {
        let dim = basis.dim();
        let mut s0 = DMatrix::zeros(dim, dim);
        let mut s1 = DMatrix::zeros(dim, dim);
        let mut raise = DMatrix::<C64>::zeros(dim, dim);
        for (col, (m, n)) in basis.labels().enumerate() {
            s0[(col, col)] = C64::from((m + n) as f64);
            s1[(col, col)] = C64::from(m as f64 - n as f64);
            if n > 0 {
                let row = basis.index(m + 1, n - 1).unwrap();
                raise[(row, col)] = C64::from((((m + 1) * n) as f64).sqrt());
            }
        }
        let lower = raise.adjoint();
        let s2 = &raise + &lower;
        let s3 = (&raise - &lower) * C64::new(0.0, -1.0);
        Self { ops: [s0, s1, s2, s3] }
    }

    fn expect(&self, rho: &DMatrix<C64>) -> [f64; 4] {
        std::array::from_fn(|k| (rho * &self.ops[k]).trace().re)
    }

    fn degree(&self, rho: &DMatrix<C64>) -> f64 {
        let s = self.expect(rho);
        (s[1] * s[1] + s[2] * s[2] + s[3] * s[3]).sqrt() / s[0]
    }

    fn vector_norm(&self, rho: &DMatrix<C64>) -> f64 {
        let s = self.expect(rho);
        (s[1] * s[1] + s[2] * s[2] + s[3] * s[3]).sqrt()
    }
}

fn projector(v: &DVector<C64>) -> DMatrix<C64> {
    v * v.adjoint()
}

/// ⟨θφ⁽ᴺ⁾|ψ⟩ from the closed-form coherent amplitudes; `block` holds c_m, m = 0..=N.
fn coherent_overlap(block: &[C64], theta: f64, phi: f64) -> C64 {
    let n = block.len() - 1;
    let (s, c) = (theta / 2.0).sin_cos();
    let mut binom = 1.0f64;
    let mut total = C64::new(0.0, 0.0);
    for (m, amp) in block.iter().enumerate() {
        if m > 0 {
            binom = binom * (n - m + 1) as f64 / m as f64;
        }
        let mag = binom.sqrt() * c.powi(m as i32) * s.powi((n - m) as i32);
        total += C64::from_polar(mag, -phi * (n - m) as f64) * amp;
    }
    total
}

// ---------------------------------------------------------------------------

fn criterion_1() -> Check {
    let basis = TwoModeBasis::new(12);
    let ops = StokesOperators::new(basis);
    let i2 = C64::new(0.0, 2.0);
    let mut worst = 0.0f64;
    for n in 0..=12 {
        let b = |op: &qpolar_core::OperatorMatrix| op.block(n).unwrap();
        let (s0, s1, s2, s3) = (b(&ops.s0), b(&ops.s1), b(&ops.s2), b(&ops.s3));
        let cyclic = [(&s1, &s2, &s3), (&s2, &s3, &s1), (&s3, &s1, &s2)];
        for (x, y, z) in cyclic {
            worst = worst.max(max_abs(&(x * y - y * x - z * i2)));
        }
        let casimir = &s1 * &s1 + &s2 * &s2 + &s3 * &s3 - &s0 * &s0 - &s0 * C64::from(2.0);
        worst = worst.max(max_abs(&casimir));
    }
    let off_block = [&ops.s0, &ops.s1, &ops.s2, &ops.s3].iter().map(|o| o.off_block_residual()).fold(0.0, f64::max);
    let oracle = Oracle::new(basis);
    let mismatch = [&ops.s0, &ops.s1, &ops.s2, &ops.s3]
        .iter()
        .zip(&oracle.ops)
        .map(|(op, o)| max_abs(&(op.matrix() - o)))
        .fold(0.0, f64::max);
    ensure(worst < 1e-12, || format!("algebra residual {worst:e}"))?;
    ensure(off_block == 0.0, || format!("off-block residual {off_block:e}"))?;
    ensure(mismatch < 1e-12, || format!("operators differ from matrix elements by {mismatch:e}"))?;
    Ok(format!("max residual {worst:.1e} over N ≤ 12"))
}

fn criterion_2() -> Check {
    let mut rng = rng(2);
    let mut worst_state = 0.0f64;
    let mut worst_gauss = 0.0f64;
    for _ in 0..100 {
        let n = rng.random_range(1..=15);
        let basis = TwoModeBasis::new(n);
        let theta = rng.random::<f64>() * PI;
        let phi = rng.random::<f64>() * TAU;
        let rot = Rotation::new(theta, phi).map_err(|e| e.to_string())?;
        let r = rotation_fock_exp(&rot, basis);
        let rotated = r.apply(PureState::fock(basis, n, 0).unwrap().amplitudes());
        let target = su2_coherent(n, theta, phi, basis).unwrap();
        let target = target.amplitudes();
        let ip = target.dotc(&rotated);
        let phase = ip / ip.norm();
        worst_state = worst_state.max((&rotated - target * phase).norm());
        // the library amplitudes have unit overlap with the closed-form coherent state
        let block: Vec<C64> = target.rows(basis.block(n).unwrap().start, n + 1).iter().cloned().collect();
        let self_overlap = coherent_overlap(&block, theta, phi).norm();
        worst_state = worst_state.max((self_overlap - 1.0).abs());

        let theta_g = rng.random::<f64>() * (PI - su2::GAUSS_SINGULAR_MARGIN);
        let rot_g = Rotation::new(theta_g, phi).unwrap();
        let exp = rotation_fock_exp(&rot_g, basis);
        let gauss = rotation_fock_gauss(&rot_g, basis).map_err(|e| e.to_string())?;
        worst_gauss = worst_gauss.max(max_abs(&(exp.matrix() - gauss.matrix())));
    }
    ensure(worst_state < 1e-10, || format!("‖R|N,0⟩ − |θφ⟩‖ = {worst_state:e}"))?;
    ensure(worst_gauss < 1e-9, || format!("exp vs Gauss differ by {worst_gauss:e}"))?;
    Ok(format!("state residual {worst_state:.1e}, exp vs Gauss {worst_gauss:.1e}"))
}

/// The perfectly polarized mixed states of criterion 3 (reused by 4).
fn perfect_states() -> Vec<DensityMatrix> {
    let mut rng = rng(3);
    let nmax = 10;
    let basis = TwoModeBasis::new(nmax);
    let mut out = Vec::with_capacity(200);
    for i in 0..200 {
        let (theta, phi) = random_angles(&mut rng);
        let (sigma, blocks) = match i % 5 {
            // Glauber weights: σ = λλ† with λ_N = √q_N e^{iδN}
            0 => {
                let r = 0.3 + 1.2 * rng.random::<f64>();
                let delta = rng.random::<f64>() * TAU;
                let spec = PolarizedPureSpec::glauber(r, delta, theta, phi, 7);
                let lambda = DVector::from_iterator(8, spec.weights.iter().map(|w| C64::from_polar(w.q.sqrt(), w.varphi)));
                (projector(&lambda), (0..8).collect::<Vec<_>>())
            }
            kind => {
                let dim = rng.random_range(1..=8);
                let mut blocks: Vec<usize> = Vec::new();
                while blocks.len() < dim {
                    let n = rng.random_range(0..=nmax);
                    if !blocks.contains(&n) {
                        blocks.push(n);
                    }
                }
                if blocks == [0] {
                    blocks[0] = rng.random_range(1..=nmax);
                }
                let rank = rng.random_range(1..=dim);
                let mut sigma = random_density(&mut rng, dim, rank);
                // Mehta–Sharma: diagonal σ
                if kind == 1 {
                    sigma = DMatrix::from_diagonal(&sigma.diagonal());
                }
                (sigma, blocks)
            }
        };
        out.push(perfect_mixed_state(&sigma, &blocks, theta, phi, basis).expect("valid σ"));
    }
    out
}

fn criterion_3() -> Check {
    let states = perfect_states();
    let oracle = Oracle::new(TwoModeBasis::new(10));
    let mut worst = 0.0f64;
    for rho in &states {
        let p = degree_of_polarization(rho).map_err(|e| e.to_string())?.ok_or("undefined p")?;
        worst = worst.max((p - 1.0).abs()).max((oracle.degree(rho.matrix()) - 1.0).abs());
    }
    ensure(worst < 1e-9, || format!("|p − 1| = {worst:e}"))?;
    Ok(format!("{} states (incl. diagonal and Glauber σ), max |p − 1| {worst:.1e}", states.len()))
}

fn criterion_4() -> Check {
    let mut worst_b = 0.0f64;
    for rho in perfect_states() {
        let s0 = stokes_vector(&rho).unwrap().s0;
        let report = classify_perfect(&State::Mixed(rho), 1e-9).map_err(|e| e.to_string())?;
        ensure(report.is_perfect, || format!("perfect state classified as {}", report.table_row.as_str()))?;
        let b = report.residual_b_occupation.ok_or("no b occupation reported")?;
        ensure(b < 1e-8 * s0, || format!("b occupation {b:e} with S0 = {s0}"))?;
        worst_b = worst_b.max(b / s0);
    }
    let mut rng = rng(4);
    let mut worst_p = 0.0f64;
    for i in 0..200 {
        let nmax = rng.random_range(1..=5);
        let basis = TwoModeBasis::new(nmax);
        let oracle = Oracle::new(basis);
        let dim = basis.dim();
        let state = if i % 2 == 0 {
            let rank = rng.random_range(1..=dim);
            let rho = random_density(&mut rng, dim, rank);
            State::Mixed(DensityMatrix::new(basis, rho).unwrap())
        } else {
            let v = random_vector(&mut rng, dim);
            State::Pure(PureState::new(basis, v).unwrap())
        };
        let rho = match &state {
            State::Mixed(r) => r.matrix().clone(),
            State::Pure(p) => projector(p.amplitudes()),
        };
        let expected = oracle.degree(&rho);
        if (expected - 1.0).abs() < 1e-6 {
            continue;
        }
        let report = classify_perfect(&state, 1e-9).map_err(|e| e.to_string())?;
        ensure(!report.is_perfect, || format!("random state with p = {expected} reported perfect"))?;
        let p = report.p.ok_or("undefined p")?;
        worst_p = worst_p.max((p - expected).abs());
    }
    ensure(worst_p < 1e-10, || format!("p differs from |S|/S0 by {worst_p:e}"))?;
    Ok(format!("max ⟨b†b⟩/S0 {worst_b:.1e}; non-perfect p error {worst_p:.1e}"))
}

fn criterion_5() -> Check {
    let basis = TwoModeBasis::new(12);
    let mut count = 0;
    for n in 1..=12usize {
        for k in 0..=n {
            let psi = PureState::fock(basis, k, n - k).unwrap();
            let p = degree_of_polarization(&psi).unwrap().ok_or("undefined p")?;
            let law = (2.0 * k as f64 - n as f64).abs() / n as f64;
            ensure(p == law, || format!("p(|{k},{}⟩) = {p}, expected {law}", n - k))?;
            ensure((p == 1.0) == (k == 0 || k == n), || format!("p = 1 mismatch at k = {k}, N = {n}"))?;
            count += 1;
        }
    }
    Ok(format!("{count} Fock states exact"))
}

fn criterion_6() -> Check {
    let mut rng = rng(6);
    let mut worst = 0.0f64;
    let mut done = 0;
    while done < 100 {
        let n = rng.random_range(1..=10);
        let stars: Vec<Star> = (0..n)
            .map(|_| {
                let (t, p) = random_angles(&mut rng);
                Star::new(t, p)
            })
            .collect();
        let c = Constellation::new(stars);
        if c.min_separation() < 0.3 {
            continue;
        }
        let basis = TwoModeBasis::new(n);
        let psi = constellation_to_state(&c, basis).map_err(|e| e.to_string())?;
        let back = state_to_constellation(&psi).map_err(|e| e.to_string())?;
        let d = c.matched_distance(&back).ok_or("star count changed")?;
        worst = worst.max(d);
        done += 1;
    }
    ensure(worst < 1e-6, || format!("round-trip star error {worst:e}"))?;
    let mut worst_f = 0.0f64;
    for _ in 0..100 {
        let n = rng.random_range(1..=10);
        let (theta, phi) = random_angles(&mut rng);
        let basis = TwoModeBasis::new(n);
        let psi = constellation_to_state(&Constellation::coincident(n, theta, phi), basis).unwrap();
        let coherent = su2_coherent(n, theta, phi, basis).unwrap();
        worst_f = worst_f.max(1.0 - psi.fidelity(&coherent).unwrap().powi(2));
    }
    ensure(worst_f < 1e-10, || format!("coincident-star infidelity {worst_f:e}"))?;
    Ok(format!("round-trip chord error {worst:.1e}; coincident infidelity {worst_f:.1e}"))
}

fn criterion_7() -> Check {
    let mut rng = rng(7);
    let mut min_margin = f64::INFINITY;
    let mut worst_grid = 0.0f64;
    let mut worst_rot = 0.0f64;
    for i in 0..200 {
        let n = rng.random_range(1..=12);
        let basis = TwoModeBasis::new(n);
        let range = basis.block(n).unwrap();
        let block = random_vector(&mut rng, n + 1);
        let mut amps = DVector::zeros(basis.dim());
        amps.rows_mut(range.start, n + 1).copy_from(&block);
        let psi = PureState::new(basis, amps).unwrap();
        let f = max_fidelity_su2(&psi).map_err(|e| e.to_string())?;
        min_margin = min_margin.min(f.fidelity - 1.0 / ((n + 1) as f64).sqrt());
        // the reported maximum must not be beaten by a brute-force grid
        let coeffs: Vec<C64> = block.iter().cloned().collect();
        let reported = coherent_overlap(&coeffs, f.theta, f.phi).norm();
        worst_grid = worst_grid.max((reported - f.fidelity).abs());
        for t in 0..=60 {
            for p in 0..120 {
                let g = coherent_overlap(&coeffs, t as f64 * PI / 60.0, p as f64 * TAU / 120.0).norm();
                worst_grid = worst_grid.max(g - f.fidelity);
            }
        }
        if i % 4 == 0 {
            let (theta, phi) = random_angles(&mut rng);
            let rotated = RotationOperator::new(Rotation::new(theta, phi).unwrap(), basis)
                .apply_pure(&psi)
                .unwrap();
            let fr = max_fidelity_su2(&rotated).map_err(|e| e.to_string())?;
            worst_rot = worst_rot.max((fr.fidelity - f.fidelity).abs());
        }
    }
    ensure(min_margin > -1e-9, || format!("F below 1/√(N+1) by {:e}", -min_margin))?;
    ensure(worst_grid < 1e-12, || format!("grid beats reported maximum by {worst_grid:e}"))?;
    ensure(worst_rot < 1e-8, || format!("rotation changes F by {worst_rot:e}"))?;

    // |1,1⟩ against a 1001 × 1000 grid
    let basis = TwoModeBasis::new(2);
    let psi = PureState::fock(basis, 1, 1).unwrap();
    let f = max_fidelity_su2(&psi).unwrap().fidelity;
    let block = [C64::from(0.0), C64::from(1.0), C64::from(0.0)];
    let mut grid = 0.0f64;
    for t in 0..=1000 {
        for p in 0..1000 {
            grid = grid.max(coherent_overlap(&block, t as f64 * PI / 1000.0, p as f64 * TAU / 1000.0).norm());
        }
    }
    ensure((f - grid).abs() < 1e-8 && (f - FRAC_1_SQRT_2).abs() < 1e-8, || {
        format!("F(|1,1⟩) = {f}, grid {grid}")
    })?;
    Ok(format!(
        "bound margin ≥ {min_margin:.3}; F(|1,1⟩) = {f:.12} (grid {grid:.12}); rotation drift {worst_rot:.1e}"
    ))
}

fn criterion_8() -> Check {
    let mut rng = rng(8);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let nmax = rng.random_range(2..=8);
        let basis = TwoModeBasis::new(nmax);
        let mut amps = random_vector(&mut rng, basis.dim());
        // random block weights make the mixture of spheres uneven
        for n in 0..=nmax {
            let scale: f64 = rng.random();
            let r = basis.block(n).unwrap();
            amps.rows_mut(r.start, r.len()).scale_mut(scale);
        }
        let norm = amps.norm();
        let psi = PureState::new(basis, amps / C64::from(norm)).unwrap();
        let direct = degree_of_polarization(&psi).unwrap().ok_or("undefined p")?;
        let split = p_from_subspaces(&per_subspace(&psi)).ok_or("undefined p")?;
        worst = worst.max((direct - split).abs());
    }
    ensure(worst < 1e-10, || format!("subspace formula off by {worst:e}"))?;
    Ok(format!("200 states, max difference {worst:.1e}"))
}

fn criterion_9() -> Check {
    let mut rng = rng(9);
    let nmax = 6;
    let basis = TwoModeBasis::new(nmax);
    let oracle = Oracle::new(basis);
    let dim = basis.dim();
    let mut worst_rec = 0.0f64;
    let mut worst_sa = 0.0f64;
    let mut distinct = 0;
    let mut physical = [0usize; 3];
    // one digit per instance: bit 0 fixed-n, bit 1 bracketed, bit 2 glauber
    let mut mask = String::with_capacity(100);
    for i in 0..100 {
        let (theta, phi) = random_angles(&mut rng);
        let (rho, k) = if i % 4 == 0 {
            // coherent state plus the maximally mixed state of its block
            let k = rng.random_range(1..nmax);
            let coh = su2_coherent(k, theta, phi, basis).unwrap();
            let w: f64 = 0.05 + 0.9 * rng.random::<f64>();
            let r = basis.block(k).unwrap();
            let mut flat = DMatrix::zeros(dim, dim);
            for j in r.clone() {
                flat[(j, j)] = C64::from(1.0 / r.len() as f64);
            }
            (projector(coh.amplitudes()) * C64::from(w) + flat * C64::from(1.0 - w), k)
        } else {
            // a Wishart state tilted towards a coherent state
            let n_coh = rng.random_range(1..=nmax);
            let coh = su2_coherent(n_coh, theta, phi, basis).unwrap();
            let mu: f64 = rng.random::<f64>() * 0.9;
            let rank = rng.random_range(1..=dim);
            let mut rho =
                random_density(&mut rng, dim, rank) * C64::from(1.0 - mu) + projector(coh.amplitudes()) * C64::from(mu);
            // mix in one block on the far side of the nearest integer so that S0 is an integer
            let s = oracle.expect(&rho)[0];
            let k = (s.round() as usize).clamp(1, nmax - 1);
            if s != k as f64 {
                let nc = if s > k as f64 { k - 1 } else { k + 1 };
                let r = basis.block(nc).unwrap();
                let mut v = DVector::zeros(dim);
                v.rows_mut(r.start, r.len()).copy_from(&random_vector(&mut rng, r.len()));
                let lambda = (k as f64 - nc as f64) / (s - nc as f64);
                rho = rho * C64::from(lambda) + projector(&v) * C64::from(1.0 - lambda);
            }
            (rho, k)
        };
        let rho = DensityMatrix::new(basis, rho).map_err(|e| e.to_string())?;
        let mut polarized = Vec::new();
        let mut bits = 0u32;
        for (slot, strategy) in [Strategy::FixedN(k), Strategy::Bracketed, Strategy::Glauber].into_iter().enumerate() {
            let d = decompose(&rho, strategy).map_err(|e| format!("{}: {e}", strategy.name()))?;
            ensure(d.p > 0.0 && d.p < 1.0, || format!("not partially polarized: p = {}", d.p))?;
            let rho_b = d.polarized.clone().ok_or("missing polarized part")?;
            let rho_a = d.unpolarized.clone().ok_or("missing unpolarized part")?;
            let rebuilt = &rho_a * C64::from(1.0 - d.p) + rho_b.matrix() * C64::from(d.p);
            worst_rec = worst_rec.max(max_abs(&(rebuilt - rho.matrix())));
            worst_sa = worst_sa.max(oracle.vector_norm(&rho_a));
            ensure(d.physical == (d.min_eigenvalue_unpolarized.unwrap_or(0.0) >= -1e-10), || {
                "positivity flag inconsistent with eigenvalue".into()
            })?;
            if d.physical {
                physical[slot] += 1;
                bits |= 1 << slot;
            }
            polarized.push(rho_b);
        }
        mask.push(char::from_digit(bits, 8).unwrap());
        if polarized[1].trace_distance(&polarized[2]).unwrap() > 1e-3 {
            distinct += 1;
        }
    }
    ensure(worst_rec < 1e-9, || format!("reconstruction error {worst_rec:e}"))?;
    ensure(worst_sa < 1e-9, || format!("|S_A| = {worst_sa:e}"))?;
    ensure(distinct >= 90, || format!("bracketed and glauber differ on only {distinct}/100"))?;
    Ok(format!(
        "reconstruction {worst_rec:.1e}, |S_A| {worst_sa:.1e}, distinct {distinct}/100, \
         positive ρ_A fixed-n/bracketed/glauber {}/{}/{}, per-instance positivity mask {mask}",
        physical[0], physical[1], physical[2]
    ))
}

fn criterion_10() -> Check {
    let basis = TwoModeBasis::new(3);
    let h = C64::from(FRAC_1_SQRT_2);
    let psi = PureState::from_components(basis, [(0, 3, h), (2, 1, h)]).map_err(|e| e.to_string())?;
    let omega = PolarizedPureSpec { theta: 0.0, phi: 0.0, weights: vec![PolarizedWeight { n: 3, q: 1.0, varphi: 0.0 }] };
    let report = pure_decomposition_feasibility(&psi, &OmegaChoice::Fixed(omega.clone())).map_err(|e| e.to_string())?;

    let c3 = C64::from(1.0);
    let expected = [C64::from(0.0), c3.conj(), C64::new(0.0, -1.0) * c3.conj()].map(|z| z * 1.5f64.sqrt());
    // independent ⟨Ω|Ŝ_k|ψ⟩ from the matrix elements
    let oracle = Oracle::new(basis);
    let omega_ket = polarized_pure_state(&omega, basis).unwrap();
    let mut err = 0.0f64;
    for k in 0..3 {
        let reported = C64::new(report.overlap_real[k], report.overlap_imag[k]);
        let direct = omega_ket.amplitudes().dotc(&(&oracle.ops[k + 1] * psi.amplitudes()));
        err = err.max((reported - expected[k]).norm()).max((direct - expected[k]).norm());
    }
    ensure(err < 1e-12, || format!("overlap vector off by {err:e}"))?;
    ensure((report.triple_product_normalized - 1.0).abs() < 1e-12, || {
        format!("normalized triple product {}", report.triple_product_normalized)
    })?;
    let s0 = report.stokes.s0;
    ensure(report.min_residual > 1e-3 * s0, || format!("min |S(Φ)| = {:e}", report.min_residual))?;
    ensure(report.verdict == FeasibilityVerdict::Infeasible, || format!("verdict {:?}", report.verdict))?;

    // brute force over α in the unit disk with the oracle operators
    let mut brute = f64::INFINITY;
    for i in 0..=200 {
        let r = i as f64 / 200.0;
        for j in 0..256 {
            let alpha = C64::from_polar(r, j as f64 * TAU / 256.0);
            let phi_vec = psi.amplitudes() - omega_ket.amplitudes() * alpha;
            let rho = projector(&phi_vec);
            brute = brute.min(oracle.vector_norm(&rho));
        }
    }
    ensure(brute > 1e-3 * s0, || format!("brute-force grid finds |S(Φ)| = {brute:e}"))?;
    Ok(format!(
        "overlap error {err:.1e}, triple product {:.12}, min |S(Φ)| {:.4} (grid {brute:.4}) > {:.4}",
        report.triple_product_normalized,
        report.min_residual,
        1e-3 * s0
    ))
}

fn criterion_11() -> Check {
    let basis = TwoModeBasis::new(20);
    let oracle = Oracle::new(basis);
    let mut worst = 0.0f64;
    for (theta, phi) in [(0.0, 0.0), (0.9, 2.1), (PI / 2.0, 4.0), (PI, 0.0)] {
        let spec = PolarizedPureSpec::glauber(1.0, 0.0, theta, phi, 20);
        let psi = polarized_pure_state(&spec, basis).map_err(|e| e.to_string())?;
        let p = degree_of_polarization(&psi).unwrap().ok_or("undefined p")?;
        let direct = oracle.degree(&projector(psi.amplitudes()));
        worst = worst.max((p - 1.0).abs()).max((direct - 1.0).abs());
    }
    ensure(worst < 1e-8, || format!("|p − 1| = {worst:e}"))?;
    Ok(format!("|p − 1| ≤ {worst:.1e}"))
}

fn criterion_12() -> Check {
    let cases = common::cases();
    let failures: Vec<String> = cases.iter().filter_map(|c| common::check_case(c).err()).collect();
    ensure(failures.is_empty(), || failures.join("; "))?;
    Ok(format!("{} invocations identical across two runs and to golden files", cases.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 12] = [
        ("Stokes algebra", criterion_1),
        ("rotated Fock state is coherent", criterion_2),
        ("perfect polarization sufficiency", criterion_3),
        ("perfect polarization necessity", criterion_4),
        ("Fock-state law", criterion_5),
        ("Majorana round trip", criterion_6),
        ("coherent-state fidelity", criterion_7),
        ("per-subspace consistency", criterion_8),
        ("decomposition suite", criterion_9),
        ("pure-state decomposition example", criterion_10),
        ("truncated Glauber state", criterion_11),
        ("CLI determinism", criterion_12),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2}: PASS  {name} — {detail} [{secs:.2}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2}: FAIL  {name} — {detail} [{secs:.2}s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
