//! One function per subcommand, each returning a JSON report.

use std::path::{Path, PathBuf};

use qpolar_core::majorana::{self, Constellation, Star};
use qpolar_core::polarization::feasibility::OmegaChoice;
use qpolar_core::polarization::{
    self, classify_perfect, decompose, per_subspace, pure_decomposition_feasibility,
    stokes_vector, StokesVector, Strategy,
};
use qpolar_core::su2::{self, PolarizedPureSpec, PolarizedWeight, Rotation, RotationOperator};
use qpolar_core::{DensityMatrix, PureState, QuantumState, State, TwoModeBasis, C64};
use serde_json::{json, Map, Value};

use crate::error::{CliError, CliResult};
use crate::statefile::{matrix_to_json, state_to_json, StateFile};
use crate::{output, Cli, Command, MethodArg, StrategyArg};

pub fn dispatch(cli: &Cli) -> CliResult<Value> {
    match &cli.command {
        Command::Stokes(args) => stokes(&load(&args.input)?),
        Command::Classify(args) => classify(&load(&args.input)?, cli.tol),
        Command::Decompose { input, strategy, fixed_n, components } => {
            let state = load(&input.input)?;
            let prefix = components.clone().unwrap_or_else(|| input.input.with_extension(""));
            decompose_cmd(&state, *strategy, *fixed_n, &prefix)
        }
        Command::Constellation { block, frames, theta, phi } => {
            let psi = select_block(&load(&block.input.input)?, block.block)?;
            constellation(&psi, *frames, *theta, *phi)
        }
        Command::Fidelity(args) => fidelity(&select_block(&load(&args.input.input)?, args.block)?),
        Command::Rotate { input, theta, phi, method } => rotate(&load(&input.input)?, *theta, *phi, *method),
        Command::AppendixB { n } => appendix_b(*n),
    }
}

fn load(path: &Path) -> CliResult<State> {
    StateFile::read(path)?.to_state()
}

fn stokes_json(s: &StokesVector) -> Value {
    json!({"s0": s.s0, "s1": s.vector[0], "s2": s.vector[1], "s3": s.vector[2]})
}

fn p_json(p: Option<f64>) -> Value {
    p.map_or_else(|| json!("undefined"), |v| json!(v))
}

fn direction_json(d: Option<polarization::Direction>) -> Value {
    d.map_or(Value::Null, |d| {
        let u = d.unit_vector();
        json!({"theta": d.theta, "phi": d.phi, "unit": [u[0], u[1], u[2]]})
    })
}

pub fn stokes(state: &State) -> CliResult<Value> {
    let s = stokes_vector(state)?;
    let mut report = Map::new();
    report.insert("stokes".into(), stokes_json(&s));
    report.insert("p".into(), p_json(s.degree()));
    report.insert("direction".into(), direction_json(s.direction()));
    report.insert("photon_numbers".into(), json!(state.to_density().support(1e-12)));
    if let State::Pure(psi) = state {
        // points on nested spheres of radius N
        let blocks: Vec<Value> = per_subspace(psi)
            .blocks
            .iter()
            .filter(|b| b.n > 0)
            .map(|b| {
                let v = b.vector;
                let n = b.n as f64;
                json!({
                    "n": b.n,
                    "weight": b.weight,
                    "vector": v,
                    "unit": [v[0] / n, v[1] / n, v[2] / n],
                    "radius": b.n,
                })
            })
            .collect();
        report.insert("subspaces".into(), Value::Array(blocks));
        report.insert("p_from_subspaces".into(), p_json(polarization::p_from_subspaces(&per_subspace(psi))));
    }
    Ok(Value::Object(report))
}

pub fn classify(state: &State, tol: f64) -> CliResult<Value> {
    let r = classify_perfect(state, tol)?;
    Ok(json!({
        "stokes": stokes_json(&r.stokes),
        "p": p_json(r.p),
        "is_perfect": r.is_perfect,
        "aligned_direction": direction_json(r.aligned_direction),
        "residual_b_occupation": r.residual_b_occupation,
        "table_row": r.table_row.as_str(),
        "purity": r.purity,
        "photon_numbers": r.photon_numbers,
        "tolerance": tol,
    }))
}

fn component_path(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix.as_os_str().to_os_string();
    name.push(format!(".{suffix}.json"));
    PathBuf::from(name)
}

fn write_component(path: &Path, value: &Value) -> CliResult<Value> {
    std::fs::write(path, output::to_json(value))
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    Ok(json!(name))
}

pub fn decompose_cmd(state: &State, strategy: StrategyArg, fixed_n: Option<usize>, prefix: &Path) -> CliResult<Value> {
    let strategy = match (strategy, fixed_n) {
        (StrategyArg::FixedN, Some(n)) => Strategy::FixedN(n),
        (StrategyArg::FixedN, None) => {
            return Err(CliError::Validation("--strategy fixed-n needs --fixed-n".into()))
        }
        (_, Some(_)) => return Err(CliError::Validation("--fixed-n only applies to --strategy fixed-n".into())),
        (StrategyArg::Bracketed, None) => Strategy::Bracketed,
        (StrategyArg::Glauber, None) => Strategy::Glauber,
    };
    let rho = state.to_density();
    let r = decompose(&rho, strategy)?;
    let basis = rho.basis();
    let polarized_file = match &r.polarized {
        Some(b) => write_component(&component_path(prefix, "polarized"), &matrix_to_json(basis, b.matrix()))?,
        None => Value::Null,
    };
    let unpolarized_file = match &r.unpolarized {
        Some(a) => write_component(&component_path(prefix, "unpolarized"), &matrix_to_json(basis, a))?,
        None => Value::Null,
    };
    let mut strategy_json = json!({"name": strategy.name()});
    if let Strategy::FixedN(n) = strategy {
        strategy_json["n"] = json!(n);
    }
    Ok(json!({
        "strategy": strategy_json,
        "stokes": stokes_json(&r.stokes),
        "p": r.p,
        "direction": direction_json(r.direction),
        "physical": r.physical,
        "min_eigenvalue_unpolarized": r.min_eigenvalue_unpolarized,
        "unpolarized_vector": r.unpolarized_vector,
        "reconstruction_residual": r.reconstruction_residual,
        "files": {"polarized": polarized_file, "unpolarized": unpolarized_file},
    }))
}

/// The pure state restricted to one photon-number block.
fn select_block(state: &State, block: Option<usize>) -> CliResult<PureState> {
    let State::Pure(psi) = state else {
        return Err(CliError::Validation("this command needs a pure state".into()));
    };
    match block {
        Some(n) => {
            if psi.block_population(n)? <= 1e-14 {
                return Err(CliError::Validation(format!("block N={n} is empty")));
            }
            Ok(psi.project_block(n)?)
        }
        None => {
            majorana::single_block(psi)?;
            Ok(psi.clone())
        }
    }
}

fn stars_json(c: &Constellation, residuals: Option<&[f64]>) -> Value {
    let mut order: Vec<usize> = (0..c.stars.len()).collect();
    order.sort_by(|&a, &b| {
        let (sa, sb) = (&c.stars[a], &c.stars[b]);
        sa.theta.total_cmp(&sb.theta).then(sa.phi.total_cmp(&sb.phi))
    });
    Value::Array(
        order
            .into_iter()
            .map(|i| {
                let s: &Star = &c.stars[i];
                let u = s.unit_vector();
                let mut v = json!({"theta": s.theta, "phi": s.phi, "unit": [u[0], u[1], u[2]]});
                if let Some(r) = residuals {
                    v["residual"] = json!(r[i]);
                }
                v
            })
            .collect(),
    )
}

pub fn constellation(psi: &PureState, frames: usize, theta: f64, phi: f64) -> CliResult<Value> {
    let fit = majorana::state_to_constellation_fit(psi)?;
    let c = &fit.constellation;
    let mut report = json!({
        "n_photons": c.n_photons,
        "radius": c.n_photons,
        "stars": stars_json(c, Some(&fit.residuals)),
        "min_separation": c.min_separation(),
    });
    if frames > 0 {
        if !(0.0..=std::f64::consts::PI).contains(&theta) {
            return Err(CliError::Validation(format!("--theta {theta} outside [0, pi]")));
        }
        let list: Vec<Value> = (0..=frames)
            .map(|k| {
                let t = theta * k as f64 / frames as f64;
                let rot = Rotation::new(t, phi)?;
                Ok(json!({
                    "index": k,
                    "rotation": {"theta": rot.theta(), "phi": rot.phi()},
                    "stars": stars_json(&c.rotated(&rot), None),
                }))
            })
            .collect::<CliResult<_>>()?;
        report["frames"] = Value::Array(list);
    }
    Ok(report)
}

pub fn fidelity(psi: &PureState) -> CliResult<Value> {
    let (n, _) = majorana::single_block(psi)?;
    let r = majorana::max_fidelity_su2(psi)?;
    Ok(json!({
        "n_photons": n,
        "fidelity": r.fidelity,
        "theta": r.theta,
        "phi": r.phi,
        "gradient_norm": r.gradient_norm,
        "lower_bound": 1.0 / ((n + 1) as f64).sqrt(),
    }))
}

pub fn rotate(state: &State, theta: f64, phi: f64, method: MethodArg) -> CliResult<Value> {
    let rot = Rotation::new(theta, phi)?;
    let basis = state.basis();
    let op = match method {
        MethodArg::Exp => RotationOperator::new(rot, basis).matrix().clone(),
        MethodArg::Gauss => su2::rotation_fock_gauss(&rot, basis)?,
    };
    let rotated = match state {
        State::Pure(psi) => State::Pure(PureState::new(basis, op.apply(psi.amplitudes()))?),
        State::Mixed(rho) => {
            let u = op.matrix();
            State::Mixed(DensityMatrix::new(basis, u * rho.matrix() * u.adjoint())?)
        }
    };
    let before = stokes_vector(state)?;
    let after = stokes_vector(&rotated)?;
    Ok(json!({
        "method": match method { MethodArg::Exp => "exp", MethodArg::Gauss => "gauss" },
        "rotation": {"theta": rot.theta(), "phi": rot.phi()},
        "stokes_before": stokes_json(&before),
        "stokes_after": stokes_json(&after),
        "state": state_to_json(&rotated),
    }))
}

pub fn appendix_b(n: usize) -> CliResult<Value> {
    if n < 2 {
        return Err(CliError::Validation(format!("N must exceed 1, got {n}")));
    }
    let basis = TwoModeBasis::new(n);
    let one = C64::new(1.0, 0.0);
    let psi = PureState::from_components(basis, [(0, n, one), (n - 1, 1, one)])?;
    let s = stokes_vector(&psi)?;
    let printed = OmegaChoice::Fixed(PolarizedPureSpec {
        theta: 0.0,
        phi: 0.0,
        weights: vec![PolarizedWeight { n, q: 1.0, varphi: 0.0 }],
    });
    let with_printed = pure_decomposition_feasibility(&psi, &printed)?;
    let searched = pure_decomposition_feasibility(&psi, &OmegaChoice::AlongStokes)?;

    let mut caveats = Vec::new();
    if s.vector[0] < 0.0 {
        caveats.push(format!(
            "S1 = {} is negative: S points along -S1, opposite to the +S1 direction of the supplied Omega",
            s.vector[0]
        ));
    }
    if s.vector[1].abs() > 1e-12 || s.vector[2].abs() > 1e-12 {
        caveats.push(format!(
            "S is not parallel to the S1 axis (S2 = {}, S3 = {})",
            s.vector[1], s.vector[2]
        ));
    }
    Ok(json!({
        "n": n,
        "state": state_to_json(&State::Pure(psi)),
        "stokes": stokes_json(&s),
        "p": p_json(s.degree()),
        "direction": direction_json(s.direction()),
        "caveats": caveats,
        "supplied_omega": {
            "description": format!("Omega = |{n},0>, polarized along +S1, coefficient c_{n} = 1"),
            "report": serde_json::to_value(&with_printed).expect("report serializes"),
        },
        "searched_omega": {
            "description": "Omega along S/|S| with searched photon-number coefficients",
            "report": serde_json::to_value(&searched).expect("report serializes"),
        },
    }))
}
