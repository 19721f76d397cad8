//! JSON state files.
//!
//! ```json
//! {"nmax": 2, "kind": "pure", "amplitudes": [{"m": 1, "n": 1, "re": 1.0, "im": 0.0}]}
//! ```
//!
//! Mixed states list matrix entries `{"row": [m, n], "col": [m, n], "re", "im"}`;
//! an off-diagonal entry whose transposed partner is missing gets the
//! complex conjugate filled in.

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use qpolar_core::fock::{validate, Tolerances};
use qpolar_core::su2::{polarized_pure_state, su2_coherent, PolarizedPureSpec, PolarizedWeight};
use qpolar_core::{DensityMatrix, PureState, QuantumState, State, TwoModeBasis, C64};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Amplitude {
    pub m: usize,
    pub n: usize,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixEntry {
    pub row: [usize; 2],
    pub col: [usize; 2],
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Payload {
    Pure { amplitudes: Vec<Amplitude> },
    Mixed { entries: Vec<MatrixEntry> },
    Su2Coherent { n: usize, theta: f64, phi: f64 },
    PerfectSpec { theta: f64, phi: f64, weights: Vec<PolarizedWeight> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub nmax: usize,
    #[serde(flatten)]
    pub payload: Payload,
}

impl StateFile {
    pub fn parse(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Validation(format!("malformed state file: {e}")))
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Builds and validates the state.
    pub fn to_state(&self) -> CliResult<State> {
        let basis = TwoModeBasis::new(self.nmax);
        let state = match &self.payload {
            Payload::Pure { amplitudes } => {
                let mut amps = DVector::<C64>::zeros(basis.dim());
                let mut seen = BTreeMap::new();
                for a in amplitudes {
                    if seen.insert((a.m, a.n), ()).is_some() {
                        return Err(CliError::Validation(format!("amplitude ({}, {}) listed twice", a.m, a.n)));
                    }
                    amps[basis.index(a.m, a.n)?] = C64::new(a.re, a.im);
                }
                let report = qpolar_core::fock::validate_vector(&amps);
                if let Some(problem) = report.problem(&Tolerances::default()) {
                    return Err(CliError::Validation(format!("pure state: {problem}")));
                }
                State::Pure(PureState::new(basis, amps)?)
            }
            Payload::Mixed { entries } => {
                let dim = basis.dim();
                let mut m = DMatrix::<C64>::zeros(dim, dim);
                let mut given = BTreeMap::new();
                for e in entries {
                    let i = basis.index(e.row[0], e.row[1])?;
                    let j = basis.index(e.col[0], e.col[1])?;
                    if given.insert((i, j), ()).is_some() {
                        return Err(CliError::Validation(format!(
                            "matrix entry {:?} x {:?} listed twice",
                            e.row, e.col
                        )));
                    }
                    m[(i, j)] = C64::new(e.re, e.im);
                }
                for &(i, j) in given.keys() {
                    if i != j && !given.contains_key(&(j, i)) {
                        m[(j, i)] = m[(i, j)].conj();
                    }
                }
                State::Mixed(DensityMatrix::new(basis, m)?)
            }
            Payload::Su2Coherent { n, theta, phi } => {
                if !(0.0..=std::f64::consts::PI).contains(theta) {
                    return Err(CliError::Validation(format!("theta={theta} outside [0, pi]")));
                }
                State::Pure(su2_coherent(*n, *theta, *phi, basis)?)
            }
            Payload::PerfectSpec { theta, phi, weights } => {
                let spec = PolarizedPureSpec { theta: *theta, phi: *phi, weights: weights.clone() };
                State::Pure(polarized_pure_state(&spec, basis)?)
            }
        };
        if let Some(problem) = validate(&state).problem(&Tolerances::default()) {
            return Err(CliError::Validation(problem));
        }
        Ok(state)
    }
}

/// Serializes a pure state (non-zero amplitudes only).
pub fn pure_to_json(psi: &PureState) -> Value {
    let basis = psi.basis();
    let amplitudes: Vec<Value> = basis
        .labels()
        .zip(psi.amplitudes().iter())
        .filter(|(_, z)| z.re != 0.0 || z.im != 0.0)
        .map(|((m, n), z)| json!({"m": m, "n": n, "re": z.re, "im": z.im}))
        .collect();
    json!({"nmax": basis.nmax(), "kind": "pure", "amplitudes": amplitudes})
}

/// Serializes a matrix as a mixed state file (non-zero entries only).
pub fn matrix_to_json(basis: TwoModeBasis, m: &DMatrix<C64>) -> Value {
    let labels: Vec<(usize, usize)> = basis.labels().collect();
    let mut entries = Vec::new();
    for (i, ri) in labels.iter().enumerate() {
        for (j, cj) in labels.iter().enumerate() {
            let z = m[(i, j)];
            if z.re != 0.0 || z.im != 0.0 {
                entries.push(json!({"row": [ri.0, ri.1], "col": [cj.0, cj.1], "re": z.re, "im": z.im}));
            }
        }
    }
    json!({"nmax": basis.nmax(), "kind": "mixed", "entries": entries})
}

pub fn state_to_json(state: &State) -> Value {
    match state {
        State::Pure(psi) => pure_to_json(psi),
        State::Mixed(rho) => matrix_to_json(rho.basis(), rho.matrix()),
    }
}
