//! Shipped example invocations and their golden outputs.
//!
//! Set `UPDATE_GOLDEN=1` to rewrite the files under `tests/golden/`.

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

pub struct Case {
    pub name: &'static str,
    pub args: &'static [&'static str],
    /// Input file under `data/`.
    pub input: Option<&'static str>,
    /// Whether the command writes component files.
    pub components: bool,
    pub exit_code: i32,
}

const fn case(name: &'static str, input: &'static str, args: &'static [&'static str]) -> Case {
    Case { name, args, input: Some(input), components: false, exit_code: 0 }
}

pub fn cases() -> Vec<Case> {
    vec![
        case("stokes_su2_coherent_n2", "su2_coherent_n2.json", &["stokes", "--format", "json"]),
        case("stokes_su2_coherent_n2_text", "su2_coherent_n2.json", &["stokes"]),
        case("stokes_fock_1_1", "fock_1_1.json", &["stokes", "--format", "json"]),
        case("stokes_vacuum", "vacuum.json", &["stokes", "--format", "json"]),
        case("stokes_two_blocks", "two_blocks.json", &["stokes", "--format", "json"]),
        case("stokes_appendix_b_n3", "appendix_b_n3.json", &["stokes", "--format", "json"]),
        case("classify_su2_coherent_n2", "su2_coherent_n2.json", &["classify", "--format", "json"]),
        case("classify_fock_1_1", "fock_1_1.json", &["classify", "--format", "json"]),
        case("classify_mehta_sharma", "mehta_sharma.json", &["classify", "--format", "json"]),
        case("classify_perfect_spec", "perfect_spec.json", &["classify", "--format", "json"]),
        case("classify_vacuum", "vacuum.json", &["classify", "--format", "json"]),
        Case {
            components: true,
            ..case(
                "decompose_partially_polarized_fixed_n",
                "partially_polarized.json",
                &["decompose", "--format", "json", "--strategy", "fixed-n", "--fixed-n", "1"],
            )
        },
        Case {
            components: true,
            ..case("decompose_mixture_bracketed", "mixture.json", &["decompose", "--format", "json"])
        },
        Case {
            components: true,
            ..case(
                "decompose_mixture_glauber",
                "mixture.json",
                &["decompose", "--format", "json", "--strategy", "glauber"],
            )
        },
        Case {
            exit_code: 2,
            ..case(
                "decompose_inconsistent_fixed_n",
                "mixture.json",
                &["decompose", "--format", "json", "--strategy", "fixed-n", "--fixed-n", "2"],
            )
        },
        case(
            "constellation_four_photons",
            "four_photons.json",
            &["constellation", "--format", "json", "--frames", "4", "--theta", "1.0", "--phi", "0.5"],
        ),
        case("constellation_appendix_b_n3", "appendix_b_n3.json", &["constellation", "--format", "json"]),
        case(
            "constellation_two_blocks_block_2",
            "two_blocks.json",
            &["constellation", "--format", "json", "--block", "2"],
        ),
        case("fidelity_fock_1_1", "fock_1_1.json", &["fidelity", "--format", "json"]),
        case("fidelity_four_photons", "four_photons.json", &["fidelity", "--format", "json"]),
        case(
            "rotate_fock_1_1_exp",
            "fock_1_1.json",
            &["rotate", "--format", "json", "--theta", "0.7", "--phi", "1.3"],
        ),
        case(
            "rotate_four_photons_gauss",
            "four_photons.json",
            &["rotate", "--format", "json", "--theta", "2.0", "--phi", "0.4", "--method", "gauss"],
        ),
        Case {
            exit_code: 3,
            ..case(
                "rotate_gauss_near_pi",
                "fock_1_1.json",
                &["rotate", "--format", "json", "--theta", "3.14", "--phi", "0", "--method", "gauss"],
            )
        },
        Case { name: "appendix_b_n3", args: &["appendix-b", "--format", "json"], input: None, components: false, exit_code: 0 },
        Case {
            name: "appendix_b_n2",
            args: &["appendix-b", "--n", "2", "--format", "json"],
            input: None,
            components: false,
            exit_code: 0,
        },
        Case {
            name: "appendix_b_n1",
            args: &["appendix-b", "--n", "1", "--format", "json"],
            input: None,
            components: false,
            exit_code: 2,
        },
    ]
}

pub fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn binary() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_qpolar"))
}

/// Everything a run produced: standard output plus component files by suffix.
#[derive(Debug, PartialEq, Eq)]
pub struct Produced {
    pub code: i32,
    pub files: Vec<(String, String)>,
}

pub fn run_case(case: &Case, workdir: &Path) -> Result<Produced, String> {
    let mut cmd = Command::new(binary());
    cmd.args(case.args);
    if let Some(input) = case.input {
        cmd.arg("--input").arg(crate_dir().join("data").join(input));
    }
    let prefix = workdir.join(case.name);
    if case.components {
        cmd.arg("--components").arg(&prefix);
    }
    let out = cmd.output().map_err(|e| format!("{}: cannot run binary: {e}", case.name))?;
    let code = out.status.code().unwrap_or(-1);
    let mut files = vec![("json".to_string(), String::from_utf8_lossy(&out.stdout).into_owned())];
    if case.name.ends_with("_text") {
        files[0].0 = "txt".into();
    }
    if case.components {
        for suffix in ["polarized", "unpolarized"] {
            let path = PathBuf::from(format!("{}.{suffix}.json", prefix.display()));
            if let Ok(text) = std::fs::read_to_string(&path) {
                files.push((format!("{suffix}.json"), text));
            }
        }
    }
    Ok(Produced { code, files })
}

fn golden_path(case: &Case, suffix: &str) -> PathBuf {
    crate_dir().join("tests").join("golden").join(format!("{}.{suffix}", case.name))
}

/// Runs a case twice and compares both runs with each other and with the golden files.
pub fn check_case(case: &Case) -> Result<(), String> {
    let first_dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let second_dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let first = run_case(case, first_dir.path())?;
    let second = run_case(case, second_dir.path())?;
    if first != second {
        return Err(format!("{}: two runs differ", case.name));
    }
    if first.code != case.exit_code {
        return Err(format!("{}: exit code {} (expected {})", case.name, first.code, case.exit_code));
    }
    let update = std::env::var("UPDATE_GOLDEN").is_ok_and(|v| v == "1");
    for (suffix, content) in &first.files {
        let path = golden_path(case, suffix);
        if update {
            std::fs::create_dir_all(path.parent().expect("golden dir")).map_err(|e| e.to_string())?;
            std::fs::write(&path, content).map_err(|e| e.to_string())?;
            continue;
        }
        let expected = std::fs::read_to_string(&path)
            .map_err(|e| format!("{}: missing golden file {}: {e}", case.name, path.display()))?;
        if &expected != content {
            return Err(format!("{}: output differs from {}", case.name, path.display()));
        }
    }
    Ok(())
}
