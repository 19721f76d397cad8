//! Command-line front end for `qpolar-core`.
//!
//! Each subcommand reads a JSON state file, runs one analysis and renders
//! the result as text or as deterministic JSON.

pub mod commands;
pub mod error;
pub mod output;
pub mod statefile;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::CliError;
use crate::output::Format;

#[derive(Debug, Parser)]
#[command(name = "qpolar", version, about = "Polarization analysis of two-mode quantum states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Tolerance for deciding perfect polarization.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// JSON state file.
    #[arg(long)]
    pub input: PathBuf,
}

#[derive(Debug, Args)]
pub struct BlockArgs {
    #[command(flatten)]
    pub input: InputArgs,

    /// Photon-number block to analyse (default: the only populated one).
    #[arg(long)]
    pub block: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    FixedN,
    Bracketed,
    Glauber,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Exp,
    Gauss,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Stokes parameters and degree of polarization.
    Stokes(InputArgs),

    /// Perfect-polarization test and classification.
    Classify(InputArgs),

    /// Split into polarized and unpolarized parts; writes both components.
    Decompose {
        #[command(flatten)]
        input: InputArgs,

        #[arg(long, value_enum, default_value_t = StrategyArg::Bracketed)]
        strategy: StrategyArg,

        /// Photon number of the polarized part for `--strategy fixed-n`.
        #[arg(long)]
        fixed_n: Option<usize>,

        /// Path prefix for the component files (default: the input path
        /// without its extension).
        #[arg(long)]
        components: Option<PathBuf>,
    },

    /// Majorana stars, optionally with frames of a stepped rotation.
    Constellation {
        #[command(flatten)]
        block: BlockArgs,

        /// Number of animation frames (0 for none).
        #[arg(long, default_value_t = 0)]
        frames: usize,

        /// Total rotation angle swept by the frames.
        #[arg(long, default_value_t = std::f64::consts::PI)]
        theta: f64,

        /// Azimuth of the rotation axis for the frames.
        #[arg(long, default_value_t = 0.0)]
        phi: f64,
    },

    /// Maximum overlap with an SU(2) coherent state.
    Fidelity(BlockArgs),

    /// Apply the rotation R(theta, phi).
    Rotate {
        #[command(flatten)]
        input: InputArgs,

        #[arg(long)]
        theta: f64,

        #[arg(long)]
        phi: f64,

        #[arg(long, value_enum, default_value_t = MethodArg::Exp)]
        method: MethodArg,
    },

    /// Pure-state decomposition analysis for (|0,N> + |N-1,1>)/sqrt(2).
    AppendixB {
        #[arg(long, default_value_t = 3)]
        n: usize,
    },
}

/// Result of a command: text for standard output and the exit status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> Outcome {
    match commands::dispatch(cli) {
        Ok(report) => {
            let rendered = output::render(&report, cli.format);
            match &cli.output {
                Some(path) => match std::fs::write(path, &rendered) {
                    Ok(()) => Outcome { stdout: String::new(), stderr: String::new(), code: 0 },
                    Err(e) => failure(cli.format, CliError::Io(format!("cannot write {}: {e}", path.display()))),
                },
                None => Outcome { stdout: rendered, stderr: String::new(), code: 0 },
            }
        }
        Err(e) => failure(cli.format, e),
    }
}

fn failure(format: Format, e: CliError) -> Outcome {
    let code = e.exit_code();
    match format {
        Format::Json => {
            let v = serde_json::json!({"error": {"kind": e.kind(), "message": e.to_string()}});
            Outcome { stdout: output::to_json(&v), stderr: String::new(), code }
        }
        Format::Text => Outcome { stdout: String::new(), stderr: format!("error ({}): {e}\n", e.kind()), code },
    }
}
