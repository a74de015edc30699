//! Command-line front end. Reports are JSON on stdout; exit code 0 when all
//! gates pass, 1 when a gate fails or a computation aborts, 2 on invalid
//! input.

pub mod commands;
pub mod config;
pub mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::error::Error;

pub use config::{CommonArgs, RunConfig};
pub use report::{Gate, Report};

#[derive(Debug, Clone, PartialEq)]
pub enum Failure {
    /// Bad config, flags or parameters (exit 2).
    Invalid(String),
    /// A computation aborted (exit 1).
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParams(_)
            | Error::UnknownSystem(_)
            | Error::NoGSolution(_)
            | Error::DimensionMismatch { .. } => Failure::Invalid(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "extkit",
    version,
    about = "Extended Hamiltonians and their characteristic first integrals"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the catalog.
    List,
    /// Print one entry with its resolved parameters and solutions.
    Show {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Residual of the extension equation at sampled points.
    CheckPde {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Residual of the first-order factorization `X_L G = ±√(−2(cL + c₀)) G`.
    CheckKn {
        #[command(flatten)]
        common: CommonArgs,
        /// Sign of the root.
        #[arg(long, allow_negative_numbers = true, default_value_t = -1.0)]
        sign: f64,
    },
    /// Values of `H`, `L` and `K` at a state, with bracket spot checks.
    Extend {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Integrate the extended (or base) flow and report conservation drifts.
    Integrate {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum)]
        method: Option<config::MethodName>,
        #[arg(long)]
        dt: Option<f64>,
        /// Local error tolerance of the adaptive method.
        #[arg(long = "step-tol")]
        step_tol: Option<f64>,
        #[arg(long)]
        t_final: Option<f64>,
        /// Integrate the base flow of `L`.
        #[arg(long)]
        base: bool,
        /// Trajectory CSV output.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Finite-difference `{H, K}` and `{H, L}` over sampled extended states.
    Bracket {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Functional independence rank of a set of fields.
    Rank {
        #[command(flatten)]
        common: CommonArgs,
        /// Fields: H, K, K_re, K_im, L, u, p_u, coordinates, observables.
        #[arg(long, value_delimiter = ',')]
        fields: Option<Vec<String>>,
        /// Expected rank (default: number of fields).
        #[arg(long)]
        expect: Option<usize>,
        /// Relative singular-value threshold.
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Compare the recursive and closed forms of `G_n`.
    GnCompare {
        #[arg(long, default_value_t = 8)]
        n_max: u32,
        /// Number of real triples; a quarter as many complex ones are added.
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match commands::dispatch(cli.command) {
        Ok(code) => code,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            1
        }
    }
}
