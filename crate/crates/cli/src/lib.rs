//! Command-line front end for `liecompat`.
//!
//! Every subcommand produces a [`report::RunReport`]; the binary prints it as
//! a table and optionally writes it as JSON. Exit codes: 0 ok, 1 a check
//! failed, 2 bad input, 3 no metric found.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use liecompat::search::SignatureConstraint;
use liecompat::sweep::SweepCheck;

pub mod commands;
pub mod report;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NOT_FOUND: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ScalarMode {
    Rational,
    Float,
}

impl ScalarMode {
    pub fn name(self) -> &'static str {
        match self {
            ScalarMode::Rational => "rational",
            ScalarMode::Float => "float",
        }
    }
}

/// Compatible pseudo-metrics on Lie algebras and their Lie-Poisson duals.
#[derive(Debug, Parser)]
#[command(name = "liecompat", version)]
pub struct Cli {
    /// Arithmetic for checks: exact rationals or f64.
    #[arg(long, global = true, value_enum, default_value_t = ScalarMode::Rational)]
    pub scalar: ScalarMode,

    /// Tolerance for float residuals.
    #[arg(long, global = true, default_value_t = liecompat::DEFAULT_TOL)]
    pub tol: f64,

    /// Seed for sampled points and search restarts.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Write the run report as JSON (`-` for stdout).
    #[arg(long, global = true, value_name = "PATH")]
    pub json: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

/// Algebra arguments are file paths or `catalog:<name>`.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check antisymmetry and the Jacobi identity.
    Validate { algebra: String },

    /// Run every compatibility check for an algebra and a metric.
    Check {
        algebra: String,
        metric: String,
        /// Number of sampled dual points.
        #[arg(long, default_value_t = 20)]
        points: usize,
    },

    /// Search for a compatible metric and write it to a file.
    Search {
        algebra: String,
        /// `any`, `riemann` or `p,q`.
        #[arg(long, default_value = "any")]
        signature: SignatureConstraint,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
        #[arg(long, default_value_t = 500)]
        max_iters: usize,
        /// Output path; defaults to `<stem>.metric.json`.
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Compare search outcomes with the classification in dimensions 2 and 3.
    Classify {
        #[arg(long, value_parser = clap::value_parser!(u8).range(2..=3))]
        dim: Option<u8>,
        /// Sampled members of the three-dimensional family.
        #[arg(long, default_value_t = 40)]
        samples: usize,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
    },

    /// Evaluate pointwise checks on sampled dual points.
    DualSweep {
        algebra: String,
        metric: String,
        /// JSON file holding an array of points.
        #[arg(long)]
        points: Option<PathBuf>,
        /// Number of random points when `--points` is absent.
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long, value_delimiter = ',', default_values_t = SweepCheck::ALL)]
        checks: Vec<SweepCheck>,
        /// Output path for the records; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

impl Command {
    /// Whether the command writes its main output to stdout.
    pub fn uses_stdout(&self) -> bool {
        matches!(self, Command::DualSweep { out: None, .. })
    }
}
