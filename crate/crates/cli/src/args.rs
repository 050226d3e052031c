use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use mare_core::oracle::{DEFAULT_ORACLE_MAX_ITER, DEFAULT_ORACLE_TOL};
use mare_core::problem::{Regime, DEFAULT_CERT_TOL};

#[derive(Debug, Parser)]
#[command(
    name = "mare",
    version,
    about = "Solve and certify M-matrix algebraic Riccati equations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify K and report the regime, drift and multiplicity r.
    Classify { problem: PathBuf },
    /// Compute the minimal nonnegative solutions Φ and Ψ.
    Solve {
        problem: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Adda)]
        method: Method,
        #[arg(long, requires = "beta")]
        alpha: Option<f64>,
        #[arg(long, requires = "alpha")]
        beta: Option<f64>,
        /// Stopping tolerance (doubling) or residual target (fixed-point).
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long = "max-iter")]
        max_iter: Option<usize>,
        /// Write the per-step diagnostics as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Certify a candidate pair (Φ, Ψ).
    Verify {
        problem: PathBuf,
        #[arg(long)]
        phi: PathBuf,
        #[arg(long)]
        psi: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CERT_TOL)]
        tol: f64,
    },
    /// Run the monotone fixed-point iteration on the primal and dual equations.
    Oracle {
        problem: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ORACLE_TOL)]
        tol: f64,
        #[arg(long = "max-iter", default_value_t = DEFAULT_ORACLE_MAX_ITER)]
        max_iter: usize,
    },
    /// Draw a seeded random problem from the requested regime.
    Generate {
        #[arg(long, value_enum)]
        regime: RegimeArg,
        #[arg(long = "n")]
        n: usize,
        #[arg(long = "m")]
        m: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
    },
    /// Compare rates over an (α, β) grid starting at the optimal pair.
    RateStudy {
        problem: PathBuf,
        /// Steps per axis; α runs over α*·(1 + i/G) for i = 0..=G.
        #[arg(long, default_value_t = 4)]
        grid: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Adda,
    Sda,
    FixedPoint,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Adda => "adda",
            Method::Sda => "sda",
            Method::FixedPoint => "fixed-point",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RegimeArg {
    Nonsingular,
    SingularNoncritical,
    Critical,
}

impl From<RegimeArg> for Regime {
    fn from(r: RegimeArg) -> Regime {
        match r {
            RegimeArg::Nonsingular => Regime::NonsingularK,
            RegimeArg::SingularNoncritical => Regime::SingularNoncritical,
            RegimeArg::Critical => Regime::Critical,
        }
    }
}
