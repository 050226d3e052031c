use thiserror::Error;

use crate::linalg::Matrix;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is singular to tolerance (smallest pivot {min_pivot:e}, tolerance {tol:e})")]
    SingularMatrix { min_pivot: f64, tol: f64 },
    #[error("iteration did not converge after {iterations} steps")]
    NoConvergence { iterations: usize },
    #[error("matrix is nonsingular to tolerance")]
    NotSingular,
    #[error("kernel dimension is {dim}, expected 1")]
    AmbiguousKernel { dim: usize },
    #[error("{what} has a negative entry {min:e} beyond tolerance")]
    NotNonnegative { what: &'static str, min: f64 },
    #[error("K is not a Z-matrix: {0}")]
    NotZMatrix(String),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("max diagonal of {which} is {value}, must be positive")]
    NonpositiveDiagonal { which: &'static str, value: f64 },
    #[error("doubling breakdown at step {step}: {reason}")]
    IterationBreakdown { step: usize, reason: String },
    #[error("no convergence after {iterations} iterations")]
    MaxIterations {
        iterations: usize,
        best_phi: Box<Matrix>,
        best_psi: Box<Matrix>,
    },
    #[error("insufficient trace: {usable} usable points")]
    InsufficientTrace { usable: usize },
    #[error("generation failed after {attempts} attempts: {reason}")]
    GenerationFailed { attempts: usize, reason: String },
    #[error("invalid input: {0}")]
    Parse(String),
}
