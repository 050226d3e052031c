//! Monotone fixed-point iteration from `X₀ = 0`: each step solves
//! `A·Xₖ₊₁ + Xₖ₊₁·D = Xₖ·C·Xₖ + B`.
//!
//! The iterates increase entrywise and stay below every nonnegative
//! solution, so their limit is the minimal one. Slow, but obviously correct.

use serde::Serialize;

use crate::error::Result;
use crate::linalg::{Matrix, SylvesterSolver};
use crate::problem::{residual_primal, MareProblem};

pub const DEFAULT_ORACLE_TOL: f64 = 1e-10;
pub const DEFAULT_ORACLE_MAX_ITER: usize = 20_000;

#[derive(Clone, Debug, Serialize)]
pub struct OracleReport {
    pub phi: Matrix,
    pub iterations: usize,
    pub converged: bool,
    pub final_residual: f64,
    /// Entries where some `Xₖ₊₁` fell below `Xₖ` by more than the sign tolerance.
    pub monotonicity_violations: usize,
}

/// Runs until `residual_primal(Xₖ) ≤ tol` or `max_iter` steps.
///
/// Running out of steps is not an error: the report carries the last
/// iterate with `converged = false`.
pub fn fixed_point_solve(p: &MareProblem, tol: f64, max_iter: usize) -> Result<OracleReport> {
    let sylvester = SylvesterSolver::new(p.a(), p.d())?;
    let tau = p.sign_tolerance();
    let mut x = Matrix::zeros(p.m(), p.n());
    let mut residual = residual_primal(p, &x)?;
    let mut iterations = 0;
    let mut monotonicity_violations = 0;
    while residual > tol && iterations < max_iter {
        let rhs = &(&(&x * p.c()) * &x) + p.b();
        let next = sylvester.solve(&rhs)?;
        monotonicity_violations += (&next - &x).count_where(|v| v < -tau);
        x = next;
        iterations += 1;
        residual = residual_primal(p, &x)?;
    }
    Ok(OracleReport {
        phi: x,
        iterations,
        converged: residual <= tol,
        final_residual: residual,
        monotonicity_violations,
    })
}

/// `Ψ` as the oracle limit of the dual problem.
pub fn fixed_point_solve_dual(p: &MareProblem, tol: f64, max_iter: usize) -> Result<OracleReport> {
    fixed_point_solve(&p.dual(), tol, max_iter)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn scalar_root() {
        let p = MareProblem::scalar(2.0, 1.0, 1.0, 1.0).unwrap();
        let r = fixed_point_solve(&p, 1e-12, 1000).unwrap();
        assert!(r.converged);
        assert!((r.phi[(0, 0)] - (3.0 - 5f64.sqrt()) / 2.0).abs() < 1e-11);
        assert_eq!(r.monotonicity_violations, 0);
    }

    #[test]
    fn zero_b_is_fixed_at_first_step() {
        let p = MareProblem::new(
            None,
            Matrix::from_rows(&[[1.0, -1.0], [-1.0, 1.0]]).unwrap(),
            Matrix::zeros(2, 1),
            Matrix::from_rows(&[[1.0, 1.0]]).unwrap(),
            Matrix::from_rows(&[[2.0]]).unwrap(),
        )
        .unwrap();
        let r = fixed_point_solve(&p, 1e-12, 10).unwrap();
        assert!(r.converged && r.iterations <= 1);
        assert_eq!(r.phi, Matrix::zeros(2, 1));

        let d = fixed_point_solve_dual(&p, 1e-12, 1000).unwrap();
        assert!(d.converged);
        assert!((d.phi[(0, 0)] - 0.5).abs() < 1e-11 && (d.phi[(0, 1)] - 0.5).abs() < 1e-11);
    }

    #[test]
    fn critical_scalar_is_slow_and_increasing() {
        let p = MareProblem::scalar(1.0, 1.0, 1.0, 1.0).unwrap();
        let r = fixed_point_solve(&p, 1e-12, 200).unwrap();
        assert!(!r.converged);
        assert_eq!(r.iterations, 200);
        // x ↦ (x² + 1)/2 increases to 1 from below
        let mut x = 0.0;
        for _ in 0..200 {
            x = (x * x + 1.0) / 2.0;
        }
        assert!(r.phi[(0, 0)] < 1.0);
        assert!((r.phi[(0, 0)] - x).abs() < 1e-14);
        assert_eq!(r.monotonicity_violations, 0);
    }

    #[test]
    fn singular_sylvester_step() {
        // A = D = 0 makes the Sylvester operator vanish
        let p = MareProblem::scalar(0.0, 1.0, 0.0, 0.0).unwrap();
        assert!(matches!(
            fixed_point_solve(&p, 1e-12, 10),
            Err(Error::SingularMatrix { .. })
        ));
    }
}
