use super::{Factorization, Matrix};
use crate::error::{Error, Result};

/// Largest number of unknowns `m·n` accepted by the Kronecker expansion.
pub const MAX_SYLVESTER_UNKNOWNS: usize = 2500;

/// Solver for `A·X + X·D = Q` with fixed coefficients, factored once.
///
/// With column-major `vec`, the system is `(I_n ⊗ A + Dᵀ ⊗ I_m)·vec(X) = vec(Q)`.
#[derive(Clone, Debug)]
pub struct SylvesterSolver {
    m: usize,
    n: usize,
    lu: Factorization,
}

impl SylvesterSolver {
    pub fn new(a: &Matrix, d: &Matrix) -> Result<Self> {
        if !a.is_square() || !d.is_square() {
            return Err(Error::ShapeMismatch(
                "Sylvester coefficients must be square".into(),
            ));
        }
        let (m, n) = (a.rows(), d.rows());
        let size = m * n;
        if size > MAX_SYLVESTER_UNKNOWNS {
            return Err(Error::InvalidParameters(format!(
                "Sylvester system with {size} unknowns exceeds {MAX_SYLVESTER_UNKNOWNS}"
            )));
        }
        let mut kron = Matrix::zeros(size, size);
        for j in 0..n {
            for i in 0..m {
                let row = i + j * m;
                for k in 0..m {
                    kron[(row, k + j * m)] += a[(i, k)];
                }
                for l in 0..n {
                    kron[(row, i + l * m)] += d[(l, j)];
                }
            }
        }
        let lu = Factorization::new(&kron)?;
        if lu.is_singular() {
            return Err(Error::SingularMatrix {
                min_pivot: lu.min_pivot(),
                tol: lu.tolerance(),
            });
        }
        Ok(SylvesterSolver { m, n, lu })
    }

    pub fn solve(&self, q: &Matrix) -> Result<Matrix> {
        if q.shape() != (self.m, self.n) {
            return Err(Error::ShapeMismatch(format!(
                "Sylvester rhs {:?}, expected {:?}",
                q.shape(),
                (self.m, self.n)
            )));
        }
        let mut rhs = vec![0.0; self.m * self.n];
        for j in 0..self.n {
            for i in 0..self.m {
                rhs[i + j * self.m] = q[(i, j)];
            }
        }
        let x = self.lu.solve_vec(&rhs)?;
        Ok(Matrix::from_fn(self.m, self.n, |i, j| x[i + j * self.m]))
    }
}

/// Solves `A·X + X·D = Q` for `X` (m×n).
pub fn sylvester_solve(a: &Matrix, d: &Matrix, q: &Matrix) -> Result<Matrix> {
    SylvesterSolver::new(a, d)?.solve(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_coefficients_halve() {
        let m = Matrix::from_rows(&[[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]]).unwrap();
        let x = sylvester_solve(&Matrix::identity(2), &Matrix::identity(3), &m.scale(2.0)).unwrap();
        assert!((&x - &m).max_abs() < 1e-14);
    }

    #[test]
    fn scalar_case() {
        let x = sylvester_solve(
            &Matrix::from_rows(&[[2.0]]).unwrap(),
            &Matrix::from_rows(&[[3.0]]).unwrap(),
            &Matrix::from_rows(&[[10.0]]).unwrap(),
        )
        .unwrap();
        assert!((x[(0, 0)] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn random_triple_substitutes_back() {
        let a = Matrix::from_rows(&[[4.0, -1.0, 0.5], [0.3, 3.0, -0.2], [-0.7, 0.1, 5.0]]).unwrap();
        let d = Matrix::from_rows(&[[2.0, 0.4, -0.3], [-0.1, 1.5, 0.6], [0.2, -0.5, 3.0]]).unwrap();
        let q = Matrix::from_rows(&[[1.0, -2.0, 0.5], [0.0, 3.0, 1.0], [2.5, -1.0, 4.0]]).unwrap();
        let x = sylvester_solve(&a, &d, &q).unwrap();
        let res = &(&(&a * &x) + &(&x * &d)) - &q;
        assert!(res.norm1() <= 1e-10 * q.norm1());
    }

    #[test]
    fn singular_expansion() {
        // eigenvalues 1 and -1 sum to zero
        let err = sylvester_solve(
            &Matrix::from_rows(&[[1.0]]).unwrap(),
            &Matrix::from_rows(&[[-1.0]]).unwrap(),
            &Matrix::from_rows(&[[1.0]]).unwrap(),
        );
        assert!(matches!(err, Err(Error::SingularMatrix { .. })));
    }
}
