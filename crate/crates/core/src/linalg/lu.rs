use super::{Matrix, EPS};
use crate::error::{Error, Result};

/// Singularity threshold for pivots: `dim · ε · ‖M‖₁`.
pub fn pivot_tolerance(m: &Matrix) -> f64 {
    m.rows() as f64 * EPS * m.norm1()
}

/// LU factorization with partial (row) pivoting, `P·M = L·U`.
///
/// Elimination runs to completion even through zero pivots, so the smallest
/// pivot is always available as a singularity measure.
#[derive(Clone, Debug)]
pub struct Factorization {
    lu: Matrix,
    perm: Vec<usize>,
    min_pivot: f64,
    tol: f64,
}

impl Factorization {
    pub fn new(m: &Matrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::ShapeMismatch(format!(
                "LU of non-square {:?}",
                m.shape()
            )));
        }
        let n = m.rows();
        let tol = pivot_tolerance(m);
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut min_pivot = f64::INFINITY;

        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[(i, k)].abs()))
                .fold(
                    (k, -1.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
            if p != k {
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = t;
                }
                perm.swap(k, p);
            }
            min_pivot = min_pivot.min(pmax);
            let pivot = lu[(k, k)];
            if pivot == 0.0 {
                continue;
            }
            for i in k + 1..n {
                let l = lu[(i, k)] / pivot;
                lu[(i, k)] = l;
                if l != 0.0 {
                    for j in k + 1..n {
                        lu[(i, j)] -= l * lu[(k, j)];
                    }
                }
            }
        }
        Ok(Factorization {
            lu,
            perm,
            min_pivot,
            tol,
        })
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    /// Row permutation: row `i` of `P·M` is row `perm[i]` of `M`.
    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn min_pivot(&self) -> f64 {
        self.min_pivot
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn is_singular(&self) -> bool {
        self.min_pivot <= self.tol
    }

    pub fn lower(&self) -> Matrix {
        let n = self.dim();
        Matrix::from_fn(n, n, |i, j| match i.cmp(&j) {
            std::cmp::Ordering::Greater => self.lu[(i, j)],
            std::cmp::Ordering::Equal => 1.0,
            std::cmp::Ordering::Less => 0.0,
        })
    }

    pub fn upper(&self) -> Matrix {
        let n = self.dim();
        Matrix::from_fn(n, n, |i, j| if i <= j { self.lu[(i, j)] } else { 0.0 })
    }

    pub fn solve(&self, rhs: &Matrix) -> Result<Matrix> {
        let n = self.dim();
        if rhs.rows() != n {
            return Err(Error::ShapeMismatch(format!(
                "rhs has {} rows, system has {n}",
                rhs.rows()
            )));
        }
        if self.is_singular() {
            return Err(Error::SingularMatrix {
                min_pivot: self.min_pivot,
                tol: self.tol,
            });
        }
        let mut x = Matrix::from_fn(n, rhs.cols(), |i, j| rhs[(self.perm[i], j)]);
        for c in 0..rhs.cols() {
            for i in 0..n {
                let mut s = x[(i, c)];
                for k in 0..i {
                    s -= self.lu[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = s;
            }
            for i in (0..n).rev() {
                let mut s = x[(i, c)];
                for k in i + 1..n {
                    s -= self.lu[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = s / self.lu[(i, i)];
            }
        }
        Ok(x)
    }

    pub fn solve_vec(&self, b: &[f64]) -> Result<Vec<f64>> {
        Ok(self.solve(&Matrix::column(b))?.as_slice().to_vec())
    }
}

/// Solves `M·X = RHS`.
pub fn solve_linear(m: &Matrix, rhs: &Matrix) -> Result<Matrix> {
    Factorization::new(m)?.solve(rhs)
}

/// Solves `X·M = LHS`, i.e. returns `LHS·M⁻¹`.
pub fn solve_right(lhs: &Matrix, m: &Matrix) -> Result<Matrix> {
    Ok(solve_linear(&m.transpose(), &lhs.transpose())?.transpose())
}

pub fn inverse(m: &Matrix) -> Result<Matrix> {
    solve_linear(m, &Matrix::identity(m.rows()))
}
