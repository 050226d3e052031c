//! Phase-one simplex for `{x ≥ 0 : A·x = b}` on a dense tableau.

use crate::linalg::Matrix;

const PIVOT_TOL: f64 = 1e-12;

/// Returns a feasible point of `A·x = b, x ≥ 0`, or `None` when the
/// phase-one optimum (sum of artificials) exceeds `feas_tol`.
///
/// Bland's rule is used for both entering and leaving choices, so the
/// method terminates on degenerate problems.
pub fn phase_one(a: &Matrix, b: &[f64], feas_tol: f64) -> Option<Vec<f64>> {
    let (rows, nx) = a.shape();
    assert_eq!(b.len(), rows);
    let cols = nx + rows; // structural + one artificial per row
    let width = cols + 1; // rhs in the last column
    let mut t = vec![0.0; (rows + 1) * width];
    let at = |i: usize, j: usize| i * width + j;

    for i in 0..rows {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..nx {
            t[at(i, j)] = sign * a[(i, j)];
        }
        t[at(i, nx + i)] = 1.0;
        t[at(i, cols)] = sign * b[i];
    }
    // objective row holds reduced costs of `min Σ artificials`, and -objective in rhs
    for j in 0..nx {
        t[at(rows, j)] = -(0..rows).map(|i| t[at(i, j)]).sum::<f64>();
    }
    t[at(rows, cols)] = -(0..rows).map(|i| t[at(i, cols)]).sum::<f64>();
    let mut basis: Vec<usize> = (nx..cols).collect();

    let scale = 1.0 + (0..rows).map(|i| t[at(i, cols)]).fold(0.0, f64::max);
    let max_pivots = 50 * (rows + cols);
    for _ in 0..max_pivots {
        let Some(enter) = (0..cols).find(|&j| t[at(rows, j)] < -PIVOT_TOL * scale) else {
            break;
        };
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..rows {
            let aij = t[at(i, enter)];
            if aij > PIVOT_TOL {
                let ratio = t[at(i, cols)] / aij;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < lr - PIVOT_TOL * scale
                            || (ratio <= lr + PIVOT_TOL * scale && basis[i] < basis[li])
                        {
                            Some((i, ratio))
                        } else {
                            Some((li, lr))
                        }
                    }
                };
            }
        }
        // phase one is bounded below by 0, so an entering column always has a pivot
        let (r, _) = leave?;
        let p = t[at(r, enter)];
        for j in 0..width {
            t[at(r, j)] /= p;
        }
        for i in 0..=rows {
            if i == r {
                continue;
            }
            let f = t[at(i, enter)];
            if f != 0.0 {
                for j in 0..width {
                    t[at(i, j)] -= f * t[at(r, j)];
                }
            }
        }
        basis[r] = enter;
    }

    let infeasibility = -t[at(rows, cols)];
    if infeasibility > feas_tol {
        return None;
    }
    let mut x = vec![0.0; nx];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < nx {
            x[bv] = t[at(i, cols)].max(0.0);
        }
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn feasible_box() {
        // x0 + x1 = 2, x0 - x1 = 0
        let a = Matrix::from_rows(&[[1.0, 1.0], [1.0, -1.0]]).unwrap();
        let x = phase_one(&a, &[2.0, 0.0], 1e-12).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_sign() {
        // -x0 = 1 has no nonnegative solution
        let a = Matrix::from_rows(&[[-1.0]]).unwrap();
        assert!(phase_one(&a, &[1.0], 1e-12).is_none());
    }

    #[test]
    fn negative_rhs_is_flipped() {
        let a = Matrix::from_rows(&[[-1.0, 0.0]]).unwrap();
        let x = phase_one(&a, &[-3.0], 1e-12).unwrap();
        assert!((x[0] - 3.0).abs() < 1e-12);
    }
}
