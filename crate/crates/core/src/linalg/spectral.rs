use super::eig::{eigenvalues, MAX_EIG_DIM};
use super::graph::strongly_connected_components;
use super::Matrix;
use crate::error::{Error, Result};

const MAX_ITER: usize = 10_000;
const ACCEPT_TOL: f64 = 1e-10;

/// Perron root of an entrywise nonnegative square matrix.
///
/// The matrix is split into strongly connected components; the spectral
/// radius is the largest Perron root over the irreducible diagonal blocks.
/// The Perron root of a block is a real eigenvalue that bounds every real
/// part, so for blocks up to the eigenvalue-routine limit it is read off as
/// the largest real part of the spectrum. Larger blocks (or a failed QR
/// sweep) use power iteration on `P + c·I` with `c = 1 + max diag(P)`,
/// where the shift makes the Perron root the unique dominant eigenvalue.
/// Power iteration stops once the 1-norm growth estimate stagnates at
/// round-off level; if the cap is hit the estimate is still accepted when
/// successive values agree to `1e-10`.
pub fn spectral_radius_nonneg(p: &Matrix) -> Result<f64> {
    if !p.is_square() {
        return Err(Error::ShapeMismatch(format!(
            "spectral radius of non-square {:?}",
            p.shape()
        )));
    }
    let min = p.min_entry();
    if min < 0.0 {
        return Err(Error::NotNonnegative { what: "P", min });
    }
    let mut rho: f64 = 0.0;
    for comp in strongly_connected_components(p) {
        let block_rho = if comp.len() == 1 {
            p[(comp[0], comp[0])]
        } else {
            let block = Matrix::from_fn(comp.len(), comp.len(), |i, j| p[(comp[i], comp[j])]);
            irreducible_perron_root(&block)?
        };
        rho = rho.max(block_rho);
    }
    Ok(rho)
}

fn irreducible_perron_root(p: &Matrix) -> Result<f64> {
    if p.rows() <= MAX_EIG_DIM {
        if let Ok(ev) = eigenvalues(p) {
            return Ok(ev.iter().map(|&(re, _)| re).fold(0.0, f64::max));
        }
    }
    perron_power_iteration(p)
}

fn perron_power_iteration(p: &Matrix) -> Result<f64> {
    let n = p.rows();
    let c = 1.0 + p.max_diag();
    let mut x = vec![1.0 / n as f64; n];
    let mut est = f64::NAN;
    let mut last_diff = f64::INFINITY;

    for _ in 0..MAX_ITER {
        let mut y = p.matvec(&x);
        for (yi, xi) in y.iter_mut().zip(&x) {
            *yi += c * xi;
        }
        let s: f64 = y.iter().sum();
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / s;
        }
        last_diff = (s - est).abs();
        est = s;
        if last_diff <= 4.0 * f64::EPSILON * s {
            return Ok((est - c).max(0.0));
        }
    }
    if last_diff <= ACCEPT_TOL {
        Ok((est - c).max(0.0))
    } else {
        Err(Error::NoConvergence {
            iterations: MAX_ITER,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identity_and_permutation() {
        assert!((spectral_radius_nonneg(&Matrix::identity(2)).unwrap() - 1.0).abs() < 1e-12);
        let swap = Matrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        assert!((spectral_radius_nonneg(&swap).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rank_one_outer_product() {
        // v wᵀ has ρ = wᵀv = 3 + 2
        let p = Matrix::from_rows(&[[3.0, 1.0], [6.0, 2.0]]).unwrap();
        assert!((spectral_radius_nonneg(&p).unwrap() - 5.0).abs() < 1e-10);
    }

    #[test]
    fn power_fallback_agrees() {
        let p = Matrix::from_rows(&[[0.5, 1.0, 0.0], [0.0, 0.2, 2.0], [0.3, 0.0, 0.1]]).unwrap();
        let a = perron_power_iteration(&p).unwrap();
        let b = irreducible_perron_root(&p).unwrap();
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }

    #[test]
    fn zero_and_nilpotent() {
        assert_eq!(spectral_radius_nonneg(&Matrix::zeros(3, 3)).unwrap(), 0.0);
        let nil = Matrix::from_rows(&[[0.0, 2.0], [0.0, 0.0]]).unwrap();
        assert!(spectral_radius_nonneg(&nil).unwrap() < 1e-8);
    }

    #[test]
    fn rejects_negative_entries() {
        let p = Matrix::from_rows(&[[0.0, -1.0], [1.0, 0.0]]).unwrap();
        assert!(matches!(
            spectral_radius_nonneg(&p),
            Err(Error::NotNonnegative { .. })
        ));
    }

    /// Largest real root of the characteristic polynomial, for n ≤ 3.
    fn char_poly_root(p: &Matrix) -> f64 {
        match p.rows() {
            1 => p[(0, 0)],
            2 => {
                let tr = p[(0, 0)] + p[(1, 1)];
                let det = p[(0, 0)] * p[(1, 1)] - p[(0, 1)] * p[(1, 0)];
                0.5 * (tr + (tr * tr - 4.0 * det).max(0.0).sqrt())
            }
            3 => {
                // λ³ - c2 λ² + c1 λ - c0, Perron root is the largest real root;
                // scan down from above the largest root, then bisect
                let a = |i, j| p[(i, j)];
                let c2 = a(0, 0) + a(1, 1) + a(2, 2);
                let c1 = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0) + a(0, 0) * a(2, 2)
                    - a(0, 2) * a(2, 0)
                    + a(1, 1) * a(2, 2)
                    - a(1, 2) * a(2, 1);
                let c0 = a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1))
                    - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
                    + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
                let f = |l: f64| ((l - c2) * l + c1) * l - c0;
                let mut hi = p.norm_inf() + 1.0;
                // scan down for the largest sign change
                let steps = 20_000;
                let mut lo = hi;
                for s in 1..=steps {
                    let l = hi - (hi + 1.0) * s as f64 / steps as f64;
                    if f(l) <= 0.0 {
                        lo = l;
                        break;
                    }
                    hi = l;
                }
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if f(mid) <= 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            }
            _ => unreachable!(),
        }
    }

    proptest! {
        #[test]
        fn perron_frobenius_bracket(n in 1usize..=20, seed in proptest::collection::vec(0.0f64..1.0, 400),
                                    mask in proptest::collection::vec(0.0f64..1.0, 400)) {
            let p = Matrix::from_fn(n, n, |i, j| if mask[i * n + j] < 0.5 { seed[i * n + j] } else { 0.0 });
            let rho = spectral_radius_nonneg(&p).unwrap();
            let sums: Vec<f64> = (0..n).map(|i| p.row(i).iter().sum()).collect();
            let lo = sums.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = sums.iter().copied().fold(0.0, f64::max);
            prop_assert!(rho >= lo - 1e-8 && rho <= hi + 1e-8, "rho {rho} not in [{lo}, {hi}]");
        }

        #[test]
        fn agrees_with_characteristic_polynomial(n in 1usize..=3, seed in proptest::collection::vec(0.0f64..2.0, 9)) {
            let p = Matrix::from_fn(n, n, |i, j| seed[i * n + j]);
            let rho = spectral_radius_nonneg(&p).unwrap();
            prop_assert!((rho - char_poly_root(&p)).abs() < 1e-8);
        }
    }
}
