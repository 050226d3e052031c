//! Structural analysis of Z- and M-matrices.
//!
//! Classification uses the split `M = s·I − B` with `s = max diag(M)`; the
//! sign of `s − ρ(B)` decides singular versus nonsingular. Also here:
//! regularity witnesses (`v > 0`, `M·v ≥ 0`), irreducibility, the left and
//! right null vectors of a singular `K` with their drift, and the
//! zero-eigenvalue structure of the sign-flipped block matrix.

mod kernel;
mod simplex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

pub use kernel::{null_pair, rank_tolerance, zero_eigen_structure, AssumptionReport, NullPair};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MKind {
    NotZ,
    ZNotM,
    SingularM,
    NonsingularM,
}

impl MKind {
    pub fn is_m(self) -> bool {
        matches!(self, MKind::SingularM | MKind::NonsingularM)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MClassification {
    pub kind: MKind,
    /// Shift of the split, `max diag(M)`.
    pub s: f64,
    /// Spectral radius of the nonnegative part (of `max(B, 0)` when `M` is not Z).
    pub rho_b: f64,
    pub gap: f64,
    pub tol: f64,
    /// `s·I − M`, unclamped, so that `s·I − b` reproduces `M` exactly.
    #[serde(skip)]
    pub b: Matrix,
}

/// Classification tolerance: `1e-10 · max(1, ‖M‖₁)`.
pub fn class_tolerance(m: &Matrix) -> f64 {
    1e-10 * m.norm1().max(1.0)
}

/// Classifies a square matrix as not-Z, Z but not M, singular M or nonsingular M.
pub fn classify_zm(m: &Matrix) -> Result<MClassification> {
    if !m.is_square() {
        return Err(Error::ShapeMismatch(format!(
            "classification of non-square {:?}",
            m.shape()
        )));
    }
    let tol = class_tolerance(m);
    let n = m.rows();
    let s = m.max_diag();
    let b = Matrix::from_fn(n, n, |i, j| if i == j { s - m[(i, i)] } else { -m[(i, j)] });
    // positive off-diagonal round-off up to `tol` is still read as Z
    let is_z = (0..n).all(|i| (0..n).all(|j| i == j || m[(i, j)] <= tol));
    let rho_b = linalg::spectral_radius_nonneg(&b.map(|x| x.max(0.0)))?;
    let gap = s - rho_b;
    let kind = if !is_z {
        MKind::NotZ
    } else if gap > tol {
        MKind::NonsingularM
    } else if gap >= -tol {
        MKind::SingularM
    } else {
        MKind::ZNotM
    };
    Ok(MClassification {
        kind,
        s,
        rho_b,
        gap,
        tol,
        b,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RegularityReport {
    pub regular: bool,
    pub witness: Option<Vec<f64>>,
}

/// Looks for `v > 0` with `M·v ≥ 0`.
///
/// Nonsingular M-matrices use `v = M⁻¹𝟙`. Singular ones go through a
/// phase-one simplex on `{v ≥ 𝟙, M·v ≥ 0}` (any positive witness can be
/// scaled into that set).
pub fn regularity_witness(m: &Matrix, class: &MClassification) -> Result<RegularityReport> {
    let not_regular = RegularityReport {
        regular: false,
        witness: None,
    };
    let n = m.rows();
    let witness = match class.kind {
        MKind::NotZ | MKind::ZNotM => return Ok(not_regular),
        MKind::NonsingularM => {
            match linalg::Factorization::new(m)?.solve_vec(&vec![1.0; n]) {
                Ok(v) => v,
                // numerically singular despite the positive gap: fall back to the LP
                Err(Error::SingularMatrix { .. }) => match lp_witness(m) {
                    Some(v) => v,
                    None => return Ok(not_regular),
                },
                Err(e) => return Err(e),
            }
        }
        MKind::SingularM => match lp_witness(m) {
            Some(v) => v,
            None => return Ok(not_regular),
        },
    };
    let mv = m.matvec(&witness);
    let ok = witness.iter().all(|&x| x > 0.0) && mv.iter().all(|&x| x >= -class.tol);
    Ok(if ok {
        RegularityReport {
            regular: true,
            witness: Some(witness),
        }
    } else {
        not_regular
    })
}

fn lp_witness(m: &Matrix) -> Option<Vec<f64>> {
    // v = 𝟙 + w with w ≥ 0 and slack t ≥ 0:  M·w − t = −M·𝟙
    let n = m.rows();
    let a = Matrix::from_fn(n, 2 * n, |i, j| {
        if j < n {
            m[(i, j)]
        } else if j - n == i {
            -1.0
        } else {
            0.0
        }
    });
    let b: Vec<f64> = m.matvec(&vec![1.0; n]).into_iter().map(|x| -x).collect();
    let feas_tol = 1e-10 * (1.0 + b.iter().map(|x| x.abs()).sum::<f64>());
    let x = simplex::phase_one(&a, &b, feas_tol)?;
    Some(x[..n].iter().map(|w| 1.0 + w).collect())
}

/// True iff the digraph of off-diagonal nonzeros is strongly connected.
/// A 1×1 matrix is irreducible.
pub fn is_irreducible(m: &Matrix) -> bool {
    m.rows() <= 1 || linalg::strongly_connected_components(m).len() == 1
}
