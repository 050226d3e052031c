use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, dot, Factorization, Matrix, RankInfo};

/// Rank-decision threshold for complete-pivoting elimination: `1e-10 · ‖M‖₁`.
pub fn rank_tolerance(m: &Matrix) -> f64 {
    1e-10 * m.norm1()
}

/// Decisions closer than this factor to the threshold are flagged.
const MARGIN_FLAG: f64 = 1e3;

/// Normalized nonnegative null vectors of a singular `K` split at `n`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NullPair {
    /// Left null vector, `uᵀK = 0`, 1-norm one.
    pub u: Vec<f64>,
    /// Right null vector, `Kv = 0`, 1-norm one.
    pub v: Vec<f64>,
    pub n: usize,
    /// `u₁ᵀv₁ − u₂ᵀv₂`.
    pub drift: f64,
    pub residual_right: f64,
    pub residual_left: f64,
}

impl NullPair {
    pub fn u1(&self) -> &[f64] {
        &self.u[..self.n]
    }

    pub fn u2(&self) -> &[f64] {
        &self.u[self.n..]
    }

    pub fn v1(&self) -> &[f64] {
        &self.v[..self.n]
    }

    pub fn v2(&self) -> &[f64] {
        &self.v[self.n..]
    }
}

pub fn drift_of(u: &[f64], v: &[f64], n: usize) -> f64 {
    dot(&u[..n], &v[..n]) - dot(&u[n..], &v[n..])
}

/// Left and right null vectors of a singular M-matrix `K` with a
/// one-dimensional kernel, scaled to nonnegative unit 1-norm.
pub fn null_pair(k: &Matrix, n: usize) -> Result<NullPair> {
    if !k.is_square() || n == 0 || n >= k.rows() {
        return Err(Error::ShapeMismatch(format!(
            "null pair of {:?} split at {n}",
            k.shape()
        )));
    }
    let v = unit_kernel_vector(k)?;
    let kt = k.transpose();
    let u = unit_kernel_vector(&kt)?;
    let residual_right = inf_norm(&k.matvec(&v));
    let residual_left = inf_norm(&k.vecmat(&u));
    Ok(NullPair {
        drift: drift_of(&u, &v, n),
        u,
        v,
        n,
        residual_right,
        residual_left,
    })
}

fn inf_norm(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn normalize(x: &mut [f64]) {
    let s: f64 = x.iter().map(|v| v.abs()).sum();
    x.iter_mut().for_each(|v| *v /= s);
}

fn unit_kernel_vector(m: &Matrix) -> Result<Vec<f64>> {
    let basis = linalg::kernel_basis(m, rank_tolerance(m));
    let mut x = match basis.len() {
        0 => return Err(Error::NotSingular),
        1 => basis.into_iter().next().unwrap(),
        dim => return Err(Error::AmbiguousKernel { dim }),
    };
    if x.iter().sum::<f64>() < 0.0 {
        x.iter_mut().for_each(|v| *v = -*v);
    }
    normalize(&mut x);

    // one inverse-iteration pass; M + εI is a nonsingular M-matrix, so its
    // inverse is nonnegative and the refined vector stays nonnegative
    let eps = 1e-8 * m.norm1().max(1.0);
    if let Ok(y) = Factorization::new(&m.add_diag(eps))?.solve_vec(&x) {
        if y.iter().all(|v| v.is_finite()) && y.iter().any(|&v| v != 0.0) {
            x = y;
            if x.iter().sum::<f64>() < 0.0 {
                x.iter_mut().for_each(|v| *v = -*v);
            }
            normalize(&mut x);
        }
    }

    let min = x.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -1e-10 {
        return Err(Error::NotNonnegative {
            what: "null vector",
            min,
        });
    }
    x.iter_mut().for_each(|v| *v = v.max(0.0));
    normalize(&mut x);
    Ok(x)
}

/// Zero-eigenvalue structure of a square matrix.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AssumptionReport {
    /// Exactly one independent eigenvector for a zero eigenvalue of multiplicity ≥ 1.
    pub holds: bool,
    pub geometric_multiplicity: usize,
    /// `r`, from the ranks of successive powers.
    pub algebraic_multiplicity: usize,
    /// Smallest ratio between a rank decision and its threshold.
    pub rank_margin: f64,
    /// Set when `rank_margin` is below 10³.
    pub margin_flag: bool,
}

fn margin(info: &RankInfo, tol: f64) -> f64 {
    let kept = info.smallest_kept().map_or(f64::INFINITY, |p| p / tol);
    let dropped = if info.largest_rejected > 0.0 {
        tol / info.largest_rejected
    } else {
        f64::INFINITY
    };
    kept.min(dropped)
}

/// Geometric multiplicity from `rank(H)`; algebraic multiplicity from the
/// ranks of `H, H², …`, stopping when the rank stops decreasing.
pub fn zero_eigen_structure(h: &Matrix) -> Result<AssumptionReport> {
    if !h.is_square() {
        return Err(Error::ShapeMismatch(format!(
            "eigenstructure of non-square {:?}",
            h.shape()
        )));
    }
    let dim = h.rows();
    let tol = rank_tolerance(h);
    let info = linalg::rank_info(h, tol);
    let mut rank_margin = margin(&info, tol);
    let geometric = dim - info.rank;

    let mut prev = dim;
    let mut cur = info.rank;
    let mut power = h.clone();
    while cur < prev && cur > 0 {
        prev = cur;
        power = &power * h;
        let tol = rank_tolerance(&power);
        let info = linalg::rank_info(&power, tol);
        rank_margin = rank_margin.min(margin(&info, tol));
        cur = info.rank;
    }
    let algebraic = dim - cur;
    Ok(AssumptionReport {
        holds: geometric == 1 && algebraic >= 1,
        geometric_multiplicity: geometric,
        algebraic_multiplicity: algebraic,
        rank_margin,
        margin_flag: rank_margin < MARGIN_FLAG,
    })
}
