use super::Matrix;

/// Outcome of a completely pivoted elimination.
#[derive(Clone, Debug, PartialEq)]
pub struct RankInfo {
    pub rank: usize,
    /// Pivot magnitudes accepted, in elimination order (nonincreasing up to round-off).
    pub pivots: Vec<f64>,
    /// Largest remaining entry when elimination stopped; 0 when full rank.
    pub largest_rejected: f64,
}

impl RankInfo {
    pub fn smallest_kept(&self) -> Option<f64> {
        self.pivots.last().copied()
    }
}

struct Elimination {
    info: RankInfo,
    /// Row-echelon factor, rows `0..rank` meaningful, columns permuted by `colperm`.
    upper: Matrix,
    colperm: Vec<usize>,
}

fn eliminate(m: &Matrix, tol: f64) -> Elimination {
    let (nr, nc) = m.shape();
    let mut a = m.clone();
    let mut colperm: Vec<usize> = (0..nc).collect();
    let mut pivots = Vec::new();
    let mut largest_rejected = 0.0;

    for k in 0..nr.min(nc) {
        let (mut pi, mut pj, mut best) = (k, k, -1.0);
        for i in k..nr {
            for j in k..nc {
                let v = a[(i, j)].abs();
                if v > best {
                    (pi, pj, best) = (i, j, v);
                }
            }
        }
        if best <= tol {
            largest_rejected = best;
            break;
        }
        if pi != k {
            for j in 0..nc {
                let t = a[(k, j)];
                a[(k, j)] = a[(pi, j)];
                a[(pi, j)] = t;
            }
        }
        if pj != k {
            for i in 0..nr {
                let t = a[(i, k)];
                a[(i, k)] = a[(i, pj)];
                a[(i, pj)] = t;
            }
            colperm.swap(k, pj);
        }
        pivots.push(best);
        let p = a[(k, k)];
        for i in k + 1..nr {
            let l = a[(i, k)] / p;
            a[(i, k)] = 0.0;
            if l != 0.0 {
                for j in k + 1..nc {
                    a[(i, j)] -= l * a[(k, j)];
                }
            }
        }
    }
    Elimination {
        info: RankInfo {
            rank: pivots.len(),
            pivots,
            largest_rejected,
        },
        upper: a,
        colperm,
    }
}

/// Number of pivots exceeding `tol` in a completely pivoted elimination.
pub fn numerical_rank(m: &Matrix, tol: f64) -> usize {
    eliminate(m, tol).info.rank
}

pub fn rank_info(m: &Matrix, tol: f64) -> RankInfo {
    eliminate(m, tol).info
}

/// Basis of the numerical kernel, one vector per column beyond the rank.
pub fn kernel_basis(m: &Matrix, tol: f64) -> Vec<Vec<f64>> {
    let nc = m.cols();
    let Elimination {
        info,
        upper,
        colperm,
    } = eliminate(m, tol);
    let r = info.rank;
    (r..nc)
        .map(|free| {
            // permuted coordinates: y[free] = 1, other free vars 0
            let mut y = vec![0.0; nc];
            y[free] = 1.0;
            for i in (0..r).rev() {
                let mut s = upper[(i, free)];
                for k in i + 1..r {
                    s += upper[(i, k)] * y[k];
                }
                y[i] = -s / upper[(i, i)];
            }
            let mut x = vec![0.0; nc];
            for (k, &c) in colperm.iter().enumerate() {
                x[c] = y[k];
            }
            x
        })
        .collect()
}
