//! Seeded random problems with a requested regime.
//!
//! Singular coefficient matrices are built as `K = diag(s) − N` with
//! `sᵢ = (N·v)ᵢ / vᵢ` for a random positive `v`, so `K·v = 0` by
//! construction. `N` follows a block-upper-triangular mask (one diagonal
//! block gives an irreducible `K`), and the regime is confirmed by the
//! classifier; draws that land elsewhere are rejected and redrawn.
//!
//! The random stream is ChaCha8 seeded with `seed_from_u64(seed)`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::problem::{classify_problem, MareProblem, Regime};

pub const MAX_ATTEMPTS: usize = 100;

/// Smallest `|drift|` accepted for noncritical singular problems.
pub const DRIFT_MARGIN: f64 = 1e-2;

const MAX_BLOCKS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub regime_target: Regime,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    /// Probability of each optional off-diagonal entry, in `(0, 1]`.
    pub density: f64,
}

impl FamilySpec {
    pub fn new(regime_target: Regime, n: usize, m: usize, seed: u64) -> Self {
        FamilySpec {
            regime_target,
            n,
            m,
            seed,
            density: 0.5,
        }
    }

    pub fn with_density(self, density: f64) -> Self {
        FamilySpec { density, ..self }
    }
}

pub fn generate(spec: &FamilySpec) -> Result<MareProblem> {
    if spec.n == 0 || spec.m == 0 {
        return Err(Error::InvalidParameters("n and m must be positive".into()));
    }
    if !(spec.density > 0.0 && spec.density <= 1.0) {
        return Err(Error::InvalidParameters(format!(
            "density {} outside (0, 1]",
            spec.density
        )));
    }
    if !matches!(
        spec.regime_target,
        Regime::NonsingularK | Regime::SingularNoncritical | Regime::Critical
    ) {
        return Err(Error::InvalidParameters(format!(
            "cannot target regime {:?}",
            spec.regime_target
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut reason = String::new();
    for _ in 0..MAX_ATTEMPTS {
        let k = match spec.regime_target {
            Regime::Critical => symmetric_singular(spec, &mut rng),
            Regime::NonsingularK => {
                let k = triangular_singular(spec, &mut rng);
                let shift: Vec<f64> = (0..k.rows()).map(|_| rng.gen_range(0.1..1.0)).collect();
                &k + &Matrix::from_diag(&shift)
            }
            _ => triangular_singular(spec, &mut rng),
        };
        match accept(spec, &k) {
            Ok(p) => {
                return Ok(p.with_name(format!(
                    "{:?} n={} m={} seed={}",
                    spec.regime_target, spec.n, spec.m, spec.seed
                )))
            }
            Err(why) => reason = why,
        }
    }
    Err(Error::GenerationFailed {
        attempts: MAX_ATTEMPTS,
        reason,
    })
}

fn accept(spec: &FamilySpec, k: &Matrix) -> std::result::Result<MareProblem, String> {
    let (n, m) = (spec.n, spec.m);
    let d = k.submatrix(0, 0, n, n);
    let c = k.submatrix(0, n, n, m).scale(-1.0).map(|x| x + 0.0);
    let b = k.submatrix(n, 0, m, n).scale(-1.0).map(|x| x + 0.0);
    let a = k.submatrix(n, n, m, m);
    if !(a.max_diag() > 0.0 && d.max_diag() > 0.0) {
        return Err("nonpositive max diagonal".into());
    }
    let p = MareProblem::new(None, a, b, c, d).map_err(|e| e.to_string())?;
    let class = classify_problem(&p).map_err(|e| e.to_string())?;
    if class.regime != spec.regime_target {
        return Err(format!("classified as {:?}", class.regime));
    }
    if class.regime == Regime::SingularNoncritical {
        let drift = class.drift().unwrap_or(0.0);
        if drift.abs() < DRIFT_MARGIN {
            return Err(format!("drift {drift:e} inside the margin"));
        }
    }
    Ok(p)
}

fn weight(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen_range(0.1..1.0)
}

/// `diag(s) − N` with `sᵢ = (N·v)ᵢ / vᵢ`.
fn close_with_kernel(nn: &Matrix, v: &[f64]) -> Matrix {
    let nv = nn.matvec(v);
    let s: Vec<f64> = nv.iter().zip(v).map(|(x, vi)| x / vi).collect();
    &Matrix::from_diag(&s) - nn
}

/// Random block-upper-triangular pattern under a random relabeling.
fn triangular_singular(spec: &FamilySpec, rng: &mut ChaCha8Rng) -> Matrix {
    let dim = spec.n + spec.m;
    let blocks = rng.gen_range(1..=MAX_BLOCKS.min(dim));
    // block sizes: random cut points of 0..dim
    let mut cuts: Vec<usize> = (1..dim).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<usize> = cuts.into_iter().take(blocks - 1).collect();
    cuts.push(0);
    cuts.push(dim);
    cuts.sort_unstable();

    let mut nn = Matrix::zeros(dim, dim);
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi - lo > 1 {
            for i in lo..hi {
                let j = if i + 1 == hi { lo } else { i + 1 };
                nn[(i, j)] = weight(rng);
            }
        }
    }
    // a link from every block into the next keeps the last block the only sink
    for t in 0..cuts.len() - 2 {
        let i = rng.gen_range(cuts[t]..cuts[t + 1]);
        let j = rng.gen_range(cuts[t + 1]..cuts[t + 2]);
        nn[(i, j)] = weight(rng);
    }
    let block_of = |i: usize| cuts.windows(2).position(|w| i < w[1]).unwrap();
    for i in 0..dim {
        for j in 0..dim {
            if i != j
                && nn[(i, j)] == 0.0
                && block_of(i) <= block_of(j)
                && rng.gen_bool(spec.density)
            {
                nn[(i, j)] = weight(rng);
            }
        }
    }

    let mut perm: Vec<usize> = (0..dim).collect();
    perm.shuffle(rng);
    let nn = Matrix::from_fn(dim, dim, |i, j| nn[(perm[i], perm[j])]);
    let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.5..1.5)).collect();
    close_with_kernel(&nn, &v)
}

/// Symmetric irreducible pattern whose kernel vector is balanced across the split.
fn symmetric_singular(spec: &FamilySpec, rng: &mut ChaCha8Rng) -> Matrix {
    let (n, dim) = (spec.n, spec.n + spec.m);
    let mut nn = Matrix::zeros(dim, dim);
    let mut order: Vec<usize> = (0..dim).collect();
    order.shuffle(rng);
    for t in 0..dim {
        let (i, j) = (order[t], order[(t + 1) % dim]);
        if i != j {
            let w = weight(rng);
            nn[(i, j)] = w;
            nn[(j, i)] = w;
        }
    }
    for i in 0..dim {
        for j in i + 1..dim {
            if nn[(i, j)] == 0.0 && rng.gen_bool(spec.density) {
                let w = weight(rng);
                nn[(i, j)] = w;
                nn[(j, i)] = w;
            }
        }
    }
    // K = Kᵀ makes u ∝ v, so the drift vanishes when both halves of v
    // carry the same squared mass
    let mut v: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.5..1.5)).collect();
    let top: f64 = v[..n].iter().map(|x| x * x).sum();
    let bottom: f64 = v[n..].iter().map(|x| x * x).sum();
    let t = (top / bottom).sqrt();
    v[n..].iter_mut().for_each(|x| *x *= t);
    if n == 1 && spec.m == 1 {
        // the scalar family a = b = c = d
        v = vec![1.0, 1.0];
    }
    close_with_kernel(&nn, &v)
}
