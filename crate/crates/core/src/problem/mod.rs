//! The Riccati problem `XCX − XD − AX + B = 0`, its dual
//! `YBY − YA − DY + C = 0`, and the block matrices built from them.

mod certificate;
mod classify;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, EPS};

pub use certificate::{
    make_certificate, make_certificate_with, Certificate, Check, CheckStatus, DEFAULT_CERT_TOL,
};
pub use classify::{classify_problem, ProblemClass, Regime, DRIFT_TOL};

/// Coefficients `A` (m×m), `B` (m×n), `C` (n×m), `D` (n×n) such that
/// `K = [[D, −C], [−B, A]]` is a Z-matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProblemFile", into = "ProblemFile")]
pub struct MareProblem {
    name: Option<String>,
    a: Matrix,
    b: Matrix,
    c: Matrix,
    d: Matrix,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    n: usize,
    m: usize,
    #[serde(rename = "A")]
    a: Vec<Vec<f64>>,
    #[serde(rename = "B")]
    b: Vec<Vec<f64>>,
    #[serde(rename = "C")]
    c: Vec<Vec<f64>>,
    #[serde(rename = "D")]
    d: Vec<Vec<f64>>,
}

fn block(label: &str, rows: &[Vec<f64>], nr: usize, nc: usize) -> Result<Matrix> {
    let m = Matrix::from_rows(rows).map_err(|e| match e {
        Error::ShapeMismatch(msg) => Error::ShapeMismatch(format!("{label}: {msg}")),
        other => other,
    })?;
    if m.shape() != (nr, nc) {
        return Err(Error::ShapeMismatch(format!(
            "{label} is {:?}, expected {:?}",
            m.shape(),
            (nr, nc)
        )));
    }
    Ok(m)
}

impl TryFrom<ProblemFile> for MareProblem {
    type Error = Error;

    fn try_from(f: ProblemFile) -> Result<Self> {
        let (n, m) = (f.n, f.m);
        MareProblem::new(
            f.name,
            block("A", &f.a, m, m)?,
            block("B", &f.b, m, n)?,
            block("C", &f.c, n, m)?,
            block("D", &f.d, n, n)?,
        )
    }
}

impl From<MareProblem> for ProblemFile {
    fn from(p: MareProblem) -> Self {
        ProblemFile {
            n: p.n(),
            m: p.m(),
            name: p.name,
            a: p.a.to_rows(),
            b: p.b.to_rows(),
            c: p.c.to_rows(),
            d: p.d.to_rows(),
        }
    }
}

impl MareProblem {
    pub fn new(name: Option<String>, a: Matrix, b: Matrix, c: Matrix, d: Matrix) -> Result<Self> {
        let (m, n) = (a.rows(), d.rows());
        if !a.is_square() || !d.is_square() || b.shape() != (m, n) || c.shape() != (n, m) {
            return Err(Error::ShapeMismatch(format!(
                "A {:?}, B {:?}, C {:?}, D {:?}",
                a.shape(),
                b.shape(),
                c.shape(),
                d.shape()
            )));
        }
        for (label, x) in [("B", &b), ("C", &c)] {
            if x.min_entry() < 0.0 {
                return Err(Error::NotZMatrix(format!("{label} has a negative entry")));
            }
        }
        for (label, x) in [("A", &a), ("D", &d)] {
            let k = x.rows();
            if (0..k).any(|i| (0..k).any(|j| i != j && x[(i, j)] > 0.0)) {
                return Err(Error::NotZMatrix(format!(
                    "{label} has a positive off-diagonal entry"
                )));
            }
        }
        Ok(MareProblem { name, a, b, c, d })
    }

    /// Scalar problem `c·x² − (a + d)·x + b = 0`.
    pub fn scalar(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let s = |x: f64| Matrix::new(1, 1, vec![x]);
        MareProblem::new(None, s(a)?, s(b)?, s(c)?, s(d)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem serializes")
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn n(&self) -> usize {
        self.d.rows()
    }

    pub fn m(&self) -> usize {
        self.a.rows()
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &Matrix {
        &self.b
    }

    pub fn c(&self) -> &Matrix {
        &self.c
    }

    pub fn d(&self) -> &Matrix {
        &self.d
    }

    /// `K = [[D, −C], [−B, A]]`.
    pub fn k(&self) -> Matrix {
        Matrix::block2x2(&self.d, &-&self.c, &-&self.b, &self.a).expect("shapes checked")
    }

    /// Sign-flipped `diag(I_n, −I_m)·K = [[D, −C], [B, −A]]`.
    pub fn hmat(&self) -> Matrix {
        Matrix::block2x2(&self.d, &-&self.c, &self.b, &-&self.a).expect("shapes checked")
    }

    /// The dual problem: roles of `(A, D)` and `(B, C)` swapped, so its
    /// primal equation is this problem's dual equation.
    pub fn dual(&self) -> MareProblem {
        MareProblem {
            name: self.name.as_ref().map(|n| format!("{n} (dual)")),
            a: self.d.clone(),
            b: self.c.clone(),
            c: self.b.clone(),
            d: self.a.clone(),
        }
    }

    /// Scale-invariant 1-norm tolerance for elementwise sign checks.
    pub fn sign_tolerance(&self) -> f64 {
        1e-12 * self.k().norm1().max(1.0)
    }
}

fn expect_shape(x: &Matrix, shape: (usize, usize), what: &str) -> Result<()> {
    if x.shape() != shape {
        return Err(Error::ShapeMismatch(format!(
            "{what} is {:?}, expected {:?}",
            x.shape(),
            shape
        )));
    }
    Ok(())
}

fn normalized_residual(
    x: &Matrix,
    quad: &Matrix,
    right: &Matrix,
    left: &Matrix,
    constant: &Matrix,
) -> f64 {
    // x·quad·x − x·right − left·x + constant
    let xq = x * quad;
    let res = &(&(&(&xq * x) - &(x * right)) - &(left * x)) + constant;
    let nx = x.norm1();
    let denom = nx * (quad.norm1() * nx + right.norm1() + left.norm1()) + constant.norm1();
    res.norm1() / denom.max(EPS)
}

/// `‖XCX − XD − AX + B‖₁ / (‖X‖₁(‖C‖₁‖X‖₁ + ‖D‖₁ + ‖A‖₁) + ‖B‖₁)`.
pub fn residual_primal(p: &MareProblem, x: &Matrix) -> Result<f64> {
    expect_shape(x, (p.m(), p.n()), "X")?;
    Ok(normalized_residual(x, &p.c, &p.d, &p.a, &p.b))
}

/// `‖YBY − YA − DY + C‖₁ / (‖Y‖₁(‖B‖₁‖Y‖₁ + ‖A‖₁ + ‖D‖₁) + ‖C‖₁)`.
pub fn residual_dual(p: &MareProblem, y: &Matrix) -> Result<f64> {
    expect_shape(y, (p.n(), p.m()), "Y")?;
    Ok(normalized_residual(y, &p.b, &p.a, &p.d, &p.c))
}
