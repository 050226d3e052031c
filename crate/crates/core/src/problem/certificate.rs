use serde::{Deserialize, Serialize};

use super::{classify_problem, residual_dual, residual_primal, MareProblem, ProblemClass, Regime};
use crate::error::{Error, Result};
use crate::linalg::{self, Factorization, Matrix};
use crate::mstruct::{classify_zm, rank_tolerance, regularity_witness, MKind};

pub const DEFAULT_CERT_TOL: f64 = 1e-8;

/// Relative pivot size at or below which `R` or `S` counts as singular.
const SINGULAR_PIVOT: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: CheckStatus,
    pub value: f64,
    pub detail: String,
}

impl Check {
    fn new(name: &str, pass: bool, value: f64, detail: String) -> Self {
        Check {
            name: name.to_string(),
            status: if pass {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
            value,
            detail,
        }
    }

    fn not_applicable(name: &str, value: f64, detail: String) -> Self {
        Check {
            name: name.to_string(),
            status: CheckStatus::NotApplicable,
            value,
            detail,
        }
    }

    pub fn failed(&self) -> bool {
        self.status == CheckStatus::Fail
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub phi: Matrix,
    pub psi: Matrix,
    /// `D − C·Φ`.
    pub r: Matrix,
    /// `A − B·Ψ`.
    pub s: Matrix,
    pub residual_primal: f64,
    pub residual_dual: f64,
    pub similarity_residual: f64,
    pub rho_phi_psi: f64,
    pub r_singular: bool,
    pub s_singular: bool,
    /// Smallest pivot of `R` relative to `‖D‖₁ + ‖C‖₁‖Φ‖₁`.
    pub r_pivot: f64,
    /// Smallest pivot of `S` relative to `‖A‖₁ + ‖B‖₁‖Ψ‖₁`.
    pub s_pivot: f64,
    pub r_kind: MKind,
    pub s_kind: MKind,
    /// Classification of `I − Φ·Ψ`.
    pub i_minus_phi_psi: MKind,
    /// Classification of `I − Ψ·Φ`.
    pub i_minus_psi_phi: MKind,
    pub regime: Regime,
    pub tol: f64,
    pub checks: Vec<Check>,
}

impl Certificate {
    pub fn passed(&self) -> bool {
        !self.checks.iter().any(Check::failed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Classifies the problem and certifies `(Φ, Ψ)` with the default tolerance.
pub fn make_certificate(p: &MareProblem, phi: &Matrix, psi: &Matrix) -> Result<Certificate> {
    let class = classify_problem(p)?;
    make_certificate_with(p, &class, phi, psi, DEFAULT_CERT_TOL)
}

/// Smallest pivot relative to `scale`, the size of the terms that were
/// combined to form `m`, so that cancellation registers as singularity.
fn relative_pivot(m: &Matrix, scale: f64) -> Result<f64> {
    let f = Factorization::new(m)?;
    Ok(if scale == 0.0 {
        0.0
    } else {
        f.min_pivot() / scale
    })
}

fn clamp_candidate(x: &Matrix, floor: f64, what: &'static str) -> Result<Matrix> {
    let min = x.min_entry();
    if min < -floor {
        return Err(Error::NotNonnegative { what, min });
    }
    Ok(x.map(|v| v.max(0.0)))
}

pub fn make_certificate_with(
    p: &MareProblem,
    class: &ProblemClass,
    phi: &Matrix,
    psi: &Matrix,
    tol: f64,
) -> Result<Certificate> {
    let (n, m) = (p.n(), p.m());
    if phi.shape() != (m, n) || psi.shape() != (n, m) {
        return Err(Error::ShapeMismatch(format!(
            "Φ {:?} and Ψ {:?} for n = {n}, m = {m}",
            phi.shape(),
            psi.shape()
        )));
    }
    let floor = rank_tolerance(&p.k());
    let phi = clamp_candidate(phi, floor, "Φ")?;
    let psi = clamp_candidate(psi, floor, "Ψ")?;
    let regime = class.regime;
    let mut checks = Vec::with_capacity(5);

    let rp = residual_primal(p, &phi)?;
    let rd = residual_dual(p, &psi)?;
    checks.push(Check::new(
        "residuals",
        rp <= tol && rd <= tol,
        rp.max(rd),
        format!("primal {rp:e}, dual {rd:e}"),
    ));

    let r = p.d() - &(p.c() * &phi);
    let s = p.a() - &(p.b() * &psi);
    let r_class = classify_zm(&r)?;
    let s_class = classify_zm(&s)?;
    let r_regular = regularity_witness(&r, &r_class)?.regular;
    let s_regular = regularity_witness(&s, &s_class)?.regular;
    let worst_gap = r_class.gap.min(s_class.gap);
    checks.push(Check::new(
        "closing_matrices_regular_m",
        r_class.kind.is_m() && s_class.kind.is_m() && r_regular && s_regular,
        worst_gap,
        format!(
            "R {:?} (regular {r_regular}), S {:?} (regular {s_regular})",
            r_class.kind, s_class.kind
        ),
    ));

    let hmat = p.hmat();
    let w = Matrix::block2x2(&Matrix::identity(n), &psi, &phi, &Matrix::identity(m))?;
    let blocks = Matrix::block2x2(&r, &Matrix::zeros(n, m), &Matrix::zeros(m, n), &-&s)?;
    let diff = &(&hmat * &w) - &(&w * &blocks);
    let similarity_residual = diff.norm1() / hmat.norm1().max(linalg::EPS);
    checks.push(Check::new(
        "similarity",
        similarity_residual <= tol,
        similarity_residual,
        String::new(),
    ));

    let phi_psi = &phi * &psi;
    let psi_phi = &psi * &phi;
    let rho_phi_psi = linalg::spectral_radius_nonneg(&phi_psi)?;
    let i_minus_phi_psi = classify_zm(&(&Matrix::identity(m) - &phi_psi))?.kind;
    let i_minus_psi_phi = classify_zm(&(&Matrix::identity(n) - &psi_phi))?.kind;
    let detail = format!("I−ΦΨ {i_minus_phi_psi:?}, I−ΨΦ {i_minus_psi_phi:?}");
    checks.push(if regime.is_supported() {
        Check::new(
            "rho_phi_psi",
            rho_phi_psi < 1.0
                && i_minus_phi_psi == MKind::NonsingularM
                && i_minus_psi_phi == MKind::NonsingularM,
            rho_phi_psi,
            detail,
        )
    } else {
        Check::not_applicable("rho_phi_psi", rho_phi_psi, detail)
    });

    let r_pivot = relative_pivot(&r, p.d().norm1() + p.c().norm1() * phi.norm1())?;
    let s_pivot = relative_pivot(&s, p.a().norm1() + p.b().norm1() * psi.norm1())?;
    let r_singular = r_pivot <= SINGULAR_PIVOT;
    let s_singular = s_pivot <= SINGULAR_PIVOT;
    let detail = format!("R pivot {r_pivot:e}, S pivot {s_pivot:e}");
    let smaller = r_pivot.min(s_pivot);
    checks.push(if regime == Regime::SingularNoncritical {
        Check::new(
            "exactly_one_singular",
            r_singular != s_singular,
            smaller,
            detail,
        )
    } else {
        Check::not_applicable("exactly_one_singular", smaller, detail)
    });

    Ok(Certificate {
        phi,
        psi,
        r_kind: r_class.kind,
        s_kind: s_class.kind,
        r,
        s,
        residual_primal: rp,
        residual_dual: rd,
        similarity_residual,
        rho_phi_psi,
        r_singular,
        s_singular,
        r_pivot,
        s_pivot,
        i_minus_phi_psi,
        i_minus_psi_phi,
        regime,
        tol,
        checks,
    })
}
