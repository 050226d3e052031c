//! Alternating-directional doubling (ADDA) and its single-parameter special
//! case SDA, with per-step structural diagnostics.
//!
//! The iterates satisfy `Hₖ → Φ` and `Gₖ → Ψ`, where `Φ` and `Ψ` are the
//! minimal nonnegative solutions of the primal and dual equations.

mod rate;
mod trace;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{solve_linear, solve_right, Factorization, Matrix};
use crate::mstruct::{classify_zm, MKind};
use crate::problem::{
    classify_problem, make_certificate_with, Certificate, MareProblem, ProblemClass,
    DEFAULT_CERT_TOL,
};

pub use rate::{observed_rate, theoretical_rate, NON_QUADRATIC_SLACK};
pub use trace::{trace_csv, write_trace_csv, TRACE_COLUMNS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    #[serde(rename = "ADDA")]
    Adda,
    #[serde(rename = "SDA")]
    Sda,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DoublingParams {
    pub alpha: f64,
    pub beta: f64,
    pub max_iter: usize,
    pub stop_tol: f64,
    pub mode: Mode,
}

pub const DEFAULT_MAX_ITER: usize = 60;
pub const DEFAULT_STOP_TOL: f64 = 1e-14;

impl DoublingParams {
    pub fn adda(alpha: f64, beta: f64) -> Self {
        DoublingParams {
            alpha,
            beta,
            max_iter: DEFAULT_MAX_ITER,
            stop_tol: DEFAULT_STOP_TOL,
            mode: Mode::Adda,
        }
    }

    pub fn sda(gamma: f64) -> Self {
        DoublingParams {
            alpha: gamma,
            beta: gamma,
            mode: Mode::Sda,
            ..DoublingParams::adda(gamma, gamma)
        }
    }

    /// Checks the lower bounds `α ≥ max aᵢᵢ`, `β ≥ max dᵢᵢ` and the SDA tie.
    pub fn validate(&self, p: &MareProblem) -> Result<()> {
        let (a_star, b_star) = optimal_pair(p)?;
        if !(self.alpha.is_finite() && self.beta.is_finite()) {
            return Err(Error::InvalidParameters("α and β must be finite".into()));
        }
        if self.alpha < a_star || self.beta < b_star {
            return Err(Error::InvalidParameters(format!(
                "(α, β) = ({}, {}) below the bounds ({a_star}, {b_star})",
                self.alpha, self.beta
            )));
        }
        if self.mode == Mode::Sda && self.alpha != self.beta {
            return Err(Error::InvalidParameters("SDA needs α = β".into()));
        }
        if self.max_iter == 0 || !(self.stop_tol >= 0.0) {
            return Err(Error::InvalidParameters(
                "max_iter must be positive and stop_tol nonnegative".into(),
            ));
        }
        Ok(())
    }
}

fn optimal_pair(p: &MareProblem) -> Result<(f64, f64)> {
    let alpha = p.a().max_diag();
    let beta = p.d().max_diag();
    if !(alpha > 0.0) {
        return Err(Error::NonpositiveDiagonal {
            which: "A",
            value: alpha,
        });
    }
    if !(beta > 0.0) {
        return Err(Error::NonpositiveDiagonal {
            which: "D",
            value: beta,
        });
    }
    Ok((alpha, beta))
}

/// Defaults to `α = max aᵢᵢ`, `β = max dᵢᵢ`; a requested pair is kept if
/// it respects those lower bounds.
pub fn select_parameters(p: &MareProblem, requested: Option<(f64, f64)>) -> Result<DoublingParams> {
    let (alpha, beta) = optimal_pair(p)?;
    let params = match requested {
        None => DoublingParams::adda(alpha, beta),
        Some((a, b)) => DoublingParams::adda(a, b),
    };
    params.validate(p)?;
    Ok(params)
}

/// SDA with `γ = max(max aᵢᵢ, max dᵢᵢ)` unless a valid `γ` is requested.
pub fn select_sda_parameters(p: &MareProblem, requested: Option<f64>) -> Result<DoublingParams> {
    let (alpha, beta) = optimal_pair(p)?;
    let params = DoublingParams::sda(requested.unwrap_or(alpha.max(beta)));
    params.validate(p)?;
    Ok(params)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DoublingState {
    pub k: usize,
    /// n×n
    pub e: Matrix,
    /// m×m
    pub f: Matrix,
    /// n×m, converges to `Ψ`
    pub g: Matrix,
    /// m×n, converges to `Φ`
    pub h: Matrix,
    /// The unscaled iterates are `2^scale_exp·E` and `2^−scale_exp·F`.
    pub scale_exp: i32,
}

/// Diagnostics of the state after step `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepDiagnostics {
    pub k: usize,
    /// `‖Hₖ − Hₖ₋₁‖₁`; absent at `k = 0`.
    pub d_h: Option<f64>,
    pub d_g: Option<f64>,
    pub min_pivot_igh: f64,
    pub min_pivot_ihg: f64,
    pub igh_kind: MKind,
    pub ihg_kind: MKind,
    /// Entries of `Eₖ` with the wrong sign (positive at `k = 0`, negative after).
    pub sign_violations_e: usize,
    pub sign_violations_f: usize,
    /// Entries where `Hₖ` or `Gₖ` decreased (or, at `k = 0`, are negative).
    pub monotonicity_violations: usize,
}

impl StepDiagnostics {
    fn violations(&self) -> usize {
        self.sign_violations_e + self.sign_violations_f + self.monotonicity_violations
    }
}

fn shifted(m: &Matrix, s: f64) -> Matrix {
    m.add_diag(s)
}

/// The `k = 0` state.
pub fn initialize(p: &MareProblem, params: &DoublingParams) -> Result<DoublingState> {
    let (alpha, beta) = (params.alpha, params.beta);
    let sum = alpha + beta;
    let a_b = shifted(p.a(), beta);
    let d_a = shifted(p.d(), alpha);
    // D_α⁻¹·C and A_β⁻¹·B
    let dinv_c = solve_linear(&d_a, p.c())?;
    let ainv_b = solve_linear(&a_b, p.b())?;
    let u = &a_b - &(p.b() * &dinv_c);
    let v = &d_a - &(p.c() * &ainv_b);
    let u_fact = Factorization::new(&u)?;
    let v_fact = Factorization::new(&v)?;
    let n = p.n();
    let m = p.m();

    let e = &Matrix::identity(n) - &v_fact.solve(&Matrix::identity(n))?.scale(sum);
    let uinv = u_fact.solve(&Matrix::identity(m))?;
    let f = &Matrix::identity(m) - &uinv.scale(sum);
    let g = (&dinv_c * &uinv).scale(sum);
    let h = solve_right(&(&uinv * p.b()), &d_a)?.scale(sum);
    Ok(DoublingState {
        k: 0,
        e,
        f,
        g,
        h,
        scale_exp: 0,
    })
}

fn breakdown(step: usize, what: &str, err: Error) -> Error {
    match err {
        Error::SingularMatrix { min_pivot, tol } => Error::IterationBreakdown {
            step,
            reason: format!("{what} singular (pivot {min_pivot:e}, tolerance {tol:e})"),
        },
        other => other,
    }
}

/// One doubling step:
/// `E⁺ = E(I−GH)⁻¹E`, `F⁺ = F(I−HG)⁻¹F`,
/// `G⁺ = G + E(I−GH)⁻¹GF`, `H⁺ = H + F(I−HG)⁻¹HE`.
pub fn step(s: &DoublingState) -> Result<DoublingState> {
    let next = s.k + 1;
    let n = s.e.rows();
    let m = s.f.rows();
    let igh = &Matrix::identity(n) - &(&s.g * &s.h);
    let ihg = &Matrix::identity(m) - &(&s.h * &s.g);
    let e_w = solve_right(&s.e, &igh).map_err(|e| breakdown(next, "I − GH", e))?;
    let f_w = solve_right(&s.f, &ihg).map_err(|e| breakdown(next, "I − HG", e))?;

    let mut state = DoublingState {
        k: next,
        e: &e_w * &s.e,
        f: &f_w * &s.f,
        g: &s.g + &(&(&e_w * &s.g) * &s.f),
        h: &s.h + &(&(&f_w * &s.h) * &s.e),
        scale_exp: 2 * s.scale_exp,
    };
    balance(&mut state);
    let finite = [&state.e, &state.f, &state.g, &state.h]
        .iter()
        .all(|x| x.as_slice().iter().all(|v| v.is_finite()));
    if !finite {
        return Err(Error::IterationBreakdown {
            step: next,
            reason: "non-finite iterate".into(),
        });
    }
    Ok(state)
}

/// Norm ratio between `E` and `F` above which they are rebalanced.
const BALANCE_TRIGGER: f64 = 1e32;

/// `G` and `H` are unchanged by `(E, F) → (t·E, F/t)`, and in the singular
/// case one of `E`, `F` may grow like `ρ^(2ᵏ)` with `ρ > 1` while the other
/// decays faster. Rescaling by a power of two keeps both representable
/// without perturbing any bit of `G` or `H`.
fn balance(s: &mut DoublingState) {
    let (ne, nf) = (s.e.norm1(), s.f.norm1());
    if ne == 0.0 || nf == 0.0 || !ne.is_finite() || !nf.is_finite() {
        return;
    }
    let ratio = ne / nf;
    if ratio < BALANCE_TRIGGER && ratio > 1.0 / BALANCE_TRIGGER {
        return;
    }
    let shift = (0.5 * ratio.log2()).round() as i32;
    let t = 2f64.powi(-shift);
    s.e = s.e.scale(t);
    s.f = s.f.scale(1.0 / t);
    s.scale_exp += shift;
}

fn min_pivot(m: &Matrix) -> Result<f64> {
    Ok(Factorization::new(m)?.min_pivot())
}

/// Structural diagnostics of `s`, comparing against the previous state when given.
pub fn diagnose(
    s: &DoublingState,
    prev: Option<&DoublingState>,
    tau_sign: f64,
) -> Result<StepDiagnostics> {
    let n = s.e.rows();
    let m = s.f.rows();
    let igh = &Matrix::identity(n) - &(&s.g * &s.h);
    let ihg = &Matrix::identity(m) - &(&s.h * &s.g);
    let (sign_e, sign_f, mono) = match prev {
        None => (
            s.e.count_where(|x| x > tau_sign),
            s.f.count_where(|x| x > tau_sign),
            s.h.count_where(|x| x < -tau_sign) + s.g.count_where(|x| x < -tau_sign),
        ),
        Some(p) => (
            s.e.count_where(|x| x < -tau_sign),
            s.f.count_where(|x| x < -tau_sign),
            (&s.h - &p.h).count_where(|x| x < -tau_sign)
                + (&s.g - &p.g).count_where(|x| x < -tau_sign),
        ),
    };
    Ok(StepDiagnostics {
        k: s.k,
        d_h: prev.map(|p| (&s.h - &p.h).norm1()),
        d_g: prev.map(|p| (&s.g - &p.g).norm1()),
        min_pivot_igh: min_pivot(&igh)?,
        min_pivot_ihg: min_pivot(&ihg)?,
        igh_kind: classify_zm(&igh)?.kind,
        ihg_kind: classify_zm(&ihg)?.kind,
        sign_violations_e: sign_e,
        sign_violations_f: sign_f,
        monotonicity_violations: mono,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    pub phi: Matrix,
    pub psi: Matrix,
    pub iterations: usize,
    pub params: DoublingParams,
    pub class: ProblemClass,
    pub trace: Vec<StepDiagnostics>,
    pub certificate: Certificate,
    pub theoretical_rate: Option<f64>,
    pub observed_rate: Option<f64>,
    /// Entries of some `Hₖ` above `Φ` or `Gₖ` above `Ψ` beyond the sign tolerance.
    pub bound_violations: usize,
    pub flags: Vec<String>,
    /// `(Hₖ, Gₖ)` for every recorded step.
    #[serde(skip)]
    pub snapshots: Vec<(Matrix, Matrix)>,
}

/// Runs the doubling iteration to convergence and certifies the result.
pub fn solve(p: &MareProblem, params: &DoublingParams) -> Result<SolveReport> {
    let class = classify_problem(p)?;
    solve_classified(p, &class, params)
}

/// As [`solve`], reusing an existing classification of `p`.
pub fn solve_classified(
    p: &MareProblem,
    class: &ProblemClass,
    params: &DoublingParams,
) -> Result<SolveReport> {
    params.validate(p)?;
    let tau = p.sign_tolerance();
    let mut flags = Vec::new();
    if !class.regime.is_supported() {
        flags.push(format!("unsupported_regime:{:?}", class.regime));
    }

    let mut state = initialize(p, params)?;
    let mut trace = vec![diagnose(&state, None, tau)?];
    let mut snapshots = vec![(state.h.clone(), state.g.clone())];
    let mut converged = false;
    while state.k < params.max_iter {
        let next = step(&state)?;
        let diag = diagnose(&next, Some(&state), tau)?;
        let h_ok = diag.d_h.unwrap() <= params.stop_tol * next.h.norm1().max(1.0);
        let g_ok = diag.d_g.unwrap() <= params.stop_tol * next.g.norm1().max(1.0);
        trace.push(diag);
        snapshots.push((next.h.clone(), next.g.clone()));
        state = next;
        if h_ok && g_ok {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::MaxIterations {
            iterations: state.k,
            best_phi: Box::new(state.h),
            best_psi: Box::new(state.g),
        });
    }

    let certificate = make_certificate_with(p, class, &state.h, &state.g, DEFAULT_CERT_TOL)?;
    let phi = certificate.phi.clone();
    let psi = certificate.psi.clone();

    let bound_violations = snapshots
        .iter()
        .map(|(h, g)| (h - &phi).count_where(|x| x > tau) + (g - &psi).count_where(|x| x > tau))
        .sum();
    if trace.iter().any(|d| d.violations() > 0) {
        flags.push("sign_or_monotonicity_violation".into());
    }
    if bound_violations > 0 {
        flags.push("bound_violation".into());
    }
    // the final state is never inverted, so only earlier steps need the structure
    if trace[..trace.len() - 1]
        .iter()
        .any(|d| d.igh_kind != MKind::NonsingularM || d.ihg_kind != MKind::NonsingularM)
    {
        flags.push("step_matrix_not_nonsingular_m".into());
    }
    if !certificate.passed() {
        flags.push("certificate_failed".into());
    }

    let theoretical = theoretical_rate(p, &certificate, params).ok();
    let hs: Vec<Matrix> = snapshots.iter().map(|(h, _)| h.clone()).collect();
    let observed = match observed_rate(&hs, &phi) {
        Ok(r) => Some(r),
        Err(Error::InsufficientTrace { .. }) if phi.max_abs() == 0.0 => {
            let gs: Vec<Matrix> = snapshots.iter().map(|(_, g)| g.clone()).collect();
            observed_rate(&gs, &psi).ok()
        }
        Err(_) => None,
    };
    // a rate indistinguishable from one means the error is not squaring
    let near_one = |r: Option<f64>| r.is_some_and(|r| r >= 1.0 - 1e-6);
    let non_quadratic = near_one(theoretical)
        || near_one(observed)
        || matches!((theoretical, observed), (Some(t), Some(o)) if o > t + NON_QUADRATIC_SLACK);
    if non_quadratic {
        flags.push("non_quadratic".into());
    }

    Ok(SolveReport {
        phi,
        psi,
        iterations: state.k,
        params: *params,
        class: class.clone(),
        trace,
        certificate,
        theoretical_rate: theoretical,
        observed_rate: observed,
        bound_violations,
        flags,
        snapshots,
    })
}
