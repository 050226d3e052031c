use super::DoublingParams;
use crate::error::{Error, Result};
use crate::linalg::{solve_linear, spectral_radius, Matrix, EPS};
use crate::problem::{Certificate, MareProblem};

/// Observed rates above `theoretical + NON_QUADRATIC_SLACK` are flagged.
pub const NON_QUADRATIC_SLACK: f64 = 0.05;

/// `ρ((R+αI)⁻¹(R−βI)) · ρ((S+βI)⁻¹(S−αI))` with `R = D − CΦ`, `S = A − BΨ`.
pub fn theoretical_rate(
    _p: &MareProblem,
    cert: &Certificate,
    params: &DoublingParams,
) -> Result<f64> {
    let (alpha, beta) = (params.alpha, params.beta);
    let factor = |x: &Matrix, plus: f64, minus: f64| -> Result<f64> {
        let t = solve_linear(&x.add_diag(plus), &x.add_diag(-minus))?;
        spectral_radius(&t)
    };
    Ok(factor(&cert.r, alpha, beta)? * factor(&cert.s, beta, alpha)?)
}

/// Rate estimate from the error sequence `eₖ = ‖Xₖ − X‖₁`, where
/// `snapshots[k]` is the iterate at step `k`.
///
/// Errors at or below `100·ε·max(1, ‖X‖₁)` carry no rate information and
/// are skipped. For errors behaving like `c·r^(2ᵏ)`, the successive ratio
/// `(eₖ₊₁/eₖ)^(1/2ᵏ)` equals `r` exactly, while the plain root `eₖ^(1/2ᵏ)`
/// is off by `c^(1/2ᵏ)` at the few `k` that double precision resolves. The
/// result is the largest ratio estimate over the last three consecutive
/// usable pairs; both forms share the same lim sup.
pub fn observed_rate(snapshots: &[Matrix], limit: &Matrix) -> Result<f64> {
    let floor = 100.0 * EPS * limit.norm1().max(1.0);
    let errors: Vec<f64> = snapshots.iter().map(|x| (x - limit).norm1()).collect();
    let usable = errors.iter().filter(|&&e| e > floor).count();
    let ratios: Vec<f64> = errors
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[0] > floor && w[1] > floor)
        .map(|(k, w)| (w[1] / w[0]).powf(0.5f64.powi(k as i32)))
        .collect();
    if usable < 2 || ratios.is_empty() {
        return Err(Error::InsufficientTrace { usable });
    }
    Ok(ratios[ratios.len().saturating_sub(3)..]
        .iter()
        .copied()
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: f64) -> Matrix {
        Matrix::new(1, 1, vec![x]).unwrap()
    }

    #[test]
    fn converged_at_start_is_insufficient() {
        let snaps = vec![s(0.5), s(0.5), s(0.5)];
        assert!(matches!(
            observed_rate(&snaps, &s(0.5)),
            Err(Error::InsufficientTrace { usable: 0 })
        ));
    }

    #[test]
    fn geometric_squares_with_constant() {
        // errors c·r^(2^k): the constant drops out
        let r: f64 = 0.5;
        let snaps: Vec<Matrix> = (0..6).map(|k| s(20.0 * r.powi(1 << k))).collect();
        let o = observed_rate(&snaps, &s(0.0)).unwrap();
        assert!((o - r).abs() < 1e-12, "{o}");
    }

    #[test]
    fn halving_errors_approach_one() {
        let snaps: Vec<Matrix> = (0..30)
            .map(|k| s(1.0 - 1.0 / (1u64 << k) as f64 / 3.0))
            .collect();
        assert!(observed_rate(&snaps, &s(1.0)).unwrap() > 0.99);
    }

    #[test]
    fn eigenvalue_route_matches_scalar_map() {
        // for scalar R and S the factors are |R−β|/|R+α| and |S−α|/|S+β|
        let p = MareProblem::scalar(3.0, 2.0, 1.0, 2.0).unwrap();
        let x = (5.0 - 17f64.sqrt()) / 2.0;
        let cert = crate::problem::make_certificate(&p, &s(x), &s(x / 2.0)).unwrap();
        let params = DoublingParams::adda(3.0, 2.0);
        let (r, sm) = (cert.r[(0, 0)], cert.s[(0, 0)]);
        let want = ((r - 2.0) / (r + 3.0)).abs() * ((sm - 3.0) / (sm + 2.0)).abs();
        let got = theoretical_rate(&p, &cert, &params).unwrap();
        assert!((got - want).abs() < 1e-14, "{got} vs {want}");
    }
}
