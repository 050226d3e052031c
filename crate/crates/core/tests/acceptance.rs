//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero on any failure.

use std::process::ExitCode;
use std::time::Instant;

use mare_core::adda::{initialize, select_parameters, solve, step, theoretical_rate, SolveReport};
use mare_core::mstruct::MKind;
use mare_core::oracle::fixed_point_solve;
use mare_core::probgen::{generate, FamilySpec};
use mare_core::problem::{classify_problem, make_certificate, CheckStatus, MareProblem, Regime};
use mare_core::{Error, Matrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

const SUITE_SIZE: usize = 120;
const NONSINGULAR_SIZE: usize = 40;

fn s(x: f64) -> Matrix {
    Matrix::new(1, 1, vec![x]).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Sizes cycle through 1..=10 on each side so totals cover 2..=20.
fn suite_specs(regime: Regime, count: usize, seed0: u64) -> Vec<FamilySpec> {
    (0..count)
        .map(|i| {
            let n = 1 + (i * 7) % 10;
            let m = 1 + (i * 3 + i / 10) % 10;
            let density = [0.2, 0.5, 0.9][i % 3];
            FamilySpec::new(regime, n, m, seed0 + i as u64).with_density(density)
        })
        .collect()
}

struct Solved {
    problem: MareProblem,
    report: SolveReport,
}

fn solve_suite(specs: &[FamilySpec]) -> Result<Vec<Solved>, String> {
    specs
        .iter()
        .map(|spec| {
            let problem = generate(spec).map_err(|e| format!("{spec:?}: {e}"))?;
            let params = select_parameters(&problem, None).map_err(|e| e.to_string())?;
            let report = solve(&problem, &params).map_err(|e| format!("{spec:?}: {e}"))?;
            Ok(Solved { problem, report })
        })
        .collect()
}

fn criterion_1() -> Outcome {
    let p = MareProblem::scalar(2.0, 1.0, 1.0, 1.0).unwrap();
    let params = select_parameters(&p, None).map_err(|e| e.to_string())?;
    ensure((params.alpha, params.beta) == (2.0, 1.0), || {
        format!("{params:?}")
    })?;
    let r = solve(&p, &params).map_err(|e| e.to_string())?;
    let x = (3.0 - 5f64.sqrt()) / 2.0;
    ensure((r.phi[(0, 0)] - x).abs() <= 1e-12, || {
        format!("Φ = {}", r.phi[(0, 0)])
    })?;
    ensure((r.psi[(0, 0)] - x).abs() <= 1e-12, || {
        format!("Ψ = {}", r.psi[(0, 0)])
    })?;
    let t = r.theoretical_rate.ok_or("no theoretical rate")?;
    ensure((t - 0.0212862).abs() <= 1e-6, || format!("theoretical {t}"))?;
    let o = r.observed_rate.ok_or("no observed rate")?;
    ensure(o <= t + 0.05, || format!("observed {o} > {t} + 0.05"))?;
    Ok(format!(
        "Φ = Ψ = {x:.12}, r = {t:.7}, observed {o:.4}, {} steps",
        r.iterations
    ))
}

fn reducible() -> MareProblem {
    MareProblem::new(
        None,
        Matrix::from_rows(&[[1.0, -1.0], [-1.0, 1.0]]).unwrap(),
        Matrix::zeros(2, 1),
        Matrix::from_rows(&[[1.0, 1.0]]).unwrap(),
        Matrix::from_rows(&[[2.0]]).unwrap(),
    )
    .unwrap()
}

fn criterion_2() -> Outcome {
    let p = reducible();
    let c = classify_problem(&p).map_err(|e| e.to_string())?;
    ensure(c.regime == Regime::SingularNoncritical, || {
        format!("{:?}", c.regime)
    })?;
    ensure(c.assumption1.algebraic_multiplicity == 1, || {
        format!("r = {}", c.assumption1.algebraic_multiplicity)
    })?;
    let drift = c.drift().ok_or("no drift")?;
    ensure((drift + 1.0 / 3.0).abs() <= 1e-10, || {
        format!("drift {drift}")
    })?;
    let r = solve(&p, &select_parameters(&p, None).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    ensure(r.phi.max_abs() <= 1e-12, || format!("Φ = {:?}", r.phi))?;
    let psi_err = (&r.psi - &Matrix::from_rows(&[[0.5, 0.5]]).unwrap()).max_abs();
    ensure(psi_err <= 1e-12, || format!("Ψ = {:?}", r.psi))?;
    let cert = &r.certificate;
    ensure((&cert.r - &s(2.0)).max_abs() <= 1e-12, || {
        format!("R = {:?}", cert.r)
    })?;
    ensure(!cert.r_singular && cert.s_singular, || {
        format!(
            "R singular {}, S singular {}",
            cert.r_singular, cert.s_singular
        )
    })?;
    let dich = cert
        .check("exactly_one_singular")
        .ok_or("missing dichotomy check")?;
    ensure(dich.status == CheckStatus::Pass, || format!("{dich:?}"))?;
    ensure(cert.rho_phi_psi == 0.0, || {
        format!("ρ(ΦΨ) = {}", cert.rho_phi_psi)
    })?;
    Ok(format!("drift {drift:.12}, R = [2], S singular, ρ(ΦΨ) = 0"))
}

fn criterion_3() -> Outcome {
    let p = MareProblem::scalar(1.0, 1.0, 1.0, 1.0).unwrap();
    let c = classify_problem(&p).map_err(|e| e.to_string())?;
    ensure(c.regime == Regime::Critical, || format!("{:?}", c.regime))?;
    ensure(c.assumption1.algebraic_multiplicity == 2, || {
        format!("r = {}", c.assumption1.algebraic_multiplicity)
    })?;
    let drift = c.drift().ok_or("no drift")?;
    ensure(drift == 0.0, || format!("drift {drift}"))?;

    let params = select_parameters(&p, None).map_err(|e| e.to_string())?;
    let mut state = initialize(&p, &params).map_err(|e| e.to_string())?;
    for want in [2.0 / 3.0, 4.0 / 5.0, 8.0 / 9.0] {
        let h = state.h[(0, 0)];
        ensure((h - want).abs() <= 1e-14, || {
            format!("H{} = {h}, expected {want}", state.k)
        })?;
        state = step(&state).map_err(|e| e.to_string())?;
    }
    let cert = make_certificate(&p, &s(1.0), &s(1.0)).map_err(|e| e.to_string())?;
    ensure(cert.i_minus_phi_psi == MKind::SingularM, || {
        format!("I − ΦΨ classified {:?}", cert.i_minus_phi_psi)
    })?;
    Ok("r = 2, drift 0, H₀..H₂ = 2/3, 4/5, 8/9, I − ΦΨ singular".into())
}

fn criterion_4(suite: &[Solved]) -> Outcome {
    let mut worst: f64 = 0.0;
    for (i, x) in suite.iter().enumerate() {
        let cert = &x.report.certificate;
        worst = worst.max(cert.rho_phi_psi);
        ensure(cert.rho_phi_psi < 1.0 - 1e-6, || {
            format!("problem {i}: ρ(ΦΨ) = {}", cert.rho_phi_psi)
        })?;
        ensure(
            cert.i_minus_phi_psi == MKind::NonsingularM
                && cert.i_minus_psi_phi == MKind::NonsingularM,
            || {
                format!(
                    "problem {i}: I−ΦΨ {:?}, I−ΨΦ {:?}",
                    cert.i_minus_phi_psi, cert.i_minus_psi_phi
                )
            },
        )?;
    }
    Ok(format!("{} problems, max ρ(ΦΨ) = {worst:.6}", suite.len()))
}

fn criterion_5(suite: &[Solved]) -> Outcome {
    let mut worst_gap = f64::NEG_INFINITY;
    let mut measured = 0;
    for (i, x) in suite.iter().enumerate() {
        let r = &x.report;
        for d in &r.trace {
            ensure(
                d.igh_kind == MKind::NonsingularM && d.ihg_kind == MKind::NonsingularM,
                || {
                    format!(
                        "problem {i} step {}: I−GH {:?}, I−HG {:?}",
                        d.k, d.igh_kind, d.ihg_kind
                    )
                },
            )?;
            ensure(d.sign_violations_e == 0 && d.sign_violations_f == 0, || {
                format!("problem {i} step {}: sign violations", d.k)
            })?;
            ensure(d.monotonicity_violations == 0, || {
                format!("problem {i} step {}: monotonicity violations", d.k)
            })?;
        }
        ensure(r.bound_violations == 0, || {
            format!("problem {i}: iterate above limit")
        })?;
        let t = r
            .theoretical_rate
            .ok_or_else(|| format!("problem {i}: no theoretical rate"))?;
        ensure(t < 1.0, || format!("problem {i}: theoretical rate {t}"))?;
        if let Some(o) = r.observed_rate {
            measured += 1;
            worst_gap = worst_gap.max(o - t);
            ensure(o <= t + 0.05, || {
                format!("problem {i}: observed {o} > {t} + 0.05")
            })?;
        }
    }
    Ok(format!(
        "{} problems, no breakdown, rate measured on {measured}, max observed − theoretical = {worst_gap:.4}",
        suite.len()
    ))
}

fn criterion_6(suites: &[&[Solved]]) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for suite in suites {
        for (i, x) in suite.iter().enumerate() {
            let cert = &x.report.certificate;
            count += 1;
            ensure(cert.r_kind.is_m() && cert.s_kind.is_m(), || {
                format!("problem {i}: R {:?}, S {:?}", cert.r_kind, cert.s_kind)
            })?;
            let reg = cert
                .check("closing_matrices_regular_m")
                .ok_or("missing check")?;
            ensure(reg.status == CheckStatus::Pass, || {
                format!("problem {i}: {reg:?}")
            })?;
            worst = worst.max(cert.similarity_residual);
            ensure(cert.similarity_residual <= 1e-10, || {
                format!(
                    "problem {i}: similarity residual {}",
                    cert.similarity_residual
                )
            })?;
            ensure(cert.passed(), || format!("problem {i}: {:?}", cert.checks))?;
        }
    }
    Ok(format!(
        "{count} problems, max similarity residual {worst:e}"
    ))
}

fn criterion_7(suite: &[Solved]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut samples = 0;
    for (i, x) in suite.iter().take(20).enumerate() {
        let opt = x.report.params;
        let best =
            theoretical_rate(&x.problem, &x.report.certificate, &opt).map_err(|e| e.to_string())?;
        for _ in 0..5 {
            let alpha = opt.alpha * (1.0 + rng.gen_range(0.0..2.0));
            let beta = opt.beta * (1.0 + rng.gen_range(0.0..2.0));
            let params =
                select_parameters(&x.problem, Some((alpha, beta))).map_err(|e| e.to_string())?;
            let rate = theoretical_rate(&x.problem, &x.report.certificate, &params)
                .map_err(|e| e.to_string())?;
            samples += 1;
            ensure(best <= rate + 1e-12, || {
                format!("problem {i}: r(α*, β*) = {best} > r({alpha}, {beta}) = {rate}")
            })?;
        }
    }
    Ok(format!("{samples} sampled parameter pairs"))
}

fn criterion_8(suites: &[&[Solved]]) -> Outcome {
    let mut worst: f64 = 0.0;
    let (mut compared, mut skipped) = (0, 0);
    for suite in suites {
        for (i, x) in suite.iter().enumerate() {
            let o = fixed_point_solve(&x.problem, 1e-13, 100_000).map_err(|e| e.to_string())?;
            ensure(o.monotonicity_violations == 0, || {
                format!("problem {i}: oracle not monotone")
            })?;
            if !o.converged {
                skipped += 1;
                continue;
            }
            compared += 1;
            let diff = (&x.report.phi - &o.phi).norm1() / o.phi.norm1().max(1.0);
            worst = worst.max(diff);
            ensure(diff <= 1e-8, || {
                format!(
                    "problem {i}: ‖Φ_adda − Φ_oracle‖ = {diff:e} after {} oracle steps",
                    o.iterations
                )
            })?;
        }
    }
    Ok(format!(
        "{compared} compared, {skipped} oracle runs unconverged, max difference {worst:e}"
    ))
}

fn criterion_9() -> Outcome {
    // K = [[0, −1], [0, 1]]
    let p = MareProblem::scalar(1.0, 0.0, 1.0, 0.0).unwrap();
    let c = classify_problem(&p).map_err(|e| e.to_string())?;
    ensure(c.regime == Regime::NotRegular, || format!("{:?}", c.regime))?;
    let p = MareProblem::scalar(0.0, 1.0, 1.0, 1.0).unwrap();
    match select_parameters(&p, None) {
        Err(Error::NonpositiveDiagonal { which: "A", .. }) => {}
        other => return Err(format!("expected NonpositiveDiagonal, got {other:?}")),
    }
    Ok("NotRegular and NonpositiveDiagonal reported".into())
}

fn report(id: usize, what: &str, outcome: Outcome, failures: &mut usize) {
    match outcome {
        Ok(detail) => println!("criterion {id}: PASS  {what} ({detail})"),
        Err(why) => {
            *failures += 1;
            println!("criterion {id}: FAIL  {what}: {why}");
        }
    }
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut failures = 0;
    report(
        1,
        "scalar nonsingular instance",
        criterion_1(),
        &mut failures,
    );
    report(
        2,
        "reducible singular instance",
        criterion_2(),
        &mut failures,
    );
    report(3, "critical scalar instance", criterion_3(), &mut failures);

    let noncritical = solve_suite(&suite_specs(Regime::SingularNoncritical, SUITE_SIZE, 1000));
    let nonsingular = solve_suite(&suite_specs(Regime::NonsingularK, NONSINGULAR_SIZE, 5000));
    let (noncritical, nonsingular) = match (noncritical, nonsingular) {
        (Ok(a), Ok(b)) => (a, b),
        (a, b) => {
            let why = a.err().or(b.err()).unwrap();
            for id in 4..=8 {
                report(id, "generated suite", Err(why.clone()), &mut failures);
            }
            report(9, "negative paths", criterion_9(), &mut failures);
            return ExitCode::FAILURE;
        }
    };
    report(
        4,
        "I − ΦΨ nonsingular on singular noncritical suite",
        criterion_4(&noncritical),
        &mut failures,
    );
    report(
        5,
        "doubling well defined, signed, monotone, rate-bounded",
        criterion_5(&noncritical),
        &mut failures,
    );
    report(
        6,
        "closing matrices regular M, similarity residual",
        criterion_6(&[&noncritical, &nonsingular]),
        &mut failures,
    );
    report(
        7,
        "optimal parameters minimize the rate bound",
        criterion_7(&noncritical),
        &mut failures,
    );
    report(
        8,
        "doubling agrees with the fixed-point oracle",
        criterion_8(&[&noncritical, &nonsingular]),
        &mut failures,
    );
    report(9, "negative paths", criterion_9(), &mut failures);

    println!("{} failed, {:.1}s", failures, start.elapsed().as_secs_f64());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
