//! `mare` subcommands as a library: [`execute`] parses an argument list,
//! runs one command and returns the exit code with the report text.
//!
//! Exit codes: 0 when every check passed, 1 on check failures, 2 on input
//! or usage errors, 3 on numerical breakdown.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
pub mod report;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::Parser;
use mare_core::adda::{
    select_parameters, select_sda_parameters, solve_classified, write_trace_csv, SolveReport,
};
use mare_core::oracle::{fixed_point_solve, fixed_point_solve_dual};
use mare_core::probgen::{generate, FamilySpec};
use mare_core::problem::{
    classify_problem, make_certificate_with, CheckStatus, MareProblem, ProblemClass,
    DEFAULT_CERT_TOL,
};
use mare_core::{Error, Matrix};

pub use args::{Cli, Command, Method, RegimeArg};
use report::{pass_or_fail, to_json_sig17, ErrorInfo, GridRow, Report};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BREAKDOWN: i32 = 3;

/// Slack allowed when comparing the optimal rate with the rest of the grid.
const OPTIMALITY_SLACK: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct CommandOutcome {
    pub exit_code: i32,
    /// Report JSON; empty only for `--help` and `--version`.
    pub report_json: String,
    pub trace_csv: Option<PathBuf>,
    /// Human-readable text for the terminal: help, or the error message.
    pub message: Option<String>,
}

struct Failure {
    code: i32,
    kind: &'static str,
    step: Option<String>,
    message: String,
    report: Box<Report>,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            kind: "usage",
            step: None,
            message: message.into(),
            report: Box::default(),
        }
    }

    /// Sorts a library error into input problems and numerical breakdowns.
    fn from_error(stage: &str, e: Error) -> Self {
        let (code, kind) = match &e {
            Error::Parse(_)
            | Error::ShapeMismatch(_)
            | Error::NotZMatrix(_)
            | Error::InvalidParameters(_)
            | Error::NonpositiveDiagonal { .. }
            | Error::NotNonnegative { .. } => (EXIT_USAGE, "input"),
            Error::GenerationFailed { .. } => (EXIT_CHECK_FAILED, "generation"),
            _ => (EXIT_BREAKDOWN, "breakdown"),
        };
        let step = match &e {
            Error::IterationBreakdown { step, .. } => format!("{stage}, step {step}"),
            Error::MaxIterations { iterations, .. } => format!("{stage}, after step {iterations}"),
            _ => stage.to_string(),
        };
        let mut report = Box::<Report>::default();
        if let Error::MaxIterations {
            best_phi, best_psi, ..
        } = &e
        {
            report.phi = Some((**best_phi).clone());
            report.psi = Some((**best_psi).clone());
        }
        Failure {
            code,
            kind,
            message: format!("{step}: {e}"),
            step: Some(step),
            report,
        }
    }

    fn with_report(mut self, base: &Report) -> Self {
        let phi = self.report.phi.take();
        let psi = self.report.psi.take();
        *self.report = Report {
            phi: phi.or_else(|| base.phi.clone()),
            psi: psi.or_else(|| base.psi.clone()),
            ..base.clone()
        };
        self
    }
}

type CmdResult = std::result::Result<(Report, Option<PathBuf>), Failure>;

/// Runs one command; `argv` excludes the program name.
pub fn execute<I, T>(argv: I) -> CommandOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let full = std::iter::once(OsString::from("mare")).chain(argv.into_iter().map(Into::into));
    let cli = match Cli::try_parse_from(full) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            return CommandOutcome {
                exit_code: EXIT_PASS,
                report_json: String::new(),
                trace_csv: None,
                message: Some(e.to_string()),
            };
        }
        Err(e) => return failure_outcome(Failure::usage(e.to_string())),
    };
    let (name, result) = match cli.command {
        Command::Classify { problem } => ("classify", classify(&problem)),
        Command::Solve {
            problem,
            method,
            alpha,
            beta,
            tol,
            max_iter,
            trace,
        } => (
            "solve",
            solve(
                &problem,
                method,
                alpha.zip(beta),
                tol,
                max_iter,
                trace.as_deref(),
            ),
        ),
        Command::Verify {
            problem,
            phi,
            psi,
            tol,
        } => ("verify", verify(&problem, &phi, &psi, tol)),
        Command::Oracle {
            problem,
            tol,
            max_iter,
        } => ("oracle", oracle(&problem, tol, max_iter)),
        Command::Generate {
            regime,
            n,
            m,
            seed,
            density,
            output,
        } => (
            "generate",
            generate_cmd(
                FamilySpec::new(regime.into(), n, m, seed).with_density(density),
                &output,
            ),
        ),
        Command::RateStudy { problem, grid } => ("rate-study", rate_study(&problem, grid)),
    };
    match result {
        Ok((mut report, trace_csv)) => {
            report.command = Some(name);
            let exit_code = if report.all_passed() {
                EXIT_PASS
            } else {
                EXIT_CHECK_FAILED
            };
            let failed: Vec<String> = report
                .checks
                .iter()
                .filter(|c| c.status == CheckStatus::Fail)
                .map(|c| format!("check ({}) {} failed: {}", c.id, c.name, c.detail))
                .collect();
            CommandOutcome {
                exit_code,
                report_json: report.to_json(),
                trace_csv,
                message: (!failed.is_empty()).then(|| failed.join("\n")),
            }
        }
        Err(mut f) => {
            f.report.command = Some(name);
            failure_outcome(f)
        }
    }
}

fn failure_outcome(f: Failure) -> CommandOutcome {
    let mut report = *f.report;
    report.error = Some(ErrorInfo {
        kind: f.kind,
        step: f.step,
        message: f.message.clone(),
    });
    CommandOutcome {
        exit_code: f.code,
        report_json: report.to_json(),
        trace_csv: None,
        message: Some(f.message),
    }
}

fn read_text(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

fn load_problem(path: &Path) -> std::result::Result<MareProblem, Failure> {
    MareProblem::from_json(&read_text(path)?)
        .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn load_matrix(path: &Path) -> std::result::Result<Matrix, Failure> {
    serde_json::from_str(&read_text(path)?)
        .map_err(|e| Failure::usage(format!("{}: invalid matrix: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> std::result::Result<(), Failure> {
    fs::write(path, text)
        .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
}

fn classified(p: &MareProblem) -> std::result::Result<(ProblemClass, Report), Failure> {
    let class = classify_problem(p).map_err(|e| Failure::from_error("classification", e))?;
    let report = Report {
        regime: Some(class.regime),
        drift: class.drift(),
        r: Some(class.assumption1.algebraic_multiplicity),
        name: p.name().map(str::to_string),
        ..Report::default()
    };
    Ok((class, report))
}

fn classify(path: &Path) -> CmdResult {
    let p = load_problem(path)?;
    let (class, mut report) = classified(&p)?;
    report.details = Some(serde_json::json!({
        "k_kind": class.k_class.kind,
        "irreducible": class.irreducible,
        "regular": class.regular.regular,
        "assumption1": class.assumption1,
    }));
    Ok((report, None))
}

fn solve(
    path: &Path,
    method: Method,
    pair: Option<(f64, f64)>,
    tol: Option<f64>,
    max_iter: Option<usize>,
    trace: Option<&Path>,
) -> CmdResult {
    let p = load_problem(path)?;
    let (class, mut report) = classified(&p)?;
    report.method = Some(method.label());
    if method == Method::FixedPoint {
        if trace.is_some() {
            return Err(Failure::usage(
                "--trace needs a doubling method (adda or sda)",
            ));
        }
        if pair.is_some() {
            return Err(Failure::usage(
                "--alpha and --beta need a doubling method (adda or sda)",
            ));
        }
        return solve_fixed_point(&p, &class, report, tol, max_iter);
    }

    let params = match method {
        Method::Sda => match pair {
            Some((a, b)) if a != b => {
                return Err(Failure::usage(format!(
                    "sda needs --alpha equal to --beta, got {a} and {b}"
                )))
            }
            _ => select_sda_parameters(&p, pair.map(|(a, _)| a)),
        },
        _ => select_parameters(&p, pair),
    };
    let mut params = params.map_err(|e| Failure::from_error("parameter selection", e))?;
    if let Some(t) = tol {
        params.stop_tol = t;
    }
    if let Some(k) = max_iter {
        params.max_iter = k;
    }
    params
        .validate(&p)
        .map_err(|e| Failure::from_error("parameter selection", e))?;
    report.alpha = Some(params.alpha);
    report.beta = Some(params.beta);

    let sr = solve_classified(&p, &class, &params)
        .map_err(|e| Failure::from_error("doubling", e).with_report(&report))?;
    fill_from_solve(&mut report, &sr);
    let trace_path = match trace {
        Some(t) => {
            let file = fs::File::create(t)
                .map_err(|e| Failure::usage(format!("cannot write {}: {e}", t.display())))?;
            write_trace_csv(&sr.trace, file).map_err(|e| Failure::usage(e.to_string()))?;
            report.trace_csv = Some(t.display().to_string());
            Some(t.to_path_buf())
        }
        None => None,
    };
    Ok((report, trace_path))
}

fn fill_from_solve(report: &mut Report, sr: &SolveReport) {
    let c = &sr.certificate;
    report.iterations = Some(sr.iterations);
    report.residual_primal = Some(c.residual_primal);
    report.residual_dual = Some(c.residual_dual);
    report.rho_phi_psi = Some(c.rho_phi_psi);
    report.theoretical_rate = sr.theoretical_rate;
    report.observed_rate = sr.observed_rate;
    report.phi = Some(sr.phi.clone());
    report.psi = Some(sr.psi.clone());
    report.flags = Some(sr.flags.clone());
    report.push_checks(&c.checks);

    let supported = sr.class.regime.is_supported();
    let structural: Vec<&String> = sr
        .flags
        .iter()
        .filter(|f| {
            matches!(
                f.as_str(),
                "sign_or_monotonicity_violation"
                    | "bound_violation"
                    | "step_matrix_not_nonsingular_m"
            )
        })
        .collect();
    let detail = format!(
        "{} bound violations, flags {structural:?}",
        sr.bound_violations
    );
    let status = if supported {
        pass_or_fail(structural.is_empty())
    } else {
        CheckStatus::NotApplicable
    };
    report.push_check(
        "doubling_structure",
        status,
        structural.len() as f64,
        detail,
    );

    let non_quadratic = sr.flags.iter().any(|f| f == "non_quadratic");
    let status = if supported {
        pass_or_fail(!non_quadratic)
    } else {
        CheckStatus::NotApplicable
    };
    let detail = format!(
        "theoretical {:?}, observed {:?}",
        sr.theoretical_rate, sr.observed_rate
    );
    report.push_check(
        "quadratic_convergence",
        status,
        sr.observed_rate.unwrap_or(f64::NAN),
        detail,
    );
}

fn solve_fixed_point(
    p: &MareProblem,
    class: &ProblemClass,
    mut report: Report,
    tol: Option<f64>,
    max_iter: Option<usize>,
) -> CmdResult {
    let tol = tol.unwrap_or(mare_core::oracle::DEFAULT_ORACLE_TOL);
    let max_iter = max_iter.unwrap_or(mare_core::oracle::DEFAULT_ORACLE_MAX_ITER);
    let primal = fixed_point_solve(p, tol, max_iter)
        .map_err(|e| Failure::from_error("fixed-point (primal)", e))?;
    let dual = fixed_point_solve_dual(p, tol, max_iter)
        .map_err(|e| Failure::from_error("fixed-point (dual)", e))?;
    report.iterations = Some(primal.iterations.max(dual.iterations));
    report.converged = Some(primal.converged && dual.converged);
    if !(primal.converged && dual.converged) {
        report.phi = Some(primal.phi);
        report.psi = Some(dual.phi);
        let mut f = Failure::from_error(
            "fixed-point",
            Error::NoConvergence {
                iterations: max_iter,
            },
        );
        *f.report = report;
        return Err(f);
    }
    let cert = make_certificate_with(p, class, &primal.phi, &dual.phi, DEFAULT_CERT_TOL)
        .map_err(|e| Failure::from_error("certificate", e).with_report(&report))?;
    report.residual_primal = Some(cert.residual_primal);
    report.residual_dual = Some(cert.residual_dual);
    report.rho_phi_psi = Some(cert.rho_phi_psi);
    report.phi = Some(cert.phi.clone());
    report.psi = Some(cert.psi.clone());
    report.push_checks(&cert.checks);
    Ok((report, None))
}

fn verify(path: &Path, phi: &Path, psi: &Path, tol: f64) -> CmdResult {
    if !(tol > 0.0) {
        return Err(Failure::usage(format!("--tol must be positive, got {tol}")));
    }
    let p = load_problem(path)?;
    let phi = load_matrix(phi)?;
    let psi = load_matrix(psi)?;
    let (class, mut report) = classified(&p)?;
    let cert = make_certificate_with(&p, &class, &phi, &psi, tol)
        .map_err(|e| Failure::from_error("certificate", e).with_report(&report))?;
    report.residual_primal = Some(cert.residual_primal);
    report.residual_dual = Some(cert.residual_dual);
    report.rho_phi_psi = Some(cert.rho_phi_psi);
    report.details = Some(serde_json::json!({
        "similarity_residual": cert.similarity_residual,
        "r_kind": cert.r_kind,
        "s_kind": cert.s_kind,
        "r_singular": cert.r_singular,
        "s_singular": cert.s_singular,
        "i_minus_phi_psi": cert.i_minus_phi_psi,
        "i_minus_psi_phi": cert.i_minus_psi_phi,
    }));
    report.push_checks(&cert.checks);
    Ok((report, None))
}

fn oracle(path: &Path, tol: f64, max_iter: usize) -> CmdResult {
    let p = load_problem(path)?;
    let (class, mut report) = classified(&p)?;
    let primal = fixed_point_solve(&p, tol, max_iter)
        .map_err(|e| Failure::from_error("fixed-point (primal)", e))?;
    let dual = fixed_point_solve_dual(&p, tol, max_iter)
        .map_err(|e| Failure::from_error("fixed-point (dual)", e))?;
    let converged = primal.converged && dual.converged;
    report.method = Some("fixed-point");
    report.iterations = Some(primal.iterations.max(dual.iterations));
    report.residual_primal = Some(primal.final_residual);
    report.residual_dual = Some(dual.final_residual);
    report.converged = Some(converged);
    report.details = Some(serde_json::json!({
        "primal_iterations": primal.iterations,
        "dual_iterations": dual.iterations,
    }));
    if converged {
        let cert = make_certificate_with(&p, &class, &primal.phi, &dual.phi, DEFAULT_CERT_TOL)
            .map_err(|e| Failure::from_error("certificate", e).with_report(&report))?;
        report.rho_phi_psi = Some(cert.rho_phi_psi);
        report.push_checks(&cert.checks);
    }
    report.push_check(
        "oracle_converged",
        pass_or_fail(converged),
        primal.final_residual.max(dual.final_residual),
        format!(
            "primal {} steps, dual {} steps, tol {tol:e}",
            primal.iterations, dual.iterations
        ),
    );
    let violations = primal.monotonicity_violations + dual.monotonicity_violations;
    report.push_check(
        "oracle_monotone",
        pass_or_fail(violations == 0),
        violations as f64,
        format!("{violations} decreasing entries"),
    );
    report.phi = Some(primal.phi);
    report.psi = Some(dual.phi);
    Ok((report, None))
}

fn generate_cmd(spec: FamilySpec, output: &Path) -> CmdResult {
    let p = generate(&spec).map_err(|e| Failure::from_error("generation", e))?;
    let (class, mut report) = classified(&p)?;
    write_text(output, &to_json_sig17(&p))?;
    report.output = Some(output.display().to_string());
    report.push_check(
        "regime_matches_target",
        pass_or_fail(class.regime == spec.regime_target),
        0.0,
        format!(
            "target {:?}, classified {:?}",
            spec.regime_target, class.regime
        ),
    );
    Ok((report, None))
}

fn rate_study(path: &Path, grid: usize) -> CmdResult {
    if grid == 0 {
        return Err(Failure::usage("--grid must be at least 1"));
    }
    let p = load_problem(path)?;
    let (class, mut report) = classified(&p)?;
    let opt =
        select_parameters(&p, None).map_err(|e| Failure::from_error("parameter selection", e))?;
    report.alpha = Some(opt.alpha);
    report.beta = Some(opt.beta);
    let best = solve_classified(&p, &class, &opt)
        .map_err(|e| Failure::from_error("doubling at the optimal pair", e).with_report(&report))?;
    fill_from_solve(&mut report, &best);

    let steps: Vec<f64> = (0..=grid).map(|i| 1.0 + i as f64 / grid as f64).collect();
    let points: Vec<(f64, f64)> = steps
        .iter()
        .flat_map(|&sa| steps.iter().map(move |&sb| (opt.alpha * sa, opt.beta * sb)))
        .collect();
    let rows: Vec<GridRow> = std::thread::scope(|s| {
        let workers: Vec<_> = points
            .iter()
            .map(|&(alpha, beta)| {
                let (p, class) = (&p, &class);
                s.spawn(move || grid_row(p, class, alpha, beta))
            })
            .collect();
        workers
            .into_iter()
            .map(|w| w.join().expect("grid worker panicked"))
            .collect()
    });

    let worst = rows
        .iter()
        .filter_map(|r| r.theoretical_rate)
        .fold(f64::INFINITY, f64::min);
    let detail = format!(
        "optimal {:?}, best on grid {worst:e}",
        best.theoretical_rate
    );
    let status = match (class.regime.is_supported(), best.theoretical_rate) {
        (false, _) => CheckStatus::NotApplicable,
        (true, Some(t)) => pass_or_fail(t <= worst + OPTIMALITY_SLACK),
        (true, None) => CheckStatus::Fail,
    };
    report.push_check(
        "optimal_parameters",
        status,
        best.theoretical_rate.map_or(f64::NAN, |t| t - worst),
        detail,
    );
    report.grid = Some(rows);
    Ok((report, None))
}

fn grid_row(p: &MareProblem, class: &ProblemClass, alpha: f64, beta: f64) -> GridRow {
    let run = select_parameters(p, Some((alpha, beta)))
        .and_then(|params| solve_classified(p, class, &params));
    match run {
        Ok(sr) => GridRow {
            alpha,
            beta,
            theoretical_rate: sr.theoretical_rate,
            observed_rate: sr.observed_rate,
            iterations: Some(sr.iterations),
            error: None,
        },
        Err(e) => GridRow {
            alpha,
            beta,
            theoretical_rate: None,
            observed_rate: None,
            iterations: None,
            error: Some(e.to_string()),
        },
    }
}
