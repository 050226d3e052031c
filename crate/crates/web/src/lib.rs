//! Browser demo: generate a problem, solve it with a per-step trace, and
//! sweep the doubling parameters. Every entry point takes and returns JSON
//! text so the page needs no glue beyond `JSON.parse`.

use mare_core::adda::{select_parameters, select_sda_parameters, solve_classified};
use mare_core::probgen::{generate, FamilySpec};
use mare_core::problem::{classify_problem, MareProblem, Regime};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

pub const MAX_DIM: usize = 20;
pub const MAX_GRID: usize = 8;

fn parse_regime(name: &str) -> Result<Regime, String> {
    match name {
        "nonsingular" => Ok(Regime::NonsingularK),
        "singular-noncritical" => Ok(Regime::SingularNoncritical),
        "critical" => Ok(Regime::Critical),
        other => Err(format!("unknown regime {other:?}")),
    }
}

fn parse_problem(text: &str) -> Result<MareProblem, String> {
    let p = MareProblem::from_json(text).map_err(|e| e.to_string())?;
    if p.n() > MAX_DIM || p.m() > MAX_DIM {
        return Err(format!("n and m are limited to {MAX_DIM} here"));
    }
    Ok(p)
}

/// Problem JSON for a seeded draw from `regime`.
pub fn generate_problem(
    regime: &str,
    n: usize,
    m: usize,
    seed: u64,
    density: f64,
) -> Result<String, String> {
    if n > MAX_DIM || m > MAX_DIM {
        return Err(format!("n and m are limited to {MAX_DIM} here"));
    }
    let spec = FamilySpec::new(parse_regime(regime)?, n, m, seed).with_density(density);
    generate(&spec)
        .map(|p| p.to_json())
        .map_err(|e| e.to_string())
}

/// Classification, solution, certificate checks and the step trace.
pub fn solve_problem(problem: &str, method: &str) -> Result<String, String> {
    let p = parse_problem(problem)?;
    let class = classify_problem(&p).map_err(|e| e.to_string())?;
    let params = match method {
        "adda" => select_parameters(&p, None),
        "sda" => select_sda_parameters(&p, None),
        other => return Err(format!("unknown method {other:?}")),
    }
    .map_err(|e| e.to_string())?;
    let r = solve_classified(&p, &class, &params).map_err(|e| e.to_string())?;
    let c = &r.certificate;
    let out = json!({
        "regime": class.regime,
        "drift": class.drift(),
        "r": class.assumption1.algebraic_multiplicity,
        "method": method,
        "alpha": params.alpha,
        "beta": params.beta,
        "iterations": r.iterations,
        "residual_primal": c.residual_primal,
        "residual_dual": c.residual_dual,
        "rho_phi_psi": c.rho_phi_psi,
        "theoretical_rate": r.theoretical_rate,
        "observed_rate": r.observed_rate,
        "phi": r.phi,
        "psi": r.psi,
        "r_singular": c.r_singular,
        "s_singular": c.s_singular,
        "checks": c.checks,
        "flags": r.flags,
        "trace": r.trace,
    });
    Ok(out.to_string())
}

/// Theoretical rate and iteration count over `α*·(1 + i/steps)` ×
/// `β*·(1 + j/steps)`; failed points are `null`.
pub fn rate_grid(problem: &str, steps: usize) -> Result<String, String> {
    if steps == 0 || steps > MAX_GRID {
        return Err(format!("steps must be in 1..={MAX_GRID}"));
    }
    let p = parse_problem(problem)?;
    let class = classify_problem(&p).map_err(|e| e.to_string())?;
    let opt = select_parameters(&p, None).map_err(|e| e.to_string())?;
    let axis = |base: f64| -> Vec<f64> {
        (0..=steps)
            .map(|i| base * (1.0 + i as f64 / steps as f64))
            .collect()
    };
    let (alphas, betas) = (axis(opt.alpha), axis(opt.beta));
    let mut rates = Vec::new();
    let mut iterations = Vec::new();
    for &alpha in &alphas {
        let (mut rate_row, mut iter_row) = (Vec::new(), Vec::new());
        for &beta in &betas {
            let run = select_parameters(&p, Some((alpha, beta)))
                .and_then(|params| solve_classified(&p, &class, &params));
            match run {
                Ok(r) => {
                    rate_row.push(json!(r.theoretical_rate));
                    iter_row.push(json!(r.iterations));
                }
                Err(_) => {
                    rate_row.push(Value::Null);
                    iter_row.push(Value::Null);
                }
            }
        }
        rates.push(rate_row);
        iterations.push(iter_row);
    }
    Ok(json!({
        "regime": class.regime,
        "alphas": alphas,
        "betas": betas,
        "theoretical_rate": rates,
        "iterations": iterations,
    })
    .to_string())
}

#[wasm_bindgen(js_name = generateProblem)]
pub fn generate_problem_js(
    regime: &str,
    n: usize,
    m: usize,
    seed: u32,
    density: f64,
) -> Result<String, JsValue> {
    generate_problem(regime, n, m, u64::from(seed), density).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = solveProblem)]
pub fn solve_problem_js(problem: &str, method: &str) -> Result<String, JsValue> {
    solve_problem(problem, method).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = rateGrid)]
pub fn rate_grid_js(problem: &str, steps: usize) -> Result<String, JsValue> {
    rate_grid(problem, steps).map_err(|e| JsValue::from_str(&e))
}
