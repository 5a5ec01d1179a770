//! Browser bindings for the static demo page in `www/`.
//!
//! Every export takes plain values and returns a JSON string, so the page
//! stays framework-free. The `*_json` functions are the native entry points
//! used by the tests; the `#[wasm_bindgen]` wrappers only convert errors.

use serde::Serialize;
use simplex_forecast::fixtures::worked_example;
use simplex_forecast::synthetic::{
    consistency_experiment, full_index, pilot_probes, MonteCarloOptions, SyntheticConfig,
};
use simplex_forecast::{
    estimate_or_fallback, k_ball_simplex, sub_complex, ComplexSnapshot, FallbackPolicy, KernelParams, Simplex,
};
use wasm_bindgen::prelude::*;

fn parse_vertices(text: &str) -> Result<Vec<u32>, String> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| format!("not a vertex id: {t:?}")))
        .collect()
}

fn parse_simplex(text: &str) -> Result<Simplex, String> {
    Simplex::new(parse_vertices(text)?).map_err(|e| e.to_string())
}

/// The bundled example complex, one maximal simplex per line.
pub fn example_facets_text() -> String {
    worked_example()
        .maximal()
        .iter()
        .map(|s| s.vertices().iter().map(u32::to_string).collect::<Vec<_>>().join(" "))
        .collect::<Vec<_>>()
        .join("\n")
}

#[derive(Serialize)]
struct Exploration {
    members: Vec<u32>,
    candidates: Vec<u32>,
    f_vector: Vec<u64>,
    /// Maximal simplices of the whole complex, for drawing.
    facets: Vec<Vec<u32>>,
    /// Maximal simplices of the sub-complex induced by the ball.
    ball_facets: Vec<Vec<u32>>,
}

/// k-ball and f-vector of `simplex` in the complex spanned by `facets`
/// (one simplex per line, vertices separated by spaces or commas).
pub fn explore_json(facets: &str, simplex: &str, k: usize, max_dim: usize) -> Result<String, String> {
    let simplices = facets
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(parse_simplex)
        .collect::<Result<Vec<_>, _>>()?;
    let c = ComplexSnapshot::from_simplices(simplices);
    let s = parse_simplex(simplex)?;
    let ball = k_ball_simplex(&c, &s, k).map_err(|e| e.to_string())?;
    let sub = sub_complex(&c, &s, k).map_err(|e| e.to_string())?;
    let out = Exploration {
        members: ball.members.iter().copied().collect(),
        candidates: ball.candidates().collect(),
        f_vector: sub.f_vector(max_dim).counts().to_vec(),
        facets: c.maximal().iter().map(|f| f.vertices().to_vec()).collect(),
        ball_facets: sub.maximal().iter().map(|f| f.vertices().to_vec()).collect(),
    };
    Ok(serde_json::to_string(&out).expect("serializable"))
}

#[derive(Serialize)]
struct BetaCurve {
    probe: Vec<u64>,
    truth: f64,
    betas: Vec<f64>,
    estimates: Vec<f64>,
}

/// Estimates at the most common positive-probability feature of one
/// synthetic star filtration, over a log-spaced β grid.
pub fn beta_curve_json(slices: usize, delta: u64, seed: u64) -> Result<String, String> {
    let cfg = SyntheticConfig::star_family(slices, seed);
    let probe = pilot_probes(&cfg, 1).map_err(|e| e.to_string())?.remove(0);
    let index = full_index(&cfg).map_err(|e| e.to_string())?;
    let betas: Vec<f64> = (0..=24).map(|i| 10f64.powf(-3.0 + i as f64 * 0.25)).collect();
    let estimates = betas
        .iter()
        .map(|&b| {
            let params = KernelParams::new(b, delta).map_err(|e| e.to_string())?;
            estimate_or_fallback(&index, &probe, params, FallbackPolicy::BaseRate).map_err(|e| e.to_string())
        })
        .collect::<Result<Vec<_>, _>>()?;
    let out = BetaCurve {
        truth: cfg.ground_truth.eval(&probe),
        probe: probe.values().to_vec(),
        betas,
        estimates,
    };
    Ok(serde_json::to_string(&out).expect("serializable"))
}

/// Mean absolute error against the known probability as T grows, β = 1/T.
pub fn consistency_json(t_grid: &str, replicates: usize, seed: u64) -> Result<String, String> {
    let grid: Vec<usize> = parse_vertices(t_grid)?.into_iter().map(|t| t as usize).collect();
    let first = *grid.first().ok_or("empty T grid")?;
    let cfg = SyntheticConfig::star_family(first, seed);
    let report =
        consistency_experiment(&cfg, &grid, &MonteCarloOptions::consistency(replicates)).map_err(|e| e.to_string())?;
    Ok(serde_json::to_string(&report).expect("serializable"))
}

#[wasm_bindgen]
pub fn example_facets() -> String {
    example_facets_text()
}

#[wasm_bindgen]
pub fn explore(facets: &str, simplex: &str, k: usize, max_dim: usize) -> Result<String, JsError> {
    explore_json(facets, simplex, k, max_dim).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn beta_curve(slices: usize, delta: u32, seed: u32) -> Result<String, JsError> {
    beta_curve_json(slices, delta.into(), seed.into()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn consistency(t_grid: &str, replicates: usize, seed: u32) -> Result<String, JsError> {
    consistency_json(t_grid, replicates, seed.into()).map_err(|e| JsError::new(&e))
}
