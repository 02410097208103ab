//! Browser bindings for a few `liecompat` operations. Inputs and outputs are
//! JSON strings in the same formats the command-line tool reads and writes.

use liecompat::connection::pr_residual;
use liecompat::io::{metric_file_rational, parse_algebra, parse_metric, LoadedAlgebra, LoadedMetric};
use liecompat::search::{find_compatible_metric, SearchConfig, SignatureConstraint};
use liecompat::{catalog, Metric, Residual};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn triple(idx: &[usize]) -> String {
    let parts: Vec<String> = idx.iter().map(|i| format!("e{}", i + 1)).collect();
    format!("({})", parts.join(","))
}

fn residual_json(r: &Residual) -> Value {
    json!({
        "value": r.value,
        "exact_zero": r.exact_zero,
        "worst": (!r.exact_zero).then(|| triple(&r.worst)),
    })
}

fn load(text: &str) -> Result<LoadedAlgebra, String> {
    parse_algebra(text).map_err(|e| e.to_string())
}

pub fn catalog_names_json() -> Value {
    json!(catalog::SOURCES.iter().map(|(n, _)| *n).collect::<Vec<_>>())
}

pub fn catalog_text(name: &str) -> Result<String, String> {
    catalog::SOURCES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| t.to_string())
        .ok_or_else(|| format!("no catalog entry named {name:?}"))
}

pub fn validate_json(algebra: &str) -> Result<Value, String> {
    let loaded = load(algebra)?;
    let alg = &loaded.algebra;
    let jacobi = alg.jacobi_residual();
    let uni = alg.unimodularity(0.0);
    Ok(json!({
        "dim": alg.dim(),
        "valid": jacobi.exact_zero,
        "jacobi": residual_json(&jacobi),
        "abelian": alg.is_abelian(),
        "unimodular": uni.unimodular,
    }))
}

pub fn check_json(algebra: &str, metric: &str) -> Result<Value, String> {
    let alg = load(algebra)?.algebra;
    let m = parse_metric(metric).map_err(|e| e.to_string())?;
    if m.dim() != alg.dim() {
        return Err(format!("metric is {0}x{0}, algebra has dimension {1}", m.dim(), alg.dim()));
    }
    let (residual, signature) = match m {
        LoadedMetric::Rational(a) => {
            let metric = Metric::new(a).map_err(|e| e.to_string())?;
            (pr_residual(&alg, &metric), metric.signature())
        }
        LoadedMetric::Float(a) => {
            let metric = Metric::new(a).map_err(|e| e.to_string())?;
            (pr_residual(&alg.to_f64(), &metric), metric.signature())
        }
    };
    let residual = residual.map_err(|e| e.to_string())?;
    Ok(json!({
        "compatible": residual.vanishes(liecompat::DEFAULT_TOL),
        "signature": signature.map_err(|e| e.to_string())?.to_string(),
        "pr_residual": residual_json(&residual),
    }))
}

pub fn search_json(algebra: &str, signature: &str, restarts: usize, seed: u64) -> Result<Value, String> {
    let alg = load(algebra)?.algebra;
    let cfg = SearchConfig {
        signature: signature.parse::<SignatureConstraint>().map_err(|e| e.to_string())?,
        restarts,
        rng_seed: seed,
        ..SearchConfig::default()
    };
    cfg.validate(alg.dim()).map_err(|e| e.to_string())?;
    let res = find_compatible_metric(&alg, &cfg).map_err(|e| e.to_string())?;
    let metric = res.certificate.as_ref().map(|c| match c.exact_metric() {
        Some(m) => serde_json::to_value(metric_file_rational(m.matrix())).expect("metric serialises"),
        None => json!({ "matrix": c.float, "scalar": "float" }),
    });
    Ok(json!({
        "found": res.found(),
        "best_residual": res.best_residual,
        "restarts_run": res.restarts_run,
        "seed": res.seed,
        "signature": res.certificate.as_ref().map(|c| c.signature.to_string()),
        "exact": res.certificate.as_ref().map(|c| c.exact),
        "metric": metric,
    }))
}

fn to_js(r: Result<Value, String>) -> Result<String, JsError> {
    r.map(|v| v.to_string()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = catalogNames)]
pub fn catalog_names() -> String {
    catalog_names_json().to_string()
}

#[wasm_bindgen(js_name = catalogEntry)]
pub fn catalog_entry(name: &str) -> Result<String, JsError> {
    catalog_text(name).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn validate(algebra: &str) -> Result<String, JsError> {
    to_js(validate_json(algebra))
}

#[wasm_bindgen]
pub fn check(algebra: &str, metric: &str) -> Result<String, JsError> {
    to_js(check_json(algebra, metric))
}

#[wasm_bindgen]
pub fn search(algebra: &str, signature: &str, restarts: u32, seed: u32) -> Result<String, JsError> {
    to_js(search_json(algebra, signature, restarts as usize, u64::from(seed)))
}
