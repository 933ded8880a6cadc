//! Browser bindings: weight distributions, closed-form counts and bounds for
//! codes given as JSON spec strings.

use rankdec::analysis::{bound_prime, bounds_nonprime, min_weight_count_formula};
use rankdec::{CodeSpec, Error};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Enumeration limit for the page; larger codes would freeze the tab.
pub const PAGE_CAP: u64 = 1 << 20;

fn build(spec: &str) -> Result<rankdec::RankCode, String> {
    let spec: CodeSpec = serde_json::from_str(spec).map_err(|e| format!("line {}, column {}: {e}", e.line(), e.column()))?;
    spec.build().map_err(|e| e.to_string())
}

pub fn distribution_json(spec: &str, cap: u64) -> Result<String, String> {
    let code = build(spec)?;
    let types = code.decomposition().map(|d| d.type_vector());
    let dist = code.weight_distribution(cap.min(PAGE_CAP)).map_err(|e| e.to_string())?;
    Ok(json!({
        "type": types,
        "n": code.n(),
        "k": code.k(),
        "counts": dist.counts,
        "min_distance": dist.min_distance(),
    })
    .to_string())
}

pub fn count_json(spec: &str) -> Result<String, String> {
    let code = build(spec)?;
    let rep = min_weight_count_formula(&code).map_err(|e| e.to_string())?;
    serde_json::to_string(&rep).map_err(|e| e.to_string())
}

pub fn bounds_json(q: u64, m: usize, nk: usize, ell: usize) -> Result<String, String> {
    let (lower, upper) = bounds_nonprime(q, m, nk, ell).map_err(|e| e.to_string())?;
    let prime = match bound_prime(q, m, ell) {
        Ok(b) => Some(b.to_string()),
        Err(Error::NotApplicable(_)) => None,
        Err(e) => return Err(e.to_string()),
    };
    Ok(json!({"lower": lower.to_string(), "upper": upper.to_string(), "prime_upper": prime}).to_string())
}

#[wasm_bindgen(js_name = weightDistribution)]
pub fn weight_distribution(spec: &str, cap: u64) -> Result<String, JsError> {
    distribution_json(spec, cap).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = minWeightCount)]
pub fn min_weight_count(spec: &str) -> Result<String, JsError> {
    count_json(spec).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn bounds(q: u64, m: usize, nk: usize, ell: usize) -> Result<String, JsError> {
    bounds_json(q, m, nk, ell).map_err(|e| JsError::new(&e))
}
