//! wasm-bindgen front for the demo page in `www/`. Each export wraps a plain
//! function returning `Result<String, String>` so the logic is testable
//! natively; `JsError` only exists on the wasm side.

use serde_json::json;
use wasm_bindgen::prelude::*;

use fano_sieve::catalog::Catalog;
use fano_sieve::classify::{classify, emit_report, Format};
use fano_sieve::surface::{hj_resolve, newton_interior_points};

/// Chain, discrepancies and `r/a` as JSON.
pub fn resolve_json(r: u32, a: u32) -> Result<String, String> {
    let chain = hj_resolve(r, a).map_err(|e| e.to_string())?;
    let disc = chain.discrepancies().map_err(|e| e.to_string())?;
    Ok(json!({
        "chain": chain.entries,
        "display": chain.to_string(),
        "value": chain.value().to_string(),
        "discrepancies": disc.iter().map(ToString::to_string).collect::<Vec<_>>(),
    })
    .to_string())
}

/// Interior Newton points of a degree-`d` curve in `P(w0,w1,w2)` as JSON.
pub fn newton_json(d: u32, w0: u32, w1: u32, w2: u32) -> Result<String, String> {
    let (count, points) = newton_interior_points(d, [w0, w1, w2]).map_err(|e| e.to_string())?;
    Ok(json!({ "count": count, "points": points }).to_string())
}

/// Text or JSON report for a bundled family.
pub fn report(id: u32, as_json: bool) -> Result<String, String> {
    let cat = Catalog::bundled();
    let f = cat.get(id).map_err(|e| e.to_string())?;
    let report = classify(f).map_err(|e| e.to_string())?;
    Ok(emit_report(&report, if as_json { Format::Json } else { Format::Text }))
}

#[wasm_bindgen]
pub fn resolve(r: u32, a: u32) -> Result<String, JsError> {
    resolve_json(r, a).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn newton(d: u32, w0: u32, w1: u32, w2: u32) -> Result<String, JsError> {
    newton_json(d, w0, w1, w2).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = classifyFamily)]
pub fn classify_family(id: u32, as_json: bool) -> Result<String, JsError> {
    report(id, as_json).map_err(|e| JsError::new(&e))
}
