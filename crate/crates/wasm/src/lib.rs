//! Browser bindings: Magnus expansion, two-route membership and the Massey
//! pairing matrix. Each export returns a JSON string; the plain functions in
//! this module do the work and are tested natively.

use filtrate_core::coeff::RingSpec;
use filtrate_core::emap::EMap;
use filtrate_core::filt::{FiltrationSpec, Route};
use filtrate_core::magnus::magnus;
use filtrate_core::massey::{necklace, pairing_matrix};
use filtrate_core::words::{max_generator_in, parse_word};
use serde_json::json;
use wasm_bindgen::prelude::*;

// a page should answer in well under a second
const MAX_CAP: usize = 8;
const MAX_LEVEL: usize = 6;
const MAX_MASSEY: (u32, usize) = (3, 5);

fn alphabet_of(word: &str) -> u32 {
    max_generator_in(word).max(1)
}

pub fn expand(word: &str, ring: &str, cap: usize) -> Result<String, String> {
    if cap > MAX_CAP {
        return Err(format!("cap is limited to {MAX_CAP} in the browser"));
    }
    let ring: RingSpec = ring.parse().map_err(|e: filtrate_core::coeff::RingParseError| e.to_string())?;
    let g = parse_word(word, alphabet_of(word)).map_err(|e| e.to_string())?;
    let s = magnus(&g, &ring, cap);
    Ok(json!({"word": g.to_string(), "series": s.to_json()}).to_string())
}

pub fn decide(word: &str, emap: &str, level: usize) -> Result<String, String> {
    if level > MAX_LEVEL {
        return Err(format!("level is limited to {MAX_LEVEL} in the browser"));
    }
    if emap.trim_start().starts_with("file:") {
        return Err("file: e-maps are not available in the browser".into());
    }
    let g = parse_word(word, alphabet_of(word)).map_err(|e| e.to_string())?;
    let e = EMap::from_spec(emap).map_err(|e| e.to_string())?;
    let spec = FiltrationSpec::new(e, level, Route::Both).map_err(|e| e.to_string())?;
    let d = spec.decide(&g).map_err(|e| e.to_string())?;
    let series = d.series.expect("both routes run");
    let kernels = d.kernels.expect("both routes run");
    let witness = series.witness.map(|w| {
        json!({"degree": w.degree, "word": w.word.to_string(), "coefficient": w.coefficient.to_string()})
    });
    let kernel_witness = kernels.witness.map(|(d, w)| json!({"degree": d, "word": w.to_string()}));
    Ok(json!({
        "word": g.to_string(),
        "emap": spec.emap().to_string(),
        "level": level,
        "member": d.member,
        "rows": (1..=level).map(|n| spec.emap().row(n).map(|r| r.iter().map(ToString::to_string).collect::<Vec<_>>()))
            .collect::<Result<Vec<_>, _>>().map_err(|e| e.to_string())?,
        "series": {"member": series.member, "witness": witness},
        "kernels": {"member": kernels.member, "witness": kernel_witness},
    })
    .to_string())
}

pub fn massey(alphabet: u32, level: usize) -> Result<String, String> {
    if alphabet == 0 || alphabet > MAX_MASSEY.0 || level > MAX_MASSEY.1 {
        return Err(format!("alphabet must be 1..={} and level at most {}", MAX_MASSEY.0, MAX_MASSEY.1));
    }
    let m = pairing_matrix(alphabet, level).map_err(|e| e.to_string())?;
    Ok(json!({
        "rank": m.rank(),
        "necklace": necklace(alphabet as u64, level as u64).to_string(),
        "matrix": m.to_json(),
    })
    .to_string())
}

#[wasm_bindgen]
pub fn magnus_expansion(word: &str, ring: &str, cap: usize) -> Result<String, JsError> {
    expand(word, ring, cap).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn membership(word: &str, emap: &str, level: usize) -> Result<String, JsError> {
    decide(word, emap, level).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn massey_pairing(alphabet: u32, level: usize) -> Result<String, JsError> {
    massey(alphabet, level).map_err(|e| JsError::new(&e))
}
