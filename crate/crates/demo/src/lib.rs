//! WebAssembly bindings for the static demo page in `www/`. Every export
//! takes plain strings or numbers and returns a string (SVG or JSON), so the
//! page needs no glue beyond the generated module.

use num_traits::ToPrimitive;
use serde_json::json;
use wasm_bindgen::prelude::*;

use rrz_core::degree::DegreeValue;
use rrz_core::divisor::euler_at;
use rrz_core::figure::figure_data;
use rrz_core::h0::{self, dim_h0, generates, tabulated_generating_set};
use rrz_core::h1::{covering_radius, f_generators, min_separation, subset_sums_circle};
use rrz_core::parse::parse_rational;

const MAX_WITNESS_A: u64 = 64;
const MAX_CIRCLE_M: u32 = 10;

/// Step graph of `χ − 1` on `[lo, hi]` as an SVG document.
#[wasm_bindgen]
pub fn figure_svg(lo: &str, hi: &str, samples_per_unit: u32) -> Result<String, String> {
    let lo = parse_rational(lo).map_err(|e| e.to_string())?;
    let hi = parse_rational(hi).map_err(|e| e.to_string())?;
    if &hi - &lo > rrz_core::gamma::int(64) {
        return Err("range wider than 64 units".into());
    }
    let series = figure_data(&lo, &hi, samples_per_unit.min(64)).map_err(|e| e.to_string())?;
    Ok(series.to_svg())
}

/// Generators of `H⁰` at `deg₂`, with the admissible witness for every
/// target when the interval is small.
#[wasm_bindgen]
pub fn h0_generators(deg2: &str) -> Result<String, String> {
    let deg = DegreeValue::rational(parse_rational(deg2).map_err(|e| e.to_string())?);
    let dim = dim_h0(&deg).map_err(|e| e.to_string())?;
    let a = h0::h0_interval_bound(&deg).map_err(|e| e.to_string())?;
    let chi = euler_at(&deg).map_err(|e| e.to_string())?;
    let Some(a) = a.to_u64().filter(|&a| a <= h0::MAX_CONSTRUCTION_A) else {
        return Err("interval too large to list generators".into());
    };
    let generators = if a == 0 {
        vec![]
    } else {
        tabulated_generating_set(a).map_err(|e| e.to_string())?
    };
    let witnesses = if a <= MAX_WITNESS_A {
        let cert = generates(&generators, a)
            .map_err(|e| e.to_string())?
            .certificate()
            .ok_or("construction does not generate")?;
        (-(a as i64)..=a as i64)
            .map(|j| json!({ "target": j, "subset": cert.witness(j) }))
            .collect()
    } else {
        vec![]
    };
    Ok(json!({
        "deg2": deg.to_string(),
        "a": a,
        "dimension": dim,
        "h1": chi.h1,
        "chi": chi.chi,
        "generators": generators,
        "witnesses": witnesses,
    })
    .to_string())
}

/// Points of `F(m)` and their subset sums on `R/Z`, with the covering radius
/// and separation.
#[wasm_bindgen]
pub fn circle_cover(m: u32) -> Result<String, String> {
    if m == 0 || m > MAX_CIRCLE_M {
        return Err(format!("m must lie in 1..={MAX_CIRCLE_M}"));
    }
    let family = f_generators(m);
    let sums = subset_sums_circle(&family, MAX_CIRCLE_M as usize).map_err(|e| e.to_string())?;
    let radius = covering_radius(&sums).map_err(|e| e.to_string())?;
    let separation = if m >= 2 {
        Some(
            min_separation(&family)
                .map_err(|e| e.to_string())?
                .to_string(),
        )
    } else {
        None
    };
    Ok(json!({
        "m": m,
        "generators": family.iter().map(|p| json!({ "exact": p.to_string(), "x": p.to_f64() })).collect::<Vec<_>>(),
        "sums": sums.iter().map(|p| p.to_f64()).collect::<Vec<_>>(),
        "covering_radius": radius.to_string(),
        "radius": radius.to_f64(),
        "min_separation": separation,
    })
    .to_string())
}
