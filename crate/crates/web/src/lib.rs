//! Browser bindings for the leaf-function and Duffing demo page.
//!
//! Every export returns a flat `Float64Array`. Points the library refuses to
//! evaluate (poles, escape times, outside the real domain) come back as NaN
//! so the page can break the polyline there.

use leaf_duffing::duffing::{Catalogue, Damping, Polynomial, SolutionId, SolutionSpec};
use leaf_duffing::leaf::{Basis, LeafKind};
use leaf_duffing::verify::numeric_track;
use wasm_bindgen::prelude::*;

pub const MAX_SAMPLES: usize = 20_000;
const RK_TOL: f64 = 1e-10;

fn sample_times(t_min: f64, t_max: f64, samples: usize) -> Result<Vec<f64>, String> {
    if !(t_min.is_finite() && t_max.is_finite() && t_min < t_max) {
        return Err("need finite t_min < t_max".into());
    }
    if !(2..=MAX_SAMPLES).contains(&samples) {
        return Err(format!("samples must be in 2..={MAX_SAMPLES}"));
    }
    Ok((0..samples).map(|i| t_min + (t_max - t_min) * i as f64 / (samples - 1) as f64).collect())
}

/// Rows of `[n, pi_n, eta_n, zeta_n]` for `n = 1..=n_max`, NaN where a
/// constant does not exist.
pub fn constants_rows(n_max: u32) -> Result<Vec<f64>, String> {
    if !(1..=16).contains(&n_max) {
        return Err("n_max must be in 1..=16".into());
    }
    let mut out = Vec::with_capacity(4 * n_max as usize);
    for n in 1..=n_max {
        let b = Basis::new(n).map_err(|e| e.to_string())?;
        out.extend([n as f64, b.pi_n(), b.eta_n().unwrap_or(f64::NAN), b.zeta_n().unwrap_or(f64::NAN)]);
    }
    Ok(out)
}

/// `[t_0.., x_0..]`: sample times followed by values of one leaf function.
pub fn leaf_samples(kind: &str, n: u32, t_min: f64, t_max: f64, samples: usize) -> Result<Vec<f64>, String> {
    let kind: LeafKind = kind.parse()?;
    let basis = Basis::new(n).map_err(|e| e.to_string())?;
    let ts = sample_times(t_min, t_max, samples)?;
    let xs: Vec<f64> = ts.iter().map(|&t| basis.eval(kind, t).unwrap_or(f64::NAN)).collect();
    Ok([ts, xs].concat())
}

/// `[t.., exact.., numeric..]` for one catalogue solution on `[0, t_max]`.
/// `beta = 0` gives the undamped solution. The numeric channel is an RK
/// integration from the closed form's initial state, all NaN when
/// `numeric` is false.
pub fn duffing_samples(
    id: u8,
    amplitude: f64,
    omega: f64,
    beta: f64,
    t_max: f64,
    samples: usize,
    numeric: bool,
) -> Result<Vec<f64>, String> {
    let id = SolutionId::new(id).map_err(|e| e.to_string())?;
    let mut spec = SolutionSpec::new(id.get(), amplitude, omega).map_err(|e| e.to_string())?;
    if !beta.is_finite() {
        return Err("beta must be finite".into());
    }
    if beta != 0.0 {
        spec = spec.with_damping(Damping::new(Polynomial::constant(beta), 0.0).map_err(|e| e.to_string())?);
    }
    let cat = Catalogue::new().map_err(|e| e.to_string())?;
    let ts = sample_times(0.0, t_max, samples)?;
    let exact: Vec<f64> = ts.iter().map(|&t| cat.solution_value(&spec, t).unwrap_or(f64::NAN)).collect();
    let track = if numeric {
        Some(numeric_track(&cat, &spec, t_max, RK_TOL, 1e3 * amplitude.abs()).map_err(|e| e.to_string())?)
    } else {
        None
    };
    let approx: Vec<f64> = ts
        .iter()
        .map(|&t| track.as_ref().and_then(|tr| tr.value(t)).unwrap_or(f64::NAN))
        .collect();
    Ok([ts, exact, approx].concat())
}

fn js<T>(r: Result<T, String>) -> Result<T, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn constants(n_max: u32) -> Result<Vec<f64>, JsError> {
    js(constants_rows(n_max))
}

#[wasm_bindgen]
pub fn leaf_curve(kind: &str, n: u32, t_min: f64, t_max: f64, samples: usize) -> Result<Vec<f64>, JsError> {
    js(leaf_samples(kind, n, t_min, t_max, samples))
}

#[wasm_bindgen]
pub fn duffing_wave(
    id: u8,
    amplitude: f64,
    omega: f64,
    beta: f64,
    t_max: f64,
    samples: usize,
    numeric: bool,
) -> Result<Vec<f64>, JsError> {
    js(duffing_samples(id, amplitude, omega, beta, t_max, samples, numeric))
}

#[wasm_bindgen]
pub fn formula(id: u8) -> Result<String, JsError> {
    js(SolutionId::new(id).map(|id| format!("x(t) = {}, basis 2 leaf functions of w t", id.formula())).map_err(|e| e.to_string()))
}
