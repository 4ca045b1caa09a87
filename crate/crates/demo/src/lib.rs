//! Three browser operations over `hypoexp`: density and cdf curves with the
//! Lagrange weights, a sampled histogram against the density, and a residual
//! report for a candidate series. Every function takes and returns JSON text
//! so the JavaScript side stays trivial.

use hypoexp::{residual_h, residual_q, HypoexpDistribution, ScaleVector, Series};
use serde_json::{json, Value};

fn parse_vec(text: &str, what: &str) -> Result<Vec<f64>, String> {
    serde_json::from_str(text).map_err(|e| format!("{what}: {e}"))
}

fn distribution(rates: &str) -> Result<HypoexpDistribution, String> {
    HypoexpDistribution::from_rates(&parse_vec(rates, "rates")?).map_err(|e| e.to_string())
}

/// Density and cdf on `points` grid points over `[0, q_{0.999}]`, with the
/// weights and moments.
pub fn curves(rates: &str, points: usize) -> Result<String, String> {
    let d = distribution(rates)?;
    let points = points.clamp(2, 5000);
    let upper = d.quantile(0.999).map_err(|e| e.to_string())?;
    let x: Vec<f64> = (0..points)
        .map(|i| upper * i as f64 / (points - 1) as f64)
        .collect();
    let pdf = x
        .iter()
        .map(|&v| d.pdf(v))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let cdf = x
        .iter()
        .map(|&v| d.cdf(v))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    Ok(json!({
        "rates": d.rates().rates(),
        "weights": d.weights().values(),
        "mean": d.mean(),
        "variance": d.variance(),
        "x": x,
        "pdf": pdf,
        "cdf": cdf,
    })
    .to_string())
}

/// Histogram of `count` seeded draws in `bins` bins over `[0, q_{0.999}]`,
/// normalized to a density, with the analytic density at bin centres.
pub fn histogram(rates: &str, count: usize, bins: usize, seed: u64) -> Result<String, String> {
    let d = distribution(rates)?;
    let bins = bins.clamp(1, 500);
    let count = count.clamp(1, 2_000_000);
    let upper = d.quantile(0.999).map_err(|e| e.to_string())?;
    let width = upper / bins as f64;
    let draws = d.sample(count, seed).map_err(|e| e.to_string())?;
    let mut counts = vec![0usize; bins];
    for x in &draws {
        let b = (x / width) as usize;
        if b < bins {
            counts[b] += 1;
        }
    }
    let density: Vec<f64> = counts
        .iter()
        .map(|&c| c as f64 / (count as f64 * width))
        .collect();
    let centres: Vec<f64> = (0..bins).map(|b| (b as f64 + 0.5) * width).collect();
    let pdf = centres
        .iter()
        .map(|&v| d.pdf(v))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let mean = draws.iter().sum::<f64>() / count as f64;
    Ok(json!({
        "width": width,
        "centres": centres,
        "density": density,
        "pdf": pdf,
        "sample_mean": mean,
        "mean": d.mean(),
    })
    .to_string())
}

/// Residual report of `psi` against scales `mu` for equation `"h"` or `"q"`.
pub fn residuals(psi: &str, scales: &str, equation: &str, order: usize) -> Result<String, String> {
    let coeffs = parse_vec(psi, "psi")?;
    let mu = ScaleVector::new(&parse_vec(scales, "scales")?).map_err(|e| e.to_string())?;
    let order = order.clamp(1, 32);
    if coeffs.len() > order + 1 {
        return Err(format!("psi has more than {} coefficients", order + 1));
    }
    let series = Series::from_poly(&coeffs, order).map_err(|e| e.to_string())?;
    let report = match equation {
        "h" => residual_h(&series, &mu, 1e-10),
        "q" => residual_q(&series, &mu, 1e-10),
        other => return Err(format!("unknown equation {other:?}")),
    }
    .map_err(|e| e.to_string())?;
    let mut v: Value = serde_json::to_value(&report).map_err(|e| e.to_string())?;
    v["compatible"] = json!(report.is_compatible());
    Ok(v.to_string())
}

#[cfg(target_arch = "wasm32")]
mod bindings {
    use wasm_bindgen::prelude::*;

    #[wasm_bindgen]
    pub fn curves(rates: &str, points: usize) -> Result<String, JsError> {
        super::curves(rates, points).map_err(|e| JsError::new(&e))
    }

    #[wasm_bindgen]
    pub fn histogram(rates: &str, count: usize, bins: usize, seed: u32) -> Result<String, JsError> {
        super::histogram(rates, count, bins, seed as u64).map_err(|e| JsError::new(&e))
    }

    #[wasm_bindgen]
    pub fn residuals(
        psi: &str,
        scales: &str,
        equation: &str,
        order: usize,
    ) -> Result<String, JsError> {
        super::residuals(psi, scales, equation, order).map_err(|e| JsError::new(&e))
    }
}
