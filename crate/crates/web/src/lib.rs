//! Browser demo: score a handful of dated points in the page.
//!
//! Each point is an artifact with a year and one numeric value. The exported
//! functions return flat `Float64Array`s so the page can draw them directly.

use creativity_core::{
    build_graph_pair, build_similarity_matrix, solve_scores, unexpectedness_vector, ArtifactRecord, AttributeSpec,
    Corpus, GraphConfig, Kernel, Measure, Payload, ThresholdRule, UnexpectednessConfig,
};
use wasm_bindgen::prelude::*;

const ATTRIBUTE: &str = "value";

fn kernel(name: &str) -> Result<Kernel, String> {
    match name {
        "linear" => Ok(Kernel::Linear),
        "exponential" => Ok(Kernel::Exponential),
        other => Err(format!("unknown kernel `{other}`")),
    }
}

fn corpus(years: &[i32], values: &[f64]) -> Result<Corpus, String> {
    if years.len() != values.len() {
        return Err(format!("{} years but {} values", years.len(), values.len()));
    }
    if years.is_empty() {
        return Err("add at least one point".into());
    }
    let artifacts = years
        .iter()
        .zip(values)
        .enumerate()
        .map(|(i, (&year, &v))| ArtifactRecord {
            id: format!("p{i}"),
            year,
            values: vec![Payload::Scalar(v)],
        })
        .collect();
    Corpus::new(vec![AttributeSpec::numeric(ATTRIBUTE, Kernel::Linear)], artifacts, Vec::new())
        .map_err(|e| e.to_string())
}

/// Scores laid out as `[aggregate; m, novelty; m, influence; m, threshold,
/// iterations, converged]`. The threshold is NaN when undefined.
pub fn creativity_scores(
    years: &[i32],
    values: &[f64],
    alpha: f64,
    beta: f64,
    percentile: f64,
    kernel_name: &str,
) -> Result<Vec<f64>, String> {
    let corpus = corpus(years, values)?;
    let sim = build_similarity_matrix(&corpus, ATTRIBUTE, kernel(kernel_name)?).map_err(|e| e.to_string())?;
    let config = GraphConfig {
        alpha,
        beta,
        threshold_rule: ThresholdRule::Percentile(percentile),
        ..GraphConfig::default()
    };
    let graphs = build_graph_pair(&sim, years, &config).map_err(|e| e.to_string())?;
    let scores = solve_scores(&graphs, &config).map_err(|e| e.to_string())?;
    let mut out = scores.aggregate;
    out.extend(scores.novelty);
    out.extend(scores.influence);
    out.push(graphs.threshold.unwrap_or(f64::NAN));
    out.push(scores.iterations_used as f64);
    out.push(if scores.converged { 1.0 } else { 0.0 });
    Ok(out)
}

/// `[unexpectedness; m, empty_window; m]` with flags as 0/1.
pub fn unexpectedness(
    years: &[i32],
    values: &[f64],
    window_years: u32,
    measure: &str,
    kernel_name: &str,
) -> Result<Vec<f64>, String> {
    let corpus = corpus(years, values)?;
    let sim = build_similarity_matrix(&corpus, ATTRIBUTE, kernel(kernel_name)?).map_err(|e| e.to_string())?;
    let config = UnexpectednessConfig {
        window_years,
        measure: measure.parse::<Measure>().map_err(|e| e.to_string())?,
        ..UnexpectednessConfig::default()
    };
    let u = unexpectedness_vector(&sim, years, &config).map_err(|e| e.to_string())?;
    let mut out = u.filled();
    out.extend(u.empty_window.iter().map(|&f| if f { 1.0 } else { 0.0 }));
    Ok(out)
}

/// Similarity at `samples` evenly spaced distances in `[0, max_distance]`.
pub fn kernel_curve(kernel_name: &str, max_distance: f64, samples: usize) -> Result<Vec<f64>, String> {
    let f = match kernel(kernel_name)? {
        Kernel::Linear => creativity_core::similarity::linear_similarity,
        _ => creativity_core::similarity::exponential_similarity,
    };
    let steps = samples.max(2) - 1;
    (0..=steps)
        .map(|k| f(0.0, max_distance * k as f64 / steps as f64).map_err(|e| e.to_string()))
        .collect()
}

#[wasm_bindgen(js_name = creativityScores)]
pub fn creativity_scores_js(
    years: &[i32],
    values: &[f64],
    alpha: f64,
    beta: f64,
    percentile: f64,
    kernel: &str,
) -> Result<Vec<f64>, JsError> {
    creativity_scores(years, values, alpha, beta, percentile, kernel).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = unexpectedness)]
pub fn unexpectedness_js(
    years: &[i32],
    values: &[f64],
    window_years: u32,
    measure: &str,
    kernel: &str,
) -> Result<Vec<f64>, JsError> {
    unexpectedness(years, values, window_years, measure, kernel).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = kernelCurve)]
pub fn kernel_curve_js(kernel: &str, max_distance: f64, samples: usize) -> Result<Vec<f64>, JsError> {
    kernel_curve(kernel, max_distance, samples).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scores_layout_and_identity() {
        let years = [1990, 1995, 2000, 2005];
        let values = [0.0, 0.1, 2.0, 2.1];
        let out = creativity_scores(&years, &values, 0.95, 0.2, 50.0, "linear").unwrap();
        assert_eq!(out.len(), 3 * 4 + 3);
        let total: f64 = out[..4].iter().sum();
        assert!((total - 1.0).abs() < 1e-9);
        assert_eq!(out[14], 1.0);
    }

    #[test]
    fn one_year_has_no_threshold() {
        let out = creativity_scores(&[2000, 2000], &[1.0, 2.0], 0.95, 0.2, 50.0, "exponential").unwrap();
        assert!(out[6].is_nan());
        assert!((out[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn unexpectedness_flags_first_point() {
        let out = unexpectedness(&[2000, 2002], &[0.0, 1.0], 5, "max", "linear").unwrap();
        assert_eq!(out, vec![0.0, -0.5, 1.0, 0.0]);
        assert!(unexpectedness(&[2000], &[0.0], 5, "median", "linear").is_err());
    }

    #[test]
    fn curves_start_at_one() {
        let c = kernel_curve("exponential", 4.0, 5).unwrap();
        assert_eq!(c.len(), 5);
        assert_eq!(c[0], 1.0);
        assert!((c[1] - (-1.0f64).exp()).abs() < 1e-15);
        assert!(kernel_curve("cosine", 1.0, 3).is_err());
    }

    #[test]
    fn mismatched_inputs_are_rejected() {
        assert!(creativity_scores(&[2000], &[1.0, 2.0], 0.95, 0.2, 50.0, "linear").is_err());
        assert!(creativity_scores(&[], &[], 0.95, 0.2, 50.0, "linear").is_err());
    }
}
