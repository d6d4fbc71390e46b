use crate::error::{Error, Result};

/// Sample Pearson correlation, accumulated in one pass with running
/// co-moments.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Argument(format!(
            "pearson of lengths {} and {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::UndefinedCorrelation("fewer than two samples".into()));
    }
    let (mut mx, mut my) = (0.0, 0.0);
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (n, (&a, &b)) in x.iter().zip(y).enumerate() {
        let n = (n + 1) as f64;
        let dx = a - mx;
        let dy = b - my;
        mx += dx / n;
        my += dy / n;
        sxx += dx * (a - mx);
        syy += dy * (b - my);
        sxy += dx * (b - my);
    }
    let scale_x = mx.abs().max(1.0);
    let scale_y = my.abs().max(1.0);
    let n = x.len() as f64;
    if sxx <= (1e-14 * scale_x).powi(2) * n || syy <= (1e-14 * scale_y).powi(2) * n {
        return Err(Error::UndefinedCorrelation("constant input".into()));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}
