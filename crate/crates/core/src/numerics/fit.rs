use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Least-squares line through the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    /// Always zero; kept so the record reads like an ordinary line fit.
    pub intercept: f64,
    pub rms_residual: f64,
    pub window: (f64, f64),
    pub points: usize,
}

/// Fits `y ≈ slope·x` using the samples whose `x` lies in `window`.
pub fn fit_linear_through_origin(x: &[f64], y: &[f64], window: (f64, f64)) -> Result<FitResult> {
    fit_through_origin_selected(x, x, y, window)
}

/// Fits `y ≈ slope·x` on the samples whose selector value lies in `window`.
pub fn fit_through_origin_selected(
    select: &[f64],
    x: &[f64],
    y: &[f64],
    window: (f64, f64),
) -> Result<FitResult> {
    if select.len() != x.len() || x.len() != y.len() {
        return domain("fit inputs differ in length");
    }
    let idx: Vec<usize> = (0..x.len())
        .filter(|&i| select[i] >= window.0 && select[i] <= window.1 && y[i].is_finite())
        .collect();
    if idx.is_empty() {
        return domain(format!("no samples in fit window {window:?}"));
    }
    if idx.len() < 5 {
        return domain(format!(
            "only {} samples in fit window {window:?}, need 5",
            idx.len()
        ));
    }
    let sxx: f64 = idx.iter().map(|&i| x[i] * x[i]).sum();
    let sxy: f64 = idx.iter().map(|&i| x[i] * y[i]).sum();
    if sxx == 0.0 {
        return domain("degenerate fit: all abscissae zero");
    }
    let slope = sxy / sxx;
    let ss: f64 = idx
        .iter()
        .map(|&i| (y[i] - slope * x[i]).powi(2))
        .sum();
    Ok(FitResult {
        slope,
        intercept: 0.0,
        rms_residual: (ss / idx.len() as f64).sqrt(),
        window,
        points: idx.len(),
    })
}
