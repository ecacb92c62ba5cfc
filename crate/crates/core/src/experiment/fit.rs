use log::warn;

use crate::error::{Error, Result};

/// Least-squares line through `(ln T, ln regret)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingFit {
    /// Estimated growth exponent.
    pub slope: f64,
    pub intercept: f64,
    pub n_points: usize,
    /// Points skipped because their regret was not positive.
    pub dropped: usize,
}

/// Fits `ln regret = intercept + slope * ln T` by ordinary least squares.
/// Points with non-positive regret are dropped with a warning.
pub fn fit_scaling_exponent(points: &[(f64, f64)]) -> Result<ScalingFit> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(t, r)| t > 0.0 && r > 0.0 && t.is_finite() && r.is_finite())
        .map(|&(t, r)| (t.ln(), r.ln()))
        .collect();
    let dropped = points.len() - usable.len();
    if dropped > 0 {
        warn!("dropped {dropped} point(s) with non-positive regret from the scaling fit");
    }
    if usable.len() < 2 {
        return Err(Error::InsufficientPoints(usable.len()));
    }
    let n = usable.len() as f64;
    let mean_x = usable.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = usable.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = usable.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = usable.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    if sxx <= 0.0 {
        return Err(Error::InvalidParameter(
            "scaling fit needs at least two distinct horizons".into(),
        ));
    }
    let slope = sxy / sxx;
    Ok(ScalingFit {
        slope,
        intercept: mean_y - slope * mean_x,
        n_points: usable.len(),
        dropped,
    })
}
