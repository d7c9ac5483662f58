//! Log-log slope fitting for h-sweeps of decaying quantities.

use crate::error::{Error, Result};

/// Least-squares slope/intercept/r² report for |value| against h.
#[derive(Debug, Clone)]
pub struct RateFitReport {
    pub h_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub predicted: f64,
    pub r_squared: f64,
    /// Sweep entries dropped because they were zero or non-finite.
    pub excluded: usize,
}

impl RateFitReport {
    /// Fitted amplitude C in |value| ≈ C·h^slope.
    pub fn amplitude(&self) -> f64 {
        self.intercept.exp()
    }
}

/// Plain least-squares slope of log(y) against log(x); callers guarantee
/// positive inputs.
pub(crate) fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|&x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|&y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(&x, &y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|&x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Fits log|value| = slope·log h + intercept across a strictly decreasing
/// geometric h-grid, recording r² and the predicted exponent alongside.
/// Zero or non-finite values are excluded; fewer than 4 usable points is
/// an error.
pub fn rate_fit(h_grid: &[f64], magnitudes: &[f64], predicted: f64) -> Result<RateFitReport> {
    if h_grid.len() != magnitudes.len() {
        return Err(Error::Config(
            "h grid and value list have different lengths".into(),
        ));
    }
    if h_grid.windows(2).any(|w| w[1] >= w[0]) || h_grid.iter().any(|&h| h <= 0.0) {
        return Err(Error::Config(
            "h grid must be positive and strictly decreasing".into(),
        ));
    }
    let mut hs = Vec::new();
    let mut vs = Vec::new();
    let mut excluded = 0usize;
    for (&h, &v) in h_grid.iter().zip(magnitudes) {
        if v.is_finite() && v > 0.0 {
            hs.push(h);
            vs.push(v);
        } else {
            excluded += 1;
        }
    }
    if hs.len() < 4 {
        return Err(Error::Numerical(format!(
            "rate fit needs at least 4 usable points, got {} ({} excluded)",
            hs.len(),
            excluded
        )));
    }
    let n = hs.len() as f64;
    let lx: Vec<f64> = hs.iter().map(|&x| x.ln()).collect();
    let ly: Vec<f64> = vs.iter().map(|&y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(&x, &y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|&x| (x - mx) * (x - mx)).sum();
    let syy: f64 = ly.iter().map(|&y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy > 0.0 {
        (sxy * sxy / (sxx * syy)).min(1.0)
    } else {
        1.0
    };
    Ok(RateFitReport {
        h_grid: hs,
        values: vs,
        slope,
        intercept,
        predicted,
        r_squared,
    excluded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let hs = [0.16, 0.08, 0.04, 0.02];
        let vs: Vec<f64> = hs.iter().map(|&h| h * h).collect();
        let fit = rate_fit(&hs, &vs, 2.0).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert!((fit.amplitude() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn excludes_bad_points() {
        let hs = [0.32, 0.16, 0.08, 0.04, 0.02];
        let vs = [0.0, 0.16f64.powi(3), 0.08f64.powi(3), 0.04f64.powi(3), 0.02f64.powi(3)];
        let fit = rate_fit(&hs, &vs, 3.0).unwrap();
        assert_eq!(fit.excluded, 1);
        assert!((fit.slope - 3.0).abs() < 1e-12);
    }

    #[test]
    fn too_few_points_is_an_error() {
        let hs = [0.16, 0.08, 0.04];
        let vs = [1.0, 2.0, 3.0];
        assert!(rate_fit(&hs, &vs, 1.0).is_err());
    }

    #[test]
    fn rejects_non_decreasing_grid() {
        let hs = [0.08, 0.16, 0.04, 0.02];
        let vs = [1.0; 4];
        assert!(rate_fit(&hs, &vs, 1.0).is_err());
    }
}
