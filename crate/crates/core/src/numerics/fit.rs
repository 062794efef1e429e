use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Result of an ordinary least-squares fit of `log y` against `log x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub pass: bool,
    /// All `y` were zero; the slope is reported as `expected`.
    pub trivial: bool,
}

/// Fit a power law through `(x, y)` and compare the exponent to `expected`.
pub fn fit_slope(series: &[(f64, f64)], expected: f64, tol: f64) -> Result<SlopeFit> {
    if series.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "slope fit needs at least 3 points, got {}",
            series.len()
        )));
    }
    if series.iter().any(|&(x, _)| !(x > 0.0)) {
        return Err(Error::InvalidInput("slope fit needs positive x".into()));
    }
    if series.iter().all(|&(_, y)| y == 0.0) {
        return Ok(SlopeFit {
            slope: expected,
            intercept: 0.0,
            pass: true,
            trivial: true,
        });
    }
    if series
        .iter()
        .any(|&(_, y)| !(y.abs() > 0.0) || !y.is_finite())
    {
        return Err(Error::InvalidInput(
            "slope fit needs nonzero finite y (or all zero)".into(),
        ));
    }
    let n = series.len() as f64;
    let pts: Vec<(f64, f64)> = series
        .iter()
        .map(|&(x, y)| (x.ln(), y.abs().ln()))
        .collect();
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidInput("slope fit needs distinct x".into()));
    }
    let slope = sxy / sxx;
    Ok(SlopeFit {
        slope,
        intercept: my - slope * mx,
        pass: (slope - expected).abs() <= tol,
        trivial: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_square() {
        let s: Vec<_> = [1.0, 2.0, 4.0, 8.0].iter().map(|&x| (x, x * x)).collect();
        let f = fit_slope(&s, 2.0, 0.01).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12 && f.pass && !f.trivial);
    }

    #[test]
    fn zero_series_is_trivial() {
        let s = [(1.0, 0.0), (2.0, 0.0), (3.0, 0.0)];
        let f = fit_slope(&s, -1.0, 0.1).unwrap();
        assert!(f.trivial && f.pass && f.slope == -1.0);
    }

    #[test]
    fn too_few_points() {
        assert!(matches!(
            fit_slope(&[(1.0, 1.0), (2.0, 2.0)], 1.0, 0.1),
            Err(Error::InvalidInput(_))
        ));
    }
}
