//! Least-squares rate fit on log-log data.

/// `log|error| = slope * log M + intercept`, with the RMS residual of the fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
    pub points: usize,
}

/// Errors at or below this level are treated as exact zeros and left out of fits.
pub const FIT_FLOOR: f64 = 1e-14;

/// Minimum number of usable points for a fit.
pub const MIN_FIT_POINTS: usize = 4;

/// Fits `(M, error)` pairs; `None` unless at least four errors exceed [`FIT_FLOOR`].
pub fn fit_rate(points: &[(f64, f64)]) -> Option<RateFit> {
    let data: Vec<(f64, f64)> = points
        .iter()
        .filter(|(m, e)| *e > FIT_FLOOR && *m > 0.0 && e.is_finite())
        .map(|(m, e)| (m.ln(), e.ln()))
        .collect();
    if data.len() < MIN_FIT_POINTS {
        return None;
    }
    let n = data.len() as f64;
    let mx = data.iter().map(|p| p.0).sum::<f64>() / n;
    let my = data.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = data.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = data.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (data.iter().map(|p| (p.1 - slope * p.0 - intercept).powi(2)).sum::<f64>() / n).sqrt();
    Some(RateFit { slope, intercept, residual, points: data.len() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let pts: Vec<(f64, f64)> = (4..=10).map(|k| (2f64.powi(k), 3.0 / 2f64.powi(k))).collect();
        let fit = fit_rate(&pts).unwrap();
        assert!((fit.slope + 1.0).abs() < 1e-12);
        assert!((fit.intercept - 3f64.ln()).abs() < 1e-12);
        assert!(fit.residual < 1e-12);
    }

    #[test]
    fn zeros_are_excluded() {
        let pts = [(16.0, 0.0), (32.0, 1e-15), (64.0, 0.1), (128.0, 0.05)];
        assert!(fit_rate(&pts).is_none());
        let pts = [(16.0, 0.0), (32.0, 0.2), (64.0, 0.1), (128.0, 0.05), (256.0, 0.025)];
        assert_eq!(fit_rate(&pts).unwrap().points, 4);
    }
}
