//! Exponential decay fits on `(t, ln m)`.

use super::ExperimentError;

/// Points with magnitude below this are left out of fits; the average
/// amplitude is dominated by sampling noise there.
pub const FIT_FLOOR: f64 = 0.02;

/// Least-squares fit of `ln m = c - t / T2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitResult {
    pub t2: f64,
    pub intercept: f64,
    /// RMS residual of `ln m` over the fitted points.
    pub residual: f64,
    pub r_squared: f64,
    pub points_used: usize,
}

impl FitResult {
    /// Fitted magnitude at time `t`.
    pub fn magnitude_at(&self, t: f64) -> f64 {
        (self.intercept - t / self.t2).exp()
    }
}

/// Fits points whose magnitude exceeds [`FIT_FLOOR`].
pub fn fit_exponential(points: &[(f64, f64)]) -> Result<FitResult, ExperimentError> {
    fit_exponential_with_floor(points, FIT_FLOOR)
}

pub fn fit_exponential_with_floor(
    points: &[(f64, f64)],
    floor: f64,
) -> Result<FitResult, ExperimentError> {
    let used: Vec<(f64, f64)> = points
        .iter()
        .filter(|(t, m)| t.is_finite() && m.is_finite() && *m > floor)
        .map(|&(t, m)| (t, m.ln()))
        .collect();
    let n = used.len();
    if n < 3 {
        return Err(ExperimentError::InsufficientPoints { found: n });
    }
    let nf = n as f64;
    let mean_t = used.iter().map(|p| p.0).sum::<f64>() / nf;
    let mean_y = used.iter().map(|p| p.1).sum::<f64>() / nf;
    let stt: f64 = used.iter().map(|p| (p.0 - mean_t).powi(2)).sum();
    let sty: f64 = used.iter().map(|p| (p.0 - mean_t) * (p.1 - mean_y)).sum();
    let syy: f64 = used.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    if stt == 0.0 {
        return Err(ExperimentError::InsufficientPoints { found: 1 });
    }
    let slope = sty / stt;
    let (t_min, t_max) = used
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.0), hi.max(p.0))
        });
    // total change of ln m at rounding level counts as flat
    if slope * (t_max - t_min) > -1e-12 {
        return Err(ExperimentError::NoDecay { slope });
    }
    let intercept = mean_y - slope * mean_t;
    let sse: f64 = used
        .iter()
        .map(|&(t, y)| (y - intercept - slope * t).powi(2))
        .sum();
    let r_squared = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    Ok(FitResult {
        t2: -1.0 / slope,
        intercept,
        residual: (sse / nf).sqrt(),
        r_squared,
        points_used: n,
    })
}

/// Magnitude of the averaged amplitude against time, with its fit when one
/// exists.
#[derive(Clone, Debug, PartialEq)]
pub struct DecayCurve {
    pub points: Vec<(f64, f64)>,
    pub fit: Option<FitResult>,
}

impl DecayCurve {
    /// Builds the curve and fits it; a curve that cannot be fitted (too few
    /// points above the floor, or no decay) is kept with `fit = None`.
    pub fn new(points: Vec<(f64, f64)>) -> Self {
        let fit = fit_exponential(&points).ok();
        Self { points, fit }
    }

    pub fn magnitude_at(&self, t: f64) -> Option<f64> {
        self.points
            .iter()
            .find(|p| (p.0 - t).abs() <= 1e-12 * t.abs().max(1.0))
            .map(|p| p.1)
    }
}
