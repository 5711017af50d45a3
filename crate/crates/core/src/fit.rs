//! Power-law fits on log-log axes.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("need at least {needed} positive points inside the window, found {found}")]
    InsufficientData { needed: usize, found: usize },
}

/// `ln y ≈ log_coefficient + exponent · ln t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub log_coefficient: f64,
    pub r_squared: f64,
}

impl PowerLawFit {
    pub fn eval(&self, t: f64) -> f64 {
        (self.log_coefficient + self.exponent * t.ln()).exp()
    }
}

pub const MIN_FIT_POINTS: usize = 5;

/// Ordinary least squares of `ln y` against `ln t`.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerLawFit, FitError> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(t, y)| *t > 0.0 && *y > 0.0)
        .map(|(t, y)| (t.ln(), y.ln()))
        .collect();
    if logs.len() < MIN_FIT_POINTS || logs.len() != points.len() {
        return Err(FitError::InsufficientData {
            needed: MIN_FIT_POINTS.max(points.len()),
            found: logs.len(),
        });
    }
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in &logs {
        let dx = x - mx;
        let dy = y - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(FitError::InsufficientData {
            needed: MIN_FIT_POINTS,
            found: 1,
        });
    }
    let exponent = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).min(1.0) };
    Ok(PowerLawFit {
        exponent,
        log_coefficient: my - exponent * mx,
        r_squared,
    })
}

/// `n` integer times spread logarithmically over `[lo, hi]`, deduplicated.
pub fn log_spaced(lo: u64, hi: u64, n: usize) -> Vec<u64> {
    let (a, b) = ((lo.max(1)) as f64, hi as f64);
    let mut out: Vec<u64> = (0..n)
        .map(|i| {
            let f = if n > 1 { i as f64 / (n - 1) as f64 } else { 0.0 };
            (a.ln() + f * (b.ln() - a.ln())).exp().round() as u64
        })
        .map(|t| t.clamp(lo.max(1), hi))
        .collect();
    out.dedup();
    out
}
