//! Least-squares fit of entropy against `ln N`.

use crate::error::{AppError, AppResult};

#[derive(Clone, Debug, PartialEq)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub window: (u64, u64),
    pub points: usize,
    pub max_residual: f64,
}

/// Ordinary least squares of `h` on `ln n` over the points with `n` in
/// `window` (inclusive).
pub fn fit_scaling(points: &[(u64, f64)], window: (u64, u64)) -> AppResult<FitResult> {
    let sel: Vec<(f64, f64)> = points
        .iter()
        .filter(|(n, _)| (window.0..=window.1).contains(n))
        .map(|&(n, h)| ((n as f64).ln(), h))
        .collect();
    if sel.len() < 3 {
        return Err(AppError::Fit(format!(
            "window {}..{} holds {} points, at least 3 are needed",
            window.0,
            window.1,
            sel.len()
        )));
    }
    let m = sel.len() as f64;
    let mx = sel.iter().map(|p| p.0).sum::<f64>() / m;
    let my = sel.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = sel.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(AppError::Fit("all points share one N".into()));
    }
    let sxy: f64 = sel.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_residual = sel
        .iter()
        .map(|p| (p.1 - (slope * p.0 + intercept)).abs())
        .fold(0.0, f64::max);
    Ok(FitResult {
        slope,
        intercept,
        window,
        points: sel.len(),
        max_residual,
    })
}

/// Top half of a grid on the log scale: `N ≥ √(N_min·N_max)`, widened to the
/// last three points if that leaves fewer.
pub fn default_window(grid: &[u64]) -> Option<(u64, u64)> {
    let (&lo, &hi) = (grid.first()?, grid.last()?);
    let mid = ((lo as f64).ln() + (hi as f64).ln()) / 2.0;
    let top: Vec<u64> = grid.iter().copied().filter(|&n| (n as f64).ln() >= mid - 1e-12).collect();
    let start = if top.len() >= 3 { top[0] } else { grid[grid.len().saturating_sub(3)] };
    Some((start, hi))
}
