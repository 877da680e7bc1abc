use std::fmt;

use crate::domain::Rule;

/// Errors strictly inside `(lo, hi)` enter the slope fit.
pub const FIT_WINDOW: (f64, f64) = (1e-13, 1e-2);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitStatus {
    Pass,
    Fail,
    NotApplicable,
}

impl fmt::Display for FitStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FitStatus::Pass => "PASS",
            FitStatus::Fail => "FAIL",
            FitStatus::NotApplicable => "NOT_APPLICABLE",
        })
    }
}

/// Least-squares slope of `ln|error|` against `n` for one rule.
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeFit {
    pub rule: Rule,
    pub slope: Option<f64>,
    /// `-2 pi sigma / T`.
    pub predicted: Option<f64>,
    pub points: usize,
    pub status: FitStatus,
}

impl fmt::Display for SlopeFit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| format!("{v:.6}"));
        write!(
            f,
            "{} slope={} predicted={} points={} {}",
            self.rule,
            opt(self.slope),
            opt(self.predicted),
            self.points,
            self.status
        )
    }
}

/// Rows `(n, |error|)` used by the slope fit: those inside [`FIT_WINDOW`],
/// taken in increasing `n` and stopping at the first row that reaches the
/// lower edge, after which rounding dominates.
pub fn fit_window(rows: &[(usize, f64)]) -> Vec<(usize, f64)> {
    let mut sorted = rows.to_vec();
    sorted.sort_by_key(|r| r.0);
    let (lo, hi) = FIT_WINDOW;
    sorted
        .into_iter()
        .take_while(|&(_, e)| e > lo)
        .filter(|&(_, e)| e < hi)
        .collect()
}

/// Slope of the least-squares line through `(n, ln e)`; `None` for fewer
/// than two points.
pub fn least_squares_slope(points: &[(usize, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let k = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0 as f64).sum::<f64>() / k;
    let mean_y = points.iter().map(|p| p.1.ln()).sum::<f64>() / k;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for &(n, e) in points {
        let dx = n as f64 - mean_x;
        sxy += dx * (e.ln() - mean_y);
        sxx += dx * dx;
    }
    Some(sxy / sxx)
}
