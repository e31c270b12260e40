//! Numeric primitives behind the metrics: Gini index, Pearson correlation,
//! quantiles and Tukey box plots, least-squares slope.

use serde::{Deserialize, Serialize};

/// Gini index of non-negative totals, as a fraction.
///
/// Uses the sorted-rank form `Σ (2i − n − 1)·x₍ᵢ₎ / (n · Σx)`, which equals the
/// mean-absolute-difference definition `ΣᵢΣⱼ|xᵢ − xⱼ| / (2n²·mean)`.
/// Empty or all-zero input yields 0.
pub fn gini(totals: &[f64]) -> f64 {
    let n = totals.len();
    let sum: f64 = totals.iter().sum();
    if n == 0 || sum <= 0.0 {
        return 0.0;
    }
    let mut sorted = totals.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n_f = n as f64;
    let weighted: f64 = sorted.iter().enumerate().map(|(i, x)| (2.0 * (i as f64 + 1.0) - n_f - 1.0) * x).sum();
    (weighted / (n_f * sum)).clamp(0.0, 1.0)
}

/// Pearson correlation of paired samples.
///
/// Returns `None` when either side has zero variance or fewer than two points.
/// Accumulates co-moments in a single streaming pass.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    assert_eq!(xs.len(), ys.len(), "pearson needs paired samples");
    let mut n = 0.0;
    let (mut mean_x, mut mean_y) = (0.0, 0.0);
    let (mut m2_x, mut m2_y, mut c_xy) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        n += 1.0;
        let dx = x - mean_x;
        mean_x += dx / n;
        let dy = y - mean_y;
        mean_y += dy / n;
        m2_x += dx * (x - mean_x);
        m2_y += dy * (y - mean_y);
        c_xy += dx * (y - mean_y);
    }
    if n < 2.0 || m2_x <= 0.0 || m2_y <= 0.0 {
        return None;
    }
    Some((c_xy / (m2_x.sqrt() * m2_y.sqrt())).clamp(-1.0, 1.0))
}

/// Least-squares slope of `ys` against `xs`; `None` for fewer than two
/// points or constant `xs`.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    if n < 2 {
        return None;
    }
    let mean_x = xs.iter().sum::<f64>() / n as f64;
    let mean_y = ys.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        sxy += (x - mean_x) * (y - mean_y);
        sxx += (x - mean_x) * (x - mean_x);
    }
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Quantile of sorted data by `(n − 1)·p` positional linear interpolation.
///
/// # Panics
/// If `sorted` is empty.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty data");
    let pos = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

/// Five-number summary with Tukey whiskers (1.5·IQR, clamped to data).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BoxplotStats {
    pub n: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub whisker_low: f64,
    pub whisker_high: f64,
    pub outliers: Vec<f64>,
}

impl BoxplotStats {
    pub fn from_values(values: &[f64]) -> Self {
        if values.is_empty() {
            return Self::default();
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let q1 = quantile_sorted(&sorted, 0.25);
        let median = quantile_sorted(&sorted, 0.5);
        let q3 = quantile_sorted(&sorted, 0.75);
        let fence = 1.5 * (q3 - q1);
        let (lo_fence, hi_fence) = (q1 - fence, q3 + fence);
        let inside = || sorted.iter().copied().filter(|v| *v >= lo_fence && *v <= hi_fence);
        // q1 and q3 lie inside the fences, so some datum always does too.
        let whisker_low = inside().next().unwrap_or(sorted[0]);
        let whisker_high = inside().next_back().unwrap_or(sorted[sorted.len() - 1]);
        Self {
            n: sorted.len(),
            min: sorted[0],
            q1,
            median,
            q3,
            max: sorted[sorted.len() - 1],
            whisker_low,
            whisker_high,
            outliers: sorted.iter().copied().filter(|v| *v < lo_fence || *v > hi_fence).collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }
}

pub(crate) fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}
