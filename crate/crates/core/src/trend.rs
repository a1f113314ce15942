//! Scale-free growth tests on geometric grids.
//!
//! A sequence is judged on the least-squares slope of `ln(value)` against a
//! caller-chosen growth scale (usually `ln(1/(1-r))` or `ln n`) over the last
//! quartile of the grid.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

/// Slope above which a sequence counts as divergent.
pub const DIVERGENCE_SLOPE: f64 = 0.05;

/// Ratios at or above this ceiling never count as bounded.
pub const DEFAULT_RATIO_CEILING: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trend {
    Bounded,
    Divergent,
    Unknown,
}

/// Number of trailing points that make up the last quartile (at least 3 when
/// available).
pub fn quartile_len(len: usize) -> usize {
    len.div_ceil(4).max(3).min(len)
}

/// Least-squares slope of `y` against `x` over the last quartile.
///
/// `None` when fewer than two points are available or the abscissae coincide.
pub fn last_quartile_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let tail = &points[points.len() - quartile_len(points.len())..];
    slope(tail)
}

pub fn slope(points: &[(f64, f64)]) -> Option<f64> {
    let m = points.len() as f64;
    if points.len() < 2 {
        return None;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
    let my = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= 0.0 {
        return None;
    }
    Some(sxy / sxx)
}

/// Whether the last-quartile values are nondecreasing.
pub fn last_quartile_increasing(values: &[f64]) -> bool {
    if values.len() < 2 {
        return false;
    }
    let tail = &values[values.len() - quartile_len(values.len())..];
    tail.windows(2).all(|w| w[1] >= w[0])
}

/// Classifies a positive sequence sampled at `scale` abscissae.
pub fn classify(scale: &[f64], values: &[f64]) -> Trend {
    let pts: Vec<(f64, f64)> = scale
        .iter()
        .zip(values)
        .filter(|(_, v)| v.is_finite() && **v > 0.0)
        .map(|(x, v)| (*x, v.ln()))
        .collect();
    match last_quartile_slope(&pts) {
        None => Trend::Unknown,
        Some(s) if s > DIVERGENCE_SLOPE => Trend::Divergent,
        Some(_) => Trend::Bounded,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn slope_of_line() {
        let pts: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, 2.0 * i as f64 + 1.0)).collect();
        assert!((last_quartile_slope(&pts).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn quartile_sizes() {
        assert_eq!(quartile_len(25), 7);
        assert_eq!(quartile_len(12), 3);
        assert_eq!(quartile_len(2), 2);
    }

    #[test]
    fn classify_constant_and_growing() {
        let x: Vec<f64> = (1..=12).map(|k| k as f64).collect();
        let flat = vec![2.0; 12];
        assert_eq!(classify(&x, &flat), Trend::Bounded);
        let grow: Vec<f64> = x.iter().map(|k| (0.5 * k).exp()).collect();
        assert_eq!(classify(&x, &grow), Trend::Divergent);
        assert_eq!(classify(&x[..1], &flat[..1]), Trend::Unknown);
    }
}
