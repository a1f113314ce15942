//! Bloch seminorm on a grid and the Hardy-Littlewood coefficient
//! inequalities for polynomials.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::domain;
use crate::quadrature::{circle_mean, BallPoint, QuadSpec};
use crate::Result;

/// `max (1-|z|²)|Rf(z)|` over a grid; points where the evaluator fails are
/// skipped and listed in `skipped`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochEstimate {
    pub value: f64,
    pub argmax: Option<usize>,
    pub skipped: Vec<usize>,
}

pub fn bloch_seminorm<F>(rf: F, grid: &[BallPoint]) -> Result<BlochEstimate>
where
    F: Fn(&BallPoint) -> Result<Complex64>,
{
    if grid.is_empty() {
        return Err(domain("Bloch seminorm needs a nonempty grid"));
    }
    let mut value = 0.0;
    let mut argmax = None;
    let mut skipped = Vec::new();
    for (i, z) in grid.iter().enumerate() {
        match rf(z) {
            Ok(v) if v.re.is_finite() && v.im.is_finite() => {
                let d = (1.0 - z.norm_sq()) * v.norm();
                if argmax.is_none() || d > value {
                    value = d;
                    argmax = Some(i);
                }
            }
            _ => skipped.push(i),
        }
    }
    Ok(BlochEstimate { value, argmax, skipped })
}

fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, a| acc * z + a)
}

/// `‖f‖_p^p` for a polynomial, as the mean of `|f|^p` over the unit circle.
pub fn hardy_mean(coeffs: &[Complex64], p: f64, q: &QuadSpec) -> Result<f64> {
    if coeffs.is_empty() {
        return Err(domain("coefficient list is empty"));
    }
    circle_mean(|z| horner(coeffs, z).norm().powf(p), 1.0, q)
}

fn weighted_sum(coeffs: &[Complex64], p: f64) -> f64 {
    coeffs.iter().enumerate().map(|(j, a)| ((j + 1) as f64).powf(p - 2.0) * a.norm().powf(p)).sum()
}

/// `(Σ (j+1)^{p-2}|a_j|^p, ‖f‖_p^p)` for `0 < p ≤ 2`.
pub fn hardy_littlewood_check(coeffs: &[Complex64], p: f64, q: &QuadSpec) -> Result<(f64, f64)> {
    if coeffs.is_empty() {
        return Err(domain("coefficient list is empty"));
    }
    if !(p > 0.0 && p <= 2.0) {
        return Err(domain(alloc::format!("p = {p} outside (0, 2]")));
    }
    Ok((weighted_sum(coeffs, p), hardy_mean(coeffs, p, q)?))
}

/// `(‖f‖_q^q, Σ (j+1)^{q-2}|a_j|^q)` for `q ≥ 2`.
pub fn hardy_littlewood_converse(coeffs: &[Complex64], q_exp: f64, q: &QuadSpec) -> Result<(f64, f64)> {
    if coeffs.is_empty() {
        return Err(domain("coefficient list is empty"));
    }
    if !(q_exp >= 2.0) || !q_exp.is_finite() {
        return Err(domain(alloc::format!("q = {q_exp} must be at least 2")));
    }
    Ok((hardy_mean(coeffs, q_exp, q)?, weighted_sum(coeffs, q_exp)))
}
