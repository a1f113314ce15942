//! Log-gamma based helpers and Gauss-Legendre rules.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma_r(x).0
}

/// `ln B(a, b)`.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// `ln (d+n-1)! / d!`, the log of the rising product `(d+1)(d+2)...(d+n-1)`.
pub fn ln_rising_ratio(d: usize, n: usize) -> f64 {
    (1..n).map(|k| ((d + k) as f64).ln()).sum()
}

/// `∫_{S_n} Π |ξ_j|^{p_j} dσ(ξ)` for the normalized surface measure.
///
/// Equals `(n-1)! Π Γ(p_j/2 + 1) / Γ(n + Σ p_j/2)`; for even exponents this is
/// the familiar `α!(n-1)!/(n-1+|α|)!`.
pub fn sphere_abs_moment(powers: &[f64]) -> f64 {
    let n = powers.len();
    let half_sum: f64 = powers.iter().map(|p| p / 2.0).sum();
    let num: f64 = powers.iter().map(|p| ln_gamma(p / 2.0 + 1.0)).sum();
    (ln_gamma(n as f64) + num - ln_gamma(n as f64 + half_sum)).exp()
}

/// Gauss-Legendre nodes and weights on `[0, 1]` with `m` points.
pub fn gauss_legendre_unit(m: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(m);
    for i in 0..m {
        // Tricomi initial guess for the i-th root of P_m on [-1, 1].
        let mut x = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(m, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(m, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push(((1.0 - x) / 2.0, w / 2.0));
    }
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    out
}

fn legendre_with_derivative(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if m == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_gamma_integers() {
        let mut fact = 1.0f64;
        for k in 1..30 {
            fact *= k as f64;
            let lg = ln_gamma(k as f64 + 1.0);
            assert!((lg - fact.ln()).abs() < 1e-12 * fact.ln().max(1.0), "k={k}");
        }
        assert!((ln_gamma(0.5) - PI.sqrt().ln()).abs() < 1e-14);
    }

    #[test]
    fn sphere_moment_even_powers() {
        // ∫|ξ1|^2 dσ = 1/n
        for n in 1..6 {
            let mut p = alloc::vec![0.0; n];
            p[0] = 2.0;
            assert!((sphere_abs_moment(&p) - 1.0 / n as f64).abs() < 1e-14);
        }
        // α = (2,1), n = 2: 2!1!1!/(3+1)! ... α!(n-1)!/(n-1+|α|)! = 2/24
        let v = sphere_abs_moment(&[4.0, 2.0]);
        assert!((v - 2.0 / 24.0).abs() < 1e-14);
    }

    #[test]
    fn rising_ratio_matches_factorials() {
        assert!((ln_rising_ratio(3, 3) - 20.0f64.ln()).abs() < 1e-14);
        assert_eq!(ln_rising_ratio(7, 1), 0.0);
        let big = ln_rising_ratio(1_000_000, 2);
        assert!((big - 1_000_001f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn gauss_legendre_exactness() {
        for m in 1..12 {
            let rule = gauss_legendre_unit(m);
            for k in 0..(2 * m) {
                let s: f64 = rule.iter().map(|(x, w)| w * x.powi(k as i32)).sum();
                assert!((s - 1.0 / (k as f64 + 1.0)).abs() < 1e-13, "m={m} k={k}");
            }
        }
    }
}
