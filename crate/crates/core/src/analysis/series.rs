//! Moment-ratio series behind the lower bound for `M(r)`.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{domain, invalid};
use crate::kernel::truncation::{epsilon_grid, ln_c_epsilon};
use crate::weights::{check_radius, MomentTable};
use crate::{Error, Result};

const LOWER_SERIES_REL: f64 = 1e-12;

fn ratio(t: &MomentTable, a: f64, b: f64) -> Result<f64> {
    Ok((t.ln_moment(a)? - t.ln_moment(b)?).exp())
}

/// `Σ_{d≥1} ρ_{2n-1+d} / ρ_{2n-1+2d} · r^d`.
///
/// With `ρ_{2n-1+d} ≤ ρ_{2n-1}` and `ρ_{2n-1+2d} ≥ C_ε (1-ε)^{2n-1+2d}` the
/// tail past `D` is at most `ρ_{2n-1} / (C_ε (1-ε)^{2n-1}) · q^{D+1}/(1-q)`
/// with `q = r/(1-ε)²`; the sum stops once that bound is below
/// `1e-12` times the first term.
pub fn lower_bound_series(t: &MomentTable, n: usize, r: f64, d_max: usize) -> Result<f64> {
    check_radius(r)?;
    if n == 0 {
        return Err(invalid("dimension must be at least 1"));
    }
    if r == 0.0 {
        return Ok(0.0);
    }
    let base = (2 * n - 1) as f64;
    let first = ratio(t, base + 1.0, base + 2.0)? * r;
    let goal = (LOWER_SERIES_REL * first).ln();
    let ln_top = t.ln_moment(base)?;
    let ln_r = r.ln();
    let mut best: Option<usize> = None;
    for eps in epsilon_grid(r) {
        let l1e = (-eps).ln_1p();
        let ln_q = ln_r - 2.0 * l1e;
        if !(ln_q < 0.0) {
            continue;
        }
        let ln_c = ln_c_epsilon(t, n, eps)?;
        let pre = ln_top - ln_c - base * l1e - (-ln_q.exp()).ln_1p();
        // pre + (D+1) ln q ≤ goal
        let d = ((goal - pre) / ln_q - 1.0).ceil().max(1.0);
        if d.is_finite() && d <= d_max as f64 {
            let d = d as usize;
            best = Some(best.map_or(d, |b: usize| b.min(d)));
        }
    }
    let Some(big_d) = best else {
        return Err(Error::Truncation {
            partial: num_complex::Complex64::new(f64::NAN, 0.0),
            degree: d_max,
            tail_bound: f64::INFINITY,
        });
    };
    t.prefetch_arithmetic(base + 1.0, 1.0, 2 * big_d)?;
    let mut sum = 0.0;
    let mut pw = 1.0;
    for d in 1..=big_d {
        pw *= r;
        let df = d as f64;
        sum += ratio(t, base + df, base + 2.0 * df)? * pw;
    }
    Ok(sum)
}

/// `(1/N) Σ_{d=1}^N ρ_{d+2n-1} / ρ_{2d+2n-1}`.
pub fn cesaro_lower(t: &MomentTable, n: usize, big_n: usize) -> Result<f64> {
    if big_n == 0 {
        return Err(domain("N must be at least 1"));
    }
    if n == 0 {
        return Err(invalid("dimension must be at least 1"));
    }
    let base = (2 * n - 1) as f64;
    t.prefetch_arithmetic(base + 1.0, 1.0, 2 * big_n)?;
    let mut sum = 0.0;
    for d in 1..=big_n {
        let df = d as f64;
        sum += ratio(t, base + df, base + 2.0 * df)?;
    }
    Ok(sum / big_n as f64)
}

/// `(N, ρ_{4N} / ρ_{6N})` for each `N ≥ 2n` in `big_ns`.
pub fn moment_doubling_chain(t: &MomentTable, n: usize, big_ns: &[usize]) -> Result<Vec<(usize, f64)>> {
    big_ns
        .iter()
        .map(|&big_n| {
            if big_n < 2 * n {
                return Err(domain(alloc::format!("N = {big_n} is below 2n = {}", 2 * n)));
            }
            let x = big_n as f64;
            Ok((big_n, ratio(t, 4.0 * x, 6.0 * x)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::RadialWeight;

    fn flat() -> MomentTable {
        MomentTable::with_defaults(RadialWeight::standard(0.0).unwrap())
    }

    #[test]
    fn cesaro_flat() {
        let t = flat();
        assert!((cesaro_lower(&t, 2, 1).unwrap() - 1.2).abs() < 1e-12);
        // ρ_x = 1/(x+1): ratio (2d+4)/(d+4)
        for big_n in [16usize, 256, 4096] {
            let v = cesaro_lower(&t, 2, big_n).unwrap();
            let direct: f64 = (1..=big_n).map(|d| (2.0 * d as f64 + 4.0) / (d as f64 + 4.0)).sum::<f64>() / big_n as f64;
            assert!((v - direct).abs() < 1e-10);
            assert!((1.2..=2.0).contains(&v));
        }
        assert!(cesaro_lower(&t, 2, 0).is_err());
    }

    #[test]
    fn lower_series_flat() {
        let t = flat();
        assert_eq!(lower_bound_series(&t, 2, 0.0, 1 << 16).unwrap(), 0.0);
        let r: f64 = 0.5;
        let direct: f64 = (1..400).map(|d| (2.0 * d as f64 + 4.0) / (d as f64 + 4.0) * r.powi(d)).sum();
        let v = lower_bound_series(&t, 2, r, 1 << 16).unwrap();
        assert!((v - direct).abs() < 1e-11, "{v} vs {direct}");
        assert!((1.3..=2.0).contains(&v));
        for k in 1..=12 {
            let r = 1.0 - (-(k as f64)).exp2();
            let v = lower_bound_series(&t, 2, r, 1 << 20).unwrap();
            assert!((1.0 - r) * v <= 2.5, "k={k}");
        }
    }

    #[test]
    fn doubling_chain_flat() {
        let t = flat();
        for (big_n, v) in moment_doubling_chain(&t, 2, &[4, 64, 1024]).unwrap() {
            let x = big_n as f64;
            assert!((v - (6.0 * x + 1.0) / (4.0 * x + 1.0)).abs() < 1e-11);
        }
        assert!(moment_doubling_chain(&t, 2, &[3]).is_err());
    }
}
