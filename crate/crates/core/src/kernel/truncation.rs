//! Tail bounds for `Σ_{d>D} d^e c_d τ^d`.
//!
//! From `ρ_x ≥ C_ε (1-ε)^x` every coefficient obeys
//! `c_d ≤ Γ(d+n)/Γ(d+1) / (2·n!·C_ε·(1-ε)^{2n-1+2d})`, so the tail is dominated
//! by `T_d = d^e Γ(d+n)/Γ(d+1) q^d / (2·n!·C_ε·(1-ε)^{2n-1})` with
//! `q = τ/(1-ε)²`. The ratio `T_{d+1}/T_d` decreases in `d`, so once it is
//! below one at `D+1` the tail is at most `T_{D+1}/(1-ϱ)`.
//!
//! `C_ε` is the minimum over `d` of `ρ_{x_d}/(1-ε)^{x_d}`. Since `ln ρ_x` is
//! convex in `x` (Hölder), so is the sequence being minimized, and the first
//! `d` where it stops decreasing is the global minimizer.

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::domain;
use crate::special::{ln_gamma, ln_rising_ratio};
use crate::weights::MomentTable;
use crate::Result;

const SEARCH_CAP: u64 = 1 << 45;
const SAFETY: f64 = 1e-9;

/// `ln C_ε` for the kernel in dimension `n`.
pub(crate) fn ln_c_epsilon(table: &MomentTable, n: usize, eps: f64) -> Result<f64> {
    let ln1me = (-eps).ln_1p();
    let x = |d: u64| (2 * n as u64 - 1 + 2 * d) as f64;
    let f = |d: u64| -> Result<f64> { Ok(table.ln_moment(x(d))? - x(d) * ln1me) };
    let rises = |d: u64| -> Result<bool> { Ok(f(d + 1)? >= f(d)?) };
    let best = if rises(0)? {
        0
    } else {
        let mut lo = 0u64;
        let mut hi = 1u64;
        while !rises(hi)? {
            lo = hi;
            hi *= 2;
            if hi > SEARCH_CAP {
                return Err(domain("moment sequence does not admit a geometric lower bound"));
            }
        }
        // rises(lo) is false, rises(hi) is true
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if rises(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    };
    Ok(f(best)? + (-SAFETY).ln_1p())
}

/// One admissible `ε` with its constant.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Envelope {
    pub ln_one_minus_eps: f64,
    pub ln_c: f64,
}

/// `ln` of the tail bound past degree `big_d` for a single envelope, or
/// `+∞` when the envelope is not yet geometric there.
pub(crate) fn ln_tail_bound(env: &Envelope, n: usize, e: u32, ln_tau: f64, big_d: usize) -> f64 {
    let ln_q = ln_tau - 2.0 * env.ln_one_minus_eps;
    if !(ln_q < 0.0) {
        return f64::INFINITY;
    }
    let d1 = (big_d + 1) as f64;
    let nf = n as f64;
    let ratio = ((d1 + 1.0) / d1).powi(e as i32) * (d1 + nf) / (d1 + 1.0) * ln_q.exp();
    if !(ratio < 1.0) {
        return f64::INFINITY;
    }
    let ln_t = e as f64 * d1.ln() + ln_rising_ratio(big_d + 1, n) + d1 * ln_q
        - (2.0f64).ln()
        - ln_gamma(nf + 1.0)
        - env.ln_c
        - (2.0 * nf - 1.0) * env.ln_one_minus_eps;
    ln_t - (-ratio).ln_1p()
}

/// Candidate `ε` values for `|λ| = τ`: the half-octave grid `2^{-i/2}`
/// restricted to `[(1-√τ)/64, 1-√τ)`.
pub(crate) fn epsilon_grid(tau: f64) -> impl Iterator<Item = f64> {
    let top = 1.0 - tau.sqrt();
    (1..200).map(|i| (-(i as f64) / 2.0).exp2()).filter(move |&e| e < top && e >= top / 64.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::RadialWeight;

    #[test]
    fn flat_weight_constant() {
        // ρ_x = 1/(x+1); min over odd x ≥ 3 of (1-ε)^{-x}/(x+1)
        let t = MomentTable::with_defaults(RadialWeight::standard(0.0).unwrap());
        let eps = 0.01;
        let got = ln_c_epsilon(&t, 2, eps).unwrap();
        let brute = (0..2000)
            .map(|d| {
                let x = 3.0 + 2.0 * d as f64;
                -(x + 1.0f64).ln() - x * (1.0f64 - eps).ln()
            })
            .fold(f64::INFINITY, f64::min);
        assert!((got - brute).abs() < 1e-8, "{got} vs {brute}");
        assert!(got <= brute);
    }

    #[test]
    fn grid_respects_window() {
        let v: alloc::vec::Vec<f64> = epsilon_grid(0.81).collect();
        assert!(!v.is_empty());
        assert!(v.iter().all(|e| (0.1 / 64.0..0.1).contains(e)));
    }
}
