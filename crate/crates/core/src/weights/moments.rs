//! Memoized moments `ρ_x = ∫₀¹ t^x ρ(t) dt`.
//!
//! Moments are computed in the complement `c = 1 - t` on a fixed rule: panels
//! `[c/√2, c]` from `c = 1` down to `2^{-100}`, each carrying a 21-point
//! Kronrod rule with its embedded Gauss rule. In this variable the integrand
//! is `exp(x·ln(1-c) + ln ρ)`, so large exponents (where the mass sits at
//! `c ~ 1/x`) need no special handling. The work is done in scaled form,
//! which keeps `ln ρ_x` meaningful when `ρ_x` underflows. When the Kronrod
//! and Gauss sums disagree by more than the goal, the adaptive integrator
//! takes over.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use spin::{Once, RwLock};

use super::RadialWeight;
use crate::error::{domain, invalid};
use crate::quadrature::{gk21_rule, integrate_toward, QuadSpec};
use crate::{Error, Result};

const PANELS: usize = 200;
const PANEL_RATIO: f64 = core::f64::consts::FRAC_1_SQRT_2;
const REFRESH: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentEntry {
    pub value: f64,
    /// `ln ρ_x`; finite even when `value` underflows.
    pub ln_value: f64,
    pub abs_error: f64,
}

#[derive(Debug)]
struct FixedRule {
    ln_t: Vec<f64>,
    ln_rho: Vec<f64>,
    wk: Vec<f64>,
    wg: Vec<f64>,
}

impl FixedRule {
    fn new(weight: &RadialWeight) -> Self {
        let rule = gk21_rule();
        let n = PANELS * rule.len();
        let mut out = FixedRule {
            ln_t: Vec::with_capacity(n),
            ln_rho: Vec::with_capacity(n),
            wk: Vec::with_capacity(n),
            wg: Vec::with_capacity(n),
        };
        let mut hi = 1.0;
        for _ in 0..PANELS {
            let lo = hi * PANEL_RATIO;
            let mid = 0.5 * (lo + hi);
            let half = 0.5 * (hi - lo);
            for &(x, wk, wg) in &rule {
                let c = mid + half * x;
                let t = 1.0 - c;
                out.ln_t.push((-c).ln_1p());
                out.ln_rho.push(weight.ln_density(t, c));
                out.wk.push(wk * half);
                out.wg.push(wg * half);
            }
            hi = lo;
        }
        out
    }

    /// Scaled sum: returns `(sum, error, shift)` with `ρ_x ≈ sum·e^shift`.
    fn scaled(&self, x: f64) -> Option<(f64, f64, f64)> {
        let mut shift = f64::NEG_INFINITY;
        for (lt, lr) in self.ln_t.iter().zip(&self.ln_rho) {
            shift = shift.max(x * lt + lr);
        }
        if !shift.is_finite() {
            return None;
        }
        let vals = self.ln_t.iter().zip(&self.ln_rho).map(|(lt, lr)| (x * lt + lr - shift).exp());
        self.assemble(vals).map(|(s, e)| (s, e, shift))
    }

    fn assemble(&self, vals: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
        let width = 21;
        let mut total = 0.0;
        let mut err = 0.0;
        let (mut last, mut prev) = (0.0, 0.0);
        let mut k = 0.0;
        let mut g = 0.0;
        for (i, v) in vals.enumerate() {
            k += self.wk[i] * v;
            g += self.wg[i] * v;
            if i % width == width - 1 {
                total += k;
                err += (k - g).abs();
                prev = last;
                last = k;
                k = 0.0;
                g = 0.0;
            }
        }
        let leftover = if last == 0.0 {
            0.0
        } else {
            let q = last / prev;
            if !(q < 0.9) {
                return None;
            }
            last * q / (1.0 - q)
        };
        let total = total + leftover;
        if !(total > 0.0) || !total.is_finite() {
            return None;
        }
        Some((total, err + leftover))
    }
}

/// Thread-safe memo of moments for one weight.
#[derive(Debug)]
pub struct MomentTable {
    weight: RadialWeight,
    quad: QuadSpec,
    entries: RwLock<BTreeMap<u64, MomentEntry>>,
    rule: Once<FixedRule>,
}

impl Clone for MomentTable {
    fn clone(&self) -> Self {
        MomentTable {
            weight: self.weight.clone(),
            quad: self.quad,
            entries: RwLock::new(self.entries.read().clone()),
            rule: Once::new(),
        }
    }
}

impl MomentTable {
    pub fn new(weight: RadialWeight, quad: QuadSpec) -> Result<Self> {
        quad.validate()?;
        Ok(MomentTable { weight, quad, entries: RwLock::new(BTreeMap::new()), rule: Once::new() })
    }

    /// Table with absolute and relative goals of `1e-12`.
    pub fn with_defaults(weight: RadialWeight) -> Self {
        let quad = QuadSpec { tolerance: 1e-12, rel_tolerance: 1e-12, ..QuadSpec::default() };
        MomentTable { weight, quad, entries: RwLock::new(BTreeMap::new()), rule: Once::new() }
    }

    pub fn weight(&self) -> &RadialWeight {
        &self.weight
    }

    pub fn quad(&self) -> &QuadSpec {
        &self.quad
    }

    pub fn tolerance(&self) -> f64 {
        self.quad.tolerance
    }

    pub fn len(&self) -> usize {
        self.entries.read().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Memoized entries in increasing order of the exponent.
    pub fn snapshot(&self) -> Vec<(f64, MomentEntry)> {
        let mut v: Vec<(f64, MomentEntry)> =
            self.entries.read().iter().map(|(k, e)| (f64::from_bits(*k), *e)).collect();
        v.sort_by(|a, b| a.0.total_cmp(&b.0));
        v
    }

    pub fn moment(&self, x: f64) -> Result<f64> {
        Ok(self.entry(x)?.value)
    }

    pub fn ln_moment(&self, x: f64) -> Result<f64> {
        Ok(self.entry(x)?.ln_value)
    }

    pub fn entry(&self, x: f64) -> Result<MomentEntry> {
        check_exponent(x)?;
        let key = key(x);
        if let Some(e) = self.entries.read().get(&key) {
            return Ok(*e);
        }
        let e = self.compute(x)?;
        self.entries.write().entry(key).or_insert(e);
        Ok(e)
    }

    /// Fills `x0, x0 + step, …` (`count` exponents) in one pass, using a
    /// multiplicative recurrence instead of one exponential per node.
    pub fn prefetch_arithmetic(&self, x0: f64, step: f64, count: usize) -> Result<()> {
        check_exponent(x0)?;
        if !(step > 0.0) || !step.is_finite() {
            return Err(invalid("prefetch step must be positive"));
        }
        let rule = self.rule();
        let n = rule.ln_t.len();
        let mult: Vec<f64> = rule.ln_t.iter().map(|lt| (step * lt).exp()).collect();
        let mut p = alloc::vec![0.0; n];
        let mut shift = f64::NEG_INFINITY;
        let mut fresh: Vec<(u64, MomentEntry)> = Vec::new();
        let mut missing: Vec<f64> = Vec::new();
        {
            let known = self.entries.read();
            for j in 0..count {
                let x = x0 + step * j as f64;
                if j % REFRESH == 0 {
                    shift = rule.ln_t.iter().zip(&rule.ln_rho).map(|(lt, lr)| x * lt + lr).fold(f64::NEG_INFINITY, f64::max);
                    for i in 0..n {
                        p[i] = (x * rule.ln_t[i] + rule.ln_rho[i] - shift).exp();
                    }
                } else {
                    for i in 0..n {
                        p[i] *= mult[i];
                    }
                }
                let k = key(x);
                if known.contains_key(&k) {
                    continue;
                }
                if !shift.is_finite() {
                    missing.push(x);
                    continue;
                }
                match rule.assemble(p.iter().copied()) {
                    Some((sum, err)) if err <= self.scaled_goal(sum, shift) => fresh.push((k, entry(sum, err, shift))),
                    _ => missing.push(x),
                }
            }
        }
        {
            let mut w = self.entries.write();
            for (k, e) in fresh {
                w.entry(k).or_insert(e);
            }
        }
        for x in missing {
            self.entry(x)?;
        }
        Ok(())
    }

    fn rule(&self) -> &FixedRule {
        self.rule.call_once(|| FixedRule::new(&self.weight))
    }

    /// Error goal for a scaled sum `ρ_x ≈ sum·e^shift`, in the same scale.
    fn scaled_goal(&self, sum: f64, shift: f64) -> f64 {
        (self.quad.tolerance / shift.exp())
            .min(self.quad.rel_tolerance * sum)
            .max(100.0 * f64::EPSILON * sum)
    }

    fn compute(&self, x: f64) -> Result<MomentEntry> {
        let rule = self.rule();
        let fixed = rule.scaled(x);
        if let Some((sum, err, shift)) = fixed {
            if err <= self.scaled_goal(sum, shift) {
                return Ok(entry(sum, err, shift));
            }
        }
        let shift = match fixed {
            Some((_, _, s)) => s,
            None => 0.0,
        };
        let spec = QuadSpec {
            tolerance: self.quad.tolerance / shift.exp(),
            max_subdivisions: self.quad.max_subdivisions.max(2000),
            ..self.quad
        };
        let w = &self.weight;
        let est = integrate_toward(
            |t, c| (x * (-c).ln_1p() + w.ln_density(t, c) - shift).exp(),
            1.0,
            1.0,
            &spec,
        )
        .map_err(|e| match e {
            Error::NotConverged { partial, error_estimate } => Error::NotConverged {
                partial: partial * shift.exp(),
                error_estimate: error_estimate * shift.exp(),
            },
            other => other,
        })?;
        if !(est.value > 0.0) {
            return Err(domain(alloc::format!("moment of order {x} is not positive")));
        }
        Ok(entry(est.value, est.error, shift))
    }
}

fn entry(sum: f64, err: f64, shift: f64) -> MomentEntry {
    let ln_value = shift + sum.ln();
    MomentEntry { value: ln_value.exp(), ln_value, abs_error: err * shift.exp() }
}

fn key(x: f64) -> u64 {
    (x + 0.0).to_bits()
}

fn check_exponent(x: f64) -> Result<()> {
    if !(x >= 1.0) || !x.is_finite() {
        return Err(domain(alloc::format!("moment exponent {x} must be a finite number >= 1")));
    }
    Ok(())
}
