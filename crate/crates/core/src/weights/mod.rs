//! Radial weights on `[0, 1)`: evaluation, tail integrals, moments and the
//! class diagnostics built from them.

mod diagnostics;
mod moments;
mod tabulated;

use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{domain, invalid};
use crate::quadrature::{integrate_toward, Estimate, QuadSpec};
use crate::Result;

pub use diagnostics::{
    default_radii, dhat_beta_estimate, is_dhat_moments, is_dhat_tail, is_regular,
    moment_tail_ratio, radii_grid, BetaEstimate, DiagnosticsReport, Evidence, Verdict,
};
pub use moments::{MomentEntry, MomentTable};
pub use tabulated::MonotoneCubic;

#[derive(Debug, Clone, PartialEq)]
pub enum WeightKind {
    /// `(1 - r²)^alpha`
    Standard { alpha: f64 },
    /// `exp(-c / (1 - r)^beta)`
    Exponential { c: f64, beta: f64 },
    /// `(1 - r)^gamma · log(e / (1 - r))^{-2}`
    Logarithmic { gamma: f64 },
    Tabulated(MonotoneCubic),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialWeight {
    kind: WeightKind,
    label: String,
}

impl RadialWeight {
    pub fn standard(alpha: f64) -> Result<Self> {
        if !(alpha > -1.0) || !alpha.is_finite() {
            return Err(invalid(alloc::format!("standard weight needs alpha > -1, got {alpha}")));
        }
        Ok(Self::from_kind(WeightKind::Standard { alpha }))
    }

    pub fn exponential(c: f64, beta: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() || !(beta > 0.0) || !beta.is_finite() {
            return Err(invalid(alloc::format!(
                "exponential weight needs c > 0 and beta > 0, got c = {c}, beta = {beta}"
            )));
        }
        Ok(Self::from_kind(WeightKind::Exponential { c, beta }))
    }

    pub fn logarithmic(gamma: f64) -> Result<Self> {
        if !(gamma > -1.0) || !gamma.is_finite() {
            return Err(invalid(alloc::format!(
                "logarithmic weight needs gamma > -1, got {gamma}"
            )));
        }
        Ok(Self::from_kind(WeightKind::Logarithmic { gamma }))
    }

    pub fn tabulated(samples: &[(f64, f64)]) -> Result<Self> {
        Ok(Self::from_kind(WeightKind::Tabulated(MonotoneCubic::new(samples)?)))
    }

    fn from_kind(kind: WeightKind) -> Self {
        let label = default_label(&kind);
        RadialWeight { kind, label }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `ρ(t)` given `t` and its complement `c = 1 - t`; `c` is trusted to be
    /// accurate, which matters near `t = 1`.
    pub fn density(&self, t: f64, c: f64) -> f64 {
        match &self.kind {
            WeightKind::Standard { alpha } => {
                if *alpha == 0.0 {
                    1.0
                } else {
                    (c * (1.0 + t)).powf(*alpha)
                }
            }
            WeightKind::Exponential { c: k, beta } => (-k / c.powf(*beta)).exp(),
            WeightKind::Logarithmic { gamma } => {
                let l = 1.0 - c.ln();
                c.powf(*gamma) / (l * l)
            }
            WeightKind::Tabulated(p) => p.eval(t).max(0.0),
        }
    }

    /// `ln ρ(t)`, finite where [`density`](Self::density) would underflow.
    pub fn ln_density(&self, t: f64, c: f64) -> f64 {
        match &self.kind {
            WeightKind::Standard { alpha } => {
                if *alpha == 0.0 {
                    0.0
                } else {
                    alpha * (c.ln() + t.ln_1p())
                }
            }
            WeightKind::Exponential { c: k, beta } => -k / c.powf(*beta),
            WeightKind::Logarithmic { gamma } => gamma * c.ln() - 2.0 * (1.0 - c.ln()).ln(),
            WeightKind::Tabulated(p) => p.eval(t).ln(),
        }
    }

    /// `ρ(r)` for `r ∈ [0, 1)`.
    pub fn eval(&self, r: f64) -> Result<f64> {
        check_radius(r)?;
        Ok(self.density(r, 1.0 - r))
    }

    /// Whether `ρ(r)` comes from extending a tabulated interpolant past its
    /// samples.
    pub fn extrapolates(&self, r: f64) -> bool {
        match &self.kind {
            WeightKind::Tabulated(p) => r > p.last_sample() || r < p.first_sample(),
            _ => false,
        }
    }

    /// Whether any of `[r, 1)` lies past the last tabulated sample.
    pub fn tail_extrapolates(&self) -> bool {
        matches!(self.kind, WeightKind::Tabulated(_))
    }

    /// `ρ̂(r) = ∫_r^1 ρ`.
    pub fn tail(&self, r: f64, q: &QuadSpec) -> Result<Estimate> {
        check_radius(r)?;
        self.tail_from_complement(1.0 - r, q)
    }

    /// `ρ̂(1 - c)` for `c ∈ (0, 1]`, keeping full relative precision in `c`.
    pub fn tail_from_complement(&self, c: f64, q: &QuadSpec) -> Result<Estimate> {
        if !(c > 0.0 && c <= 1.0) {
            return Err(domain(alloc::format!("tail complement {c} outside (0, 1]")));
        }
        if let WeightKind::Standard { alpha } = self.kind {
            if alpha == 0.0 {
                return Ok(Estimate { value: c, error: 0.0 });
            }
        }
        integrate_toward(|t, cc| self.density(t, cc), 1.0, c, q)
    }

    /// `ln ρ̂(1 - c)`, usable where the tail itself underflows.
    pub fn ln_tail_from_complement(&self, c: f64, q: &QuadSpec) -> Result<f64> {
        if !(c > 0.0 && c <= 1.0) {
            return Err(domain(alloc::format!("tail complement {c} outside (0, 1]")));
        }
        if let WeightKind::Standard { alpha } = self.kind {
            if alpha == 0.0 {
                return Ok(c.ln());
            }
        }
        let shift = self.ln_density(1.0 - c, c);
        if !shift.is_finite() {
            return Ok(self.tail_from_complement(c, q)?.value.ln());
        }
        let est = integrate_toward(|t, cc| (self.ln_density(t, cc) - shift).exp(), 1.0, c, q)?;
        Ok(est.value.ln() + shift)
    }

    /// `∫_a^b ρ` for `0 ≤ a ≤ b < 1`.
    pub fn integral(&self, a: f64, b: f64, q: &QuadSpec) -> Result<Estimate> {
        check_radius(a)?;
        check_radius(b)?;
        if a > b {
            return Err(invalid("integral bounds must satisfy a <= b"));
        }
        let off = 1.0 - b;
        integrate_toward(|t, c| self.density(t, c + off), b, b - a, q)
    }

    /// Parameters as `(name, value)` pairs, for reports.
    pub fn parameters(&self) -> Vec<(&'static str, f64)> {
        match &self.kind {
            WeightKind::Standard { alpha } => alloc::vec![("alpha", *alpha)],
            WeightKind::Exponential { c, beta } => alloc::vec![("c", *c), ("beta", *beta)],
            WeightKind::Logarithmic { gamma } => alloc::vec![("gamma", *gamma)],
            WeightKind::Tabulated(p) => alloc::vec![
                ("first_sample", p.first_sample()),
                ("last_sample", p.last_sample())
            ],
        }
    }
}

fn default_label(kind: &WeightKind) -> String {
    match kind {
        WeightKind::Standard { alpha } => alloc::format!("standard(alpha={alpha})"),
        WeightKind::Exponential { c, beta } => alloc::format!("exponential(c={c},beta={beta})"),
        WeightKind::Logarithmic { gamma } => alloc::format!("logarithmic(gamma={gamma})"),
        WeightKind::Tabulated(_) => String::from("tabulated"),
    }
}

pub(crate) fn check_radius(r: f64) -> Result<()> {
    if !(0.0..1.0).contains(&r) {
        return Err(domain(alloc::format!("radius {r} outside [0, 1)")));
    }
    Ok(())
}
