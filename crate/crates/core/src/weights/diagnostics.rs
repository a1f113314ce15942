//! Numerical class tests for radial weights.

use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::{check_radius, MomentTable, RadialWeight};
use crate::error::invalid;
use crate::quadrature::QuadSpec;
use crate::trend::{last_quartile_increasing, last_quartile_slope, DIVERGENCE_SLOPE};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    InClass,
    NotInClass,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::InClass => "IN_CLASS",
            Verdict::NotInClass => "NOT_IN_CLASS",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evidence {
    pub parameter: f64,
    pub ratio: f64,
    /// Excluded from the verdict (underflow or a non-finite ratio).
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsReport {
    pub verdict: Verdict,
    /// Max over unflagged evidence ratios.
    pub estimated_constant: f64,
    pub evidence: Vec<Evidence>,
    pub criterion_id: String,
    /// Last-quartile slope of `ln(ratio)` against the growth scale.
    pub slope: Option<f64>,
    /// `ρ̂(0)/ρ̂(½)`, reported by the moment test.
    pub half_mass_ratio: Option<f64>,
    /// The weight was evaluated past its tabulated samples.
    pub extrapolated: bool,
}

/// `r_k = 1 - 2^{-k}` for `k = 0..=k_max`.
pub fn radii_grid(k_max: u32) -> Vec<f64> {
    (0..=k_max).map(|k| 1.0 - (-(k as f64)).exp2()).collect()
}

pub fn default_radii() -> Vec<f64> {
    radii_grid(24)
}

fn check_grid(radii: &[f64]) -> Result<()> {
    if radii.len() < 2 {
        return Err(invalid("radii grid needs at least two points"));
    }
    for (i, &r) in radii.iter().enumerate() {
        check_radius(r)?;
        if i > 0 && !(r > radii[i - 1]) {
            return Err(invalid("radii grid must be strictly increasing"));
        }
    }
    Ok(())
}

fn check_threshold(threshold: f64) -> Result<()> {
    if !(threshold > 1.0) {
        return Err(invalid("divergence threshold must exceed 1"));
    }
    Ok(())
}

fn usable(x: f64) -> bool {
    x.is_finite() && x >= f64::MIN_POSITIVE
}

fn growth_scale(r: f64) -> f64 {
    -(1.0 - r).ln()
}

/// Verdict from evidence sampled at growth-scale abscissae `scale`.
fn verdict_for(scale: &[f64], evidence: &[Evidence], threshold: f64) -> (Verdict, f64, Option<f64>) {
    let kept: Vec<(f64, f64)> = scale
        .iter()
        .zip(evidence)
        .filter(|(_, e)| !e.flagged)
        .map(|(s, e)| (*s, e.ratio))
        .collect();
    let max = kept.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let pts: Vec<(f64, f64)> = kept.iter().map(|&(s, v)| (s, v.ln())).collect();
    let slope = last_quartile_slope(&pts);
    let values: Vec<f64> = kept.iter().map(|p| p.1).collect();
    let verdict = match slope {
        None => Verdict::Inconclusive,
        Some(s) if s <= DIVERGENCE_SLOPE && max < threshold => Verdict::InClass,
        Some(s) if s > DIVERGENCE_SLOPE && max > threshold && last_quartile_increasing(&values) => {
            Verdict::NotInClass
        }
        Some(_) => Verdict::Inconclusive,
    };
    (verdict, max, slope)
}

fn report(
    criterion: &str,
    scale: &[f64],
    evidence: Vec<Evidence>,
    threshold: f64,
    extrapolated: bool,
) -> DiagnosticsReport {
    let (verdict, max, slope) = verdict_for(scale, &evidence, threshold);
    DiagnosticsReport {
        verdict,
        estimated_constant: max,
        evidence,
        criterion_id: String::from(criterion),
        slope,
        half_mass_ratio: None,
        extrapolated,
    }
}

/// Doubling test on tails: `ρ̂(r) / ρ̂((1+r)/2)`.
pub fn is_dhat_tail(
    w: &RadialWeight,
    radii: &[f64],
    threshold: f64,
    q: &QuadSpec,
) -> Result<DiagnosticsReport> {
    check_grid(radii)?;
    check_threshold(threshold)?;
    let mut evidence = Vec::with_capacity(radii.len());
    for &r in radii {
        let c = 1.0 - r;
        let a = w.tail_from_complement(c, q)?.value;
        let b = w.tail_from_complement(0.5 * c, q)?.value;
        let ratio = a / b;
        evidence.push(Evidence { parameter: r, ratio, flagged: !usable(b) || !ratio.is_finite() });
    }
    let scale: Vec<f64> = radii.iter().map(|&r| growth_scale(r)).collect();
    Ok(report("dhat_tail", &scale, evidence, threshold, w.tail_extrapolates()))
}

/// Exponents `1, 2, 4, …` up to `n_max`, with `n_max` itself appended.
fn doubling_exponents(n_max: u64) -> Vec<u64> {
    let mut v = Vec::new();
    let mut n = 1u64;
    while n < n_max {
        v.push(n);
        n *= 2;
    }
    v.push(n_max);
    v
}

/// Moment doubling test `ρ_n / ρ_{2n}`, plus the `ρ̂(0)/ρ̂(½)` ratio.
pub fn is_dhat_moments(t: &MomentTable, n_max: u64, threshold: f64) -> Result<DiagnosticsReport> {
    if n_max < 4 {
        return Err(invalid("n_max must be at least 4"));
    }
    check_threshold(threshold)?;
    let ns = doubling_exponents(n_max);
    let mut evidence = Vec::with_capacity(ns.len());
    for &n in &ns {
        let a = t.entry(n as f64)?;
        let b = t.entry(2.0 * n as f64)?;
        let ratio = (a.ln_value - b.ln_value).exp();
        let flagged = !usable(b.value) || !ratio.is_finite();
        evidence.push(Evidence { parameter: n as f64, ratio, flagged });
    }
    let scale: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let w = t.weight();
    let mut rep = report("dhat_moments", &scale, evidence, threshold, w.tail_extrapolates());
    let q = *t.quad();
    let whole = w.tail_from_complement(1.0, &q)?.value;
    let half = w.tail_from_complement(0.5, &q)?.value;
    rep.half_mass_ratio = Some(whole / half);
    Ok(rep)
}

/// `ρ_x / ρ̂(1 - 1/x)`.
pub fn moment_tail_ratio(t: &MomentTable, x: f64) -> Result<f64> {
    let m = t.entry(x)?;
    let tail = t.weight().tail_from_complement(1.0 / x, t.quad())?.value;
    Ok((m.ln_value - tail.ln()).exp())
}

#[derive(Debug, Clone, PartialEq)]
pub struct BetaEstimate {
    pub beta: f64,
    pub constant: f64,
    /// Running sup `S_K` over the grid prefix, one per unflagged radius.
    pub running_sup: Vec<f64>,
}

/// Smallest `β` in `betas` for which `ρ̂(r)(1-t)^β / (ρ̂(t)(1-r)^β)`, `r ≤ t`
/// on the grid, stays bounded (below `threshold`, flat last-quartile growth).
/// `None` when no grid value qualifies.
pub fn dhat_beta_estimate(
    w: &RadialWeight,
    radii: &[f64],
    betas: &[f64],
    threshold: f64,
    q: &QuadSpec,
) -> Result<Option<BetaEstimate>> {
    check_grid(radii)?;
    check_threshold(threshold)?;
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for &r in radii {
        let c = 1.0 - r;
        let tail = w.tail_from_complement(c, q)?.value;
        if usable(tail) {
            pts.push((c.ln(), tail.ln()));
        }
    }
    if pts.len() < 2 {
        return Ok(None);
    }
    let mut sorted: Vec<f64> = betas.to_vec();
    sorted.sort_by(f64::total_cmp);
    for beta in sorted {
        // ln of the pair ratio for (i, j): L_i - L_j + β(lc_j - lc_i)
        let mut sup = Vec::with_capacity(pts.len());
        let mut best_i = f64::NEG_INFINITY;
        let mut running = f64::NEG_INFINITY;
        for &(lc, lt) in &pts {
            best_i = best_i.max(lt - beta * lc);
            running = running.max(best_i - lt + beta * lc);
            sup.push(running);
        }
        let scale: Vec<(f64, f64)> = pts.iter().zip(&sup).map(|(p, s)| (-p.0, *s)).collect();
        let slope = last_quartile_slope(&scale).unwrap_or(f64::INFINITY);
        let constant = running.exp();
        if slope <= DIVERGENCE_SLOPE && constant < threshold {
            let running_sup = sup.iter().map(|s| s.exp()).collect();
            return Ok(Some(BetaEstimate { beta, constant, running_sup }));
        }
    }
    Ok(None)
}

/// Regularity test `ρ̂(r) / ((1-r)ρ(r))`; in class when the ratios stay in a
/// window bounded away from 0 and ∞.
pub fn is_regular(
    w: &RadialWeight,
    radii: &[f64],
    threshold: f64,
    q: &QuadSpec,
) -> Result<DiagnosticsReport> {
    check_grid(radii)?;
    check_threshold(threshold)?;
    let mut evidence = Vec::with_capacity(radii.len());
    for &r in radii {
        let c = 1.0 - r;
        let tail = w.tail_from_complement(c, q)?.value;
        let rho = w.density(r, c);
        let ratio = tail / (c * rho);
        let flagged = !usable(tail) || !usable(rho) || !usable(ratio) || !ratio.is_finite();
        evidence.push(Evidence { parameter: r, ratio, flagged });
    }
    let kept: Vec<(f64, f64)> = radii
        .iter()
        .zip(&evidence)
        .filter(|(_, e)| !e.flagged)
        .map(|(&r, e)| (growth_scale(r), e.ratio))
        .collect();
    let max = kept.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let min = kept.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let logs: Vec<(f64, f64)> = kept.iter().map(|&(s, v)| (s, v.ln())).collect();
    let slope = last_quartile_slope(&logs);
    let values: Vec<f64> = kept.iter().map(|p| p.1).collect();
    let neg: Vec<f64> = values.iter().map(|v| -v).collect();
    let monotone = last_quartile_increasing(&values) || last_quartile_increasing(&neg);
    let verdict = match slope {
        None => Verdict::Inconclusive,
        Some(s) if s.abs() <= DIVERGENCE_SLOPE && max < threshold && min > 1.0 / threshold => {
            Verdict::InClass
        }
        Some(s) if s.abs() > DIVERGENCE_SLOPE && monotone => Verdict::NotInClass,
        Some(_) => Verdict::Inconclusive,
    };
    Ok(DiagnosticsReport {
        verdict,
        estimated_constant: max.max(1.0 / min),
        evidence,
        criterion_id: String::from("regular"),
        slope,
        half_mass_ratio: None,
        extrapolated: w.tail_extrapolates(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> QuadSpec {
        QuadSpec { tolerance: 1e-14, rel_tolerance: 1e-11, ..QuadSpec::default() }
    }

    #[test]
    fn flat_weight_tail_ratio_is_two() {
        let w = RadialWeight::standard(0.0).unwrap();
        let rep = is_dhat_tail(&w, &default_radii(), 1e6, &q()).unwrap();
        assert_eq!(rep.verdict, Verdict::InClass);
        assert_eq!(rep.estimated_constant, 2.0);
    }

    #[test]
    fn exponential_is_rejected() {
        let w = RadialWeight::exponential(1.0, 1.0).unwrap();
        let rep = is_dhat_tail(&w, &default_radii(), 1e6, &q()).unwrap();
        assert_eq!(rep.verdict, Verdict::NotInClass);
        assert!(rep.evidence.iter().any(|e| e.flagged));
    }

    #[test]
    fn doubling_exponent_grid() {
        assert_eq!(doubling_exponents(4), [1, 2, 4]);
        assert_eq!(doubling_exponents(10), [1, 2, 4, 8, 10]);
    }

    #[test]
    fn beta_for_flat_weight() {
        let w = RadialWeight::standard(0.0).unwrap();
        let betas: Vec<f64> = (1..=40).map(|i| i as f64 * 0.25).collect();
        let est = dhat_beta_estimate(&w, &default_radii(), &betas, 1e6, &q()).unwrap().unwrap();
        assert_eq!(est.beta, 1.0);
        assert!((est.constant - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bad_inputs() {
        let w = RadialWeight::standard(0.0).unwrap();
        assert!(is_dhat_tail(&w, &[0.5], 10.0, &q()).is_err());
        assert!(is_dhat_tail(&w, &[0.5, 0.4], 10.0, &q()).is_err());
        assert!(is_dhat_tail(&w, &[0.5, 0.6], 1.0, &q()).is_err());
        let t = MomentTable::with_defaults(w);
        assert!(is_dhat_moments(&t, 3, 10.0).is_err());
    }
}
