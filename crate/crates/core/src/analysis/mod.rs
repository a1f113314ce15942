//! Quantitative side of the boundedness criterion: the functional `M(r)`,
//! the majorant `U(r)`, the lower-bound series and its Cesàro averages,
//! Hardy-Littlewood checks, and [`theorem_check`] which ties them to the
//! doubling-class diagnostics.

mod functional;
mod hardy;
mod series;

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::invalid;
use crate::kernel::KernelCoeffs;
use crate::quadrature::QuadSpec;
use crate::trend::{last_quartile_slope, Trend, DEFAULT_RATIO_CEILING, DIVERGENCE_SLOPE};
use crate::weights::{
    is_dhat_moments, is_dhat_tail, radii_grid, DiagnosticsReport, MomentTable, RadialWeight, Verdict,
};
use crate::Result;

pub use functional::{
    boundedness_functional, boundedness_functional_nested, boundedness_functional_with,
    boundedness_profile, majorant, pr_estimate_check, slice_circle_mean, PrCheck, SliceMeans,
};
pub use hardy::{
    bloch_seminorm, hardy_littlewood_check, hardy_littlewood_converse, hardy_mean, BlochEstimate,
};
pub use series::{cesaro_lower, lower_bound_series, moment_doubling_chain};

/// Order-preserving map over `0..count`; lets callers plug in a thread pool.
pub trait Sweep: Sync {
    fn map<T: Send>(&self, count: usize, f: &(dyn Fn(usize) -> T + Sync)) -> Vec<T>;
}

/// Runs everything on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Sweep for Sequential {
    fn map<T: Send>(&self, count: usize, f: &(dyn Fn(usize) -> T + Sync)) -> Vec<T> {
        (0..count).map(f).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Conclusion {
    ConsistentBounded,
    ConsistentUnbounded,
    Inconsistent,
    Inconclusive,
}

impl Conclusion {
    pub fn as_str(self) -> &'static str {
        match self {
            Conclusion::ConsistentBounded => "CONSISTENT_BOUNDED",
            Conclusion::ConsistentUnbounded => "CONSISTENT_UNBOUNDED",
            Conclusion::Inconsistent => "INCONSISTENT",
            Conclusion::Inconclusive => "INCONCLUSIVE",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheoremConfig {
    /// Functional grid `r = 1 - 2^{-k}`, `k = 1..=k_max`.
    pub k_max: u32,
    /// Tail-doubling grid `k = 0..=diag_k_max`.
    pub diag_k_max: u32,
    pub moments_n_max: u64,
    /// Cesàro grid `N = 2^j` for `j` in this range.
    pub cesaro_exponents: (u32, u32),
    pub threshold: f64,
    pub d_max: usize,
    pub quad: QuadSpec,
}

impl Default for TheoremConfig {
    fn default() -> Self {
        TheoremConfig {
            k_max: 12,
            diag_k_max: 24,
            moments_n_max: 1 << 14,
            cesaro_exponents: (4, 12),
            threshold: DEFAULT_RATIO_CEILING,
            d_max: 1 << 20,
            quad: QuadSpec::default(),
        }
    }
}

impl TheoremConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k_max < 1 || self.k_max > 24 {
            return Err(invalid("k_max must lie in 1..=24"));
        }
        if self.diag_k_max < 1 || self.diag_k_max > 60 {
            return Err(invalid("diag_k_max must lie in 1..=60"));
        }
        let (a, b) = self.cesaro_exponents;
        if a > b || b > 30 {
            return Err(invalid("cesaro exponents must satisfy lo <= hi <= 30"));
        }
        if self.moments_n_max < 4 {
            return Err(invalid("moments_n_max must be at least 4"));
        }
        if !(self.threshold > 1.0) {
            return Err(invalid("threshold must exceed 1"));
        }
        self.quad.validate()
    }
}

/// Worst observed constants in the two comparisons
/// `(1-r²)·S(r) ≤ κ_lower·M(r)` and `M(r) ≤ κ_upper·(1-r²)·U(r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sandwich {
    pub kappa_lower: f64,
    pub kappa_upper: f64,
}

/// Slope and trend of a positive profile against a growth scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Growth {
    pub trend: Trend,
    pub slope: Option<f64>,
}

fn growth(points: &[(f64, f64)], ceiling: f64) -> Growth {
    let logs: Vec<(f64, f64)> =
        points.iter().filter(|p| p.1.is_finite() && p.1 > 0.0).map(|&(s, v)| (s, v.ln())).collect();
    let slope = last_quartile_slope(&logs);
    let max = points.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let trend = match slope {
        None => Trend::Unknown,
        Some(s) if s > DIVERGENCE_SLOPE => Trend::Divergent,
        Some(_) if max < ceiling => Trend::Bounded,
        Some(_) => Trend::Unknown,
    };
    Growth { trend, slope }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheoremReport {
    pub weight_label: String,
    pub n: usize,
    /// Tail and moment doubling tests combined: the shared verdict when they
    /// agree, otherwise inconclusive.
    pub dhat_verdict: DiagnosticsReport,
    pub dhat_components: Vec<DiagnosticsReport>,
    pub functional_profile: Vec<(f64, f64)>,
    pub majorant_profile: Vec<(f64, f64)>,
    pub cesaro_profile: Vec<(usize, f64)>,
    pub functional_growth: Growth,
    pub cesaro_growth: Growth,
    pub sandwich: Option<Sandwich>,
    pub conclusion: Conclusion,
    pub failures: Vec<String>,
}

fn unavailable() -> DiagnosticsReport {
    DiagnosticsReport {
        verdict: Verdict::Inconclusive,
        estimated_constant: f64::NAN,
        evidence: Vec::new(),
        criterion_id: String::from("unavailable"),
        slope: None,
        half_mass_ratio: None,
        extrapolated: false,
    }
}

fn note<T>(failures: &mut Vec<String>, what: &str, r: Result<T>) -> Option<T> {
    match r {
        Ok(v) => Some(v),
        Err(e) => {
            failures.push(alloc::format!("{what}: {e}"));
            None
        }
    }
}

/// Runs the doubling-class tests, sweeps `M(r)`, `U(r)` and the Cesàro
/// averages, and combines them. Failures of individual steps are recorded
/// in `failures`; a failure in a step that the conclusion rests on makes it
/// inconclusive.
pub fn theorem_check<S: Sweep>(
    w: &RadialWeight,
    n: usize,
    config: &TheoremConfig,
    sweep: &S,
) -> Result<TheoremReport> {
    if n == 0 {
        return Err(invalid("dimension must be at least 1"));
    }
    config.validate()?;
    let q = &config.quad;
    let mut failures = Vec::new();
    let table = Arc::new(MomentTable::with_defaults(w.clone()));

    let tail = note(&mut failures, "tail doubling", is_dhat_tail(w, &radii_grid(config.diag_k_max), config.threshold, q));
    let moments = note(&mut failures, "moment doubling", is_dhat_moments(&table, config.moments_n_max, config.threshold));
    let (dhat_verdict, dhat_components) = match (&tail, &moments) {
        (Some(a), Some(b)) => {
            let mut combined = a.clone();
            combined.verdict = if a.verdict == b.verdict { a.verdict } else { Verdict::Inconclusive };
            combined.criterion_id = String::from("dhat_tail+dhat_moments");
            combined.half_mass_ratio = b.half_mass_ratio;
            (combined, alloc::vec![a.clone(), b.clone()])
        }
        _ => (unavailable(), tail.iter().chain(moments.iter()).cloned().collect()),
    };

    let radii: Vec<f64> = (1..=config.k_max).map(|k| 1.0 - (-(k as f64)).exp2()).collect();
    let kernel = note(&mut failures, "kernel coefficients", KernelCoeffs::new(table.clone(), n, config.d_max));
    let mut functional_profile = Vec::new();
    let mut functional_complete = false;
    if let Some(k) = &kernel {
        // radii in increasing order on one growing table of circle means; a
        // value past the ratio ceiling already settles unboundedness, so the
        // sweep stops there instead of chasing ever higher degrees
        let rel = q.rel_tolerance.max(1e-13);
        let mut means: Option<SliceMeans> = None;
        for &r in &radii {
            let step = match means.as_mut() {
                Some(m) => m.extend(k, r, sweep),
                None => SliceMeans::build(k, r, rel, sweep).map(|m| means = Some(m)),
            };
            if let Err(e) = step {
                failures.push(alloc::format!("M({r}): {e}"));
                break;
            }
            let tab = means.as_ref().expect("table built above");
            match boundedness_functional_with(tab, w, r, q) {
                Ok(m) => {
                    functional_profile.push((r, m));
                    if !(m < config.threshold) {
                        failures.push(alloc::format!(
                            "M sweep stopped at r = {r}: value {m:e} exceeds the ratio ceiling"
                        ));
                        break;
                    }
                }
                Err(e) => {
                    failures.push(alloc::format!("M({r}): {e}"));
                    break;
                }
            }
        }
        functional_complete = functional_profile.len() == radii.len();
    }

    let maj = sweep.map(radii.len(), &|i| majorant(w, radii[i], q));
    let mut majorant_profile = Vec::new();
    for (&r, v) in radii.iter().zip(maj) {
        if let Some(u) = note(&mut failures, &alloc::format!("U({r})"), v) {
            majorant_profile.push((r, u));
        }
    }

    let (lo, hi) = config.cesaro_exponents;
    let big_ns: Vec<usize> = (lo..=hi).map(|j| 1usize << j).collect();
    let ces = sweep.map(big_ns.len(), &|i| cesaro_lower(&table, n, big_ns[i]));
    let mut cesaro_profile = Vec::new();
    for (&big_n, v) in big_ns.iter().zip(ces) {
        if let Some(c) = note(&mut failures, &alloc::format!("cesaro({big_n})"), v) {
            cesaro_profile.push((big_n, c));
        }
    }
    let cesaro_complete = cesaro_profile.len() == big_ns.len();

    let scaled: Vec<(f64, f64)> = functional_profile.iter().map(|&(r, m)| (-(-r).ln_1p(), m)).collect();
    let functional_growth = growth(&scaled, config.threshold);
    let ces_scaled: Vec<(f64, f64)> = cesaro_profile.iter().map(|&(x, v)| ((x as f64).sqrt(), v)).collect();
    let cesaro_growth = growth(&ces_scaled, config.threshold);

    let sandwich = if functional_complete && majorant_profile.len() == radii.len() {
        let lower = sweep.map(radii.len(), &|i| lower_bound_series(&table, n, radii[i], config.d_max));
        let mut kl = 0.0f64;
        let mut ku = 0.0f64;
        let mut ok = true;
        for (i, lb) in lower.into_iter().enumerate() {
            let r = radii[i];
            let m = functional_profile[i].1;
            let u = majorant_profile[i].1;
            match note(&mut failures, &alloc::format!("lower series({r})"), lb) {
                Some(s) => {
                    kl = kl.max((1.0 - r * r) * s / m);
                    ku = ku.max(m / ((1.0 - r * r) * u));
                }
                None => ok = false,
            }
        }
        ok.then_some(Sandwich { kappa_lower: kl, kappa_upper: ku })
    } else {
        None
    };

    let conclusion = match dhat_verdict.verdict {
        Verdict::InClass => match (functional_complete, functional_growth.trend, cesaro_growth.trend) {
            (_, Trend::Divergent, _) | (_, _, Trend::Divergent) => Conclusion::Inconsistent,
            (true, Trend::Bounded, _) if cesaro_complete => Conclusion::ConsistentBounded,
            _ => Conclusion::Inconclusive,
        },
        Verdict::NotInClass => match (cesaro_complete, cesaro_growth.trend, functional_growth.trend) {
            (_, Trend::Bounded, _) | (_, _, Trend::Bounded) => Conclusion::Inconsistent,
            (true, Trend::Divergent, _) => Conclusion::ConsistentUnbounded,
            _ => Conclusion::Inconclusive,
        },
        Verdict::Inconclusive => Conclusion::Inconclusive,
    };

    Ok(TheoremReport {
        weight_label: w.label().to_string(),
        n,
        dhat_verdict,
        dhat_components,
        functional_profile,
        majorant_profile,
        cesaro_profile,
        functional_growth,
        cesaro_growth,
        sandwich,
        conclusion,
        failures,
    })
}
