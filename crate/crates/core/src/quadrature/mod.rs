//! Adaptive quadrature on intervals with a singular endpoint, plus the disk,
//! sphere and ball reductions built on top of it.
//!
//! The workhorse is [`integrate_graded`]: the interval is cut into panels whose
//! widths shrink geometrically toward the singular endpoint (`1 - 2^{-k}` for
//! the default grading of 2), every panel gets a 21-point Kronrod estimate,
//! the contribution of the panels that were never generated is extrapolated
//! from the geometric decay of the last ones, and then the worst panels are
//! bisected until the summed error meets the goal.
//!
//! Integrands receive both the abscissa `t` and its distance `c = b - t` to the
//! singular endpoint, computed without cancellation.

mod gk;
mod sphere;

use core::cell::RefCell;

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::invalid;
use crate::{Error, Result};

pub use gk::QuadValue;
pub(crate) use gk::gk21_rule;
pub use sphere::{
    circle_mean, coordinate_sphere_integral, integrate_ball_radial, integrate_disk,
    integrate_disk_by_circles, slice_from_circle_means, sphere_slice_average, BallPoint,
    SphereRule,
};

/// Accuracy and effort controls shared by every integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSpec {
    /// Absolute error goal.
    pub tolerance: f64,
    /// Relative error goal; the stricter of the two goals wins.
    pub rel_tolerance: f64,
    /// Budget of Kronrod segments (panels plus bisections).
    pub max_subdivisions: usize,
    /// Ratio between successive panel widths toward the singular endpoint.
    pub grading: f64,
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec { tolerance: 1e-10, rel_tolerance: 1e-10, max_subdivisions: 5000, grading: 2.0 }
    }
}

impl QuadSpec {
    pub fn with_tolerance(tolerance: f64) -> Self {
        QuadSpec { tolerance, ..QuadSpec::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) || !(self.rel_tolerance > 0.0) {
            return Err(invalid("quadrature tolerances must be positive"));
        }
        if self.max_subdivisions < 8 {
            return Err(invalid("max_subdivisions must be at least 8"));
        }
        if !(self.grading >= 1.0) || !self.grading.is_finite() {
            return Err(invalid("grading must be a finite number >= 1"));
        }
        Ok(())
    }
}

/// A quadrature result with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<V = f64> {
    pub value: V,
    pub error: f64,
}

const MAX_PANELS: usize = 1100;

/// `∫_a^b f(t) dt` with geometric grading toward `b`; `f` receives `(t, b - t)`.
pub fn integrate_graded<V, F>(f: F, a: f64, b: f64, spec: &QuadSpec) -> Result<Estimate<V>>
where
    V: QuadValue,
    F: Fn(f64, f64) -> V,
{
    if !(a <= b) {
        return Err(invalid("integration bounds must satisfy a <= b"));
    }
    integrate_toward(f, b, b - a, spec)
}

/// Same as [`integrate_graded`] on `[b - width, b]`, with the width given
/// exactly (avoids the cancellation in `b - a` for short intervals near `b`).
pub fn integrate_toward<V, F>(f: F, b: f64, width: f64, spec: &QuadSpec) -> Result<Estimate<V>>
where
    V: QuadValue,
    F: Fn(f64, f64) -> V,
{
    spec.validate()?;
    if !(width >= 0.0) {
        return Err(invalid("integration width must be nonnegative"));
    }
    if width == 0.0 {
        return Ok(Estimate { value: V::default(), error: 0.0 });
    }
    let g = |c: f64| f(b - c, c);
    if spec.grading <= 1.0 {
        let seg = gk::gk21(&g, 0.0, width);
        return gk::refine(&g, alloc::vec![seg], (V::default(), 0.0), spec);
    }

    let ratio = 1.0 / spec.grading;
    let mut panels: Vec<gk::Segment<V>> = Vec::new();
    let mut total = V::default();
    let mut resabs = 0.0;
    let mut seen_nonzero = false;
    let mut tail = None;
    let mut hi = width;
    for k in 0..MAX_PANELS {
        let lo = hi * ratio;
        if lo < 1e-300 || panels.len() >= spec.max_subdivisions {
            break;
        }
        let seg = gk::gk21(&g, lo, hi);
        total = total + seg.value;
        resabs += seg.resabs;
        let p = seg.value.magnitude();
        let prev = panels.last().map(|s| s.value.magnitude());
        panels.push(seg);
        hi = lo;
        if p > 0.0 {
            seen_nonzero = true;
        }
        let Some(prev) = prev else { continue };
        if k < 3 || !seen_nonzero {
            continue;
        }
        if p == 0.0 && prev == 0.0 {
            tail = Some((V::default(), 0.0));
            break;
        }
        if p < prev {
            let q = p / prev;
            if q < 0.9 {
                let est = seg.value * (q / (1.0 - q));
                let mag = est.magnitude();
                if mag <= 0.25 * gk::target(spec, total.magnitude(), resabs) {
                    tail = Some((est, mag));
                    break;
                }
            }
        }
    }
    let tail = match tail {
        Some(t) => t,
        None if !seen_nonzero => (V::default(), 0.0),
        None => {
            let err: f64 = panels.iter().map(|s| s.error).sum();
            return Err(Error::NotConverged {
                partial: total.magnitude(),
                error_estimate: err,
            });
        }
    };
    gk::refine(&g, panels, tail, spec)
}

/// `∫_0^1 f(t) dt` for integrands whose only possible singularity sits at 1.
pub fn integrate_radial<F: Fn(f64) -> f64>(f: F, spec: &QuadSpec) -> Result<Estimate> {
    integrate_graded(|t, _| f(t), 0.0, 1.0, spec)
}

/// `∫_a^b f(t) dt` for a smooth integrand (no grading).
pub fn integrate_interval<V: QuadValue, F: Fn(f64) -> V>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadSpec,
) -> Result<Estimate<V>> {
    let flat = QuadSpec { grading: 1.0, ..*spec };
    integrate_graded(|t, _| f(t), a, b, &flat)
}

/// Records the first failure raised inside an integrand that cannot itself
/// return a `Result`.
pub(crate) struct Trap {
    slot: RefCell<Option<Error>>,
}

impl Trap {
    pub fn new() -> Self {
        Trap { slot: RefCell::new(None) }
    }

    /// Unwraps `r`, stashing the error and substituting `fallback`.
    pub fn catch<T>(&self, r: Result<T>, fallback: T) -> T {
        match r {
            Ok(v) => v,
            Err(e) => {
                let mut slot = self.slot.borrow_mut();
                if slot.is_none() {
                    *slot = Some(e);
                }
                fallback
            }
        }
    }

    /// The stashed error, if any, takes precedence over `r`.
    pub fn finish<T>(self, r: Result<T>) -> Result<T> {
        match self.slot.into_inner() {
            Some(e) => Err(e),
            None => r,
        }
    }
}
