//! The boundedness functional `M(r)`, the majorant `U(r)` and the
//! Peláez-Rättyä comparison.
//!
//! Every one of them reduces to circle means of `|G|` where
//! `G(λ) = Σ_{d≥1} d c_d λ^{d-1}` (so `RK_ρ(z, w) = λ G(λ)` with
//! `λ = <z, w>` and `g = 2·n!·G`). A circle mean is one FFT of the truncated
//! coefficient sequence.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::Sweep;
use crate::error::domain;
use crate::fft::fft_in_place;
use crate::kernel::{KernelCoeffs, SeriesShape, Tolerance};
use crate::quadrature::{
    integrate_ball_radial, integrate_disk_by_circles, integrate_toward, sphere_slice_average,
    BallPoint, QuadSpec, Trap,
};
use crate::weights::{check_radius, RadialWeight};
use crate::{Error, Result};

const MIN_FFT: usize = 64;
const MAX_FFT: usize = 1 << 24;

fn series_rel(q: &QuadSpec) -> f64 {
    q.rel_tolerance.max(1e-13)
}

/// Mean of `|G(t e^{iθ})|` over `θ`.
pub fn slice_circle_mean(k: &KernelCoeffs, t: f64, rel: f64) -> Result<f64> {
    check_radius(t)?;
    if t == 0.0 {
        return k.coeff(1);
    }
    let lambda = Complex64::new(t, 0.0);
    let deg = k.series(lambda, SeriesShape::SLICE, Tolerance::relative(rel))?.degree;
    let lc = k.log_coeffs_upto(deg)?;
    let ln_t = t.ln();
    let ln_a: Vec<f64> = (1..=deg).map(|d| (d as f64).ln() + lc[d] + (d - 1) as f64 * ln_t).collect();
    let m = ln_a.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut size = (2 * deg).next_power_of_two().max(MIN_FFT);
    loop {
        let mut data = vec![Complex64::new(0.0, 0.0); size];
        for (j, &a) in ln_a.iter().enumerate() {
            data[j] = Complex64::new((a - m).exp(), 0.0);
        }
        fft_in_place(&mut data, 1.0);
        let full: f64 = data.iter().map(|v| v.norm()).sum::<f64>() / size as f64;
        let half: f64 = data.iter().step_by(2).map(|v| v.norm()).sum::<f64>() / (size / 2) as f64;
        if (full - half).abs() <= rel.max(1e-14) * full {
            return Ok(full * m.exp());
        }
        if size >= MAX_FFT {
            return Err(Error::NotConverged { partial: full * m.exp(), error_estimate: (full - half).abs() * m.exp() });
        }
        size *= 2;
    }
}

/// `ln` of [`slice_circle_mean`] tabulated on the uniform grid
/// `x_j = j·h` in `x = -ln(1 - t)`, read back by eight-point Lagrange
/// interpolation.
#[derive(Debug, Clone)]
pub struct SliceMeans {
    n: usize,
    h: f64,
    rel: f64,
    ln_means: Vec<f64>,
    t_max: f64,
}

const GRID_STEP: f64 = 1.0 / 64.0;
const STENCIL: usize = 8;

impl SliceMeans {
    /// Covers `0 ≤ t ≤ t_max`.
    pub fn build<S: Sweep>(k: &KernelCoeffs, t_max: f64, rel: f64, sweep: &S) -> Result<Self> {
        let mut tab = SliceMeans { n: k.n(), h: GRID_STEP, rel, ln_means: Vec::new(), t_max: 0.0 };
        tab.extend(k, t_max, sweep)?;
        Ok(tab)
    }

    /// Adds grid nodes until the table covers `t_max`; on failure the table
    /// keeps its previous range.
    pub fn extend<S: Sweep>(&mut self, k: &KernelCoeffs, t_max: f64, sweep: &S) -> Result<()> {
        check_radius(t_max)?;
        if k.n() != self.n {
            return Err(domain("kernel dimension does not match the table"));
        }
        if t_max <= self.t_max && !self.ln_means.is_empty() {
            return Ok(());
        }
        let h = self.h;
        let x_max = -(-t_max).ln_1p();
        let count = (x_max / h).ceil() as usize + STENCIL;
        let have = self.ln_means.len();
        if count > have {
            let rel = self.rel;
            let vals = sweep.map(count - have, &|i: usize| {
                let t = -(-((have + i) as f64) * h).exp_m1();
                slice_circle_mean(k, t, rel).map(|v| v.ln())
            });
            let vals = vals.into_iter().collect::<Result<Vec<f64>>>()?;
            self.ln_means.extend(vals);
        }
        self.t_max = t_max;
        Ok(())
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    /// Mean of `|G|` on the circle of radius `t`.
    pub fn mean(&self, t: f64) -> f64 {
        let x = -(-t).ln_1p();
        let u = x / self.h;
        let lo = (u.floor() as isize - (STENCIL as isize / 2 - 1))
            .clamp(0, (self.ln_means.len() - STENCIL) as isize) as usize;
        // barycentric weights for equispaced nodes: (-1)^a C(K-1, a)
        let mut num = 0.0;
        let mut den = 0.0;
        let mut binom = 1.0;
        for a in 0..STENCIL {
            let d = u - (lo + a) as f64;
            if d == 0.0 {
                return self.ln_means[lo + a].exp();
            }
            let wa = if a % 2 == 0 { binom } else { -binom } / d;
            num += wa * self.ln_means[lo + a];
            den += wa;
            binom = binom * (STENCIL - 1 - a) as f64 / (a + 1) as f64;
        }
        (num / den).exp()
    }

    /// `∫_{S_n} |RK_ρ(τ e_1, ξ)| dσ(ξ)`.
    pub fn sphere_average(&self, tau: f64, q: &QuadSpec) -> Result<f64> {
        if tau == 0.0 {
            return Ok(0.0);
        }
        if self.n == 1 {
            return Ok(tau * self.mean(tau));
        }
        let m = (self.n - 2) as i32;
        let scale = 2.0 * (self.n - 1) as f64;
        let est = integrate_toward(
            |l: f64, c: f64| scale * l * (c * (2.0 - c)).powi(m) * tau * l * self.mean(tau * l),
            1.0,
            1.0,
            q,
        )?;
        Ok(est.value)
    }
}


/// `M(r)` from tabulated circle means (`r ≤ means.t_max()`).
pub fn boundedness_functional_with(
    means: &SliceMeans,
    w: &RadialWeight,
    r: f64,
    q: &QuadSpec,
) -> Result<f64> {
    check_radius(r)?;
    if r == 0.0 {
        return Ok(0.0);
    }
    if r > means.t_max() {
        return Err(domain(alloc::format!("radius {r} beyond the tabulated range {}", means.t_max())));
    }
    let trap = Trap::new();
    let est = integrate_ball_radial(means.n, w, |s| Ok(trap.catch(means.sphere_average(r * s, q), 0.0)), q);
    let v = trap.finish(est)?.value;
    Ok((1.0 - r * r) * v)
}

/// `M(r) = (1-r²) ∫_{B_n} |RK_ρ(r e_1, w)| ρ(w) dv(w)`.
pub fn boundedness_functional(k: &KernelCoeffs, w: &RadialWeight, r: f64, q: &QuadSpec) -> Result<f64> {
    check_radius(r)?;
    if r == 0.0 {
        return Ok(0.0);
    }
    let means = SliceMeans::build(k, r, series_rel(q), &super::Sequential)?;
    boundedness_functional_with(&means, w, r, q)
}

/// `M(r)` on a radial grid, sharing one table of circle means. Radii whose
/// value cannot be computed come back as errors in place.
pub fn boundedness_profile<S: Sweep>(
    k: &KernelCoeffs,
    w: &RadialWeight,
    radii: &[f64],
    q: &QuadSpec,
    sweep: &S,
) -> Result<Vec<Result<f64>>> {
    let Some(&top) = radii.iter().max_by(|a, b| a.total_cmp(b)) else {
        return Ok(Vec::new());
    };
    for &r in radii {
        check_radius(r)?;
    }
    let means = SliceMeans::build(k, top, series_rel(q), sweep)?;
    Ok(sweep.map(radii.len(), &|i| boundedness_functional_with(&means, w, radii[i], q)))
}

/// `M(r)` by direct nested quadrature: the inner sphere integral goes
/// through [`sphere_slice_average`] with pointwise series evaluation.
/// Much slower than [`boundedness_functional`]; kept as a cross-check.
pub fn boundedness_functional_nested(
    k: &KernelCoeffs,
    w: &RadialWeight,
    r: f64,
    q: &QuadSpec,
) -> Result<f64> {
    check_radius(r)?;
    if r == 0.0 {
        return Ok(0.0);
    }
    let n = k.n();
    let tol = Tolerance { abs: q.tolerance * 1e-3, rel: series_rel(q) };
    let inner = |s: f64| -> Result<f64> {
        let z = BallPoint::on_axis(n, r * s)?;
        let trap = Trap::new();
        let v = sphere_slice_average(
            |lam| trap.catch(k.series(lam, SeriesShape::RADIAL, tol).map(|v| v.value.norm()), 0.0),
            &z,
            q,
        );
        trap.finish(v)
    };
    let v = integrate_ball_radial(n, w, inner, q)?.value;
    Ok((1.0 - r * r) * v)
}

/// `U(r) = 1 + ∫_0^r ρ̂(t/r)/ρ̂(t) · (1-t)^{-2} dt`.
pub fn majorant(w: &RadialWeight, r: f64, q: &QuadSpec) -> Result<f64> {
    check_radius(r)?;
    if r == 0.0 {
        return Ok(1.0);
    }
    let gap = 1.0 - r;
    let trap = Trap::new();
    let est = integrate_toward(
        |_t: f64, c: f64| {
            // c = r - t; 1 - t/r = c/r
            if c <= 0.0 {
                return 0.0;
            }
            let ct = gap + c;
            let num = trap.catch(w.ln_tail_from_complement((c / r).min(1.0), q), f64::NEG_INFINITY);
            let den = trap.catch(w.ln_tail_from_complement(ct.min(1.0), q), 0.0);
            (num - den).exp() / (ct * ct)
        },
        r,
        r,
        q,
    );
    Ok(1.0 + trap.finish(est)?.value)
}

/// One row of the Peláez-Rättyä comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrCheck {
    pub s: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

/// `lhs = ∫_𝔻 |∂^n/∂z^n K¹_ρ(z, s)| (1-|z|²)^{n-2} dA(z)` against
/// `rhs = ∫_0^s dt / (ρ̂(t)(1-t)²)`.
pub fn pr_estimate_check(k: &KernelCoeffs, w: &RadialWeight, s: f64, q: &QuadSpec) -> Result<PrCheck> {
    let n = k.n();
    if n < 2 {
        return Err(domain("the Peláez-Rättyä comparison needs n >= 2"));
    }
    if !(0.5..1.0).contains(&s) {
        return Err(domain(alloc::format!("s = {s} outside [1/2, 1)")));
    }
    // |∂^n K¹(z, s)| = ½ s^n |g(z s)| and g = 2·n!·G
    let factor = 0.5 * s.powi(n as i32) * k.slice_scale();
    let rel = series_rel(q);
    let lhs = integrate_disk_by_circles(|l| Ok(factor * slice_circle_mean(k, l * s, rel)?), (n - 2) as u32, q)?;
    let gap = 1.0 - s;
    let trap = Trap::new();
    let est = integrate_toward(
        |_t: f64, c: f64| {
            let ct = gap + c;
            let lt = trap.catch(w.ln_tail_from_complement(ct.min(1.0), q), 0.0);
            (-lt).exp() / (ct * ct)
        },
        s,
        s,
        q,
    );
    let rhs = trap.finish(est)?.value;
    Ok(PrCheck { s, lhs, rhs, ratio: lhs / rhs })
}
