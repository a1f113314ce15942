//! Disk, sphere and ball integration in polar form.
//!
//! Measures are normalized: `dA(𝔻) = 1`, `dσ(S_n) = 1`, `dv(B_n) = 1`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::{integrate_graded, Estimate, QuadSpec, QuadValue, Trap};
use crate::error::{domain, invalid};
use crate::special::gauss_legendre_unit;
use crate::weights::RadialWeight;
use crate::{Error, Result};

/// A point of the open unit ball `B_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct BallPoint {
    coords: Vec<Complex64>,
}

impl BallPoint {
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(invalid("a ball point needs at least one coordinate"));
        }
        let p = BallPoint { coords };
        if !(p.norm_sq() < 1.0) {
            return Err(domain("ball point must satisfy |z| < 1"));
        }
        Ok(p)
    }

    /// `r·e_1` in `C^n`.
    pub fn on_axis(n: usize, r: f64) -> Result<Self> {
        let mut coords = vec![Complex64::new(0.0, 0.0); n];
        if n > 0 {
            coords[0] = Complex64::new(r, 0.0);
        }
        BallPoint::new(coords)
    }

    pub fn origin(n: usize) -> Result<Self> {
        BallPoint::on_axis(n, 0.0)
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    pub fn norm_sq(&self) -> f64 {
        self.coords.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// `<z, w> = Σ z_j conj(w_j)`.
    pub fn inner(&self, other: &BallPoint) -> Complex64 {
        self.coords.iter().zip(&other.coords).map(|(a, b)| a * b.conj()).sum()
    }

    /// `z^α = Π z_j^{α_j}`.
    pub fn monomial(&self, alpha: &[u32]) -> Complex64 {
        self.coords
            .iter()
            .zip(alpha)
            .map(|(z, &a)| z.powu(a))
            .fold(Complex64::new(1.0, 0.0), |acc, x| acc * x)
    }
}

const MIN_ANGLES: usize = 256;
const MAX_ANGLES: usize = 1 << 18;

/// Mean of `h(radius·e^{iθ})` over `θ`, by the trapezoid rule with node
/// doubling (256 nodes first) until two successive means agree.
pub fn circle_mean<V, H>(h: H, radius: f64, spec: &QuadSpec) -> Result<V>
where
    V: QuadValue,
    H: Fn(Complex64) -> V,
{
    let at = |j: usize, n: usize| {
        let th = 2.0 * PI * j as f64 / n as f64;
        h(Complex64::from_polar(radius, th))
    };
    let mut n = MIN_ANGLES;
    let mut sum = V::default();
    let mut abs = 0.0;
    for j in 0..n {
        let v = at(j, n);
        abs += v.magnitude();
        sum = sum + v;
    }
    let mut mean = sum * (1.0 / n as f64);
    while n < MAX_ANGLES {
        let m = 2 * n;
        let mut odd = V::default();
        for j in 0..n {
            let v = at(2 * j + 1, m);
            abs += v.magnitude();
            odd = odd + v;
        }
        sum = sum + odd;
        let next = sum * (1.0 / m as f64);
        let diff = (next - mean).magnitude();
        let goal = spec
            .tolerance
            .min(spec.rel_tolerance * next.magnitude())
            .max(64.0 * f64::EPSILON * abs / m as f64);
        mean = next;
        n = m;
        if diff <= goal {
            return Ok(mean);
        }
    }
    Err(Error::NotConverged { partial: mean.magnitude(), error_estimate: f64::NAN })
}

/// `∫_𝔻 H(|λ|)(1 - |λ|²)^m dA(λ) = 2∫_0^1 ℓ(1-ℓ²)^m mean(ℓ) dℓ` where `mean`
/// returns the circle average at radius `ℓ`.
pub fn integrate_disk_by_circles<V, M>(mean: M, m: u32, spec: &QuadSpec) -> Result<V>
where
    V: QuadValue,
    M: Fn(f64) -> Result<V>,
{
    let trap = Trap::new();
    let est = integrate_graded(
        |l, c| {
            // 1 - l² = c(2 - c)
            let w = 2.0 * l * (c * (2.0 - c)).powi(m as i32);
            if w == 0.0 {
                return V::default();
            }
            trap.catch(mean(l), V::default()) * w
        },
        0.0,
        1.0,
        spec,
    );
    trap.finish(est).map(|e| e.value)
}

/// `∫_𝔻 h(λ)(1 - |λ|²)^m dA(λ)` with normalized area measure.
pub fn integrate_disk<H: Fn(Complex64) -> f64>(h: H, m: u32, spec: &QuadSpec) -> Result<f64> {
    integrate_disk_by_circles(|l| circle_mean(&h, l, spec), m, spec)
}

/// `∫_{S_n} h(ξ_1) dσ(ξ)` given the circle means of `h`.
///
/// For `n >= 2` this is `(n-1)∫_𝔻 h(λ)(1-|λ|²)^{n-2} dA(λ)`; for `n = 1` it
/// is the circle average at radius 1.
pub fn slice_from_circle_means<V, M>(n: usize, mean: M, spec: &QuadSpec) -> Result<V>
where
    V: QuadValue,
    M: Fn(f64) -> Result<V>,
{
    match n {
        0 => Err(invalid("dimension must be at least 1")),
        1 => mean(1.0),
        _ => Ok(integrate_disk_by_circles(mean, (n - 2) as u32, spec)? * (n - 1) as f64),
    }
}

/// `∫_{S_n} h(ξ_1) dσ(ξ)` for a function of the first coordinate.
pub fn coordinate_sphere_integral<V, H>(n: usize, h: H, spec: &QuadSpec) -> Result<V>
where
    V: QuadValue,
    H: Fn(Complex64) -> V,
{
    slice_from_circle_means(n, |l| circle_mean(&h, l, spec), spec)
}

/// `∫_{S_n} h(<z, ξ>) dσ(ξ)`.
///
/// By unitary invariance `<z, ξ>` is distributed like `|z|·ξ_1`, so the sphere
/// integral collapses onto the disk.
pub fn sphere_slice_average<H>(h: H, z: &BallPoint, spec: &QuadSpec) -> Result<f64>
where
    H: Fn(Complex64) -> f64,
{
    let r = z.norm();
    coordinate_sphere_integral(z.dim(), |lam| h(lam * r), spec)
}

/// `2n ∫_0^1 r^{2n-1} ρ(r) F(r) dr`, the polar form of `∫_{B_n} (·) ρ dv` when
/// the sphere integral at radius `r` is `F(r)`.
pub fn integrate_ball_radial<V, F>(
    n: usize,
    weight: &RadialWeight,
    f: F,
    spec: &QuadSpec,
) -> Result<Estimate<V>>
where
    V: QuadValue,
    F: Fn(f64) -> Result<V>,
{
    if n == 0 {
        return Err(invalid("dimension must be at least 1"));
    }
    let trap = Trap::new();
    let scale = 2.0 * n as f64;
    let est = integrate_graded(
        |r, c| {
            let w = scale * r.powi(2 * n as i32 - 1) * weight.density(r, c);
            if w == 0.0 {
                return V::default();
            }
            trap.catch(f(r), V::default()) * w
        },
        0.0,
        1.0,
        spec,
    );
    trap.finish(est)
}

/// Tensor-product rule on `S_n`, exact for polynomials in `ξ, conj(ξ)` of
/// total degree at most `degree`.
///
/// Moduli squared `(|ξ_1|², …, |ξ_n|²)` are uniform on the simplex (sampled
/// by stick breaking with Gauss-Legendre in each break) and the phases are
/// independent and uniform (trapezoid rule).
#[derive(Debug, Clone)]
pub struct SphereRule {
    n: usize,
    nodes: Vec<(Vec<Complex64>, f64)>,
}

impl SphereRule {
    pub fn new(n: usize, degree: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        let gl = gauss_legendre_unit(degree / 2 + n + 1);
        let phases = degree + 1;

        // moduli on the simplex
        let mut moduli: Vec<(Vec<f64>, f64)> = vec![(Vec::new(), 1.0)];
        for j in 0..n - 1 {
            let k = (n - 1 - j) as i32;
            let mut next = Vec::with_capacity(moduli.len() * gl.len());
            for (prefix, w) in &moduli {
                let used: f64 = prefix.iter().sum();
                let remaining = 1.0 - used;
                for &(v, gw) in &gl {
                    let mut p = prefix.clone();
                    p.push(remaining * v);
                    next.push((p, w * gw * k as f64 * (1.0 - v).powi(k - 1)));
                }
            }
            moduli = next;
        }
        for (p, _) in moduli.iter_mut() {
            let used: f64 = p.iter().sum();
            p.push((1.0 - used).max(0.0));
        }

        let total_phase = phases.pow(n as u32);
        let mut nodes = Vec::with_capacity(moduli.len() * total_phase);
        for (u, w) in &moduli {
            for idx in 0..total_phase {
                let mut rest = idx;
                let mut xi = Vec::with_capacity(n);
                for uj in u {
                    let j = rest % phases;
                    rest /= phases;
                    let th = 2.0 * PI * j as f64 / phases as f64;
                    xi.push(Complex64::from_polar(uj.sqrt(), th));
                }
                nodes.push((xi, w / total_phase as f64));
            }
        }
        Ok(SphereRule { n, nodes })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn integrate<V: QuadValue, F: Fn(&[Complex64]) -> V>(&self, f: F) -> V {
        self.nodes.iter().fold(V::default(), |acc, (xi, w)| acc + f(xi) * *w)
    }
}
