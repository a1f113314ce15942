//! Grid-sampled symbols of slice form `φ(w) = Φ(|w|, w_1/|w|)`.
//!
//! `Φ(r, ζ)` is sampled on a product grid in `r`, `s = |ζ|` and `θ = arg ζ`.
//! Interpolation is linear in `r` and `s` and trigonometric in `θ`, so
//! symbols such as `w_1` or `conj(w_1)` are reproduced exactly.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::invalid;
use crate::quadrature::BallPoint;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CustomSymbol {
    r: Vec<f64>,
    s: Vec<f64>,
    n_theta: usize,
    /// Fourier coefficients per `(r, s)` node, frequencies `-(N/2)..=(N-1)/2`.
    coeffs: Vec<Vec<Complex64>>,
    sup: f64,
}

fn check_axis(name: &str, v: &[f64]) -> Result<()> {
    if v.is_empty() {
        return Err(invalid(alloc::format!("{name} grid is empty")));
    }
    for (i, &x) in v.iter().enumerate() {
        if !(0.0..=1.0).contains(&x) {
            return Err(invalid(alloc::format!("{name} grid value {x} outside [0, 1]")));
        }
        if i > 0 && !(x > v[i - 1]) {
            return Err(invalid(alloc::format!("{name} grid must be strictly increasing")));
        }
    }
    Ok(())
}

fn frequencies(n: usize) -> impl Iterator<Item = i64> {
    let lo = -((n / 2) as i64);
    (0..n as i64).map(move |k| lo + k)
}

impl CustomSymbol {
    /// `values[i_r][i_s][i_θ] = Φ(r_i, s_j e^{2πik/N})` with `N = n_theta`.
    pub fn from_samples(
        r: Vec<f64>,
        s: Vec<f64>,
        n_theta: usize,
        values: &[Vec<Vec<Complex64>>],
    ) -> Result<Self> {
        check_axis("r", &r)?;
        check_axis("s", &s)?;
        if n_theta == 0 {
            return Err(invalid("theta grid needs at least one node"));
        }
        if values.len() != r.len() {
            return Err(invalid("sample array does not match the r grid"));
        }
        let mut coeffs = Vec::with_capacity(r.len() * s.len());
        let mut sup: f64 = 0.0;
        for row in values {
            if row.len() != s.len() {
                return Err(invalid("sample array does not match the s grid"));
            }
            for ring in row {
                if ring.len() != n_theta {
                    return Err(invalid("sample array does not match the theta grid"));
                }
                for v in ring {
                    if !(v.re.is_finite() && v.im.is_finite()) {
                        return Err(invalid("symbol samples must be finite"));
                    }
                    sup = sup.max(v.norm());
                }
                coeffs.push(fourier(ring));
            }
        }
        Ok(CustomSymbol { r, s, n_theta, coeffs, sup })
    }

    /// Samples `f` on the grid after checking that it depends on `w` only
    /// through `(|w|, w_1/|w|)`; other functions are rejected.
    pub fn from_fn<F: Fn(&BallPoint) -> Complex64>(
        n: usize,
        f: F,
        r: Vec<f64>,
        s: Vec<f64>,
        n_theta: usize,
    ) -> Result<Self> {
        if n == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        check_axis("r", &r)?;
        check_axis("s", &s)?;
        if n_theta == 0 {
            return Err(invalid("theta grid needs at least one node"));
        }
        let pt = |rr: f64, ss: f64, th: f64, variant: usize| -> Result<Option<BallPoint>> {
            let rr = rr.min(1.0 - 1e-12);
            let mut c = alloc::vec![Complex64::new(0.0, 0.0); n];
            if n == 1 {
                c[0] = Complex64::from_polar(rr, th);
                return BallPoint::new(c).map(Some);
            }
            c[0] = Complex64::from_polar(rr * ss, th);
            let rest = rr * (1.0 - ss * ss).max(0.0).sqrt();
            match variant {
                0 => c[1] = Complex64::new(rest, 0.0),
                1 => c[1] = Complex64::from_polar(rest, 2.1),
                _ => {
                    if n < 3 {
                        return Ok(None);
                    }
                    c[1] = Complex64::from_polar(rest * 0.6, -0.7);
                    c[2] = Complex64::from_polar(rest * 0.8, 1.3);
                }
            }
            BallPoint::new(c).map(Some)
        };
        let mut values = Vec::with_capacity(r.len());
        for &rr in &r {
            let mut row = Vec::with_capacity(s.len());
            for &ss in &s {
                let mut ring = Vec::with_capacity(n_theta);
                for k in 0..n_theta {
                    let th = 2.0 * PI * k as f64 / n_theta as f64;
                    let base = f(&pt(rr, ss, th, 0)?.unwrap());
                    for variant in 1..3 {
                        if let Some(p) = pt(rr, ss, th, variant)? {
                            let other = f(&p);
                            if (other - base).norm() > 1e-12 * (1.0 + base.norm()) {
                                return Err(Error::NotSliceForm(alloc::format!(
                                    "value changes with the coordinates orthogonal to e1 at |w| = {rr}, |w1|/|w| = {ss}"
                                )));
                            }
                        }
                    }
                    ring.push(base);
                }
                row.push(ring);
            }
            values.push(row);
        }
        Self::from_samples(r, s, n_theta, &values)
    }

    pub fn sup_norm(&self) -> f64 {
        self.sup
    }

    pub fn r_grid(&self) -> &[f64] {
        &self.r
    }

    pub fn s_grid(&self) -> &[f64] {
        &self.s
    }

    /// Highest nonnegative angular frequency carried by the samples.
    pub fn max_frequency(&self) -> usize {
        (self.n_theta - 1) / 2
    }

    /// Fourier coefficient of `e^{ikθ}` at grid node `(r_i, s_j)`.
    pub fn fourier(&self, i: usize, j: usize, k: usize) -> Complex64 {
        if k > self.max_frequency() {
            return Complex64::new(0.0, 0.0);
        }
        let lo = self.n_theta / 2;
        self.coeffs[i * self.s.len() + j][lo + k]
    }

    fn node(&self, ir: usize, is: usize, theta: f64) -> Complex64 {
        let c = &self.coeffs[ir * self.s.len() + is];
        frequencies(self.n_theta)
            .zip(c)
            .map(|(k, a)| a * Complex64::from_polar(1.0, k as f64 * theta))
            .sum()
    }

    /// `Φ(r, ζ)` for `r ∈ [0, 1]`, `|ζ| ≤ 1`.
    pub fn eval(&self, r: f64, zeta: Complex64) -> Complex64 {
        let (ir, fr) = bracket(&self.r, r);
        let (is, fs) = bracket(&self.s, zeta.norm());
        let th = zeta.arg();
        let at = |i: usize, j: usize| self.node(i, j, th);
        let lerp = |a: Complex64, b: Complex64, t: f64| a * (1.0 - t) + b * t;
        let ir1 = (ir + 1).min(self.r.len() - 1);
        let is1 = (is + 1).min(self.s.len() - 1);
        let lo = lerp(at(ir, is), at(ir, is1), fs);
        let hi = lerp(at(ir1, is), at(ir1, is1), fs);
        lerp(lo, hi, fr)
    }

    pub fn eval_point(&self, w: &BallPoint) -> Complex64 {
        let r = w.norm();
        let zeta = if r == 0.0 { Complex64::new(0.0, 0.0) } else { w.coords()[0] / r };
        self.eval(r, zeta)
    }
}

/// Index of the left node and the fractional position, clamped to the grid.
fn bracket(grid: &[f64], x: f64) -> (usize, f64) {
    let m = grid.len();
    if m == 1 || x <= grid[0] {
        return (0, 0.0);
    }
    if x >= grid[m - 1] {
        return (m - 2, 1.0);
    }
    let i = grid.partition_point(|&g| g <= x) - 1;
    (i, (x - grid[i]) / (grid[i + 1] - grid[i]))
}

fn fourier(ring: &[Complex64]) -> Vec<Complex64> {
    let n = ring.len();
    frequencies(n)
        .map(|k| {
            let s: Complex64 = ring
                .iter()
                .enumerate()
                .map(|(j, v)| v * Complex64::from_polar(1.0, -2.0 * PI * (k * j as i64) as f64 / n as f64))
                .sum();
            s / n as f64
        })
        .collect()
}
