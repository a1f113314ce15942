//! The reproducing kernel of `A²_ρ(B_n)` as a power series in `⟨z, w⟩`:
//!
//! `K_ρ(z, w) = Σ_d c_d ⟨z,w⟩^d`, `c_d = (d+n-1)! / (2·d!·n!·ρ_{2n-1+2d})`,
//!
//! together with the slice function `g(λ) = 2·n!·Σ_{d≥1} d c_d λ^{d-1}`, the
//! radial derivative `RK_ρ = ⟨z,w⟩ g(⟨z,w⟩)/(2·n!)` and the `n`-th derivative
//! of the one-variable kernel, `½ g(z w̄) w̄^n`.
//!
//! Coefficients are kept as logarithms and extended on demand up to `d_max`.
//! Every evaluation picks its truncation degree from a rigorous tail bound.

pub(crate) mod truncation;

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use spin::{Mutex, RwLock};

use crate::error::{domain, invalid};
use crate::quadrature::BallPoint;
use crate::special::{ln_gamma, ln_rising_ratio};
use crate::weights::MomentTable;
use crate::{Error, Result};

use truncation::{epsilon_grid, ln_c_epsilon, ln_tail_bound, Envelope};

pub const DEFAULT_D_MAX: usize = 4096;
const EAGER_DEGREES: usize = 256;

/// Goal for a series truncation: the tail bound must not exceed
/// `max(abs, rel·Σ|terms|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub fn absolute(abs: f64) -> Self {
        Tolerance { abs, rel: 0.0 }
    }

    pub fn relative(rel: f64) -> Self {
        Tolerance { abs: 0.0, rel }
    }

    fn validate(&self) -> Result<()> {
        if !(self.abs >= 0.0 && self.rel >= 0.0) || !(self.abs > 0.0 || self.rel > 0.0) {
            return Err(invalid("series tolerance must have a positive component"));
        }
        Ok(())
    }
}

impl From<f64> for Tolerance {
    fn from(abs: f64) -> Self {
        Tolerance::absolute(abs)
    }
}

/// A truncated series value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: Complex64,
    /// Highest degree included.
    pub degree: usize,
    /// Rigorous bound on the omitted tail.
    pub tail_bound: f64,
}

/// Which series to sum: `Σ_{d≥lo} d^power c_d λ^{d-shift}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeriesShape {
    pub power: u32,
    pub shift: u32,
}

impl SeriesShape {
    pub const KERNEL: SeriesShape = SeriesShape { power: 0, shift: 0 };
    pub const RADIAL: SeriesShape = SeriesShape { power: 1, shift: 0 };
    /// `g(λ)/(2·n!)`.
    pub const SLICE: SeriesShape = SeriesShape { power: 1, shift: 1 };

    fn first_degree(&self) -> usize {
        if self.power > 0 {
            self.shift.max(1) as usize
        } else {
            self.shift as usize
        }
    }
}

#[derive(Debug)]
pub struct KernelCoeffs {
    n: usize,
    d_max: usize,
    table: Arc<MomentTable>,
    log_coeffs: RwLock<Vec<f64>>,
    envelopes: Mutex<BTreeMap<u64, f64>>,
}

/// Builds the coefficient table for dimension `n`; degrees up to 256 are
/// computed now, the rest on demand.
pub fn build_coeffs(table: Arc<MomentTable>, n: usize, d_max: usize) -> Result<KernelCoeffs> {
    KernelCoeffs::new(table, n, d_max)
}

impl KernelCoeffs {
    pub fn new(table: Arc<MomentTable>, n: usize, d_max: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("dimension n must be at least 1"));
        }
        if d_max < 1 {
            return Err(invalid("d_max must be at least 1"));
        }
        let k = KernelCoeffs {
            n,
            d_max,
            table,
            log_coeffs: RwLock::new(Vec::new()),
            envelopes: Mutex::new(BTreeMap::new()),
        };
        k.ensure(EAGER_DEGREES.min(d_max))?;
        Ok(k)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d_max(&self) -> usize {
        self.d_max
    }

    pub fn table(&self) -> &Arc<MomentTable> {
        &self.table
    }

    /// Number of coefficients computed so far.
    pub fn built(&self) -> usize {
        self.log_coeffs.read().len()
    }

    /// Moment exponent paired with degree `d`.
    pub fn exponent(&self, d: usize) -> f64 {
        (2 * self.n - 1 + 2 * d) as f64
    }

    /// Makes sure degrees `0..=d` (capped at `d_max`) are available.
    pub fn ensure(&self, d: usize) -> Result<()> {
        let d = d.min(self.d_max);
        if self.log_coeffs.read().len() > d {
            return Ok(());
        }
        let mut lc = self.log_coeffs.write();
        let have = lc.len();
        if have > d {
            return Ok(());
        }
        let target = (d + 1).max(2 * have).min(self.d_max + 1);
        self.table.prefetch_arithmetic(self.exponent(have), 2.0, target - have)?;
        let base = -(2.0f64).ln() - ln_gamma(self.n as f64 + 1.0);
        for deg in have..target {
            let lm = self.table.ln_moment(self.exponent(deg))?;
            let v = ln_rising_ratio(deg, self.n) + base - lm;
            if !v.is_finite() {
                return Err(domain(alloc::format!("kernel coefficient {deg} is not finite")));
            }
            lc.push(v);
        }
        Ok(())
    }

    pub fn log_coeff(&self, d: usize) -> Result<f64> {
        if d > self.d_max {
            return Err(domain(alloc::format!("degree {d} exceeds d_max = {}", self.d_max)));
        }
        self.ensure(d)?;
        Ok(self.log_coeffs.read()[d])
    }

    pub fn coeff(&self, d: usize) -> Result<f64> {
        Ok(self.log_coeff(d)?.exp())
    }

    /// Copies `ln c_0 ..= ln c_d`.
    pub fn log_coeffs_upto(&self, d: usize) -> Result<Vec<f64>> {
        if d > self.d_max {
            return Err(domain(alloc::format!("degree {d} exceeds d_max = {}", self.d_max)));
        }
        self.ensure(d)?;
        Ok(self.log_coeffs.read()[..=d].to_vec())
    }

    fn envelopes(&self, tau: f64) -> Result<Vec<Envelope>> {
        let mut out = Vec::new();
        for eps in epsilon_grid(tau) {
            let key = eps.to_bits();
            let cached = self.envelopes.lock().get(&key).copied();
            let ln_c = match cached {
                Some(v) => v,
                None => {
                    let v = ln_c_epsilon(&self.table, self.n, eps)?;
                    self.envelopes.lock().insert(key, v);
                    v
                }
            };
            out.push(Envelope { ln_one_minus_eps: (-eps).ln_1p(), ln_c });
        }
        if out.is_empty() {
            return Err(domain(alloc::format!("no admissible envelope for |λ| = {tau}")));
        }
        Ok(out)
    }

    /// `ln` of the tail bound of `Σ_{d>big_d} d^power c_d τ^{d-shift}`.
    pub fn ln_tail_bound(&self, tau: f64, shape: SeriesShape, big_d: usize) -> Result<f64> {
        check_tau(tau)?;
        if tau == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        let ln_tau = tau.ln();
        let envs = self.envelopes(tau)?;
        Ok(best_bound(&envs, self.n, shape, ln_tau, big_d))
    }

    /// Smallest degree whose tail bound meets `tol`, with that bound.
    /// On failure returns the bound reached at `d_max`.
    pub fn truncation_degree(
        &self,
        tau: f64,
        shape: SeriesShape,
        tol: Tolerance,
    ) -> Result<core::result::Result<(usize, f64), f64>> {
        check_tau(tau)?;
        tol.validate()?;
        let lo = shape.first_degree();
        if tau == 0.0 {
            return Ok(Ok((lo, 0.0)));
        }
        let ln_tau = tau.ln();
        let envs = self.envelopes(tau)?;
        let ln_abs = tol.abs.ln();
        let ln_rel = tol.rel.ln();
        let ok = |d: usize| -> Result<(bool, f64)> {
            let b = best_bound(&envs, self.n, shape, ln_tau, d);
            if b <= ln_abs {
                return Ok((true, b));
            }
            if tol.rel > 0.0 && b.is_finite() {
                let s = self.ln_abs_sum(ln_tau, shape, d)?;
                return Ok((b <= ln_rel + s, b));
            }
            Ok((false, b))
        };
        let mut hi = (lo + 8).min(self.d_max);
        let mut lo_fail = lo.saturating_sub(1);
        let mut hb = loop {
            let (good, b) = ok(hi)?;
            if good {
                break b;
            }
            if hi >= self.d_max {
                return Ok(Err(b.exp()));
            }
            lo_fail = hi;
            hi = (hi * 2).min(self.d_max);
        };
        while hi - lo_fail > 1 {
            let mid = lo_fail + (hi - lo_fail) / 2;
            let (good, b) = ok(mid)?;
            if good {
                hi = mid;
                hb = b;
            } else {
                lo_fail = mid;
            }
        }
        Ok(Ok((hi.max(lo), hb.exp())))
    }

    /// `ln Σ_{d=lo}^{big_d} d^power c_d τ^{d-shift}`.
    fn ln_abs_sum(&self, ln_tau: f64, shape: SeriesShape, big_d: usize) -> Result<f64> {
        self.ensure(big_d)?;
        let lc = self.log_coeffs.read();
        let lo = shape.first_degree();
        let term = |d: usize| log_term(&lc, d, shape, ln_tau);
        let m = (lo..=big_d).map(term).fold(f64::NEG_INFINITY, f64::max);
        let s: f64 = (lo..=big_d).map(|d| (term(d) - m).exp()).sum();
        Ok(m + s.ln())
    }

    /// `Σ_{d=lo}^{big_d} d^power c_d λ^{d-shift}` by scaled Horner from the
    /// highest degree down.
    pub fn partial_sum(&self, lambda: Complex64, shape: SeriesShape, big_d: usize) -> Result<Complex64> {
        let lo = shape.first_degree();
        if big_d < lo {
            return Ok(Complex64::new(0.0, 0.0));
        }
        self.ensure(big_d)?;
        if big_d > self.built() - 1 {
            return Err(domain(alloc::format!("degree {big_d} exceeds d_max = {}", self.d_max)));
        }
        let lc = self.log_coeffs.read();
        let tau = lambda.norm();
        if tau == 0.0 {
            if lo == shape.shift as usize {
                let d = lo;
                return Ok(Complex64::new(log_term(&lc, d, shape, 0.0).exp(), 0.0));
            }
            return Ok(Complex64::new(0.0, 0.0));
        }
        let ln_tau = tau.ln();
        let u = lambda / tau;
        let m = (lo..=big_d).map(|d| log_term(&lc, d, shape, ln_tau)).fold(f64::NEG_INFINITY, f64::max);
        let mut h = Complex64::new(0.0, 0.0);
        for d in (lo..=big_d).rev() {
            h = h * u + (log_term(&lc, d, shape, ln_tau) - m).exp();
        }
        for _ in shape.shift as usize..lo {
            h *= u;
        }
        let v = h * m.exp();
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(domain("series value overflows"));
        }
        Ok(v)
    }

    /// The series of `shape` at `λ`, truncated by the tail bound.
    pub fn series(&self, lambda: Complex64, shape: SeriesShape, tol: Tolerance) -> Result<SeriesValue> {
        let tau = lambda.norm();
        match self.truncation_degree(tau, shape, tol)? {
            Ok((degree, tail_bound)) => {
                let value = self.partial_sum(lambda, shape, degree)?;
                Ok(SeriesValue { value, degree, tail_bound })
            }
            Err(tail_bound) => {
                let partial = self.partial_sum(lambda, shape, self.d_max)?;
                Err(Error::Truncation { partial, degree: self.d_max, tail_bound })
            }
        }
    }

    fn check_points(&self, z: &BallPoint, w: &BallPoint) -> Result<()> {
        if z.dim() != self.n || w.dim() != self.n {
            return Err(invalid(alloc::format!(
                "points must lie in C^{} (got dimensions {} and {})",
                self.n,
                z.dim(),
                w.dim()
            )));
        }
        Ok(())
    }

    /// `K_ρ(z, w)`.
    pub fn eval_kernel(&self, z: &BallPoint, w: &BallPoint, tol: impl Into<Tolerance>) -> Result<SeriesValue> {
        self.check_points(z, w)?;
        self.series(z.inner(w), SeriesShape::KERNEL, tol.into())
    }

    /// `g(λ) = Σ_{d≥1} Γ(d+n)/Γ(d) λ^{d-1} / ρ_{2n-1+2d}`.
    pub fn eval_g(&self, lambda: Complex64, tol: impl Into<Tolerance>) -> Result<SeriesValue> {
        let scale = self.slice_scale();
        let mut tol = tol.into();
        tol.abs /= scale;
        let mut v = self.series(lambda, SeriesShape::SLICE, tol).map_err(|e| scale_err(e, scale))?;
        v.value *= scale;
        v.tail_bound *= scale;
        Ok(v)
    }

    /// `2·n!`, the factor between `g` and `Σ d c_d λ^{d-1}`.
    pub fn slice_scale(&self) -> f64 {
        2.0 * ln_gamma(self.n as f64 + 1.0).exp()
    }

    /// `RK_ρ(z, w) = ⟨z,w⟩ g(⟨z,w⟩) / (2·n!)`.
    pub fn eval_rk(&self, z: &BallPoint, w: &BallPoint, tol: impl Into<Tolerance>) -> Result<SeriesValue> {
        self.check_points(z, w)?;
        self.series(z.inner(w), SeriesShape::RADIAL, tol.into())
    }

    /// `∂^n/∂z^n K¹_ρ(z, w) = ½ g(z w̄) w̄^n` for scalars `z, w` in the disk.
    pub fn eval_disk_kernel_deriv(&self, z: Complex64, w: Complex64, tol: impl Into<Tolerance>) -> Result<SeriesValue> {
        if !(z.norm() < 1.0) || !(w.norm() < 1.0) {
            return Err(domain("disk kernel arguments must lie in the open unit disk"));
        }
        let wn = w.conj().powu(self.n as u32);
        let factor = 0.5 * wn.norm();
        if factor == 0.0 {
            return Ok(SeriesValue { value: Complex64::new(0.0, 0.0), degree: 0, tail_bound: 0.0 });
        }
        let mut tol = tol.into();
        tol.abs /= factor;
        let mut g = self.eval_g(z * w.conj(), tol).map_err(|e| scale_err_complex(e, 0.5 * wn))?;
        g.value *= 0.5 * wn;
        g.tail_bound *= factor;
        Ok(g)
    }

    /// `‖K_ρ(·, z)‖² = Σ c_d |z|^{2d}`.
    pub fn kernel_norm_sq(&self, z: &BallPoint, tol: impl Into<Tolerance>) -> Result<f64> {
        if z.dim() != self.n {
            return Err(invalid("point dimension does not match the kernel"));
        }
        let v = self.series(Complex64::new(z.norm_sq(), 0.0), SeriesShape::KERNEL, tol.into())?;
        Ok(v.value.re)
    }
}

fn log_term(lc: &[f64], d: usize, shape: SeriesShape, ln_tau: f64) -> f64 {
    let p = if shape.power == 0 { 0.0 } else { shape.power as f64 * (d as f64).ln() };
    let k = d as f64 - shape.shift as f64;
    let pow = if k == 0.0 { 0.0 } else { k * ln_tau };
    lc[d] + p + pow
}

fn best_bound(envs: &[Envelope], n: usize, shape: SeriesShape, ln_tau: f64, big_d: usize) -> f64 {
    let b = envs
        .iter()
        .map(|e| ln_tail_bound(e, n, shape.power, ln_tau, big_d))
        .fold(f64::INFINITY, f64::min);
    b - shape.shift as f64 * ln_tau
}

fn check_tau(tau: f64) -> Result<()> {
    if !(0.0..1.0).contains(&tau) {
        return Err(domain(alloc::format!("series argument modulus {tau} must lie in [0, 1)")));
    }
    Ok(())
}

fn scale_err(e: Error, s: f64) -> Error {
    scale_err_complex(e, Complex64::new(s, 0.0))
}

fn scale_err_complex(e: Error, s: Complex64) -> Error {
    match e {
        Error::Truncation { partial, degree, tail_bound } => {
            Error::Truncation { partial: partial * s, degree, tail_bound: tail_bound * s.norm() }
        }
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::RadialWeight;

    fn flat(n: usize) -> KernelCoeffs {
        let t = Arc::new(MomentTable::with_defaults(RadialWeight::standard(0.0).unwrap()));
        KernelCoeffs::new(t, n, DEFAULT_D_MAX).unwrap()
    }

    fn pt(c: &[(f64, f64)]) -> BallPoint {
        BallPoint::new(c.iter().map(|&(a, b)| Complex64::new(a, b)).collect()).unwrap()
    }

    #[test]
    fn flat_coefficients() {
        let k = flat(2);
        for (d, want) in [(0, 1.0), (1, 3.0), (2, 6.0)] {
            assert!((k.coeff(d).unwrap() - want).abs() < 1e-12);
        }
        let k1 = flat(1);
        for d in 0..10 {
            assert!((k1.coeff(d).unwrap() - (d as f64 + 1.0)).abs() < 1e-11);
        }
    }

    #[test]
    fn kernel_examples() {
        let k = flat(2);
        let z = pt(&[(0.5, 0.0), (0.0, 0.0)]);
        let v = k.eval_kernel(&z, &z, 1e-12).unwrap();
        assert!((v.value.re - 1.0 / 0.75f64.powi(3)).abs() < 1e-11);
        let a = pt(&[(0.3, 0.0), (0.0, 0.0)]);
        let b = pt(&[(0.0, 0.0), (0.0, 0.4)]);
        assert!((k.eval_kernel(&a, &b, 1e-12).unwrap().value - 1.0).norm() < 1e-15);
    }

    #[test]
    fn g_examples() {
        let k = flat(2);
        assert!((k.eval_g(Complex64::new(0.0, 0.0), 1e-12).unwrap().value.re - 12.0).abs() < 1e-11);
        let v = k.eval_g(Complex64::new(0.25, 0.0), 1e-10).unwrap().value.re;
        assert!((v - 12.0 / 0.75f64.powi(4)).abs() < 1e-9);
    }

    #[test]
    fn rk_examples() {
        let k = flat(2);
        let z = pt(&[(0.5, 0.0), (0.5, 0.0)]);
        let w = pt(&[(0.5, 0.0), (0.0, 0.0)]);
        let v = k.eval_rk(&z, &w, 1e-11).unwrap().value;
        assert!((v.re - 3.0 * 0.25 / 0.75f64.powi(4)).abs() < 1e-10);
        let w2 = pt(&[(0.5, 0.0), (0.5, 0.0)]);
        let z2 = pt(&[(0.5, 0.0), (0.5, 0.0)]);
        let v = k.eval_rk(&z2, &w2, 1e-10).unwrap().value;
        assert!((v.re - 24.0).abs() < 1e-9);
    }

    #[test]
    fn disk_derivative_examples() {
        let k = flat(2);
        let zero = Complex64::new(0.0, 0.0);
        let half = Complex64::new(0.5, 0.0);
        assert_eq!(k.eval_disk_kernel_deriv(half, zero, 1e-12).unwrap().value, zero);
        assert!((k.eval_disk_kernel_deriv(zero, half, 1e-12).unwrap().value.re - 1.5).abs() < 1e-12);
        let v = k.eval_disk_kernel_deriv(half, half, 1e-10).unwrap().value.re;
        assert!((v - 0.5 * 12.0 / 0.75f64.powi(4) * 0.25).abs() < 1e-9);
    }

    #[test]
    fn truncation_reports_partial_sum() {
        let t = Arc::new(MomentTable::with_defaults(RadialWeight::standard(0.0).unwrap()));
        let k = KernelCoeffs::new(t, 2, 16).unwrap();
        let z = pt(&[(0.95, 0.0), (0.0, 0.0)]);
        match k.eval_kernel(&z, &z, 1e-12) {
            Err(Error::Truncation { degree, partial, .. }) => {
                assert_eq!(degree, 16);
                assert!(partial.re > 1.0);
            }
            other => panic!("expected truncation failure, got {other:?}"),
        }
    }

    #[test]
    fn relative_goal_uses_fewer_terms_for_large_values() {
        let t = Arc::new(MomentTable::with_defaults(RadialWeight::standard(0.0).unwrap()));
        let k = KernelCoeffs::new(t, 2, 1 << 16).unwrap();
        let lam = Complex64::new(0.99, 0.0);
        let a = k.series(lam, SeriesShape::KERNEL, Tolerance::absolute(1e-10)).unwrap();
        let r = k.series(lam, SeriesShape::KERNEL, Tolerance::relative(1e-10)).unwrap();
        assert!(r.degree < a.degree);
        let exact = 1.0 / 0.01f64.powi(3);
        assert!(((r.value.re - exact) / exact).abs() < 1e-9);
    }
}
