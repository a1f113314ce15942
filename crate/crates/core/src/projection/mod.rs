//! The weighted Bergman projection `P_ρ φ(z) = ∫ K_ρ(z, w) φ(w) ρ(w) dv(w)`
//! for a family of bounded symbols.
//!
//! Monomials, conjugate monomials, radial indicators and unimodular phases
//! pair with the kernel's monomial expansion by exact angular orthogonality:
//! the projection is a single monomial `a·z^μ` whose coefficient needs one
//! radial integral. Grid-sampled symbols of slice form are split into
//! angular frequencies (exact on the circle) and then integrated over the
//! slice disk and the radius cell by cell.

mod custom;

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::invalid;
use crate::kernel::KernelCoeffs;
use crate::quadrature::{integrate_ball_radial, integrate_toward, BallPoint, QuadSpec, SphereRule};
use crate::special::{gauss_legendre_unit, sphere_abs_moment};
use crate::weights::{check_radius, RadialWeight};
use crate::{Error, Result};

pub use custom::CustomSymbol;

#[derive(Debug, Clone, PartialEq)]
pub enum SymbolKind {
    /// `w^α`
    Monomial(Vec<u32>),
    /// `conj(w)^α`
    ConjMonomial(Vec<u32>),
    /// `1` on `r_lo ≤ |w| < r_hi`, else `0`
    RadialIndicator { r_lo: f64, r_hi: f64 },
    /// `w^α conj(w)^β / |w^α conj(w)^β|`
    UnimodularPhase { alpha: Vec<u32>, beta: Vec<u32> },
    Custom(CustomSymbol),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundedSymbol {
    kind: SymbolKind,
    sup_norm_bound: f64,
}

impl BoundedSymbol {
    pub fn monomial(alpha: Vec<u32>) -> Result<Self> {
        check_index(&alpha)?;
        Ok(BoundedSymbol { kind: SymbolKind::Monomial(alpha), sup_norm_bound: 1.0 })
    }

    pub fn conj_monomial(alpha: Vec<u32>) -> Result<Self> {
        check_index(&alpha)?;
        Ok(BoundedSymbol { kind: SymbolKind::ConjMonomial(alpha), sup_norm_bound: 1.0 })
    }

    pub fn radial_indicator(r_lo: f64, r_hi: f64) -> Result<Self> {
        if !(0.0 <= r_lo && r_lo < r_hi && r_hi <= 1.0) {
            return Err(invalid(alloc::format!(
                "radial indicator needs 0 <= r_lo < r_hi <= 1, got [{r_lo}, {r_hi})"
            )));
        }
        Ok(BoundedSymbol { kind: SymbolKind::RadialIndicator { r_lo, r_hi }, sup_norm_bound: 1.0 })
    }

    pub fn unimodular_phase(alpha: Vec<u32>, beta: Vec<u32>) -> Result<Self> {
        check_index(&alpha)?;
        if alpha.len() != beta.len() {
            return Err(invalid("phase multi-indices must have equal length"));
        }
        Ok(BoundedSymbol { kind: SymbolKind::UnimodularPhase { alpha, beta }, sup_norm_bound: 1.0 })
    }

    pub fn custom(sym: CustomSymbol) -> Self {
        let sup = sym.sup_norm();
        BoundedSymbol { kind: SymbolKind::Custom(sym), sup_norm_bound: sup }
    }

    pub fn kind(&self) -> &SymbolKind {
        &self.kind
    }

    pub fn sup_norm_bound(&self) -> f64 {
        self.sup_norm_bound
    }

    /// Dimension fixed by the multi-index, if any.
    pub fn dim(&self) -> Option<usize> {
        match &self.kind {
            SymbolKind::Monomial(a) | SymbolKind::ConjMonomial(a) => Some(a.len()),
            SymbolKind::UnimodularPhase { alpha, .. } => Some(alpha.len()),
            _ => None,
        }
    }

    /// `φ(w)`.
    pub fn eval(&self, w: &BallPoint) -> Result<Complex64> {
        if let Some(n) = self.dim() {
            if n != w.dim() {
                return Err(invalid("point dimension does not match the symbol"));
            }
        }
        let one = Complex64::new(1.0, 0.0);
        Ok(match &self.kind {
            SymbolKind::Monomial(a) => w.monomial(a),
            SymbolKind::ConjMonomial(a) => w.monomial(a).conj(),
            SymbolKind::RadialIndicator { r_lo, r_hi } => {
                let r = w.norm();
                if *r_lo <= r && r < *r_hi {
                    one
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
            SymbolKind::UnimodularPhase { alpha, beta } => {
                let v = w.monomial(alpha) * w.monomial(beta).conj();
                if v.norm() == 0.0 {
                    one
                } else {
                    v / v.norm()
                }
            }
            SymbolKind::Custom(c) => c.eval_point(w),
        })
    }
}

fn check_index(alpha: &[u32]) -> Result<()> {
    if alpha.is_empty() {
        return Err(invalid("multi-index must have at least one entry"));
    }
    Ok(())
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(|j| j as f64).product()
}

fn multi_factorial(a: &[u32]) -> f64 {
    a.iter().map(|&k| factorial(k)).product()
}

/// `P_ρ φ = coefficient · z^index`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialImage {
    pub coefficient: Complex64,
    pub index: Vec<u32>,
}

impl MonomialImage {
    pub fn eval(&self, z: &BallPoint) -> Complex64 {
        self.coefficient * z.monomial(&self.index)
    }

    /// `R(a z^μ) = |μ| a z^μ`.
    pub fn radial_derivative(&self, z: &BallPoint) -> Complex64 {
        let k: u32 = self.index.iter().sum();
        self.eval(z) * k as f64
    }

    fn zero(n: usize) -> Self {
        MonomialImage { coefficient: Complex64::new(0.0, 0.0), index: alloc::vec![0; n] }
    }
}

/// `2n ∫_0^1 r^{2n-1+p} ρ(r) dr` by radial quadrature.
fn radial_mass(n: usize, w: &RadialWeight, p: u32, q: &QuadSpec) -> Result<f64> {
    Ok(integrate_ball_radial(n, w, |r: f64| Ok(r.powi(p as i32)), q)?.value)
}

/// The image of an orthogonality-friendly symbol, or `None` for custom symbols.
pub fn monomial_image(
    k: &KernelCoeffs,
    w: &RadialWeight,
    phi: &BoundedSymbol,
    q: &QuadSpec,
) -> Result<Option<MonomialImage>> {
    let n = k.n();
    if let Some(m) = phi.dim() {
        if m != n {
            return Err(invalid(alloc::format!("symbol dimension {m} does not match n = {n}")));
        }
    }
    let image = match &phi.kind {
        SymbolKind::Monomial(alpha) => {
            let d: u32 = alpha.iter().sum();
            let doubled: Vec<f64> = alpha.iter().map(|&a| 2.0 * a as f64).collect();
            let coef = k.coeff(d as usize)? * factorial(d) / multi_factorial(alpha)
                * radial_mass(n, w, 2 * d, q)?
                * sphere_abs_moment(&doubled);
            MonomialImage { coefficient: Complex64::new(coef, 0.0), index: alpha.clone() }
        }
        SymbolKind::ConjMonomial(alpha) => {
            if alpha.iter().any(|&a| a > 0) {
                MonomialImage::zero(n)
            } else {
                let coef = k.coeff(0)? * radial_mass(n, w, 0, q)?;
                MonomialImage { coefficient: Complex64::new(coef, 0.0), index: alloc::vec![0; n] }
            }
        }
        SymbolKind::RadialIndicator { r_lo, r_hi } => {
            let (lo, hi) = (*r_lo, *r_hi);
            let off = 1.0 - hi;
            let scale = 2.0 * n as f64;
            let mass = integrate_toward(
                |r, c| scale * r.powi(2 * n as i32 - 1) * w.density(r, c + off),
                hi,
                hi - lo,
                q,
            )?
            .value;
            MonomialImage { coefficient: Complex64::new(k.coeff(0)? * mass, 0.0), index: alloc::vec![0; n] }
        }
        SymbolKind::UnimodularPhase { alpha, beta } => {
            if alpha.iter().zip(beta).any(|(a, b)| a < b) {
                MonomialImage::zero(n)
            } else {
                let mu: Vec<u32> = alpha.iter().zip(beta).map(|(a, b)| a - b).collect();
                let d: u32 = mu.iter().sum();
                let powers: Vec<f64> = mu.iter().map(|&m| m as f64).collect();
                let coef = k.coeff(d as usize)? * factorial(d) / multi_factorial(&mu)
                    * radial_mass(n, w, d, q)?
                    * sphere_abs_moment(&powers);
                MonomialImage { coefficient: Complex64::new(coef, 0.0), index: mu }
            }
        }
        SymbolKind::Custom(_) => return Ok(None),
    };
    Ok(Some(image))
}

/// `∫_0^1 L(ℓ) W(ℓ) dℓ` where `L` is linear between `s` nodes (constant
/// outside) and `W(ℓ) = 2(n-1)ℓ^{k+1}(1-ℓ²)^{n-2}`; for `n = 1` the value at
/// `ℓ = 1`. Polynomial on every cell, so Gauss-Legendre is exact.
fn slice_moment(n: usize, k: usize, s: &[f64], vals: &[Complex64]) -> Complex64 {
    let at = |l: f64| -> Complex64 {
        let m = s.len();
        if m == 1 || l <= s[0] {
            return vals[0];
        }
        if l >= s[m - 1] {
            return vals[m - 1];
        }
        let i = s.partition_point(|&g| g <= l) - 1;
        let t = (l - s[i]) / (s[i + 1] - s[i]);
        vals[i] * (1.0 - t) + vals[i + 1] * t
    };
    if n == 1 {
        return at(1.0);
    }
    let weight = |l: f64| 2.0 * (n - 1) as f64 * l.powi(k as i32 + 1) * (1.0 - l * l).powi(n as i32 - 2);
    let mut cuts = alloc::vec![0.0];
    cuts.extend(s.iter().copied().filter(|&x| x > 0.0 && x < 1.0));
    cuts.push(1.0);
    let gl = gauss_legendre_unit(n + k / 2 + 2);
    let mut total = Complex64::new(0.0, 0.0);
    for c in cuts.windows(2) {
        let (a, b) = (c[0], c[1]);
        for &(x, wt) in &gl {
            let l = a + (b - a) * x;
            total += at(l) * (weight(l) * wt * (b - a));
        }
    }
    total
}

/// Angular-frequency decomposition of a custom symbol's projection:
/// entry `k` is `c_k · 2n ∫ r^{2n-1+k} ρ(r) ∫_{S_n} conj(ξ_1)^k φ(rξ) dσ dr`,
/// so that `P_ρ φ(z_1 e_1) = Σ_k entry_k z_1^k`.
fn custom_terms(
    k: &KernelCoeffs,
    w: &RadialWeight,
    sym: &CustomSymbol,
    q: &QuadSpec,
) -> Result<Vec<Complex64>> {
    let n = k.n();
    let rg = sym.r_grid();
    let sg = sym.s_grid();
    let scale = 2.0 * n as f64;
    let mut out = Vec::with_capacity(sym.max_frequency() + 1);
    for freq in 0..=sym.max_frequency() {
        let node_vals: Vec<Complex64> = (0..rg.len())
            .map(|i| {
                let vals: Vec<Complex64> = (0..sg.len()).map(|j| sym.fourier(i, j, freq)).collect();
                slice_moment(n, freq, sg, &vals)
            })
            .collect();
        if node_vals.iter().all(|v| v.norm() == 0.0) {
            out.push(Complex64::new(0.0, 0.0));
            continue;
        }
        let lin = |r: f64| -> Complex64 {
            let m = rg.len();
            if m == 1 || r <= rg[0] {
                return node_vals[0];
            }
            if r >= rg[m - 1] {
                return node_vals[m - 1];
            }
            let i = rg.partition_point(|&g| g <= r) - 1;
            let t = (r - rg[i]) / (rg[i + 1] - rg[i]);
            node_vals[i] * (1.0 - t) + node_vals[i + 1] * t
        };
        let mut cuts = alloc::vec![0.0];
        cuts.extend(rg.iter().copied().filter(|&x| x > 0.0 && x < 1.0));
        cuts.push(1.0);
        let p = 2 * n as i32 - 1 + freq as i32;
        let mut total = Complex64::new(0.0, 0.0);
        for c in cuts.windows(2) {
            let (a, b) = (c[0], c[1]);
            let off = 1.0 - b;
            let est = integrate_toward(
                |r: f64, cc: f64| lin(r) * (scale * r.powi(p) * w.density(r, cc + off)),
                b,
                b - a,
                q,
            )?;
            total += est.value;
        }
        out.push(total * k.coeff(freq)?);
    }
    Ok(out)
}

fn axis_coordinate(z: &BallPoint) -> Result<Complex64> {
    if z.coords()[1..].iter().any(|c| c.norm() != 0.0) {
        return Err(Error::NotSliceForm(alloc::string::String::from(
            "custom symbols are projected only at points on the first coordinate axis",
        )));
    }
    Ok(z.coords()[0])
}

/// `P_ρ φ(z)`.
pub fn project(
    k: &KernelCoeffs,
    w: &RadialWeight,
    phi: &BoundedSymbol,
    z: &BallPoint,
    q: &QuadSpec,
) -> Result<Complex64> {
    if z.dim() != k.n() {
        return Err(invalid("point dimension does not match the kernel"));
    }
    match monomial_image(k, w, phi, q)? {
        Some(img) => Ok(img.eval(z)),
        None => match &phi.kind {
            SymbolKind::Custom(sym) => {
                let z1 = axis_coordinate(z)?;
                let terms = custom_terms(k, w, sym, q)?;
                Ok(terms.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, t| acc * z1 + t))
            }
            _ => unreachable!("only custom symbols lack a monomial image"),
        },
    }
}

/// Both sides of the reproducing identity for `z^α`, `|α| = d`:
/// `z^α = c_d ∫ w^α ⟨z, w⟩^d ρ(w) dv(w)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StarCheck {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub abs_gap: f64,
}

/// Evaluates the right side with a tensor-product sphere rule (exact for the
/// polynomial integrand) and radial quadrature.
pub fn verify_star(
    k: &KernelCoeffs,
    w: &RadialWeight,
    alpha: &[u32],
    z: &BallPoint,
    q: &QuadSpec,
) -> Result<StarCheck> {
    let n = k.n();
    if alpha.len() != n || z.dim() != n {
        return Err(invalid("multi-index and point must match the kernel dimension"));
    }
    let d: u32 = alpha.iter().sum();
    let rule = SphereRule::new(n, 2 * d as usize)?;
    let zc = z.coords();
    let sphere: Complex64 = rule.integrate(|xi: &[Complex64]| {
        let mono = xi.iter().zip(alpha).fold(Complex64::new(1.0, 0.0), |acc, (x, &a)| acc * x.powu(a));
        let inner: Complex64 = zc.iter().zip(xi).map(|(a, b)| a * b.conj()).sum();
        mono * inner.powu(d)
    });
    let radial = integrate_ball_radial(n, w, |r: f64| Ok(r.powi(2 * d as i32)), q)?.value;
    let rhs = sphere * radial * k.coeff(d as usize)?;
    let lhs = z.monomial(alpha);
    Ok(StarCheck { lhs, rhs, abs_gap: (lhs - rhs).norm() })
}

/// `(r, (1 - r²)|R(P_ρ φ)(r e_1)|)` along `radii`.
pub fn project_bloch_image(
    k: &KernelCoeffs,
    w: &RadialWeight,
    phi: &BoundedSymbol,
    radii: &[f64],
    q: &QuadSpec,
) -> Result<Vec<(f64, f64)>> {
    let n = k.n();
    let image = monomial_image(k, w, phi, q)?;
    let terms = match &phi.kind {
        SymbolKind::Custom(sym) => custom_terms(k, w, sym, q)?,
        _ => Vec::new(),
    };
    let mut out = Vec::with_capacity(radii.len());
    for &r in radii {
        check_radius(r)?;
        let z = BallPoint::on_axis(n, r)?;
        let rf = match (&image, &phi.kind) {
            (Some(img), _) => img.radial_derivative(&z),
            (None, _) => terms
                .iter()
                .enumerate()
                .map(|(d, t)| t * (d as f64 * r.powi(d as i32)))
                .sum(),
        };
        out.push((r, (1.0 - r * r) * rf.norm()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::MomentTable;
    use alloc::sync::Arc;
    use alloc::vec;

    fn setup(alpha: f64, n: usize) -> (KernelCoeffs, RadialWeight) {
        let w = RadialWeight::standard(alpha).unwrap();
        let t = Arc::new(MomentTable::with_defaults(w.clone()));
        (KernelCoeffs::new(t, n, 4096).unwrap(), w)
    }

    fn q() -> QuadSpec {
        QuadSpec { tolerance: 1e-12, rel_tolerance: 1e-12, ..QuadSpec::default() }
    }

    #[test]
    fn constant_symbol_projects_to_one() {
        let (k, w) = setup(0.0, 2);
        let phi = BoundedSymbol::monomial(vec![0, 0]).unwrap();
        let z = BallPoint::new(vec![Complex64::new(0.2, 0.1), Complex64::new(-0.3, 0.0)]).unwrap();
        assert!((project(&k, &w, &phi, &z, &q()).unwrap() - 1.0).norm() < 1e-12);
    }

    #[test]
    fn monomials_are_reproduced() {
        let (k, w) = setup(1.0, 2);
        let z = BallPoint::new(vec![Complex64::new(0.3, 0.2), Complex64::new(0.1, -0.4)]).unwrap();
        for alpha in [vec![1, 0], vec![2, 1], vec![0, 3]] {
            let phi = BoundedSymbol::monomial(alpha.clone()).unwrap();
            let v = project(&k, &w, &phi, &z, &q()).unwrap();
            assert!((v - z.monomial(&alpha)).norm() < 1e-10, "{alpha:?}");
        }
    }

    #[test]
    fn antiholomorphic_symbols_vanish() {
        let (k, w) = setup(0.0, 2);
        let phi = BoundedSymbol::conj_monomial(vec![1, 0]).unwrap();
        let z = BallPoint::on_axis(2, 0.6).unwrap();
        assert_eq!(project(&k, &w, &phi, &z, &q()).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn radial_indicator_of_whole_ball_is_one() {
        let (k, w) = setup(1.0, 2);
        let phi = BoundedSymbol::radial_indicator(0.0, 1.0).unwrap();
        let z = BallPoint::on_axis(2, 0.6).unwrap();
        assert!((project(&k, &w, &phi, &z, &q()).unwrap() - 1.0).norm() < 1e-12);
    }

    #[test]
    fn star_examples() {
        let (k, w) = setup(0.0, 2);
        let z = BallPoint::new(vec![Complex64::new(0.5, 0.0), Complex64::new(0.5, 0.0)]).unwrap();
        let s = verify_star(&k, &w, &[2, 1], &z, &q()).unwrap();
        assert!((s.lhs.re - 0.125).abs() < 1e-15);
        assert!(s.abs_gap < 1e-10, "{s:?}");
    }

    #[test]
    fn bloch_image_of_first_coordinate() {
        let (k, w) = setup(0.0, 2);
        let phi = BoundedSymbol::monomial(vec![1, 0]).unwrap();
        let radii: Vec<f64> = (1..100).map(|i| i as f64 / 100.0).collect();
        let prof = project_bloch_image(&k, &w, &phi, &radii, &q()).unwrap();
        let max = prof.iter().map(|p| p.1).fold(0.0, f64::max);
        assert!((max - 2.0 / (3.0 * 3.0f64.sqrt())).abs() < 1e-3);
    }

    #[test]
    fn custom_first_coordinate_matches_monomial() {
        let (k, w) = setup(0.0, 2);
        let grid: Vec<f64> = (0..5).map(|i| i as f64 / 4.0).collect();
        let sym = CustomSymbol::from_fn(2, |p| p.coords()[0], grid.clone(), grid, 8).unwrap();
        let phi = BoundedSymbol::custom(sym);
        let z = BallPoint::on_axis(2, 0.4).unwrap();
        let qq = q();
        let v = project(&k, &w, &phi, &z, &qq).unwrap();
        assert!((v - 0.4).norm() < 1e-11, "{v}");
        let prof = project_bloch_image(&k, &w, &phi, &[0.5], &qq).unwrap();
        assert!((prof[0].1 - 0.75 * 0.5).abs() < 1e-11);
        let off = BallPoint::new(vec![Complex64::new(0.1, 0.0), Complex64::new(0.2, 0.0)]).unwrap();
        assert!(matches!(project(&k, &w, &phi, &off, &qq), Err(Error::NotSliceForm(_))));
    }
}
