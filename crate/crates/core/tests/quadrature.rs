use bergman_core::quadrature::{
    integrate_ball_radial, integrate_disk, integrate_graded, sphere_slice_average, BallPoint, QuadSpec, SphereRule,
};
use bergman_core::special::ln_gamma;
use bergman_core::weights::RadialWeight;
use bergman_core::{Complex64, Error};
use proptest::prelude::*;

fn q() -> QuadSpec {
    QuadSpec { tolerance: 1e-12, rel_tolerance: 1e-12, ..QuadSpec::default() }
}

fn factorial(k: u32) -> f64 {
    ln_gamma(k as f64 + 1.0).exp()
}

/// `∫_{S_n} ⟨z,ξ⟩^a conj(⟨z,ξ⟩)^b dσ(ξ)`: zero unless `a = b`, then
/// `|z|^{2a} a!(n-1)!/(n-1+a)!`.
fn slice_moment(n: usize, a: u32, b: u32, r: f64) -> f64 {
    if a != b {
        return 0.0;
    }
    r.powi(2 * a as i32) * factorial(a) * factorial(n as u32 - 1) / factorial(n as u32 - 1 + a)
}

#[test]
fn ball_moments_of_first_coordinate() {
    let flat = RadialWeight::standard(0.0).unwrap();
    for n in [2usize, 3] {
        for k in 0..=3u32 {
            let sphere = sphere_slice_average(|l| l.norm_sqr().powi(k as i32), &BallPoint::on_axis(n, 0.5).unwrap(), &q())
                .unwrap()
                / 0.25f64.powi(k as i32);
            let v = integrate_ball_radial(n, &flat, |r: f64| Ok(r.powi(2 * k as i32) * sphere), &q()).unwrap().value;
            let exact = factorial(n as u32) * factorial(k) / factorial(n as u32 + k);
            assert!((v - exact).abs() < 1e-8, "n={n} k={k}: {v} vs {exact}");
        }
    }
}

#[test]
fn ball_radial_examples() {
    let flat = RadialWeight::standard(0.0).unwrap();
    let lin = RadialWeight::standard(1.0).unwrap();
    let one = |_r: f64| Ok(1.0);
    assert!((integrate_ball_radial(2, &flat, one, &q()).unwrap().value - 1.0).abs() < 1e-12);
    assert!((integrate_ball_radial(2, &lin, one, &q()).unwrap().value - 1.0 / 3.0).abs() < 1e-12);
    let sq = |r: f64| Ok(r * r);
    assert!((integrate_ball_radial(2, &flat, sq, &q()).unwrap().value - 2.0 / 3.0).abs() < 1e-12);
}

#[test]
fn sphere_rule_matches_slice_reduction() {
    // the tensor rule and the disk reduction are independent routes to the same integral
    for n in [2usize, 3] {
        let rule = SphereRule::new(n, 8).unwrap();
        let h = |l: Complex64| l.norm_sqr() * l.norm_sqr() + l.re * l.re * l.re;
        let z = BallPoint::new(vec![Complex64::new(0.3, 0.1); n]).unwrap();
        let via_rule: f64 = rule.integrate(|xi: &[Complex64]| {
            let inner: Complex64 = z.coords().iter().zip(xi).map(|(a, b)| a * b.conj()).sum();
            h(inner)
        });
        let via_slice = sphere_slice_average(h, &z, &q()).unwrap();
        assert!((via_rule - via_slice).abs() < 1e-12, "n={n}");
    }
}

#[test]
fn error_estimates_are_honest() {
    // (integrand in (t, c = 1 - t) form, exact value)
    type Case = (Box<dyn Fn(f64, f64) -> f64>, f64);
    let mut cases: Vec<Case> = Vec::new();
    for k in 0..12 {
        cases.push((Box::new(move |t: f64, _| t.powi(k)), 1.0 / (k as f64 + 1.0)));
    }
    for s in [0.1f64, 0.25, 0.5, 0.75, 0.9] {
        // ∫ c^{-s} = 1/(1-s)
        cases.push((Box::new(move |_, c: f64| c.powf(-s)), 1.0 / (1.0 - s)));
    }
    for m in 1..6 {
        // ∫ ln(1/c)^m = m!
        cases.push((Box::new(move |_, c: f64| (-c.ln()).powi(m)), factorial(m as u32)));
    }
    for w in [1.0f64, 5.0, 20.0, 60.0] {
        cases.push((Box::new(move |t: f64, _| (w * t).cos()), w.sin() / w));
    }
    for a in [1.0f64, 10.0, 100.0] {
        cases.push((Box::new(move |t: f64, _| (-a * t).exp()), -(-a).exp_m1() / a));
    }
    for eps in [1e-2f64, 1e-4] {
        // ∫ 1/(c + eps)
        cases.push((Box::new(move |_, c: f64| 1.0 / (c + eps)), ((1.0 + eps) / eps).ln()));
    }
    let mut honest = 0;
    let total = cases.len() * 3;
    for tol in [1e-6, 1e-9, 1e-12] {
        let spec = QuadSpec { tolerance: tol, rel_tolerance: tol, ..QuadSpec::default() };
        for (f, exact) in &cases {
            // a budget failure still carries a partial value and an error estimate
            let (value, error) = match integrate_graded(f, 0.0, 1.0, &spec) {
                Ok(est) => (est.value, est.error),
                Err(Error::NotConverged { partial, error_estimate }) => (partial, error_estimate),
                Err(e) => panic!("{e}"),
            };
            let actual = (value - exact).abs();
            if error >= actual || actual <= 4.0 * f64::EPSILON * exact.abs() {
                honest += 1;
            }
        }
    }
    assert!(honest as f64 >= 0.95 * total as f64, "{honest}/{total}");
}

#[test]
fn disk_examples() {
    assert!((integrate_disk(|_| 1.0, 0, &q()).unwrap() - 1.0).abs() < 1e-12);
    assert!((integrate_disk(|l| l.norm_sqr(), 0, &q()).unwrap() - 0.5).abs() < 1e-12);
    assert!((integrate_disk(|_| 1.0, 1, &q()).unwrap() - 0.5).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn slice_reduction_is_exact_for_polynomials(
        n in 2usize..=3,
        a in 0u32..=6,
        b in 0u32..=6,
        cr in -1.0f64..1.0,
        ci in -1.0f64..1.0,
        r in 0.05f64..0.99,
    ) {
        prop_assume!(a + b <= 6);
        // h = Re(c λ^a conj(λ)^b) + |λ|^{2 min(a,b)}
        let c = Complex64::new(cr, ci);
        let m = a.min(b);
        let h = |l: Complex64| (c * l.powu(a) * l.conj().powu(b)).re + l.norm_sqr().powi(m as i32);
        let z = BallPoint::on_axis(n, r).unwrap();
        let got = sphere_slice_average(h, &z, &q()).unwrap();
        let exact = (c * slice_moment(n, a, b, r)).re + slice_moment(n, m, m, r);
        prop_assert!((got - exact).abs() < 1e-10, "n={} a={} b={}: {} vs {}", n, a, b, got, exact);
    }
}
