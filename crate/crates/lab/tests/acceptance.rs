//! Desk-scale acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits nonzero if a criterion fails that is not listed in `KNOWN`.

use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::Instant;

use bergman_core::analysis::{
    cesaro_lower, hardy_littlewood_check, hardy_littlewood_converse, moment_doubling_chain, pr_estimate_check,
    theorem_check, Sequential, TheoremConfig,
};
use bergman_core::kernel::{KernelCoeffs, Tolerance};
use bergman_core::projection::verify_star;
use bergman_core::quadrature::{integrate_ball_radial, BallPoint, QuadSpec, SphereRule};
use bergman_core::trend::{classify, Trend, DEFAULT_RATIO_CEILING};
use bergman_core::weights::{
    is_dhat_moments, is_dhat_tail, moment_tail_ratio, radii_grid, MomentTable, RadialWeight, Verdict,
};
use bergman_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criteria that cannot hold as stated, with the reason printed on FAIL.
const KNOWN: &[(u32, &str)] = &[(
    3,
    "Standard α=5: ρ_x/ρ̂(1-1/x) tends to Γ(7)=720, so no window of width 10 holds over x up to 2^14",
)];

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Outcome);

fn q() -> QuadSpec {
    QuadSpec { tolerance: 1e-12, rel_tolerance: 1e-12, ..QuadSpec::default() }
}

fn table(w: &RadialWeight) -> Arc<MomentTable> {
    Arc::new(MomentTable::with_defaults(w.clone()))
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn core<T>(r: bergman_core::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn random_point(rng: &mut ChaCha8Rng, n: usize, max_r: f64) -> BallPoint {
    let v: Vec<Complex64> = (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt().max(1e-12);
    let scale = max_r * rng.gen_range(0.0..1.0) / norm;
    BallPoint::new(v.into_iter().map(|c| c * scale).collect()).unwrap()
}

fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

fn kernel_closed_form() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for alpha in [0.0, 1.0, 2.0] {
        for n in 1..=3usize {
            let k = core(KernelCoeffs::new(table(&RadialWeight::standard(alpha).unwrap()), n, 4096))?;
            let c0 = core(k.coeff(0))?;
            let mut pairs = 0;
            while pairs < 50 {
                let z = random_point(&mut rng, n, 1.0);
                let w = random_point(&mut rng, n, 1.0);
                let lambda = z.inner(&w);
                if lambda.norm() > 0.9 {
                    continue;
                }
                pairs += 1;
                let v = core(k.eval_kernel(&z, &w, Tolerance::relative(1e-13)))?.value;
                let exact = (Complex64::new(1.0, 0.0) - lambda).powf(-(n as f64 + 1.0 + alpha)) * c0;
                worst = worst.max((v - exact).norm() / exact.norm());
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(worst < 1e-8 && secs < 10.0, format!("max rel err {worst:.2e}, {secs:.2}s"))
}

fn multi_indices(n: usize, max_deg: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p: Vec<u32>| {
                let used: u32 = p.iter().sum();
                (0..=max_deg - used).map(move |a| {
                    let mut v = p.clone();
                    v.push(a);
                    v
                })
            })
            .collect();
    }
    out
}

fn reproducing_property() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let zs: Vec<BallPoint> = (0..10).map(|_| random_point(&mut rng, 2, 0.8)).collect();
    let alphas = multi_indices(2, 3);
    let mut worst = 0.0f64;
    for a in [0.0, 1.0] {
        let w = RadialWeight::standard(a).unwrap();
        let k = core(KernelCoeffs::new(table(&w), 2, 4096))?;
        for z in &zs {
            for alpha in &alphas {
                worst = worst.max(core(verify_star(&k, &w, alpha, z, &q()))?.abs_gap);
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        worst < 1e-6 && secs < 60.0,
        format!("{} multi-indices, max gap {worst:.2e}, {secs:.2}s", alphas.len()),
    )
}

fn dhat_coherence() -> Outcome {
    let family = [
        (RadialWeight::standard(0.0).unwrap(), Verdict::InClass),
        (RadialWeight::standard(1.0).unwrap(), Verdict::InClass),
        (RadialWeight::standard(2.0).unwrap(), Verdict::InClass),
        (RadialWeight::standard(5.0).unwrap(), Verdict::InClass),
        (RadialWeight::exponential(1.0, 1.0).unwrap(), Verdict::NotInClass),
        (RadialWeight::logarithmic(0.0).unwrap(), Verdict::InClass),
    ];
    let radii = radii_grid(24);
    let xs: Vec<f64> = (1..=14).map(|j| f64::from(1u32 << j)).collect();
    let mut ok = true;
    let mut parts = Vec::new();
    for (w, expected) in &family {
        let t = table(w);
        let tail = core(is_dhat_tail(w, &radii, DEFAULT_RATIO_CEILING, &q()))?.verdict;
        let moments = core(is_dhat_moments(&t, 1 << 14, DEFAULT_RATIO_CEILING))?.verdict;
        let ratios = xs.iter().map(|&x| core(moment_tail_ratio(&t, x))).collect::<Result<Vec<_>, _>>()?;
        let scale: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
        let mt = match classify(&scale, &ratios) {
            Trend::Bounded => Verdict::InClass,
            Trend::Divergent => Verdict::NotInClass,
            Trend::Unknown => Verdict::Inconclusive,
        };
        let agree = tail == *expected && moments == *expected && mt == *expected;
        let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = ratios.iter().cloned().fold(0.0, f64::max);
        let width = hi.max(1.0 / lo);
        let window_ok = *expected != Verdict::InClass || width <= 10.0;
        ok &= agree && window_ok;
        let mark = if agree && window_ok { "" } else { "!" };
        parts.push(format!("{mark}{} {} C={width:.3}", w.label(), tail.as_str()));
    }
    check(ok, parts.join("; "))
}

fn forward_theorem() -> Outcome {
    let w = RadialWeight::standard(0.0).unwrap();
    let rep = core(theorem_check(&w, 2, &TheoremConfig::default(), &Sequential))?;
    let m = &rep.functional_profile;
    if m.len() != 12 {
        return Err(format!("functional profile has {} points: {:?}", m.len(), rep.failures));
    }
    let pts: Vec<(f64, f64)> = m.iter().map(|&(r, v)| (-(1.0 - r).ln(), v.ln())).collect();
    let slope = least_squares_slope(&pts[pts.len() - 3..]);
    let envelope = m
        .iter()
        .zip(&rep.majorant_profile)
        .map(|(&(r, v), &(_, u))| v / ((1.0 - r * r) * u))
        .fold(0.0, f64::max);
    check(slope <= 0.05 && envelope <= 10.0, format!("last-quartile slope {slope:.4}, max M/((1-r²)U) {envelope:.3}"))
}

fn converse_theorem() -> Outcome {
    let t = table(&RadialWeight::exponential(1.0, 1.0).unwrap());
    let ns: Vec<usize> = (4..=12).map(|j| 1usize << j).collect();
    let ces = ns.iter().map(|&big_n| core(cesaro_lower(&t, 2, big_n))).collect::<Result<Vec<_>, _>>()?;
    let chain = core(moment_doubling_chain(&t, 2, &ns))?;
    let ces_up = ces.windows(2).all(|p| p[1] > p[0]);
    let growth = ces[ces.len() - 1] / ces[0];
    let chain_up = chain.windows(2).all(|p| p[1].1 > p[0].1);
    let chain_last = chain[chain.len() - 1].1;
    check(
        ces_up && growth >= 5.0 && chain_up && chain_last > 10.0,
        format!("cesaro last/first {growth:.3e}, chain last {chain_last:.3e}"),
    )
}

fn pr_window() -> Outcome {
    let mut worst = 0.0f64;
    for alpha in [0.0, 1.0] {
        let w = RadialWeight::standard(alpha).unwrap();
        let k = core(KernelCoeffs::new(table(&w), 2, 1 << 20))?;
        let ratios = [0.5, 0.7, 0.9, 0.99]
            .iter()
            .map(|&s| core(pr_estimate_check(&k, &w, s, &q())).map(|c| c.ratio))
            .collect::<Result<Vec<_>, _>>()?;
        let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = ratios.iter().cloned().fold(0.0, f64::max);
        if lo.is_nan() || lo <= 0.0 {
            return Err(format!("α={alpha}: nonpositive ratio {lo}"));
        }
        worst = worst.max(hi / lo);
    }
    check(worst <= 20.0, format!("max C/c {worst:.3}"))
}

fn hardy_littlewood() -> Outcome {
    let qq = QuadSpec::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut worst = 0.0f64;
    let mut parseval = 0.0f64;
    for _ in 0..100 {
        let f: Vec<Complex64> =
            (0..20).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let (lhs, norm) = core(hardy_littlewood_check(&f, 1.0, &qq))?;
        let (norm4, rhs) = core(hardy_littlewood_converse(&f, 4.0, &qq))?;
        worst = worst.max(lhs / norm).max(norm4 / rhs);
        let (norm2, _) = core(hardy_littlewood_converse(&f, 2.0, &qq))?;
        let exact: f64 = f.iter().map(|a| a.norm_sqr()).sum();
        parseval = parseval.max((norm2 - exact).abs());
    }
    check(worst <= 2.0 && parseval <= 1e-10, format!("max ratio {worst:.4}, Parseval gap {parseval:.2e}"))
}

fn quadrature_oracles() -> Outcome {
    let flat = RadialWeight::standard(0.0).unwrap();
    let mut worst = 0.0f64;
    for n in [2usize, 3] {
        let rule = SphereRule::new(n, 6).map_err(|e| e.to_string())?;
        let all = multi_indices(n, 6);
        for a in &all {
            for b in &all {
                let da: u32 = a.iter().sum();
                let db: u32 = b.iter().sum();
                if da + db > 6 {
                    continue;
                }
                let sphere: Complex64 = rule.integrate(|xi: &[Complex64]| {
                    xi.iter()
                        .zip(a.iter().zip(b))
                        .fold(Complex64::new(1.0, 0.0), |acc, (x, (&p, &s))| acc * x.powu(p) * x.conj().powu(s))
                });
                // ∫_S |ξ^α|² dσ = (n-1)! α! / (n-1+|α|)!
                let exact_sphere = if a == b {
                    factorial(n as u32 - 1) * a.iter().map(|&k| factorial(k)).product::<f64>() / factorial(n as u32 - 1 + da)
                } else {
                    0.0
                };
                worst = worst.max((sphere - exact_sphere).norm());
                if a == b {
                    let ball = core(integrate_ball_radial(n, &flat, |r: f64| Ok(r.powi(2 * da as i32) * sphere.re), &q()))?
                        .value;
                    let exact_ball =
                        factorial(n as u32) * a.iter().map(|&k| factorial(k)).product::<f64>() / factorial(n as u32 + da);
                    worst = worst.max((ball - exact_ball).abs());
                }
            }
        }
    }
    check(worst < 1e-8, format!("max abs err {worst:.2e}"))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let weight = dir.path().join("flat.toml");
    std::fs::write(&weight, "kind = \"standard\"\nalpha = 0.0\n").map_err(|e| e.to_string())?;
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_bergman-lab"))
            .args(["theorem", "--weight", weight.to_str().unwrap(), "--n", "2"])
            .output()
            .map_err(|e| e.to_string())
    };
    let a = run()?;
    let b = run()?;
    check(
        a.status.success() && a.stdout == b.stdout && !a.stdout.is_empty(),
        format!("{} bytes, exit {:?}", a.stdout.len(), a.status.code()),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        (1, "kernel closed form", kernel_closed_form),
        (2, "reproducing property", reproducing_property),
        (3, "doubling-class coherence", dhat_coherence),
        (4, "forward theorem", forward_theorem),
        (5, "converse theorem", converse_theorem),
        (6, "tail-integral display window", pr_window),
        (7, "Hardy-Littlewood", hardy_littlewood),
        (8, "quadrature oracles", quadrature_oracles),
        (9, "determinism", determinism),
    ];
    let mut unexpected = 0;
    for (id, name, f) in criteria {
        match f() {
            Ok(detail) => println!("criterion {id} PASS {name}: {detail}"),
            Err(detail) => match KNOWN.iter().find(|k| k.0 == id) {
                Some((_, why)) => println!("criterion {id} FAIL {name}: {detail} (known: {why})"),
                None => {
                    unexpected += 1;
                    println!("criterion {id} FAIL {name}: {detail}");
                }
            },
        }
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
