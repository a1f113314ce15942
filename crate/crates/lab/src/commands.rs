use std::sync::Arc;

use bergman_core::analysis::{
    hardy_littlewood_check, hardy_littlewood_converse, pr_estimate_check, theorem_check, Conclusion, Sweep,
    TheoremConfig,
};
use bergman_core::kernel::{KernelCoeffs, Tolerance};
use bergman_core::projection::{project, project_bloch_image, BoundedSymbol, SymbolKind};
use bergman_core::quadrature::{BallPoint, QuadSpec};
use bergman_core::trend::DEFAULT_RATIO_CEILING;
use bergman_core::weights::{
    dhat_beta_estimate, is_dhat_moments, is_dhat_tail, is_regular, moment_tail_ratio, radii_grid, MomentTable,
    RadialWeight, Verdict,
};
use bergman_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cli::{Command, Common};
use crate::descriptor::{load_symbol, load_weight};
use crate::error::{LabError, Result};
use crate::real::Real;
use crate::report::*;
use crate::sweep::Parallel;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;

const MOMENTS_N_MAX: u64 = 1 << 14;

/// A finished run: the report and the exit code it maps to.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Report,
    pub exit: i32,
}

fn usage(msg: impl Into<String>) -> LabError {
    LabError::Usage(msg.into())
}

struct Ctx {
    weight: Option<RadialWeight>,
    n: Option<usize>,
    quad: QuadSpec,
    kmax: u32,
    dmax: usize,
    seed: u64,
    sweep: Parallel,
}

impl Ctx {
    fn weight(&self, cmd: &str) -> Result<&RadialWeight> {
        self.weight.as_ref().ok_or_else(|| usage(format!("{cmd} needs --weight")))
    }

    fn n(&self, cmd: &str) -> Result<usize> {
        self.n.ok_or_else(|| usage(format!("{cmd} needs --n")))
    }

    fn table(&self, cmd: &str) -> Result<Arc<MomentTable>> {
        Ok(Arc::new(MomentTable::with_defaults(self.weight(cmd)?.clone())))
    }
}

fn defaults(cmd: &Command) -> (u32, usize) {
    match cmd {
        Command::Diagnose { .. } => (24, 0),
        Command::Kernel { .. } | Command::Project { .. } => (6, 4096),
        Command::Theorem { .. } => (12, 1 << 20),
        Command::HlCheck { .. } => (0, 0),
        Command::PrCheck { .. } => (0, 1 << 20),
    }
}

fn context(cmd: &Command) -> Result<Ctx> {
    let c: &Common = cmd.common();
    if !(c.tol > 0.0 && c.tol.is_finite()) {
        return Err(usage(format!("--tol must be positive, got {}", c.tol)));
    }
    if c.n == Some(0) {
        return Err(usage("--n must be at least 1"));
    }
    let (k_default, d_default) = defaults(cmd);
    let kmax = c.kmax.unwrap_or(k_default);
    if kmax > 24 {
        return Err(usage(format!("--kmax must be at most 24, got {kmax}")));
    }
    let weight = c.weight.as_deref().map(load_weight).transpose()?;
    Ok(Ctx {
        weight,
        n: c.n,
        quad: QuadSpec { tolerance: c.tol, rel_tolerance: c.tol, ..QuadSpec::default() },
        kmax,
        dmax: c.dmax.unwrap_or(d_default),
        seed: c.seed,
        sweep: Parallel::new(c.threads)?,
    })
}

/// Parses descriptors, runs the command and assembles the report.
/// Configuration problems come back as `Err`; numerical failures give a
/// report with status `error`.
pub fn run(cmd: &Command) -> Result<Outcome> {
    let ctx = context(cmd)?;
    let name = cmd.name();
    let mut errors = Vec::new();
    let (result, status) = match cmd {
        Command::Diagnose { .. } => diagnose(&ctx, &mut errors)?,
        Command::Kernel { z_radius, .. } => kernel(&ctx, *z_radius, &mut errors)?,
        Command::Project { symbol, .. } => {
            let sym = load_symbol(symbol)?;
            projection(&ctx, &sym, &mut errors)?
        }
        Command::Theorem { .. } => theorem(&ctx)?,
        Command::HlCheck { trials, terms, p, q, constant, .. } => hl(&ctx, *trials, *terms, *p, *q, *constant, &mut errors)?,
        Command::PrCheck { s, .. } => pr(&ctx, s, &mut errors)?,
    };
    let status = if errors.is_empty() { status } else { "error" };
    let exit = match status {
        "ok" => EXIT_OK,
        "error" => EXIT_ERROR,
        _ => EXIT_INCONCLUSIVE,
    };
    let report = Report {
        schema_version: SCHEMA_VERSION,
        command: name.to_string(),
        status: status.to_string(),
        weight: ctx.weight.as_ref().map(WeightInfo::of),
        n: ctx.n,
        settings: Settings { tol: Real(ctx.quad.tolerance), kmax: ctx.kmax, dmax: ctx.dmax, seed: ctx.seed },
        result,
        errors,
    };
    Ok(Outcome { report, exit })
}

fn keep<T>(errors: &mut Vec<String>, what: &str, r: bergman_core::Result<T>) -> Option<T> {
    r.map_err(|e| errors.push(format!("{what}: {e}"))).ok()
}

fn diagnose(ctx: &Ctx, errors: &mut Vec<String>) -> Result<(Payload, &'static str)> {
    let w = ctx.weight("diagnose")?;
    let t = ctx.table("diagnose")?;
    let radii = radii_grid(ctx.kmax);
    let q = &ctx.quad;
    let thr = DEFAULT_RATIO_CEILING;
    let tail = keep(errors, "dhat_tail", is_dhat_tail(w, &radii, thr, q));
    let moments = keep(errors, "dhat_moments", is_dhat_moments(&t, MOMENTS_N_MAX, thr));
    let regular = keep(errors, "regular", is_regular(w, &radii, thr, q));
    let xs: Vec<f64> = (1..=14).map(|j| (1u64 << j) as f64).collect();
    let ratios = ctx.sweep.map(xs.len(), &|i| moment_tail_ratio(&t, xs[i]));
    let mut pts = Vec::new();
    for (&x, r) in xs.iter().zip(ratios) {
        if let Some(v) = keep(errors, &format!("moment_tail_ratio({x})"), r) {
            pts.push((x, v));
        }
    }
    let moment_tail = (!pts.is_empty()).then(|| {
        let lower = pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
        let upper = pts.iter().map(|p| p.1).fold(0.0, f64::max);
        MomentTail {
            lower: Real(lower),
            upper: Real(upper),
            window: Real(upper.max(1.0 / lower)),
            points: pts.iter().map(|&(x, v)| Point { parameter: Real(x), value: Real(v) }).collect(),
        }
    });
    let betas: Vec<f64> = (1..=32).map(|i| 0.25 * i as f64).collect();
    let beta_estimate = keep(errors, "dhat_beta_estimate", dhat_beta_estimate(w, &radii, &betas, thr, q))
        .flatten()
        .map(|b| BetaOut { beta: Real(b.beta), constant: Real(b.constant) });
    let decided = match (&tail, &moments) {
        (Some(a), Some(b)) => a.verdict == b.verdict && a.verdict != Verdict::Inconclusive,
        _ => false,
    };
    let result = DiagnoseResult {
        dhat_tail: tail.as_ref().map(Diagnostics::from),
        dhat_moments: moments.as_ref().map(Diagnostics::from),
        regular: regular.as_ref().map(Diagnostics::from),
        moment_tail,
        beta_estimate,
    };
    Ok((Payload::Diagnose(result), if decided { "ok" } else { "inconclusive" }))
}

fn grid(kmax: u32) -> Vec<f64> {
    (0..=kmax).map(|k| 1.0 - (-(k as f64)).exp2()).collect()
}

fn kernel(ctx: &Ctx, z_radius: f64, errors: &mut Vec<String>) -> Result<(Payload, &'static str)> {
    let n = ctx.n("kernel")?;
    let k = KernelCoeffs::new(ctx.table("kernel")?, n, ctx.dmax)?;
    let z = BallPoint::on_axis(n, z_radius)?;
    let c0 = k.coeff(0)?;
    let tol = Tolerance { abs: ctx.quad.tolerance, rel: ctx.quad.rel_tolerance };
    let radii = grid(ctx.kmax);
    let rows = ctx.sweep.map(radii.len(), &|i| -> bergman_core::Result<KernelRow> {
        let w = BallPoint::on_axis(n, radii[i])?;
        let kv = k.eval_kernel(&z, &w, tol)?;
        let rk = k.eval_rk(&z, &w, tol)?;
        let norm = k.kernel_norm_sq(&w, tol)?;
        Ok(KernelRow {
            w_radius: Real(radii[i]),
            kernel_re: Real(kv.value.re),
            kernel_im: Real(kv.value.im),
            degree: kv.degree,
            tail_bound: Real(kv.tail_bound),
            rk_re: Real(rk.value.re),
            rk_im: Real(rk.value.im),
            norm_sq: Real(norm),
            error: None,
        })
    });
    let nan = Real(f64::NAN);
    let rows = rows
        .into_iter()
        .zip(&radii)
        .map(|(r, &rad)| {
            r.unwrap_or_else(|e| {
                errors.push(format!("w radius {rad}: {e}"));
                KernelRow {
                    w_radius: Real(rad),
                    kernel_re: nan,
                    kernel_im: nan,
                    degree: 0,
                    tail_bound: nan,
                    rk_re: nan,
                    rk_im: nan,
                    norm_sq: nan,
                    error: Some(e.to_string()),
                }
            })
        })
        .collect();
    Ok((Payload::Kernel(KernelResult { z_radius: Real(z_radius), c0: Real(c0), rows }), "ok"))
}

fn describe(sym: &BoundedSymbol) -> String {
    match sym.kind() {
        SymbolKind::Monomial(a) => format!("monomial{a:?}"),
        SymbolKind::ConjMonomial(a) => format!("conj_monomial{a:?}"),
        SymbolKind::RadialIndicator { r_lo, r_hi } => format!("radial_indicator[{r_lo}, {r_hi})"),
        SymbolKind::UnimodularPhase { alpha, beta } => format!("unimodular_phase{alpha:?}{beta:?}"),
        SymbolKind::Custom(c) => format!("custom({}x{} grid)", c.r_grid().len(), c.s_grid().len()),
    }
}

fn projection(ctx: &Ctx, sym: &BoundedSymbol, errors: &mut Vec<String>) -> Result<(Payload, &'static str)> {
    let n = ctx.n("project")?;
    if let Some(d) = sym.dim() {
        if d != n {
            return Err(usage(format!("symbol has dimension {d} but --n is {n}")));
        }
    }
    let w = ctx.weight("project")?;
    let k = KernelCoeffs::new(ctx.table("project")?, n, ctx.dmax)?;
    let radii = grid(ctx.kmax);
    let q = &ctx.quad;
    let values = ctx.sweep.map(radii.len(), &|i| project(&k, w, sym, &BallPoint::on_axis(n, radii[i])?, q));
    let bloch = keep(errors, "bloch image", project_bloch_image(&k, w, sym, &radii, q)).unwrap_or_default();
    let mut rows = Vec::with_capacity(radii.len());
    for (i, v) in values.into_iter().enumerate() {
        let v = keep(errors, &format!("P(phi) at radius {}", radii[i]), v).unwrap_or(Complex64::new(f64::NAN, f64::NAN));
        let density = bloch.get(i).map_or(f64::NAN, |b| b.1);
        rows.push(ProjectRow { radius: Real(radii[i]), value_re: Real(v.re), value_im: Real(v.im), bloch_density: Real(density) });
    }
    let max = bloch.iter().map(|b| b.1).fold(f64::NEG_INFINITY, f64::max);
    let result = ProjectResult {
        symbol: describe(sym),
        sup_norm_bound: Real(sym.sup_norm_bound()),
        max_bloch_density: Real(max),
        rows,
    };
    Ok((Payload::Project(result), "ok"))
}

fn theorem(ctx: &Ctx) -> Result<(Payload, &'static str)> {
    let w = ctx.weight("theorem")?;
    let n = ctx.n("theorem")?;
    let config = TheoremConfig { k_max: ctx.kmax, d_max: ctx.dmax, quad: ctx.quad, ..TheoremConfig::default() };
    let rep = theorem_check(w, n, &config, &ctx.sweep)?;
    let status = match rep.conclusion {
        Conclusion::ConsistentBounded | Conclusion::ConsistentUnbounded => "ok",
        Conclusion::Inconclusive => "inconclusive",
        Conclusion::Inconsistent => "inconsistent",
    };
    Ok((Payload::Theorem((&rep).into()), status))
}

fn hl(
    ctx: &Ctx,
    trials: usize,
    terms: usize,
    p: f64,
    q_exp: f64,
    constant: f64,
    errors: &mut Vec<String>,
) -> Result<(Payload, &'static str)> {
    if terms == 0 {
        return Err(usage("--terms must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let polys: Vec<Vec<Complex64>> = (0..trials)
        .map(|_| (0..terms).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect())
        .collect();
    let q = &ctx.quad;
    let rows = ctx.sweep.map(trials, &|i| -> bergman_core::Result<HlRow> {
        let f = &polys[i];
        let (lhs, norm) = hardy_littlewood_check(f, p, q)?;
        let (norm_q, rhs_q) = hardy_littlewood_converse(f, q_exp, q)?;
        let (norm_2, rhs_2) = hardy_littlewood_converse(f, 2.0, q)?;
        Ok(HlRow {
            trial: i,
            p_lhs: Real(lhs),
            p_norm: Real(norm),
            p_ratio: Real(lhs / norm),
            q_norm: Real(norm_q),
            q_rhs: Real(rhs_q),
            q_ratio: Real(norm_q / rhs_q),
            parseval_gap: Real((norm_2 - rhs_2).abs()),
            pass: lhs <= constant * norm && norm_q <= constant * rhs_q,
        })
    });
    let mut out = Vec::with_capacity(trials);
    for (i, r) in rows.into_iter().enumerate() {
        if let Some(row) = keep(errors, &format!("trial {i}"), r) {
            out.push(row);
        }
    }
    let all_pass = out.len() == trials && out.iter().all(|r| r.pass);
    let gap = out.iter().map(|r| r.parseval_gap.get()).fold(0.0, f64::max);
    let result = HlResult {
        trials,
        terms,
        p: Real(p),
        q: Real(q_exp),
        constant: Real(constant),
        all_pass,
        max_parseval_gap: Real(gap),
        rows: out,
    };
    Ok((Payload::HlCheck(result), if all_pass { "ok" } else { "fail" }))
}

fn pr(ctx: &Ctx, s: &[f64], errors: &mut Vec<String>) -> Result<(Payload, &'static str)> {
    let w = ctx.weight("pr-check")?;
    let n = ctx.n("pr-check")?;
    if n < 2 {
        return Err(usage("pr-check needs --n of at least 2"));
    }
    let k = KernelCoeffs::new(ctx.table("pr-check")?, n, ctx.dmax)?;
    let q = &ctx.quad;
    let checks = ctx.sweep.map(s.len(), &|i| pr_estimate_check(&k, w, s[i], q));
    let mut rows = Vec::new();
    for (&si, c) in s.iter().zip(checks) {
        if let Some(c) = keep(errors, &format!("s = {si}"), c) {
            rows.push(PrRow { s: Real(c.s), lhs: Real(c.lhs), rhs: Real(c.rhs), ratio: Real(c.ratio) });
        }
    }
    let lower = rows.iter().map(|r| r.ratio.get()).fold(f64::INFINITY, f64::min);
    let upper = rows.iter().map(|r| r.ratio.get()).fold(0.0, f64::max);
    let result = PrResult { lower: Real(lower), upper: Real(upper), spread: Real(upper / lower), rows };
    Ok((Payload::PrCheck(result), "ok"))
}
