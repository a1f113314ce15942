//! Report documents and their JSON/CSV forms.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use bergman_core::analysis::{Growth, TheoremReport};
use bergman_core::trend::Trend;
use bergman_core::weights::{DiagnosticsReport, RadialWeight};
use serde::{Deserialize, Serialize};

use crate::error::{io, LabError, Result};
use crate::real::Real;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    /// `ok`, `inconclusive` or `error`.
    pub status: String,
    pub weight: Option<WeightInfo>,
    pub n: Option<usize>,
    pub settings: Settings,
    pub result: Payload,
    pub errors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightInfo {
    pub label: String,
    pub kind: String,
    pub parameters: BTreeMap<String, Real>,
}

impl WeightInfo {
    pub fn of(w: &RadialWeight) -> Self {
        use bergman_core::weights::WeightKind;
        let kind = match w.kind() {
            WeightKind::Standard { .. } => "standard",
            WeightKind::Exponential { .. } => "exponential",
            WeightKind::Logarithmic { .. } => "logarithmic",
            WeightKind::Tabulated(_) => "tabulated",
        };
        WeightInfo {
            label: w.label().to_string(),
            kind: kind.to_string(),
            parameters: w.parameters().into_iter().map(|(k, v)| (k.to_string(), Real(v))).collect(),
        }
    }
}

/// The knobs that influence the numbers (thread count does not).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub tol: Real,
    pub kmax: u32,
    pub dmax: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payload {
    Diagnose(DiagnoseResult),
    Kernel(KernelResult),
    Project(ProjectResult),
    Theorem(TheoremResult),
    HlCheck(HlResult),
    PrCheck(PrResult),
    /// The command failed before producing anything.
    Failed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub parameter: Real,
    pub value: Real,
}

fn points<X: Copy + Into<f64>>(v: &[(X, f64)]) -> Vec<Point> {
    v.iter().map(|&(x, y)| Point { parameter: Real(x.into()), value: Real(y) }).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvidencePoint {
    pub parameter: Real,
    pub ratio: Real,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub criterion_id: String,
    pub verdict: String,
    pub estimated_constant: Real,
    pub slope: Option<Real>,
    pub half_mass_ratio: Option<Real>,
    pub extrapolated: bool,
    pub evidence: Vec<EvidencePoint>,
}

impl From<&DiagnosticsReport> for Diagnostics {
    fn from(r: &DiagnosticsReport) -> Self {
        Diagnostics {
            criterion_id: r.criterion_id.clone(),
            verdict: r.verdict.as_str().to_string(),
            estimated_constant: Real(r.estimated_constant),
            slope: r.slope.map(Real),
            half_mass_ratio: r.half_mass_ratio.map(Real),
            extrapolated: r.extrapolated,
            evidence: r
                .evidence
                .iter()
                .map(|e| EvidencePoint { parameter: Real(e.parameter), ratio: Real(e.ratio), flagged: e.flagged })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentTail {
    pub lower: Real,
    pub upper: Real,
    /// `max(upper, 1/lower)`: the `C` of the window `[1/C, C]`.
    pub window: Real,
    pub points: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaOut {
    pub beta: Real,
    pub constant: Real,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnoseResult {
    pub dhat_tail: Option<Diagnostics>,
    pub dhat_moments: Option<Diagnostics>,
    pub regular: Option<Diagnostics>,
    pub moment_tail: Option<MomentTail>,
    pub beta_estimate: Option<BetaOut>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelRow {
    pub w_radius: Real,
    pub kernel_re: Real,
    pub kernel_im: Real,
    pub degree: usize,
    pub tail_bound: Real,
    pub rk_re: Real,
    pub rk_im: Real,
    pub norm_sq: Real,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelResult {
    pub z_radius: Real,
    pub c0: Real,
    pub rows: Vec<KernelRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectRow {
    pub radius: Real,
    pub value_re: Real,
    pub value_im: Real,
    pub bloch_density: Real,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectResult {
    pub symbol: String,
    pub sup_norm_bound: Real,
    pub max_bloch_density: Real,
    pub rows: Vec<ProjectRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthOut {
    pub trend: String,
    pub slope: Option<Real>,
}

impl From<&Growth> for GrowthOut {
    fn from(g: &Growth) -> Self {
        let trend = match g.trend {
            Trend::Bounded => "BOUNDED",
            Trend::Divergent => "DIVERGENT",
            Trend::Unknown => "UNKNOWN",
        };
        GrowthOut { trend: trend.to_string(), slope: g.slope.map(Real) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichOut {
    pub kappa_lower: Real,
    pub kappa_upper: Real,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremResult {
    pub conclusion: String,
    pub dhat_verdict: Diagnostics,
    pub dhat_components: Vec<Diagnostics>,
    pub functional_profile: Vec<Point>,
    pub majorant_profile: Vec<Point>,
    pub cesaro_profile: Vec<Point>,
    pub functional_growth: GrowthOut,
    pub cesaro_growth: GrowthOut,
    pub sandwich: Option<SandwichOut>,
    pub failures: Vec<String>,
}

impl From<&TheoremReport> for TheoremResult {
    fn from(r: &TheoremReport) -> Self {
        let ces: Vec<(f64, f64)> = r.cesaro_profile.iter().map(|&(n, v)| (n as f64, v)).collect();
        TheoremResult {
            conclusion: r.conclusion.as_str().to_string(),
            dhat_verdict: (&r.dhat_verdict).into(),
            dhat_components: r.dhat_components.iter().map(Diagnostics::from).collect(),
            functional_profile: points(&r.functional_profile),
            majorant_profile: points(&r.majorant_profile),
            cesaro_profile: points(&ces),
            functional_growth: (&r.functional_growth).into(),
            cesaro_growth: (&r.cesaro_growth).into(),
            sandwich: r.sandwich.map(|s| SandwichOut { kappa_lower: Real(s.kappa_lower), kappa_upper: Real(s.kappa_upper) }),
            failures: r.failures.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HlRow {
    pub trial: usize,
    pub p_lhs: Real,
    pub p_norm: Real,
    pub p_ratio: Real,
    pub q_norm: Real,
    pub q_rhs: Real,
    pub q_ratio: Real,
    pub parseval_gap: Real,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HlResult {
    pub trials: usize,
    pub terms: usize,
    pub p: Real,
    pub q: Real,
    pub constant: Real,
    pub all_pass: bool,
    pub max_parseval_gap: Real,
    pub rows: Vec<HlRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrRow {
    pub s: Real,
    pub lhs: Real,
    pub rhs: Real,
    pub ratio: Real,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrResult {
    pub lower: Real,
    pub upper: Real,
    /// `upper / lower`.
    pub spread: Real,
    pub rows: Vec<PrRow>,
}

/// One CSV table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

fn profile(name: &str, pts: &[Point]) -> Table {
    Table {
        name: name.to_string(),
        header: vec!["parameter", "value"],
        rows: pts.iter().map(|p| vec![p.parameter.to_string(), p.value.to_string()]).collect(),
    }
}

fn evidence(name: &str, d: &Diagnostics) -> Table {
    Table {
        name: name.to_string(),
        header: vec!["parameter", "value", "flagged"],
        rows: d.evidence.iter().map(|e| vec![e.parameter.to_string(), e.ratio.to_string(), e.flagged.to_string()]).collect(),
    }
}

fn opt(e: &Option<String>) -> String {
    e.clone().unwrap_or_default()
}

impl Payload {
    pub fn tables(&self) -> Vec<Table> {
        match self {
            Payload::Diagnose(d) => {
                let mut out = Vec::new();
                for (name, rep) in [("dhat_tail", &d.dhat_tail), ("dhat_moments", &d.dhat_moments), ("regular", &d.regular)] {
                    if let Some(rep) = rep {
                        out.push(evidence(name, rep));
                    }
                }
                if let Some(m) = &d.moment_tail {
                    out.push(profile("moment_tail", &m.points));
                }
                out
            }
            Payload::Kernel(k) => vec![Table {
                name: "kernel".into(),
                header: vec!["w_radius", "kernel_re", "kernel_im", "degree", "tail_bound", "rk_re", "rk_im", "norm_sq", "error"],
                rows: k
                    .rows
                    .iter()
                    .map(|r| {
                        vec![
                            r.w_radius.to_string(),
                            r.kernel_re.to_string(),
                            r.kernel_im.to_string(),
                            r.degree.to_string(),
                            r.tail_bound.to_string(),
                            r.rk_re.to_string(),
                            r.rk_im.to_string(),
                            r.norm_sq.to_string(),
                            opt(&r.error),
                        ]
                    })
                    .collect(),
            }],
            Payload::Project(p) => vec![Table {
                name: "project".into(),
                header: vec!["radius", "value_re", "value_im", "bloch_density"],
                rows: p
                    .rows
                    .iter()
                    .map(|r| vec![r.radius.to_string(), r.value_re.to_string(), r.value_im.to_string(), r.bloch_density.to_string()])
                    .collect(),
            }],
            Payload::Theorem(t) => vec![
                profile("functional", &t.functional_profile),
                profile("majorant", &t.majorant_profile),
                profile("cesaro", &t.cesaro_profile),
            ],
            Payload::HlCheck(h) => vec![Table {
                name: "hl".into(),
                header: vec!["trial", "p_lhs", "p_norm", "p_ratio", "q_norm", "q_rhs", "q_ratio", "parseval_gap", "pass"],
                rows: h
                    .rows
                    .iter()
                    .map(|r| {
                        vec![
                            r.trial.to_string(),
                            r.p_lhs.to_string(),
                            r.p_norm.to_string(),
                            r.p_ratio.to_string(),
                            r.q_norm.to_string(),
                            r.q_rhs.to_string(),
                            r.q_ratio.to_string(),
                            r.parseval_gap.to_string(),
                            r.pass.to_string(),
                        ]
                    })
                    .collect(),
            }],
            Payload::PrCheck(p) => vec![Table {
                name: "pr".into(),
                header: vec!["s", "lhs", "rhs", "ratio"],
                rows: p
                    .rows
                    .iter()
                    .map(|r| vec![r.s.to_string(), r.lhs.to_string(), r.rhs.to_string(), r.ratio.to_string()])
                    .collect(),
            }],
            Payload::Failed => Vec::new(),
        }
    }
}

impl Report {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Report> {
        Ok(serde_json::from_str(text)?)
    }
}

pub fn write_table<W: Write>(out: W, t: &Table) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(&t.header)?;
    for row in &t.rows {
        w.write_record(row)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// `<dir>/<stem>_<name>.csv` next to `out`.
pub fn table_path(out: &Path, name: &str) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "report".into());
    out.with_file_name(format!("{stem}_{name}.csv"))
}

/// Writes the tables of a report. A single table goes to `out` itself (or
/// stdout); several tables need `out` and go to one file each.
pub fn write_csv(tables: &[Table], out: Option<&Path>) -> Result<Vec<PathBuf>> {
    match (tables, out) {
        ([t], None) => {
            write_table(std::io::stdout().lock(), t)?;
            Ok(Vec::new())
        }
        ([t], Some(p)) => {
            let f = fs::File::create(p).map_err(io(p))?;
            write_table(f, t)?;
            Ok(vec![p.to_path_buf()])
        }
        (_, None) => Err(LabError::Usage("CSV output with several tables needs --out".into())),
        (ts, Some(p)) => {
            let mut written = Vec::new();
            for t in ts {
                let path = table_path(p, &t.name);
                let f = fs::File::create(&path).map_err(io(&path))?;
                write_table(f, t)?;
                written.push(path);
            }
            Ok(written)
        }
    }
}
