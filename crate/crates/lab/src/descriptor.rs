//! Weight and symbol descriptor files.
//!
//! Both are TOML documents with a `kind` field plus the parameters of that
//! kind. Sampled data (tabulated weights, custom symbols) lives in a CSV file
//! named by `samples`, resolved relative to the descriptor.
//!
//! ```toml
//! kind = "exponential"
//! label = "exp(-1/(1-r))"
//! c = 1.0
//! beta = 1.0
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::ops::Range;
use std::path::{Path, PathBuf};

use bergman_core::projection::{BoundedSymbol, CustomSymbol};
use bergman_core::weights::RadialWeight;
use bergman_core::Complex64;
use serde::Deserialize;
use toml::Spanned;

use crate::error::{io, LabError, Result};

fn line_of(text: &str, offset: usize) -> usize {
    text.as_bytes()[..offset.min(text.len())].iter().filter(|&&b| b == b'\n').count() + 1
}

struct Doc<'a> {
    path: &'a Path,
    text: &'a str,
}

impl Doc<'_> {
    fn field(&self, field: &str, span: Range<usize>, message: impl Into<String>) -> LabError {
        LabError::Field {
            path: self.path.to_path_buf(),
            line: line_of(self.text, span.start),
            field: field.to_string(),
            message: message.into(),
        }
    }

    fn syntax(&self, err: toml::de::Error) -> LabError {
        let message = err.message().trim().to_string();
        let Some(span) = err.span() else {
            return LabError::Syntax { path: self.path.to_path_buf(), message };
        };
        let line = line_of(self.text, span.start);
        // name the key on the offending line when there is one
        let key = self
            .text
            .lines()
            .nth(line - 1)
            .and_then(|l| l.split_once('='))
            .map(|(k, _)| k.trim().trim_matches('"').to_string())
            .filter(|k| !k.is_empty() && !k.starts_with('#'));
        match key {
            Some(field) => LabError::Field { path: self.path.to_path_buf(), line, field, message },
            None => LabError::Syntax { path: self.path.to_path_buf(), message: format!("line {line}: {message}") },
        }
    }

    fn parse<T: for<'de> Deserialize<'de>>(&self) -> Result<T> {
        toml::from_str(self.text).map_err(|e| self.syntax(e))
    }

    fn require<T: Clone>(&self, kind: &Spanned<String>, name: &str, v: &Option<Spanned<T>>) -> Result<Spanned<T>> {
        v.clone()
            .ok_or_else(|| self.field(name, kind.span(), format!("required for kind `{}`", kind.get_ref())))
    }

    fn core(&self, field: &'static str, span: Range<usize>) -> impl FnOnce(bergman_core::Error) -> LabError + '_ {
        move |e| self.field(field, span, e.to_string())
    }

    fn resolve(&self, rel: &str) -> PathBuf {
        match self.path.parent() {
            Some(dir) => dir.join(rel),
            None => PathBuf::from(rel),
        }
    }
}

fn reject_extra(doc: &Doc, kind: &Spanned<String>, present: &[(&str, Option<Range<usize>>)]) -> Result<()> {
    for (name, span) in present {
        if let Some(span) = span {
            return Err(doc.field(name, span.clone(), format!("does not apply to kind `{}`", kind.get_ref())));
        }
    }
    Ok(())
}

fn span_of<T>(v: &Option<Spanned<T>>) -> Option<Range<usize>> {
    v.as_ref().map(|s| s.span())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWeight {
    kind: Spanned<String>,
    label: Option<String>,
    alpha: Option<Spanned<f64>>,
    c: Option<Spanned<f64>>,
    beta: Option<Spanned<f64>>,
    gamma: Option<Spanned<f64>>,
    samples: Option<Spanned<String>>,
}

pub fn load_weight(path: &Path) -> Result<RadialWeight> {
    let text = fs::read_to_string(path).map_err(io(path))?;
    parse_weight(&text, path)
}

/// Parses a weight descriptor; `path` is used for error messages and to
/// resolve the samples file.
pub fn parse_weight(text: &str, path: &Path) -> Result<RadialWeight> {
    let doc = Doc { path, text };
    let raw: RawWeight = doc.parse()?;
    let kind = &raw.kind;
    let positive = |name: &str, v: &Spanned<f64>, lo: f64, what: &str| -> Result<f64> {
        let x = *v.get_ref();
        if x.is_finite() && x > lo {
            Ok(x)
        } else {
            Err(doc.field(name, v.span(), format!("must be {what}, got {x}")))
        }
    };
    let w = match kind.get_ref().as_str() {
        "standard" => {
            reject_extra(&doc, kind, &[("c", span_of(&raw.c)), ("beta", span_of(&raw.beta)), ("gamma", span_of(&raw.gamma)), ("samples", span_of(&raw.samples))])?;
            let a = doc.require(kind, "alpha", &raw.alpha)?;
            RadialWeight::standard(positive("alpha", &a, -1.0, "greater than -1")?).map_err(doc.core("alpha", a.span()))
        }
        "exponential" => {
            reject_extra(&doc, kind, &[("alpha", span_of(&raw.alpha)), ("gamma", span_of(&raw.gamma)), ("samples", span_of(&raw.samples))])?;
            let c = doc.require(kind, "c", &raw.c)?;
            let b = doc.require(kind, "beta", &raw.beta)?;
            RadialWeight::exponential(positive("c", &c, 0.0, "positive")?, positive("beta", &b, 0.0, "positive")?)
                .map_err(doc.core("c", c.span()))
        }
        "logarithmic" => {
            reject_extra(&doc, kind, &[("alpha", span_of(&raw.alpha)), ("c", span_of(&raw.c)), ("beta", span_of(&raw.beta)), ("samples", span_of(&raw.samples))])?;
            let g = doc.require(kind, "gamma", &raw.gamma)?;
            RadialWeight::logarithmic(positive("gamma", &g, -1.0, "greater than -1")?).map_err(doc.core("gamma", g.span()))
        }
        "tabulated" => {
            reject_extra(&doc, kind, &[("alpha", span_of(&raw.alpha)), ("c", span_of(&raw.c)), ("beta", span_of(&raw.beta)), ("gamma", span_of(&raw.gamma))])?;
            let s = doc.require(kind, "samples", &raw.samples)?;
            let file = doc.resolve(s.get_ref());
            let samples = read_weight_samples(&file)?;
            RadialWeight::tabulated(&samples).map_err(doc.core("samples", s.span()))
        }
        other => {
            return Err(doc.field(
                "kind",
                kind.span(),
                format!("unknown kind `{other}` (expected standard, exponential, logarithmic or tabulated)"),
            ))
        }
    }?;
    Ok(match raw.label {
        Some(l) => w.with_label(l),
        None => w,
    })
}

fn csv_reader(path: &Path) -> Result<csv::Reader<fs::File>> {
    let file = fs::File::open(path).map_err(io(path))?;
    Ok(csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).comment(Some(b'#')).from_reader(file))
}

/// Numeric rows of a CSV file with exactly `width` columns. A first row that
/// does not parse as numbers is taken as a header.
fn numeric_rows(path: &Path, width: usize) -> Result<Vec<(u64, Vec<f64>)>> {
    let mut rows = Vec::new();
    for (i, rec) in csv_reader(path)?.records().enumerate() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        match parsed {
            Err(_) if i == 0 => continue,
            Err(e) => {
                return Err(LabError::Samples { path: path.to_path_buf(), line, message: e.to_string() });
            }
            Ok(v) if v.len() != width => {
                return Err(LabError::Samples {
                    path: path.to_path_buf(),
                    line,
                    message: format!("expected {width} columns, found {}", v.len()),
                });
            }
            Ok(v) => rows.push((line, v)),
        }
    }
    Ok(rows)
}

/// Two-column `(r, value)` samples, `r` strictly increasing in `[0, 1)`.
pub fn read_weight_samples(path: &Path) -> Result<Vec<(f64, f64)>> {
    let rows = numeric_rows(path, 2)?;
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(rows.len());
    for (line, v) in rows {
        let (r, value) = (v[0], v[1]);
        let bad = |message: String| LabError::Samples { path: path.to_path_buf(), line, message };
        if !(0.0..1.0).contains(&r) {
            return Err(bad(format!("r = {r} outside [0, 1)")));
        }
        if !(value > 0.0 && value.is_finite()) {
            return Err(bad(format!("value {value} is not positive")));
        }
        if let Some(&(prev, _)) = out.last() {
            if r <= prev {
                return Err(bad(format!("r = {r} does not increase past {prev}")));
            }
        }
        out.push((r, value));
    }
    if out.is_empty() {
        return Err(LabError::Samples { path: path.to_path_buf(), line: 0, message: "no samples".into() });
    }
    Ok(out)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSymbol {
    kind: Spanned<String>,
    alpha: Option<Spanned<Vec<u32>>>,
    beta: Option<Spanned<Vec<u32>>>,
    r_lo: Option<Spanned<f64>>,
    r_hi: Option<Spanned<f64>>,
    samples: Option<Spanned<String>>,
    n_theta: Option<Spanned<usize>>,
}

pub fn load_symbol(path: &Path) -> Result<BoundedSymbol> {
    let text = fs::read_to_string(path).map_err(io(path))?;
    parse_symbol(&text, path)
}

/// Parses a symbol descriptor. Kinds: `monomial` and `conj_monomial`
/// (`alpha`), `unimodular_phase` (`alpha`, `beta`), `radial_indicator`
/// (`r_lo`, `r_hi`) and `custom` (`samples`, `n_theta`).
pub fn parse_symbol(text: &str, path: &Path) -> Result<BoundedSymbol> {
    let doc = Doc { path, text };
    let raw: RawSymbol = doc.parse()?;
    let kind = &raw.kind;
    match kind.get_ref().as_str() {
        k @ ("monomial" | "conj_monomial") => {
            reject_extra(&doc, kind, &[("beta", span_of(&raw.beta)), ("r_lo", span_of(&raw.r_lo)), ("r_hi", span_of(&raw.r_hi)), ("samples", span_of(&raw.samples)), ("n_theta", span_of(&raw.n_theta))])?;
            let a = doc.require(kind, "alpha", &raw.alpha)?;
            let span = a.span();
            let alpha = a.into_inner();
            if k == "monomial" {
                BoundedSymbol::monomial(alpha).map_err(doc.core("alpha", span))
            } else {
                BoundedSymbol::conj_monomial(alpha).map_err(doc.core("alpha", span))
            }
        }
        "unimodular_phase" => {
            reject_extra(&doc, kind, &[("r_lo", span_of(&raw.r_lo)), ("r_hi", span_of(&raw.r_hi)), ("samples", span_of(&raw.samples)), ("n_theta", span_of(&raw.n_theta))])?;
            let a = doc.require(kind, "alpha", &raw.alpha)?;
            let b = doc.require(kind, "beta", &raw.beta)?;
            let span = b.span();
            BoundedSymbol::unimodular_phase(a.into_inner(), b.into_inner()).map_err(doc.core("beta", span))
        }
        "radial_indicator" => {
            reject_extra(&doc, kind, &[("alpha", span_of(&raw.alpha)), ("beta", span_of(&raw.beta)), ("samples", span_of(&raw.samples)), ("n_theta", span_of(&raw.n_theta))])?;
            let lo = doc.require(kind, "r_lo", &raw.r_lo)?;
            let hi = doc.require(kind, "r_hi", &raw.r_hi)?;
            BoundedSymbol::radial_indicator(*lo.get_ref(), *hi.get_ref()).map_err(doc.core("r_hi", hi.span()))
        }
        "custom" => {
            reject_extra(&doc, kind, &[("alpha", span_of(&raw.alpha)), ("beta", span_of(&raw.beta)), ("r_lo", span_of(&raw.r_lo)), ("r_hi", span_of(&raw.r_hi))])?;
            let s = doc.require(kind, "samples", &raw.samples)?;
            let nt = doc.require(kind, "n_theta", &raw.n_theta)?;
            let file = doc.resolve(s.get_ref());
            let sym = read_custom_samples(&file, *nt.get_ref())?;
            Ok(BoundedSymbol::custom(sym))
        }
        other => Err(doc.field(
            "kind",
            kind.span(),
            format!(
                "unknown kind `{other}` (expected monomial, conj_monomial, unimodular_phase, radial_indicator or custom)"
            ),
        )),
    }
}

fn key(x: f64) -> u64 {
    x.to_bits()
}

/// Rows `(r, s, theta_index, re, im)` on a full product grid; `r` and `s`
/// grids are the sorted distinct values found in the file.
pub fn read_custom_samples(path: &Path, n_theta: usize) -> Result<CustomSymbol> {
    let rows = numeric_rows(path, 5)?;
    let bad = |line: u64, message: String| LabError::Samples { path: path.to_path_buf(), line, message };
    let mut r_set: Vec<f64> = Vec::new();
    let mut s_set: Vec<f64> = Vec::new();
    for (_, v) in &rows {
        r_set.push(v[0]);
        s_set.push(v[1]);
    }
    for set in [&mut r_set, &mut s_set] {
        set.sort_by(f64::total_cmp);
        set.dedup();
    }
    let r_index: BTreeMap<u64, usize> = r_set.iter().enumerate().map(|(i, &x)| (key(x), i)).collect();
    let s_index: BTreeMap<u64, usize> = s_set.iter().enumerate().map(|(i, &x)| (key(x), i)).collect();
    let mut values = vec![vec![vec![None; n_theta]; s_set.len()]; r_set.len()];
    for (line, v) in &rows {
        let k = v[2];
        if !(k >= 0.0 && k.fract() == 0.0 && (k as usize) < n_theta) {
            return Err(bad(*line, format!("theta index {k} outside 0..{n_theta}")));
        }
        let slot = &mut values[r_index[&key(v[0])]][s_index[&key(v[1])]][k as usize];
        if slot.is_some() {
            return Err(bad(*line, format!("duplicate sample at r = {}, s = {}, theta index {k}", v[0], v[1])));
        }
        *slot = Some(Complex64::new(v[3], v[4]));
    }
    let mut full = Vec::with_capacity(values.len());
    for (i, plane) in values.into_iter().enumerate() {
        let mut rows_s = Vec::with_capacity(plane.len());
        for (j, ring) in plane.into_iter().enumerate() {
            let ring: Option<Vec<Complex64>> = ring.into_iter().collect();
            let Some(ring) = ring else {
                return Err(bad(0, format!("grid incomplete at r = {}, s = {}", r_set[i], s_set[j])));
            };
            rows_s.push(ring);
        }
        full.push(rows_s);
    }
    CustomSymbol::from_samples(r_set, s_set, n_theta, &full)
        .map_err(|e| LabError::Samples { path: path.to_path_buf(), line: 0, message: e.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn weight(text: &str) -> Result<RadialWeight> {
        parse_weight(text, Path::new("w.toml"))
    }

    #[test]
    fn parses_each_kind() {
        let w = weight("kind = \"standard\"\nalpha = 1\n").unwrap();
        assert!((w.eval(0.5).unwrap() - 0.75).abs() < 1e-15);
        let w = weight("kind = \"exponential\"\nc = 1.0\nbeta = 1.0\nlabel = \"e\"\n").unwrap();
        assert_eq!(w.label(), "e");
        assert!((w.eval(0.5).unwrap() - (-2f64).exp()).abs() < 1e-15);
        assert!(weight("kind = \"logarithmic\"\ngamma = 0.0\n").is_ok());
    }

    #[test]
    fn errors_name_field_and_line() {
        let e = weight("kind = \"standard\"\n\nalpha = -2\n").unwrap_err().to_string();
        assert!(e.contains("line 3") && e.contains("`alpha`"), "{e}");
        let e = weight("kind = \"standard\"\nalpha = \"x\"\n").unwrap_err().to_string();
        assert!(e.contains("line 2") && e.contains("`alpha`"), "{e}");
        let e = weight("kind = \"gaussian\"\n").unwrap_err().to_string();
        assert!(e.contains("line 1") && e.contains("`kind`"), "{e}");
        let e = weight("kind = \"exponential\"\nc = 1.0\n").unwrap_err().to_string();
        assert!(e.contains("`beta`") && e.contains("required"), "{e}");
        let e = weight("kind = \"standard\"\nalpha = 0\ngamma = 1\n").unwrap_err().to_string();
        assert!(e.contains("line 3") && e.contains("`gamma`"), "{e}");
        let e = weight("kind = \"standard\"\nalpha = 0\nalpah = 1\n").unwrap_err().to_string();
        assert!(e.contains("line 3") && e.contains("alpah"), "{e}");
    }

    #[test]
    fn symbols() {
        let p = Path::new("s.toml");
        let s = parse_symbol("kind = \"monomial\"\nalpha = [1, 0]\n", p).unwrap();
        assert_eq!(s.dim(), Some(2));
        assert!(parse_symbol("kind = \"radial_indicator\"\nr_lo = 0.2\nr_hi = 0.5\n", p).is_ok());
        let e = parse_symbol("kind = \"radial_indicator\"\nr_lo = 0.6\nr_hi = 0.5\n", p).unwrap_err().to_string();
        assert!(e.contains("line 3") && e.contains("`r_hi`"), "{e}");
        let e = parse_symbol("kind = \"unimodular_phase\"\nalpha = [1, 0]\nbeta = [1]\n", p).unwrap_err().to_string();
        assert!(e.contains("`beta`"), "{e}");
    }
}
