use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use bergman_lab::report::{Payload, Report, SCHEMA_VERSION};
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bergman-lab"))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn report(out: &Output) -> Report {
    Report::from_json(std::str::from_utf8(&out.stdout).unwrap()).expect("report re-parses")
}

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "flat.toml", "kind = \"standard\"\nalpha = 0.0\n");
        write(dir.path(), "exp.toml", "kind = \"exponential\"\nc = 1.0\nbeta = 1.0\n");
        Fixture { dir }
    }

    fn path(&self, name: &str) -> String {
        self.dir.path().join(name).to_str().unwrap().to_string()
    }
}

#[test]
fn theorem_on_flat_ball() {
    let f = Fixture::new();
    let out = run(&["theorem", "--weight", &f.path("flat.toml"), "--n", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rep = report(&out);
    assert_eq!(rep.schema_version, SCHEMA_VERSION);
    assert_eq!(rep.status, "ok");
    let Payload::Theorem(t) = &rep.result else { panic!("wrong payload") };
    assert_eq!(t.conclusion, "CONSISTENT_BOUNDED");
    assert_eq!(t.functional_profile.len(), 12);
}

#[test]
fn diagnose_rejects_exponential() {
    let f = Fixture::new();
    let out = run(&["diagnose", "--weight", &f.path("exp.toml"), "--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let rep = report(&out);
    let Payload::Diagnose(d) = &rep.result else { panic!("wrong payload") };
    assert_eq!(d.dhat_tail.as_ref().unwrap().verdict, "NOT_IN_CLASS");
    assert_eq!(d.dhat_moments.as_ref().unwrap().verdict, "NOT_IN_CLASS");
}

#[test]
fn diagnose_accepts_flat() {
    let f = Fixture::new();
    let out = run(&["diagnose", "--weight", &f.path("flat.toml"), "--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let Payload::Diagnose(d) = report(&out).result else { panic!("wrong payload") };
    assert_eq!(d.dhat_tail.unwrap().verdict, "IN_CLASS");
    let mt = d.moment_tail.unwrap();
    // ρ_x / ρ̂(1 - 1/x) = x / (x + 1) for the flat weight
    assert!((mt.lower.0 - 2.0 / 3.0).abs() < 1e-9 && mt.upper.0 < 1.0);
}

#[test]
fn kernel_origin_row_is_c0() {
    let f = Fixture::new();
    let out = run(&["kernel", "--weight", &f.path("flat.toml"), "--n", "2", "--kmax", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let Payload::Kernel(k) = report(&out).result else { panic!("wrong payload") };
    assert_eq!(k.rows.len(), 5);
    assert_eq!(k.rows[0].w_radius.0, 0.0);
    assert_eq!(k.rows[0].kernel_re.0, k.c0.0);
    for row in &k.rows {
        let exact = (1.0 - 0.5 * row.w_radius.0).powi(-3);
        assert!((row.kernel_re.0 - exact).abs() < 1e-9 * exact);
    }
}

#[test]
fn reruns_are_byte_identical() {
    let f = Fixture::new();
    let args = ["kernel", "--weight", &f.path("exp.toml"), "--n", "3", "--kmax", "5"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    let threaded = run(&[&args[..], &["--threads", "3"]].concat());
    assert_eq!(a.stdout, threaded.stdout);
    let hl = ["hl-check", "--seed", "7", "--trials", "5"];
    assert_eq!(run(&hl).stdout, run(&hl).stdout);
}

#[test]
fn json_round_trips() {
    let f = Fixture::new();
    let out = run(&["pr-check", "--weight", &f.path("flat.toml"), "--n", "2", "--s", "0.5,0.9"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let rep = Report::from_json(&text).unwrap();
    assert_eq!(rep.to_json().unwrap(), text);
    let Payload::PrCheck(p) = rep.result else { panic!("wrong payload") };
    assert_eq!(p.rows.len(), 2);
    assert!((p.rows[1].rhs.0 - 49.5).abs() < 1e-8);
}

#[test]
fn csv_has_header_and_lf() {
    let f = Fixture::new();
    let out = run(&["kernel", "--weight", &f.path("flat.toml"), "--n", "1", "--kmax", "2", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(!text.contains('\r'));
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("w_radius,kernel_re"));
    assert_eq!(lines.len(), 4);
}

#[test]
fn csv_tables_go_to_separate_files() {
    let f = Fixture::new();
    let out_path = f.path("diag.csv");
    let args = ["diagnose", "--weight", &f.path("flat.toml"), "--n", "2", "--format", "csv"];
    let refused = run(&args);
    assert_eq!(refused.status.code(), Some(1));
    let out = run(&[&args[..], &["--out", &out_path]].concat());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let tail = fs::read_to_string(f.path("diag_dhat_tail.csv")).unwrap();
    assert!(tail.starts_with("parameter,value,flagged\n"));
    assert!(fs::metadata(f.path("diag_moment_tail.csv")).is_ok());
}

#[test]
fn malformed_descriptor_names_field_and_line() {
    let f = Fixture::new();
    let bad = write(f.dir.path(), "bad.toml", "kind = \"standard\"\n# comment\nalpha = -3.0\n");
    let out = run(&["diagnose", "--weight", bad.to_str().unwrap(), "--n", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 3") && err.contains("alpha"), "{err}");

    let typo = write(f.dir.path(), "typo.toml", "kind = \"exponential\"\nc = 1.0\nbetta = 1.0\n");
    let err = String::from_utf8(run(&["diagnose", "--weight", typo.to_str().unwrap()]).stderr).unwrap();
    assert!(err.contains("line 3") && err.contains("betta"), "{err}");
}

#[test]
fn tabulated_weight_from_csv() {
    let f = Fixture::new();
    let mut csv = String::from("r,rho\n");
    for i in 0..200 {
        let r = i as f64 / 200.0;
        csv.push_str(&format!("{r},1.0\n"));
    }
    write(f.dir.path(), "flat.csv", &csv);
    write(f.dir.path(), "tab.toml", "kind = \"tabulated\"\nsamples = \"flat.csv\"\n");
    let out = run(&["kernel", "--weight", &f.path("tab.toml"), "--n", "1", "--kmax", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let Payload::Kernel(k) = report(&out).result else { panic!("wrong payload") };
    assert_eq!(report_weight_kind(&f.path("tab.toml")), "tabulated");
    assert!((k.rows[1].kernel_re.0 - (1.0f64 - 0.25).powi(-2)).abs() < 1e-3);
}

fn report_weight_kind(path: &str) -> String {
    let out = run(&["kernel", "--weight", path, "--n", "1", "--kmax", "0"]);
    report(&out).weight.unwrap().kind
}

#[test]
fn project_monomial_is_fixed() {
    let f = Fixture::new();
    write(f.dir.path(), "mono.toml", "kind = \"monomial\"\nalpha = [1, 0]\n");
    let out = run(&["project", "--weight", &f.path("flat.toml"), "--n", "2", "--symbol", &f.path("mono.toml"), "--kmax", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let Payload::Project(p) = report(&out).result else { panic!("wrong payload") };
    for row in &p.rows {
        assert!((row.value_re.0 - row.radius.0).abs() < 1e-8, "{}", row.value_re.0);
    }
    let wrong_dim = run(&["project", "--weight", &f.path("flat.toml"), "--n", "3", "--symbol", &f.path("mono.toml")]);
    assert_eq!(wrong_dim.status.code(), Some(1));
}

#[test]
fn hl_check_passes_and_is_seeded() {
    let out = run(&["hl-check", "--trials", "20"]);
    assert_eq!(out.status.code(), Some(0));
    let Payload::HlCheck(h) = report(&out).result else { panic!("wrong payload") };
    assert!(h.all_pass && h.rows.len() == 20);
    let other = run(&["hl-check", "--trials", "20", "--seed", "1"]);
    assert_ne!(out.stdout, other.stdout);
}

#[test]
fn missing_arguments_are_errors() {
    assert_eq!(run(&["kernel", "--n", "2"]).status.code(), Some(1));
    assert_eq!(run(&["theorem", "--n", "0"]).status.code(), Some(1));
    assert_eq!(run(&["nonsense"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}
