use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn mwt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mwt"))
        .args(args)
        .env_remove("MWT_WORKERS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn square_mwt_and_figure() {
    let dir = TempDir::new().unwrap();
    let svg = dir.path().join("sq.svg");
    let o = mwt(&["polygon-mwt", "--poly", s(&data("examples/square.txt")), "--svg", s(&svg)]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("cost 1.414213562"), "{text}");
    assert!(text.contains("multiplicity 2"));
    let fig = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(fig.matches("<circle").count(), 4);
    assert_eq!(fig.matches("<line").count(), 5);
    assert!(fig.contains("cy=\"-1\""));
}

#[test]
fn output_is_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.svg");
    let b = dir.path().join("b.svg");
    let poly = data("examples/square.txt");
    let o1 = mwt(&["polygon-mwt", "--poly", s(&poly), "--svg", s(&a)]);
    let o2 = mwt(&["--workers", "3", "polygon-mwt", "--poly", s(&poly), "--svg", s(&b)]);
    assert_eq!(o1.stdout, o2.stdout);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let t1 = mwt(&["analyze-piece", "--piece", s(&data("designer-pieces.txt")), "--tex"]);
    let t2 = mwt(&["analyze-piece", "--piece", s(&data("designer-pieces.txt")), "--tex"]);
    assert_eq!(t1.status.code(), Some(0));
    assert_eq!(t1.stdout, t2.stdout);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(mwt(&[]).status.code(), Some(2));
    assert_eq!(mwt(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(
        mwt(&["analyze-piece", "--piece", "/nonexistent/pieces.txt"]).status.code(),
        Some(2)
    );
    assert_eq!(
        mwt(&["--display", "20", "polygon-mwt", "--poly", s(&data("examples/square.txt"))])
            .status
            .code(),
        Some(2)
    );
    let dir = TempDir::new().unwrap();
    let cw = write(&dir, "cw.txt", "0 0\n0 1\n1 1\n1 0\n");
    assert_eq!(mwt(&["polygon-mwt", "--poly", &cw]).status.code(), Some(2));
    let junk = write(&dir, "junk.txt", "0 zero\n");
    assert_eq!(mwt(&["polygon-mwt", "--poly", &junk]).status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_mwt"))
        .args(["polygon-mwt", "--poly", s(&data("examples/square.txt"))])
        .env("MWT_WORKERS", "none")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn worker_variable_is_honoured() {
    let o = Command::new(env!("CARGO_BIN_EXE_mwt"))
        .args(["polygon-mwt", "--poly", s(&data("examples/square.txt"))])
        .env("MWT_WORKERS", "2")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn skeleton_failures_exit_one() {
    let dir = TempDir::new().unwrap();
    let flat = write(&dir, "flat.txt", "0 0\n10 0\n5 1\n");
    let o = mwt(&["beta-check", "--poly", &flat]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("violated edge 0-1"));
    let pts = write(&dir, "pts.txt", "0 0\n10 0\n5 1\n5 -1\n");
    let o = mwt(&["diamond", "--points", &pts, "--edge", "0,1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("excluded"));
    let o = mwt(&["diamond", "--points", &pts, "--edge", "2,3", "--angle", "original"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(mwt(&["diamond", "--points", &pts, "--edge", "0,9"]).status.code(), Some(2));
}

#[test]
fn designer_pieces_pass_checks() {
    let pieces = data("designer-pieces.txt");
    let o = mwt(&["beta-check", "--pieces", s(&pieces)]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("below beta 1.1806"));
    assert_eq!(mwt(&["verify-piece", "--pieces", s(&pieces)]).status.code(), Some(0));
    let o = mwt(&["verify-piece", "--pieces", s(&pieces), "--name", "missing"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn terminal_case_log() {
    let dir = TempDir::new().unwrap();
    let figs = dir.path().join("figs");
    let o = mwt(&["check-w", "--data", s(&data("designer-pieces.txt")), "--figures", s(&figs)]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let cases: Vec<&str> = text.lines().filter(|l| l.starts_with("Case ")).collect();
    assert!(!cases.is_empty());
    for l in cases {
        assert!(l.ends_with(": difference ="), "{l}");
    }
    let fig = std::fs::read_to_string(figs.join("case-v1-v1.svg")).unwrap();
    assert!(fig.contains("<g id=\"edges\""));
    assert_eq!(std::fs::read_dir(&figs).unwrap().count(), 6);
}

#[test]
fn empty_catalog_gives_header_only() {
    let dir = TempDir::new().unwrap();
    let empty = write(&dir, "empty.txt", "# nothing here\n");
    let o = mwt(&["analyze-piece", "--piece", &empty]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 1);
    let out = dir.path().join("t.tex");
    let o = mwt(&["analyze-piece", "--piece", &empty, "--tex", "--output", s(&out)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&out).unwrap(), "% pattern tables\n");
}

#[test]
fn tex_tables_group_digits() {
    let o = mwt(&["analyze-piece", "--piece", s(&data("designer-pieces.txt")), "--name", "wire", "--tex"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("\\begin{tabular}"));
    assert!(text.contains("\\,"));
    assert!(text.contains("LL & 1 & 102.682\\,708\\,482"));
    assert!(text.contains("$0.210\\,506\\,663$"));
}

#[test]
fn sat_reduce_writes_one_in_three() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("f.1in3");
    let o = mwt(&["sat-reduce", "--input", s(&data("examples/three-clauses.cnf")), "--output", s(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("p 1in3 "));
    let bad = write(&dir, "bad.cnf", "p cnf 2 1\nc x1 x9\n");
    assert_eq!(mwt(&["sat-reduce", "--input", &bad]).status.code(), Some(2));
}

#[test]
fn mini_layout_writes_artifacts() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("run");
    let input = data("examples/one-clause.1in3");
    let pieces = data("designer-pieces.txt");
    let o = mwt(&["layout", "--input", s(&input), "--out-dir", s(&out), "--pieces", s(&pieces)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("not proof grade"));
    let side: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("sidecar.json")).unwrap()).unwrap();
    assert_eq!(side["mode"], "mini");
    assert_eq!(side["proof_grade"], false);
    assert_eq!(side["audit"]["passes"], true);
    assert_eq!(side["audit"]["beta_failures"], 0);
    let points = std::fs::read_to_string(out.join("points.txt")).unwrap();
    assert!(points.lines().count() > 1000);
    assert!(std::fs::read_to_string(out.join("layout.svg")).unwrap().starts_with("<svg"));

    let again = dir.path().join("again");
    let o = mwt(&["layout", "--input", s(&input), "--out-dir", s(&again), "--pieces", s(&pieces)]);
    assert_eq!(o.status.code(), Some(0));
    for f in ["points.txt", "sidecar.json", "layout.svg"] {
        assert_eq!(std::fs::read(out.join(f)).unwrap(), std::fs::read(again.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn proof_audit_of_one_clause() {
    let o = mwt(&["--mode", "proof", "audit", "--input", s(&data("examples/one-clause.1in3"))]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.contains("beta check skipped"));
    assert!(text.trim_end().ends_with("audit passed"));
}

#[test]
fn in_process_runner_matches_binary() {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let poly = data("examples/square.txt");
    let code = mwt_cli::run_with(["mwt", "polygon-mwt", "--poly", s(&poly)], &mut out, &mut err);
    assert_eq!(code, 0);
    assert_eq!(out, mwt(&["polygon-mwt", "--poly", s(&poly)]).stdout);
    assert_eq!(mwt_cli::parse_points("1.5 -2 # c\n\n"), Ok(vec![(15000, -20000)]));
}
