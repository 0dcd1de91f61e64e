use std::path::Path;
use std::process::{Command, Output};

fn fracvar(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracvar")).args(args).current_dir(dir).output().expect("binary runs")
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records().map(|rec| rec.unwrap().iter().map(str::to_string).collect()).collect()
}

#[test]
fn ftc_default_suite() {
    let dir = tempfile::tempdir().unwrap();
    let out = fracvar(&["ftc", "--out", "ftc.csv"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&dir.path().join("ftc.csv"));
    assert_eq!(rows.len(), 48);
    assert!(rows.iter().all(|r| r[7] == "true"));
}

#[test]
fn ftc_classical_only() {
    let dir = tempfile::tempdir().unwrap();
    let out = fracvar(&["ftc", "--alpha", "1", "--out", "c.csv"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&dir.path().join("c.csv"));
    assert_eq!(rows.len(), 12);
    assert!(rows.iter().all(|r| r[1] == "1.0"));
}

#[test]
fn usage_errors_exit_two_without_output() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["ftc", "--alpha", "1.5", "--out", "x.csv"][..],
        &["string", "--alpha", "", "--out", "x.csv"][..],
        &["theorems", "--box", "1,0,0,1,0,1", "--out", "x.csv"][..],
        &["el", "--format", "xml", "--out", "x.csv"][..],
        &["bogus"][..],
    ] {
        let out = fracvar(args, dir.path());
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!dir.path().join("x.csv").exists(), "{args:?}");
    }
}

#[test]
fn constants_only_theorems() {
    let dir = tempfile::tempdir().unwrap();
    let out = fracvar(&["theorems", "--degree", "0", "--alpha", "0.5", "--out", "t.json", "--format", "json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("t.json")).unwrap()).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 24);
    assert!(rows.iter().all(|r| r["pass"] == true));
}

#[test]
fn leibniz_reports_failures() {
    let dir = tempfile::tempdir().unwrap();
    let out = fracvar(&["leibniz", "--alpha", "0.5", "--out", "l.csv"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let rows = csv_rows(&dir.path().join("l.csv"));
    assert_eq!(rows.len(), 21);
    let one_one = rows.iter().find(|r| r[2] == "one*one").unwrap();
    assert_eq!(one_one[7], "true");
}

#[test]
fn zero_string_gives_zero_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = fracvar(
        &["string", "--data", "zero", "--alpha", "0.9,1", "--modes", "2", "--grid-size", "5", "--out", "s.csv"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let grid = csv_rows(&dir.path().join("s_grid.csv"));
    assert_eq!(grid.len(), 2 * 25);
    assert!(grid.iter().all(|r| r[3] == "0.0"));
}

#[test]
fn config_file_is_honoured() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.toml"), "alpha = [0.75]\nout = \"from_file.csv\"\n").unwrap();
    let out = fracvar(&["identities", "--config", "run.toml"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&dir.path().join("from_file.csv"));
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r[1] == "0.75"));
}

#[test]
fn el_suite_passes_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = fracvar(&["el", "--alpha", "0.6,1", "--seed", "11", "--out", "a.csv"], dir.path());
    let b = fracvar(&["el", "--alpha", "0.6,1", "--seed", "11", "--out", "b.csv"], dir.path());
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(b.status.code(), Some(0));
    let (a, b) = (std::fs::read(dir.path().join("a.csv")).unwrap(), std::fs::read(dir.path().join("b.csv")).unwrap());
    assert_eq!(a, b);
}
