use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_ultragrowth"));
    c.env("SOURCE_DATE_EPOCH", "1700000000");
    c
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn fixtures() -> tempfile::TempDir {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "g1.json", r#"{"kind":"gevrey","params":{"s":1},"K":100,"tail":null}"#);
    write(d.path(), "g15.json", r#"{"kind":"gevrey","params":{"s":1.5},"K":2000}"#);
    write(d.path(), "g20.json", r#"{"kind":"gevrey","params":{"s":2},"K":2000}"#);
    write(d.path(), "sqrt.json", r#"{"kind":"sqrt"}"#);
    let rows = |s: f64| {
        let r: Vec<String> =
            (1..=4).map(|k| format!(r#"{{"x":"1/{k}","seq":{{"kind":"gevrey","params":{{"s":{s}}},"K":400}}}}"#)).collect();
        format!(r#"{{"rows":[{}]}}"#, r.join(","))
    };
    write(d.path(), "mm.json", &rows(1.5));
    write(d.path(), "nn.json", &rows(2.0));
    d
}

#[test]
fn eval_omega_rows() {
    let d = fixtures();
    let o = run(d.path(), &["eval", "omega", "--seq", "g1.json", "--points", "1,3.5", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let rows: Vec<&str> = out.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "t,omega");
    assert_eq!(rows[1], "1,0");
    let v: f64 = rows[2].split(',').nth(1).unwrap().parse().unwrap();
    assert!((v - 1.96653).abs() < 1e-5);
    assert!(out.lines().last().unwrap().starts_with("# manifest: "));
}

#[test]
fn eval_kappa_of_sqrt() {
    let d = fixtures();
    let o = run(d.path(), &["eval", "kappa", "--fn", "sqrt.json", "--points", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema"], "ultragrowth/1");
    assert!((v["rows"][0]["kappa"].as_f64().unwrap() - 4.0).abs() < 1e-10);
}

#[test]
fn out_of_range_is_an_error() {
    let d = fixtures();
    let o = run(d.path(), &["eval", "omega", "--seq", "g1.json", "--points", "1000"]);
    assert!(o.status.code().unwrap() >= 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("OutOfTrustedRange"));
}

#[test]
fn check_exit_codes_follow_verdicts() {
    let d = fixtures();
    let o = run(d.path(), &["check", "SV", "--m", "g15.json", "--n", "g20.json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"], "HOLDS_TREND");
    let o = run(d.path(), &["check", "SV", "--m", "g20.json", "--n", "g15.json"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(d.path(), &["check", "SV", "--m", "g15.json", "--n", "missing.json"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn reports_are_reproducible() {
    let d = fixtures();
    let args = ["check", "L", "--m", "g15.json", "--n", "g20.json", "--K", "400", "--out"];
    let a = run(d.path(), &[&args[..], &["a.json"]].concat());
    let b = run(d.path(), &[&args[..], &["b.json"]].concat());
    assert_eq!(a.status.code(), b.status.code());
    let (a, b) = (std::fs::read(d.path().join("a.json")).unwrap(), std::fs::read(d.path().join("b.json")).unwrap());
    assert_eq!(a, b);
    let r = run(d.path(), &["report", "a.json", "--format", "csv"]);
    assert_eq!(r.status.code(), Some(0));
    assert!(stdout(&r).contains("a.json,L,HOLDS_TREND,400"));
}

#[test]
fn pipeline_rejects_boundary_jet() {
    let d = fixtures();
    write(d.path(), "jet.json", r#"{"kind":"factorial_power","params":{"a":1.5},"K":400}"#);
    let o = run(d.path(), &["pipeline", "--jet", "jet.json", "--mm", "mm.json", "--nn", "nn.json"]);
    assert!(o.status.code().unwrap() >= 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("JetNotInClass"));
}

#[test]
fn pipeline_emits_result() {
    let d = fixtures();
    write(d.path(), "unit.json", r#"{"kind":"unit","params":{"index":3},"K":400}"#);
    let o = run(d.path(), &["pipeline", "--jet", "unit.json", "--mm", "mm.json", "--nn", "nn.json"]);
    assert!(o.status.code().unwrap() <= 2, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema"], "ultragrowth/1");
    assert_eq!(v["log_s"][0], 0.0);
    assert!(v["verify_sv"]["verdict"].is_string());
}

#[test]
fn gevrey_grid_harness() {
    let d = fixtures();
    let o = run(d.path(), &["harness", "gevrey-grid", "--s", "1.5,2", "--t", "1.5,2", "--K", "600", "--format", "csv", "--cells", "cells"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let rows: Vec<Vec<&str>> = out.lines().skip(1).filter(|l| !l.starts_with('#')).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 8);
    for r in &rows {
        assert_eq!(r[3] == "HOLDS_TREND", r[4] == "true", "{r:?}");
    }
    assert_eq!(std::fs::read_dir(d.path().join("cells")).unwrap().count(), 8);
}

#[test]
fn mollify_csv() {
    let d = fixtures();
    let o = run(d.path(), &["mollify", "--f", "poly:0,0,1", "--j", "50", "--interval", "1", "--grid", "5", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("x,f,f_j,abs_err\n"));
    let mid: Vec<f64> = out.lines().nth(3).unwrap().split(',').map(|c| c.parse().unwrap()).collect();
    assert_eq!(mid[0], 0.0);
    assert!((mid[2] - 0.01).abs() < 1e-6);
}
