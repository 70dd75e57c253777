use std::process::{Command, Output};

fn algpos(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_algpos")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn check_exit_codes() {
    let o = algpos(&["check", "1 1; 1 1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verdict: AP"));
    assert_eq!(algpos(&["check", "0 1; -1 0"]).status.code(), Some(1));
    // failing witness of the 8.2 row
    assert_eq!(algpos(&["check", "1 1 0; -1 0 1; 1 0 0"]).status.code(), Some(1));
    assert_eq!(algpos(&["check", "-1 1; 1 -1"]).status.code(), Some(0));
}

#[test]
fn parse_errors_exit_64() {
    let o = algpos(&["check", "1 2; 3"]);
    assert_eq!(o.status.code(), Some(64));
    assert!(!o.stderr.is_empty());
    assert_eq!(algpos(&["classify", "0+x/000/000"]).status.code(), Some(64));
    assert_eq!(algpos(&["--samples", "1", "classify", "0+/+0"]).status.code(), Some(64));
    assert_eq!(algpos(&["frobnicate"]).status.code(), Some(64));
}

#[test]
fn classify_output() {
    let o = algpos(&["classify", "0+0/00+/+00"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verdict: RAP"));
    let o = algpos(&["classify", "0+0/+0-/+0+"]);
    let out = stdout(&o);
    assert!(out.contains("verdict: DNA") && out.contains("evidence: Theorem4"), "{out}");
    assert!(out.contains("B-matrix: 0+0/+00/+++ (reducible)"));
    let o = algpos(&["--format", "json", "classify", "++0/-0+/+00"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"], "AAP");
    assert_eq!(v["entry"], "8.2");
}

#[test]
fn certificate_and_subclass() {
    let o = algpos(&["--format", "json", "certificate", "0 1 -1; 0 0 1; 1 0 0"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["poly"]["margin"].as_f64().unwrap() > 0.0);
    assert_eq!(algpos(&["subclass", "0+/+0", "-+/+-"]).status.code(), Some(0));
    assert_eq!(algpos(&["subclass", "-+/+-", "0+/+0"]).status.code(), Some(1));
    assert_eq!(algpos(&["subclass", "0+/+0", "0+0/00+/+00"]).status.code(), Some(64));
}

#[test]
fn atlas_files_are_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let o = algpos(&["--samples", "20", "--seed", "3", "atlas", "--out", dir.path().to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for name in ["atlas.json", "atlas.md", "discrepancies.json"] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name}");
    }
    let md = std::fs::read_to_string(a.path().join("atlas.md")).unwrap();
    assert_eq!(md.matches("\n## Group ").count(), 26);
}

#[test]
fn verify_paper_summary() {
    let dir = tempfile::tempdir().unwrap();
    let o = algpos(&["--samples", "20", "verify-paper", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("witness matrices: 408"), "{out}");
    assert!(out.contains("mismatch 23.5"));
    assert!(dir.path().join("verify.json").exists());
}

#[test]
fn unwritable_output_exits_74() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("occupied");
    std::fs::write(&file, "").unwrap();
    let o = algpos(&["--samples", "20", "atlas", "--out", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(74));
}
