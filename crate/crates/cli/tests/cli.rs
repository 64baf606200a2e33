use std::path::Path;
use std::process::{Command, Output};

fn finipost(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_finipost"))
        .args(args)
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const SMALL: &str = r#"{"experiment":"bound_finite","model":{"kind":"finite_dirichlet","alpha":[1,1]},"N_grid":[2,4],"m_samples":50,"replicates":2,"bootstrap":10,"master_seed":42}"#;

#[test]
fn run_writes_csv_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cfg.json", SMALL);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let out = finipost(&["run", "--config", &cfg, "--out", a.to_str().unwrap(), "--threads", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let out = finipost(&["run", "--config", &cfg, "--out", b.to_str().unwrap(), "--threads", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&a).unwrap();
    assert!(text.starts_with("experiment,N,n,replicate,seed,estimate,stderr,bound,slack,violated\n"));
    assert_eq!(text.lines().count(), 5);
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
}

#[test]
fn seed_flag_and_json_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cfg.json", SMALL);
    let a = finipost(&["run", "--config", &cfg, "--format", "json"]);
    let b = finipost(&["run", "--config", &cfg, "--format", "json", "--seed", "7"]);
    assert_eq!(a.status.code(), Some(0));
    let va: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    let vb: serde_json::Value = serde_json::from_slice(&b.stdout).unwrap();
    assert_eq!(va["metadata"]["config"]["master_seed"], 42);
    assert_eq!(vb["metadata"]["config"]["master_seed"], 7);
    assert_ne!(va["rows"][0]["seed"], vb["rows"][0]["seed"]);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"experiment":"bound_finite","N_grid":[]}"#);
    assert_eq!(finipost(&["run", "--config", &bad]).status.code(), Some(1));
    assert_eq!(
        finipost(&["run", "--config", "/nonexistent.json"]).status.code(),
        Some(2)
    );
    let cfg = write(dir.path(), "cfg.json", SMALL);
    let out = finipost(&["run", "--config", &cfg, "--out", "/nonexistent/dir/out.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(
        finipost(&["run", "--config", &cfg, "--format", "xml"]).status.code(),
        Some(1)
    );
    assert_eq!(finipost(&["run"]).status.code(), Some(1));
    assert_eq!(finipost(&["bound", "nope", "--params", "{}"]).status.code(), Some(1));
    assert_eq!(
        finipost(&["bound", "finite", "--params", "not json"]).status.code(),
        Some(1)
    );
}

#[test]
fn bound_prints_json() {
    let out = finipost(&["bound", "finite", "--params", r#"{"k":3,"n":10,"N":100}"#]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["bound"], "finite");
    assert!((v["value"].as_f64().unwrap() - 0.179_057).abs() < 1e-6);
}

#[test]
fn selftest_passes() {
    let out = finipost(&["selftest"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().count() >= 10);
    assert!(text.lines().all(|l| l.starts_with("PASS ")));
}
