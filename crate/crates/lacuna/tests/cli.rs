use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use lacuna::report::sha256_hex;
use serde_json::Value;

fn lacuna(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lacuna"))
        .args(args)
        .env_remove("LACUNA_THREADS")
        .output()
        .expect("binary runs")
}

fn algebra(name: &str) -> String {
    format!("{}/algebras/{name}.json", env!("CARGO_MANIFEST_DIR"))
}

fn summary(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

#[test]
fn l2decay_smoke_and_determinism() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    let h1 = algebra("heisenberg1");
    for dir in [&a, &b] {
        let out = lacuna(&[
            "verify", "l2decay", "--algebra", &h1, "--measure", "koranyi", "--gaps", "0..8",
            "--resolution", "9", "--threads", "1", "--out", dir.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let csv = fs::read_to_string(a.join("results.csv")).unwrap();
    assert_eq!(csv.lines().count(), 10, "{csv}");
    for name in ["summary.json", "results.csv", "plot.svg"] {
        let (x, y) = (fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap());
        assert!(x == y || name == "summary.json", "{name} differs");
    }
    // summaries differ only in the embedded output directory
    let (mut sa, mut sb) = (summary(&a), summary(&b));
    sa["config"]["out"] = Value::Null;
    sb["config"]["out"] = Value::Null;
    assert_eq!(sa, sb);
}

#[test]
fn manifest_hashes_and_no_clobber() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("run");
    let d = dir.to_str().unwrap();
    let args = ["algebra", "stratified", "--algebra", "engel4", "--out", d];
    assert_eq!(lacuna(&args).status.code(), Some(0));
    let manifest: Value =
        serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap();
    for e in manifest["files"].as_array().unwrap() {
        let bytes = fs::read(dir.join(e["name"].as_str().unwrap())).unwrap();
        assert_eq!(e["sha256"].as_str().unwrap(), sha256_hex(&bytes));
    }
    let again = lacuna(&args);
    assert_eq!(again.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&again.stderr).contains("--force"));
    let mut forced = args.to_vec();
    forced.push("--force");
    assert_eq!(lacuna(&forced).status.code(), Some(0));
}

#[test]
fn horizontal_sphere_generates() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("g");
    let out = lacuna(&[
        "algebra", "gentest", "--algebra", &algebra("heisenberg1"), "--measure", "horizontal",
        "--out", dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(summary(&dir)["results"]["generates"], Value::Bool(true));
}

#[test]
fn config_file_flags_and_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("c.json");
    fs::write(
        &cfg,
        r#"{"experiment": "adkernel", "algebra": "free-2-3", "seed": 3, "params": {"samples": 20}}"#,
    )
    .unwrap();
    let dir = tmp.path().join("o");
    let out = lacuna(&[
        "algebra", "adkernel", "--config", cfg.to_str().unwrap(), "--seed", "7",
        "--out", dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let s = summary(&dir);
    assert_eq!(s["config"]["seed"], 7);
    assert_eq!(s["results"]["violations"], 0);
    // the embedded config parses back to the same run
    let back = lacuna::ExperimentConfig::parse(&s["config"].to_string()).unwrap();
    assert_eq!(back.seed, 7);
    assert_eq!(back.params.samples, Some(20));

    fs::write(&cfg, r#"{"experiment": "adkernel", "fourier_mode": true}"#).unwrap();
    let dir = tmp.path().join("e");
    let out = lacuna(&[
        "algebra", "adkernel", "--config", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr[..out.stderr.iter().rposition(|&c| c == b'}').unwrap() + 1]).unwrap();
    assert_eq!(err["kind"], "parse_error");
    assert!(err["message"].as_str().unwrap().contains("fourier_mode"));
}

#[test]
fn computation_errors_leave_a_record() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("f");
    // Fourier transforms are only defined on abelian groups
    let out = lacuna(&[
        "measure", "fourier", "--algebra", "heisenberg1", "--out", dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let rec: Value = serde_json::from_str(&fs::read_to_string(dir.join("error.json")).unwrap()).unwrap();
    assert_eq!(rec["kind"], "computation_error");
    assert!(!dir.join("manifest.json").exists());
}

#[test]
fn flagged_findings_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("ca");
    // too few cloud points for any power to stabilise
    let out = lacuna(&[
        "measure", "ca", "--resolution", "24", "--half", "6.5,6.5,8", "--ns", "1,2",
        "--max-points", "5000", "--out", dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(summary(&dir)["status"], "flagged");
}
