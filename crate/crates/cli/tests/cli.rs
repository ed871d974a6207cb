use std::path::{Path, PathBuf};
use std::process::Command;

use relplan_core::{InfluenceMatrix, PreferenceMatrix};

fn toy(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/toy").join(name)
}

fn relplan(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_relplan")).args(args).output().expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn run_writes_full_artifact_set() {
    let dir = tempfile::tempdir().unwrap();
    let out = relplan(&[
        "run",
        "--prefs",
        s(&toy("prefs.csv")),
        "--catalog",
        s(&toy("catalog.json")),
        "--budget-min",
        "0",
        "--budget-max",
        "10",
        "--out-dir",
        s(dir.path()),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["eells.csv", "influence.csv", "sweep.csv", "sweep.svg", "sweep_meta.json"] {
        assert!(dir.path().join(f).exists(), "{f} missing");
    }
    let sweep = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    // 11 budgets × 6 model variants plus a header.
    assert_eq!(sweep.lines().count(), 67);
}

#[test]
fn thresholded_membership_zeroes_weak_strengths() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("config.json");
    std::fs::write(&cfg, r#"{"membership":"tl:0.16:0.83","budget":{"min":0,"max":4}}"#).unwrap();
    let out = relplan(&[
        "run",
        "--prefs",
        s(&toy("prefs.csv")),
        "--catalog",
        s(&toy("catalog.json")),
        "--config",
        s(&cfg),
        "--out-dir",
        s(dir.path()),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let eta = relplan_core::EellsMatrix::read(dir.path().join("eells.csv")).unwrap();
    let d = InfluenceMatrix::read(dir.path().join("influence.csv")).unwrap();
    let mut weak = 0;
    for i in 0..4 {
        for j in 0..4 {
            if i != j && eta.get(i, j).abs() < 0.16 {
                weak += 1;
                assert_eq!(d.get(i, j), 0.0);
            }
        }
    }
    assert!(weak > 0);
}

#[test]
fn precedence_overrides_in_graph() {
    let dir = tempfile::tempdir().unwrap();
    let eells = dir.path().join("eells.csv");
    let infl = dir.path().join("influence.csv");
    assert!(relplan(&["mine", "--prefs", s(&toy("prefs.csv")), "--out", s(&eells)]).status.success());
    let out = relplan(&[
        "graph",
        "--eells",
        s(&eells),
        "--membership",
        "identity",
        "--precedence",
        s(&toy("precedence.csv")),
        "--out",
        s(&infl),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let d = InfluenceMatrix::read(&infl).unwrap();
    let pos = |id: &str| d.ids().iter().position(|x| x == id).unwrap();
    assert_eq!(d.get(pos("audit"), pos("login")), 1.0);
    assert_eq!(d.get(pos("theme"), pos("audit")), -1.0);
}

#[test]
fn plan_is_deterministic_without_timing() {
    let dir = tempfile::tempdir().unwrap();
    let eells = dir.path().join("eells.csv");
    let infl = dir.path().join("influence.csv");
    relplan(&["mine", "--prefs", s(&toy("prefs.csv")), "--out", s(&eells)]);
    relplan(&["graph", "--eells", s(&eells), "--out", s(&infl)]);
    let mut texts = Vec::new();
    for k in 0..2 {
        let plan = dir.path().join(format!("plan{k}.json"));
        let out = relplan(&[
            "plan",
            "--catalog",
            s(&toy("catalog.json")),
            "--influence",
            s(&infl),
            "--model",
            "dasrp",
            "--budget",
            "6",
            "--out",
            s(&plan),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        texts.push(std::fs::read_to_string(&plan).unwrap());
    }
    assert_eq!(texts[0], texts[1]);
    let v: serde_json::Value = serde_json::from_str(&texts[0]).unwrap();
    for key in ["x", "p", "phi", "AV", "OV", "cost_used", "stats"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert!(v["stats"].get("wall_time_ms").is_none());
    assert!(v["cost_used"].as_f64().unwrap() <= 6.0);
}

#[test]
fn resample_honours_seed() {
    let dir = tempfile::tempdir().unwrap();
    let mut outs = Vec::new();
    for (k, seed) in [(0, "7"), (1, "7"), (2, "8")] {
        let p = dir.path().join(format!("syn{k}.csv"));
        let rep = dir.path().join(format!("fid{k}.json"));
        let out = relplan(&[
            "resample",
            "--prefs",
            s(&toy("prefs.csv")),
            "--count",
            "5000",
            "--seed",
            seed,
            "--out",
            s(&p),
            "--report",
            s(&rep),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        outs.push(std::fs::read(&p).unwrap());
    }
    assert_eq!(outs[0], outs[1]);
    assert_ne!(outs[0], outs[2]);
    let m = PreferenceMatrix::read(dir.path().join("syn0.csv")).unwrap();
    assert_eq!(m.n_users(), 5000);
}

#[test]
fn validation_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "feature,f1,f2\nf1,1,0.5\nf2,1.3,1\n").unwrap();
    let out = relplan(&["graph", "--eells", s(&bad), "--out", s(&dir.path().join("x.csv"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("row 2, column 1"));

    let out = relplan(&["graph", "--eells", s(&toy("precedence.csv")), "--membership", "tl:0.9:0.1"]);
    assert_eq!(out.status.code(), Some(2));

    let out = relplan(&[
        "plan",
        "--catalog",
        s(&toy("catalog.json")),
        "--influence",
        s(&bad),
        "--model",
        "bkp",
        "--budget",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_files_exit_with_one() {
    let out = relplan(&["mine", "--prefs", "/nonexistent/prefs.csv"]);
    assert_eq!(out.status.code(), Some(1));
}
