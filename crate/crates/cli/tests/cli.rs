use std::f64::consts::PI;
use std::process::{Command, Output};

use serde_json::Value;

fn sympd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sympd")).args(args).env_remove("SYMPD_SEED").output().unwrap()
}

fn lines(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn single(args: &[&str]) -> Value {
    let out = sympd(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut v = lines(&out);
    assert_eq!(v.len(), 1);
    v.remove(0)
}

#[test]
fn ruelle_of_full_rotation() {
    let v = single(&["invariant", "ruelle", "--flow", "rigid:1.0"]);
    assert!((v["value"].as_f64().unwrap() - PI).abs() < 1e-3);
    assert_eq!(v["stderr"], 0.0);
    for key in ["invariant", "scenario", "value", "stderr", "bias", "seed", "runtime_ms"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}

#[test]
fn rot_of_full_rotation() {
    let v = single(&["invariant", "rot", "--flow", "rigid:1.0"]);
    assert!((v["value"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn braid_of_full_rotation() {
    let v = single(&["braid", "extract", "--flow", "rigid:1.0", "--n", "2"]);
    assert_eq!(v["value"], serde_json::json!([1, 1]));
    let v = single(&["braid", "extract", "--flow", "rigid:1.0", "--n", "2", "--points", "0.3,0;-0.2,0.1"]);
    assert_eq!(v["value"], serde_json::json!([1, 1]));
}

#[test]
fn same_seed_gives_identical_values() {
    let args =
        ["invariant", "gg", "--flow", "twist:amp=0.7,support=0.8", "--qm", "writhe", "--samples", "300", "--seed", "4"];
    let (a, b) = (single(&args), single(&args));
    for key in ["value", "stderr", "bias", "seed", "scenario", "invariant"] {
        assert_eq!(a[key].to_string(), b[key].to_string(), "{key}");
    }
    assert_eq!(a["seed"], 4);
}

#[test]
fn seed_comes_from_the_environment() {
    let run = |seed: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_sympd"));
        cmd.args(["invariant", "gg", "--flow", "rigid:0.5", "--samples", "64"]).env_remove("SYMPD_SEED");
        if let Some(s) = seed {
            cmd.env("SYMPD_SEED", s);
        }
        let out = cmd.output().unwrap();
        lines(&out).remove(0)
    };
    assert_eq!(run(Some("17"))["seed"], 17);
    assert_eq!(run(None)["seed"], 0);
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = std::env::temp_dir().join(format!("sympd-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("scenario.cfg");
    std::fs::write(&path, "invariant = rot\nflow.kind = rigid\nflow.turns = 2 # two turns\n").unwrap();
    let p = path.to_str().unwrap();
    let v = single(&["invariant", "--config", p]);
    assert_eq!(v["invariant"], "rot");
    assert!((v["value"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    let v = single(&["invariant", "rot", "--config", p, "--flow", "rigid:0.25"]);
    assert!((v["value"].as_f64().unwrap() - 0.25).abs() < 1e-9);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn config_errors_exit_with_two() {
    for args in [
        vec!["invariant", "ruelle", "--flow", "bogus:1"],
        vec!["invariant", "ruelle"],
        vec!["invariant", "gg", "--flow", "rigid:1", "--n", "12"],
        vec!["invariant", "ruelle", "--flow", "rigid:1", "--kmax", "3"],
        vec!["invariant", "ruelle", "--flow", "rigid:1", "--config", "/nonexistent/x.cfg"],
        vec!["experiment", "defect", "--family", "spiral"],
    ] {
        let out = sympd(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
        let v = lines(&out).remove(0);
        assert!(v["error"].is_string(), "{args:?}");
    }
    assert_eq!(sympd(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn numeric_errors_exit_with_one_and_a_code() {
    let out = sympd(&["invariant", "calabi", "--flow", "rigid:1"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(lines(&out).remove(0)["error"], "NotCompactlySupported");
    let out = sympd(&["braid", "extract", "--flow", "rigid:1", "--n", "2", "--points", "0.1,0;0.1,0"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(lines(&out).remove(0)["error"], "CollisionDetected");
}

#[test]
fn selftest_passes() {
    let out = sympd(&["selftest"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let v = lines(&out);
    assert!(v.len() >= 8);
    assert!(v.iter().all(|l| l["ok"] == true));
}

#[test]
fn experiments_emit_tables() {
    let dir = std::env::temp_dir().join(format!("sympd-csv-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let csv = dir.join("ext.csv");
    let out = sympd(&[
        "experiment",
        "extension",
        "--flow",
        "btwist:amp=0.3,shear=0.4",
        "--kmax",
        "1",
        "--deck",
        "2",
        "--csv",
        csv.to_str().unwrap(),
        "--threads",
        "1",
    ]);
    assert!(out.status.success());
    let v = lines(&out);
    assert_eq!(v.len(), 4);
    assert!((v[0]["value"].as_f64().unwrap() - PI).abs() < 1e-3);
    for r in &v[2..] {
        assert!(r["value"].as_f64().unwrap() <= 1e-4);
    }
    let table = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(table.lines().count(), 5);
    assert!(table.starts_with("invariant,value,stderr,bias,seed,scenario,runtime_ms"));
    std::fs::remove_dir_all(&dir).ok();

    let v = lines(&sympd(&[
        "experiment",
        "defect",
        "--invariant",
        "rot",
        "--family",
        "boundary-rotating",
        "--pairs",
        "10",
    ]));
    assert!(v[0]["value"].as_f64().unwrap() <= 1.0 + 1e-6);
    let v = lines(&sympd(&["experiment", "homogeneity", "--invariant", "rot", "--flow", "rigid:0.3", "--kmax", "4"]));
    assert_eq!(v.len(), 3);
    for r in v {
        assert!((r["value"].as_f64().unwrap() - 0.3).abs() < 1e-9);
    }
    let v = lines(&sympd(&[
        "experiment",
        "calabi-ratio",
        "--flow",
        "twist:amp=0.7,support=0.8",
        "--samples",
        "200",
        "--kmax",
        "2",
    ]));
    assert_eq!(v.len(), 1);
    assert!(v[0]["value"].as_f64().unwrap().is_finite());
}
