use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn siou(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_siou"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn siou_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_siou"))
        .args(args)
        .env(key, value)
        .output()
        .expect("binary runs")
}

fn siou_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_siou"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn write_config(dir: &Path, name: &str, v: &Value) -> String {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
    p.to_str().unwrap().to_string()
}

fn sample_config() -> Value {
    json!({
        "kernel": {"lambda": 1.0, "sigma": 1.4142135623730951},
        "corners": [[1, 2], [2, 1], [2, 2]],
        "initial": {"kind": "dirac", "x0": 0.7},
        "replicates": 50,
        "seed": {"seed": 42, "stream": 3}
    })
}

#[test]
fn frontier_example() {
    let o = siou(&["frontier", "--a", "2,2", "--b", "1,2;2,1"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(
        v["results"],
        json!([
            {"corner": [1.0, 2.0], "sign": 1},
            {"corner": [2.0, 1.0], "sign": 1},
            {"corner": [1.0, 1.0], "sign": -1}
        ])
    );
    assert_eq!(v["config"]["a"], json!([2.0, 2.0]));
}

#[test]
fn frontier_with_empty_past() {
    let o = siou(&["frontier", "--a", "2"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["results"], json!([{"corner": [0.0], "sign": 1}]));
}

#[test]
fn frontier_multiplicity_is_a_numerical_error() {
    let o = siou(&["frontier", "--a", "2,2,2", "--b", "2,1,1;1,2,1;1,1,2"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("coefficient"));
}

#[test]
fn bad_frontier_coordinates_are_usage_errors() {
    assert_eq!(code(&siou(&["frontier", "--a", "2,x"])), 2);
    assert_eq!(code(&siou(&["frontier", "--a", "-1"])), 2);
}

#[test]
fn verify_deterministic_passes() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let o = siou(&["verify", "--suite", "deterministic", "--seed", "42", "--json", report.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["config"]["suite"], "deterministic");
    assert_eq!(v["config"]["seed"], json!({"seed": 42, "stream": 0}));
    let results = v["results"].as_array().unwrap();
    assert!(!results.is_empty());
    assert!(results.iter().all(|r| r["passed"] == true));
}

#[test]
fn verify_requires_seed() {
    assert_eq!(code(&siou(&["verify", "--suite", "deterministic"])), 2);
    assert_eq!(code(&siou(&["verify", "--suite", "bogus", "--seed", "1"])), 2);
    assert_eq!(code(&siou(&[])), 2);
}

#[test]
fn verify_mc_with_small_sizes_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for p in [&a, &b] {
        let o = siou(&[
            "verify", "--suite", "mc", "--seed", "5", "--replicates", "2000", "--sheet-replicates", "1000",
            "--json", p.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn sample_outputs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "run.json", &sample_config());
    let mut outputs = Vec::new();
    for k in 0..2 {
        let run = dir.path().join(format!("run{k}"));
        std::fs::create_dir(&run).unwrap();
        let o = siou_in(&run, &["sample", "--config", &cfg, "--out", "v.csv", "--json", "v.json"]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        outputs.push((std::fs::read(run.join("v.csv")).unwrap(), std::fs::read(run.join("v.json")).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);

    let text = String::from_utf8(outputs[0].0.clone()).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "\"(0,0)\",\"(1,1)\",\"(1,2)\",\"(2,1)\",\"(2,2)\"");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 50);
    assert!(rows.iter().all(|r| r.starts_with("0.7,")));

    let side: Value = serde_json::from_slice(&outputs[0].1).unwrap();
    assert_eq!(side["config"]["seed"], json!({"seed": 42, "stream": 3}));
    assert_eq!(side["config"]["measure"], json!({"kind": "lebesgue"}));
    let steps = side["results"][0]["steps"].as_array().unwrap();
    assert_eq!(steps.len(), 4);
    assert_eq!(steps[3]["weights"].as_array().unwrap().len(), 3);
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "run.json", &sample_config());
    let a = siou(&["sample", "--config", &cfg]);
    let b = siou(&["sample", "--config", &cfg, "--seed", "43"]);
    let c = siou(&["sample", "--config", &cfg, "--replicates", "3"]);
    assert_eq!(code(&a), 0);
    assert_ne!(a.stdout, b.stdout);
    assert_eq!(String::from_utf8(c.stdout).unwrap().lines().count(), 4);
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "run.json", &sample_config());
    let one = siou_env(&["sample", "--config", &cfg], "SIOU_THREADS", "1");
    let four = siou_env(&["sample", "--config", &cfg], "SIOU_THREADS", "4");
    assert_eq!(code(&one), 0);
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(code(&siou_env(&["sample", "--config", &cfg], "SIOU_THREADS", "zero")), 2);
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&siou(&["sample", "--config", "/nonexistent/run.json"])), 2);

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(code(&siou(&["sample", "--config", bad.to_str().unwrap()])), 2);

    let mut v = sample_config();
    v.as_object_mut().unwrap().remove("seed");
    let no_seed = write_config(dir.path(), "noseed.json", &v);
    let o = siou(&["sample", "--config", &no_seed]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("seed"));

    let mut v = sample_config();
    v["corners"] = json!([[1, 2], [1]]);
    assert_eq!(code(&siou(&["sample", "--config", &write_config(dir.path(), "dim.json", &v)])), 2);

    let mut v = sample_config();
    v["replicates"] = json!(0);
    assert_eq!(code(&siou(&["sample", "--config", &write_config(dir.path(), "zero.json", &v)])), 2);

    let mut v = sample_config();
    v["kernel"]["lambda"] = json!(-1.0);
    assert_eq!(code(&siou(&["sample", "--config", &write_config(dir.path(), "lam.json", &v)])), 2);
}

#[test]
fn kernel_subcommand() {
    let o = siou(&["kernel", "--corners", "1;2", "--lambda", "1", "--sigma", "1.4142135623730951"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let cov = &v["results"][0]["cov_stationary"];
    assert!((cov[0][1].as_f64().unwrap() - (-1.0f64).exp()).abs() < 1e-12);
    let dirac = &v["results"][0]["cov_dirac"];
    assert!((dirac[0][0].as_f64().unwrap() - (1.0 - (-2.0f64).exp())).abs() < 1e-12);
    assert_eq!(v["config"]["kernel"]["lambda"], 1.0);
}

#[test]
fn sheet_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let v = json!({
        "grid": {"lower": [-1.0, -1.0], "upper": [1.0, 1.0], "steps": [20, 20]},
        "sheet": {"alpha": [1.0, 2.0], "sigma": 1.0, "mode": {"kind": "mpou", "y0": 0.0}, "points": [[0.5, 0.5], [1.0, 1.0]]},
        "replicates": 30,
        "seed": {"seed": 1}
    });
    let cfg = write_config(dir.path(), "sheet.json", &v);
    let mut runs = Vec::new();
    for k in 0..2 {
        let run = dir.path().join(format!("run{k}"));
        std::fs::create_dir(&run).unwrap();
        let o = siou_in(&run, &["sheet", "--config", &cfg, "--out", "s.csv", "--json", "s.json"]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        runs.push((std::fs::read(run.join("s.csv")).unwrap(), std::fs::read(run.join("s.json")).unwrap()));
    }
    assert_eq!(runs[0], runs[1]);
    let text = String::from_utf8(runs[0].0.clone()).unwrap();
    assert_eq!(text.lines().next().unwrap(), "replicate,t,y");
    assert_eq!(text.lines().count(), 1 + 30 * 2);
    let rep: Value = serde_json::from_slice(&runs[0].1).unwrap();
    assert_eq!(rep["results"].as_array().unwrap().len(), 3);
    assert!(rep["results"][0]["theory"].as_f64().unwrap() > 0.0);

    let mut out_of_range = v.clone();
    out_of_range["sheet"]["points"] = json!([[2.0, 0.5]]);
    let cfg = write_config(dir.path(), "oor.json", &out_of_range);
    assert_eq!(code(&siou(&["sheet", "--config", &cfg])), 1);
}
