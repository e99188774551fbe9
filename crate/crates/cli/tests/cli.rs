use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qtransfer(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qtransfer"));
    cmd.args(args).env_remove("QTRANSFER_TOL");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn read(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn fig1_only_gives_one_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = qtransfer(&["verify", "--only", "fig1", "--out", out.to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = read(&out);
    let checks = r["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 1);
    assert_eq!(checks[0]["name"], "fig1");
    assert!(checks[0]["artifact"].is_object());
    assert!(r["config"]["seed"] == 42);
}

#[test]
fn tiny_tolerance_fails_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let args = ["verify", "--only", "cbr,commute", "--out", out.to_str().unwrap()];
    let o = qtransfer(&args, &[("QTRANSFER_TOL", "1e-30")]);
    assert_eq!(o.status.code(), Some(1));
    let r = read(&out);
    assert_eq!(r["pass"], false);
    let failing = r["checks"][0]["reports"].as_array().unwrap().iter().filter(|x| x["pass"] == false).count();
    assert!(failing > 0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("FAIL cbr"));
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"n_max": 9}"#).unwrap();
    assert_eq!(qtransfer(&["verify", "--config", bad.to_str().unwrap()], &[]).status.code(), Some(2));
    std::fs::write(&bad, r#"{"unknown_field": 1}"#).unwrap();
    assert_eq!(qtransfer(&["verify", "--config", bad.to_str().unwrap()], &[]).status.code(), Some(2));
    assert_eq!(qtransfer(&["verify", "--only", "nope"], &[]).status.code(), Some(2));
    assert_eq!(qtransfer(&["verify", "--config", "/nonexistent.json"], &[]).status.code(), Some(2));
    assert_eq!(qtransfer(&["frobnicate"], &[]).status.code(), Some(2));
}

#[test]
fn explicit_context_is_embedded_and_replayable() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(
        &cfg,
        r#"{"seed": 3, "ranks": [2], "sites": [1], "contexts": 1,
            "inhomogeneities": [[1.5, 0.3]], "twist": {"diagonal": [[1.1, 0.2], [0.6, -0.7], [1.3, 0.0]]},
            "u": [0.37, 0.61], "checks": ["cbr", "newton"]}"#,
    )
    .unwrap();
    let out = dir.path().join("r.json");
    let o = qtransfer(&["verify", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = read(&out);
    let ctx = &r["checks"][0]["contexts"][0];
    assert_eq!(ctx["u"], serde_json::json!([0.37, 0.61]));
    assert_eq!(ctx["a"], serde_json::json!([[1.5, 0.3]]));
    assert_eq!(ctx["g"][1][1], serde_json::json!([0.6, -0.7]));
}

#[test]
fn seed_flag_changes_contexts_but_not_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for (seed, path) in [("1", &a), ("2", &b)] {
        let o = qtransfer(&["verify", "--only", "dual", "--seed", seed, "--out", path.to_str().unwrap()], &[]);
        assert_eq!(o.status.code(), Some(0));
    }
    let (a, b) = (read(&a), read(&b));
    assert_ne!(a["checks"][0]["contexts"], b["checks"][0]["contexts"]);
    assert_eq!(a["config"]["seed"], 1);
}

#[test]
fn pattern_renders_the_grid() {
    let o = qtransfer(&["pattern", "--box", "-1,2,-1,2"], &[]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    // α_2 = 2 on top, then 1, 0, -1
    assert_eq!(rows[0], "  2 |  #  #  .  #");
    assert_eq!(rows[1], "  1 |  #  .  #  #");
    assert_eq!(rows[2], "  0 |  .  #  #  #");
    assert_eq!(rows[3], " -1 |  .  .  .  .");
    assert_eq!(rows[5], "      -1  0  1  2");

    let o = qtransfer(&["pattern", "--box", "0,2,0,2", "--json", "--n-dim", "3"], &[]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["grid"]["mismatches"], 0);
    // (1, 2) vanishes, (2, 2) does not
    assert_eq!(v["grid"]["computed"][1][2], false);
    assert_eq!(v["grid"]["computed"][2][2], true);

    assert_eq!(qtransfer(&["pattern", "--box", "1,2,3"], &[]).status.code(), Some(2));
}

#[test]
fn operator_dump_is_row_major_pairs() {
    let o = qtransfer(&["operator", "--lambda", "2,1", "--n-dim", "2", "--sites", "2"], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["dim"], 4);
    let entries = v["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 16);
    assert!(entries.iter().all(|e| e.as_array().unwrap().len() == 2));

    // trivial label gives the identity
    let o = qtransfer(&["operator", "--lambda", "", "--sites", "1"], &[]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let flat: Vec<f64> = v["entries"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|e| e.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()))
        .collect();
    assert_eq!(flat, vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0]);

    assert_eq!(qtransfer(&["operator", "--lambda", "1,2"], &[]).status.code(), Some(2));
}

#[test]
fn tau_file_is_checked() {
    let dir = tempfile::tempdir().unwrap();
    // s_(2) + s_(1,1) breaks the Plücker relation c_() c_(2,2) - c_(1) c_(2,1) + c_(2) c_(1,1) = 0
    let good = dir.path().join("good.json");
    std::fs::write(&good, r#"{"2,1": [2.0, -1.0]}"#).unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"[[[2], [1.0, 0.0]], [[1, 1], [1.0, 0.0]]]"#).unwrap();
    for (path, code) in [(&good, 0), (&bad, 1)] {
        let cfg = dir.path().join("c.json");
        std::fs::write(
            &cfg,
            format!(r#"{{"checks": ["bilinear"], "tau_file": {:?}}}"#, path.to_str().unwrap()),
        )
        .unwrap();
        let out = dir.path().join("r.json");
        let o = qtransfer(&["verify", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()], &[]);
        assert_eq!(o.status.code(), Some(code), "{}", String::from_utf8_lossy(&o.stderr));
    }
}
