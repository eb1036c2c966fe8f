use std::process::{Command, Output};

use serde_json::Value;

fn lipexp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lipexp")).args(args).env_remove("LIPEXP_THREADS").output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("bad json ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn metrics_report_is_deterministic() {
    let args = ["metrics", "--f", "cat", "--g", "cat-affine:0.01,0", "--pairs", "5000", "--points", "1000", "--seed", "1"];
    let a = lipexp(&args);
    let b = lipexp(&args);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["schema"], "lipexp-report/1");
    assert_eq!(v["config"]["seed"], 1);
    assert_eq!(v["config"]["pairs"], 5000);
    let r = &v["result"];
    for key in ["d_c0", "d_w", "d_l", "d_w_prime_fwd", "d_l_prime_inv"] {
        assert!(!r[key].is_null(), "missing {key}");
    }
    assert!(r["d_c0"]["forward"]["witness"].is_object());
    assert!((r["d_c0"]["forward"]["value"].as_f64().unwrap() - 0.01).abs() < 1e-12);
}

#[test]
fn spaces_must_agree() {
    let out = lipexp(&["metrics", "--f", "cat", "--g", "shift"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("different spaces"), "{}", stderr(&out));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["metrics", "--f", "cat"][..],
        &["metrics", "--f", "cat", "--g", "nope"],
        &["conjugacy"],
        &["certify", "--lambda", "1.5", "--lambda-prime", "1.5"],
        &["shadow", "--bogus"],
        &["counterexample", "--eps", "1.5"],
        &["metrics", "--f", "cat", "--g", "cat", "--format", "csv"],
    ] {
        let out = lipexp(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", stderr(&out));
    }
    let out = Command::new(env!("CARGO_BIN_EXE_lipexp")).args(["shadow", "--orbits", "2"]).env("LIPEXP_THREADS", "zero").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn certify_shift_and_identity() {
    let out = lipexp(&["certify", "--f", "shift", "--g", "walters:7:3:4", "--lambda", "2", "--lambda-prime", "1.5"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["status"], "pass");
    assert_eq!(v["result"]["verification"]["violations"], 0);

    let out = lipexp(&["certify", "--f", "id", "--g", "shift"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["status"], "fail");
    assert_eq!(v["result"]["check"]["verdict"], "counterexample");
    assert_eq!(v["result"]["check"]["ratio"], 1.0);
}

#[test]
fn conjugacy_matches_affine_offset() {
    let out = lipexp(&["conjugacy", "--g", "cat-affine:0.01,0", "--grid", "64"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    let r = &v["result"];
    assert!(r["residual"].as_f64().unwrap() < 1e-6);
    assert!(r["affine"]["max_error"].as_f64().unwrap() < 1e-6);
    // (A − I)⁻¹ (0.01, 0) = (0, 0.01)
    let w = &r["affine"]["expected_offset"];
    assert!(w[0].as_f64().unwrap().abs() < 1e-15 && (w[1].as_f64().unwrap() - 0.01).abs() < 1e-15);

    let out = lipexp(&["conjugacy", "--g", "cat", "--grid", "8", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("# status: pass"));
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "x1,x2,h1,h2,displacement");
    assert_eq!(rows.len(), 65);
    assert!(rows[1..].iter().all(|r| r.ends_with(",0")), "{}", rows[1]);

    let out = lipexp(&["conjugacy", "--g", "cat-affine:0.3,0.3", "--grid", "4"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("grid point (0, 0)"), "{}", stderr(&out));
}

#[test]
fn counterexample_table() {
    let out = lipexp(&["counterexample", "--eps", "0.5,0.2,0.1", "--pairs", "20000"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().filter(|l| !l.starts_with('#')).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows[0], ["epsilon", "dw_prime_bound", "measured", "c1_gap"]);
    assert_eq!(rows.len(), 4);
    for row in &rows[1..] {
        assert_eq!(row[3], "2");
        assert!(row[2].parse::<f64>().unwrap() <= row[1].parse::<f64>().unwrap());
    }
}

#[test]
fn cone_stress_family() {
    let out = lipexp(&["cone", "--n", "3", "--family", "stress50"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    let min = v["result"]["certificate"]["stress_min_product"].as_f64().unwrap();
    assert!(min >= 1.49, "{min}");
    assert_eq!(v["result"]["reports"].as_array().unwrap().len(), 50);

    let out = lipexp(&["cone", "--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["status"], "vacuous");
}

#[test]
fn config_file_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "[shadow]\norbits = 3\nwindow = 30\ndelta = 0.01\n").unwrap();
    let report = dir.path().join("out.json");
    let out = lipexp(&["shadow", "--config", cfg.to_str().unwrap(), "--delta", "0.002", "--output", report.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["config"]["orbits"], 3);
    assert_eq!(v["config"]["window"], 30);
    assert_eq!(v["config"]["delta"], 0.002);
    assert_eq!(v["result"]["rows"].as_array().unwrap().len(), 3);

    std::fs::write(&cfg, "[shadow]\norbitz = 3\n").unwrap();
    assert_eq!(lipexp(&["shadow", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn interval_command() {
    let out = lipexp(&["interval", "--g", "interval:poly:0.1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    let d = &v["result"]["derivative"];
    assert!((d["derivative_gap"].as_f64().unwrap() - 0.1).abs() < 1e-9);
    assert!((d["dw_prime"].as_f64().unwrap() - 0.1).abs() < 1e-9);
    assert_eq!(v["result"]["dc1"]["jacobian_bound_holds"], true);
}
