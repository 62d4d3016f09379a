use std::process::{Command, Output};

fn frozenrank(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_frozenrank"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn analytic_writes_the_curve() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("curve.csv");
    let out = frozenrank(&[
        "analytic",
        "--d-min",
        "1",
        "--d-max",
        "3",
        "--step",
        "1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 4);
    assert!(rows[0].starts_with("d,alpha_star_lo,alpha_zero,alpha_star_hi,min_R"));
    let min_r_at_3: f64 = rows[3].split(',').nth(4).unwrap().parse().unwrap();
    assert!((min_r_at_3 - 0.927687457885459).abs() < 1e-9);
}

#[test]
fn simulate_is_deterministic() {
    let args = [
        "simulate", "--n", "200", "--d", "3", "--trials", "5", "--seed", "11",
    ];
    let a = frozenrank(&args);
    let b = frozenrank(&[&args[..], &["--workers", "2"]].concat());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
    assert_eq!(stdout(&a).lines().count(), 7);
}

#[test]
fn simulate_from_config_with_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    let csv = dir.path().join("out.csv");
    std::fs::write(
        &cfg,
        r#"{"n": 100, "d": 2.0, "field": "Fp:3", "template": "random", "trials": 3, "master_seed": 4}"#,
    )
    .unwrap();
    let out = frozenrank(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let summary: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(summary["fields"][0]["field"], "Fp:3/random");
    assert_eq!(summary["fields"][0]["trials"], 3);
    assert!(std::fs::read_to_string(&csv)
        .unwrap()
        .starts_with("#frozenrank-v1\n"));
}

#[test]
fn unknown_config_keys_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"n": 10, "d": 1.0, "field": "F2", "template": "allones", "trials": 1, "master_seed": 0, "bogus": 1}"#,
    )
    .unwrap();
    assert_eq!(
        frozenrank(&["simulate", "--config", cfg.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn census_reports_residuals() {
    let dir = tempfile::tempdir().unwrap();
    let summary = dir.path().join("s.json");
    let out = frozenrank(&[
        "census",
        "--n",
        "80",
        "--d",
        "2",
        "--P",
        "4",
        "--trials",
        "3",
        "--summary",
        summary.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = stdout(&out);
    assert_eq!(csv.lines().count(), 5);
    let s: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&summary).unwrap()).unwrap();
    assert_eq!(s["census"]["identity_failures"], 0);
    assert!(s["census"]["mean_residual_y"].is_number());
}

#[test]
fn census_over_the_cap_is_a_resource_error() {
    let out = frozenrank(&["census", "--n", "1000", "--d", "2", "--P", "8"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn ks_on_a_graph_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p3.graph");
    std::fs::write(&path, "3 2 F2\n0 1 1\n1 2 1\n").unwrap();
    let out = frozenrank(&["ks", "--graph", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["ks_isolated"], 1);
    assert_eq!(v["ks_core_size"], 0);
    assert_eq!(v["nullity_invariant"], true);
}

#[test]
fn ks_on_random_graphs() {
    let out = frozenrank(&[
        "ks", "--n", "120", "--d", "3", "--trials", "4", "--seed", "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let trials = v.as_array().unwrap();
    assert_eq!(trials.len(), 4);
    assert!(trials.iter().all(|t| t["nullity_invariant"] == true));
}

#[test]
fn classify_a_matrix_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.mat");
    std::fs::write(
        &path,
        "# path on three vertices\n3 3 Fp:3\n0 1 0\n1 0 1\n0 1 0\n",
    )
    .unwrap();
    let out = frozenrank(&["classify", "--matrix", path.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["rank"], 2);
    assert_eq!(v["frozen"], serde_json::json!([1]));
    assert_eq!(v["types"].as_array().unwrap().len(), 3);
}

#[test]
fn verify_suites() {
    let out = frozenrank(&["verify", "--suite", "analytic"]);
    assert_eq!(out.status.code(), Some(0));
    let checks: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(checks
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["passed"] == true));
    assert_eq!(
        frozenrank(&["verify", "--suite", "nope"]).status.code(),
        Some(2)
    );
}

#[test]
fn usage_and_io_errors() {
    assert_eq!(frozenrank(&["simulate", "--n", "5"]).status.code(), Some(2));
    assert_eq!(
        frozenrank(&["simulate", "--n", "5", "--d", "1", "--field", "F4"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(frozenrank(&["frobnicate"]).status.code(), Some(2));
    let out = frozenrank(&["classify", "--matrix", "/nonexistent/a.mat"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/a.mat"));
    assert_eq!(frozenrank(&["--help"]).status.code(), Some(0));
}
