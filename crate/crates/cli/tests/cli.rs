use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn qrsnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qrsnet")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn success_prints_exact_value() {
    let out = qrsnet(&["success", data("two_channel_d7.json").to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    let value: f64 = text.trim().strip_prefix("exact ").unwrap().parse().unwrap();
    assert!((value - 0.995028).abs() < 1e-6, "{text}");
}

#[test]
fn monte_carlo_output_is_reproducible() {
    let path = data("three_channel_d5.json");
    let args = ["success", path.to_str().unwrap(), "--mc", "20000", "--seed", "11"];
    let (a, b) = (qrsnet(&args), qrsnet(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).lines().any(|l| l.starts_with("mc ")));
    let other = qrsnet(&["success", path.to_str().unwrap(), "--mc", "20000", "--seed", "12"]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn invalid_configuration_exits_two_with_reason() {
    let out = qrsnet(&["success", data("invalid_qubit_count.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("qudit 2 receives 2 qubits, expected 3"), "{err}");
}

#[test]
fn unparsable_arguments_exit_two() {
    assert_eq!(qrsnet(&["sweep", "--d", "4", "--single"]).status.code(), Some(2));
    assert_eq!(qrsnet(&["sweep", "--d", "5", "--single", "--grid", "bad"]).status.code(), Some(2));
}

#[test]
fn unreadable_input_exits_one() {
    assert_eq!(qrsnet(&["success", "/nonexistent/config.json"]).status.code(), Some(1));
}

#[test]
fn empty_curve_exits_three() {
    let out = qrsnet(&["sweep", "--d", "5", "--n", "1", "--grid", "0.1:0.2:0.1"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn sweep_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("curve.csv");
    let summary = dir.path().join("summary.json");
    let out = qrsnet(&[
        "sweep",
        "--layout",
        "six-photon",
        "--grid",
        "0.9:0.95:0.01",
        "--out",
        csv.to_str().unwrap(),
        "--summary",
        summary.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "p2,p1");
    assert_eq!(rows.len(), 7);
    let p1: Vec<f64> = rows[1..].iter().map(|r| r.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!(p1.windows(2).all(|w| w[1] <= w[0]));
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(&summary).unwrap()).unwrap();
    assert_eq!(report["points"], 6);
    assert_eq!(report["monotone"], true);
}

#[test]
fn allocate_reports_balanced_split() {
    let out = qrsnet(&["allocate", data("three_channel_allocation.json").to_str().unwrap()]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["allocation"]["code"]["d"], 5);
    assert_eq!(v["allocation"]["split"], serde_json::json!([2, 2, 1]));
    let singles: Vec<u64> = v["single_channel"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["code"]["d"].as_u64().unwrap())
        .collect();
    assert_eq!(singles, vec![3, 5, 7]);
}

#[test]
fn unreachable_allocation_exits_four() {
    let path = data("three_channel_allocation.json");
    let out = qrsnet(&["allocate", path.to_str().unwrap(), "--target", "0.9999999"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn verify_circuits_passes_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = qrsnet(&["verify-circuits", "--seed", "5", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    let checks = report["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    assert!(checks.iter().all(|c| c["passed"] == true));
}

#[test]
fn manifest_records_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("manifest.json");
    let config = data("six_photon.json");
    let out = qrsnet(&["--manifest", path.to_str().unwrap(), "success", config.to_str().unwrap()]);
    assert!(out.status.success());
    let manifest: serde_json::Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(manifest["command"], "success");
}

#[test]
fn version_names_schema() {
    let out = qrsnet(&["--version"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("config schema"));
}
