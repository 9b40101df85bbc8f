use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn isetlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isetlab"))
        .args(args)
        .env_remove("ISETLAB_BUDGET")
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("isetlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn count_example() {
    let v = json_of(&isetlab(&["count", "--n", "6", "--k", "3", "--t", "1"]));
    assert_eq!(v["schema"], "isetlab/1");
    assert_eq!(v["params"]["n"], 6);
    assert_eq!(v["result"]["count_I_At"], "15");
    assert_eq!(v["result"]["count_I_sunflower"], "6");
    assert_eq!(v["result"]["sunflower_chain_ok"], true);
}

#[test]
fn count_outside_closed_form_domain() {
    let v = json_of(&isetlab(&["count", "--n", "4", "--k", "3", "--t", "1"]));
    assert!(v["result"]["count_I_At"].is_null());
}

#[test]
fn threshold_scan_example() {
    let v = json_of(&isetlab(&["threshold", "--k", "4", "--t", "1", "--scan"]));
    assert_eq!(v["result"]["f_min"], 272);
}

#[test]
fn threshold_single_point() {
    let v = json_of(&isetlab(&[
        "threshold",
        "--k",
        "4",
        "--t",
        "1",
        "--n",
        "271",
    ]));
    assert_eq!(v["result"]["holds"], false);
    assert_eq!(v["result"]["lhs"], (252 * 271 + 4092).to_string());
    let v = json_of(&isetlab(&[
        "threshold",
        "--k",
        "4",
        "--t",
        "1",
        "--n",
        "272",
    ]));
    assert_eq!(v["result"]["holds"], true);
}

#[test]
fn threshold_regime_csv() {
    let out = isetlab(&[
        "threshold",
        "--regime",
        "const:1",
        "--k-range",
        "4..6",
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("k,t,f_min,expected_exponent,local_exponent")
    );
    assert!(lines.next().unwrap().starts_with("4,1,272,"));
    assert!(lines.next().unwrap().starts_with("5,1,517,"));
}

#[test]
fn triangle_example_as_sets() {
    let v = json_of(&isetlab(&["construct", "triangle", "--t", "1", "--n", "3"]));
    let mut sets: Vec<Vec<u64>> =
        serde_json::from_value(v["result"]["family"]["sets"].clone()).unwrap();
    sets.sort();
    assert_eq!(sets, vec![vec![1, 2], vec![1, 3], vec![2, 3]]);
}

#[test]
fn construct_sunflower_with_core() {
    let v = json_of(&isetlab(&[
        "construct",
        "sunflower",
        "--n",
        "6",
        "--k",
        "3",
        "--core",
        "2",
    ]));
    assert_eq!(v["result"]["size"], 10);
    assert_eq!(v["params"]["core"], serde_json::json!([2]));
}

#[test]
fn output_is_deterministic() {
    let args = ["verify", "--n", "5", "--k", "2", "--t", "1", "--orbits"];
    let a = isetlab(&args);
    let b = isetlab(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn verify_report_and_dump() {
    let dump = scratch("dump.jsonl");
    let v = json_of(&isetlab(&[
        "verify",
        "--n",
        "5",
        "--k",
        "2",
        "--t",
        "1",
        "--dump",
        dump.to_str().unwrap(),
    ]));
    assert_eq!(v["result"]["num_maximal"], 15);
    assert_eq!(v["result"]["max_i"], 3);
    assert_eq!(v["result"]["at_is_max"], true);
    assert_eq!(v["params"]["budget"], 5000);
    let text = std::fs::read_to_string(&dump).unwrap();
    assert_eq!(text.lines().count(), 15);
    for line in text.lines() {
        let f: Value = serde_json::from_str(line).unwrap();
        assert_eq!(f["universe"], 5);
    }
}

#[test]
fn budget_refusal_exit_code() {
    let out = isetlab(&["verify", "--n", "20", "--k", "10", "--t", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_isetlab"))
        .args(["verify", "--n", "5", "--k", "2", "--t", "1"])
        .env("ISETLAB_BUDGET", "9")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn parameter_errors_exit_one() {
    for args in [
        vec!["count", "--n", "3", "--k", "4", "--t", "1"],
        vec!["count", "--n", "3"],
        vec!["nonsense"],
        vec!["threshold", "--k", "4", "--t", "1"],
        vec!["threshold", "--k", "2", "--t", "1", "--scan"],
        vec!["construct", "at", "--n", "5"],
        vec!["audit", "--family", "/nonexistent/family.json", "--t", "1"],
    ] {
        assert_eq!(isetlab(&args).status.code(), Some(1), "{args:?}");
    }
    let out = Command::new(env!("CARGO_BIN_EXE_isetlab"))
        .args(["verify", "--n", "5", "--k", "2", "--t", "1"])
        .env("ISETLAB_BUDGET", "lots")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn malformed_family_file() {
    let path = scratch("bad.json");
    std::fs::write(&path, r#"{"universe":3,"sets":[[1,7]]}"#).unwrap();
    let out = isetlab(&["audit", "--family", path.to_str().unwrap(), "--t", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn audit_and_transversal_of_a_file() {
    let path = scratch("tri.json");
    std::fs::write(&path, r#"{"universe":5,"sets":[[1,2],[2,3],[1,3]]}"#).unwrap();
    let p = path.to_str().unwrap();
    let v = json_of(&isetlab(&["audit", "--family", p, "--t", "1"]));
    assert_eq!(v["result"]["classification"]["kind"], "triangle");
    assert_eq!(v["result"]["level_bound_ok"], true);
    let v = json_of(&isetlab(&["transversal", "--family", p, "--t", "1"]));
    assert_eq!(v["result"]["saturated"], true);
    assert_eq!(v["result"]["tau"], 2);
}

#[test]
fn output_flag_writes_file() {
    let path = scratch("count.json");
    let out = isetlab(&[
        "count",
        "--n",
        "20",
        "--k",
        "4",
        "--t",
        "1",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["result"]["count_I_At"], "517");
}

#[test]
fn help_exits_zero() {
    assert_eq!(isetlab_cli::run(["isetlab", "--help"]), 0);
}
