//! End-to-end tests of the ougauss binary: exit codes, artifact schemas,
//! config-file merging, and byte-level reproducibility across runs and
//! thread counts.

use std::process::{Command, Output};

fn ougauss(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ougauss"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

#[test]
fn kernel_at_origin_prints_golden_value() {
    let out = ougauss(&["kernel", "--n", "1", "--t", "1", "--x", "0", "--y", "0"]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    let value = report["value"].as_f64().unwrap();
    let golden = 0.7076311064263655;
    assert!(
        (value - golden).abs() <= 2e-8 * golden,
        "P_1(0,0) = {value}"
    );
    assert_eq!(report["deriv"], "value");
}

#[test]
fn transform_const_is_normalized() {
    let out = ougauss(&["transform", "--f", "CONST:1", "--t", "2", "--x", "0.3"]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    let value = report["value"].as_f64().unwrap();
    assert!((value - 1.0).abs() < 1e-6, "value = {value}");
}

#[test]
fn certify_zero_samples_is_validation_error() {
    let out = ougauss(&["certify", "--bound", "LEMMA31", "--samples", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_str(stderr(&out).trim()).unwrap();
    assert_eq!(err["error"]["kind"], "validation");
}

#[test]
fn near_diagonal_kernel_is_numerical_error() {
    let out = ougauss(&[
        "kernel", "--n", "1", "--t", "1e-7", "--x", "0.1", "--y", "0.1",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let err: serde_json::Value = serde_json::from_str(stderr(&out).trim()).unwrap();
    assert_eq!(err["error"]["kind"], "numerical");
}

#[test]
fn unknown_subcommand_exits_2() {
    let out = ougauss(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn certificates_are_byte_identical_across_runs_and_threads() {
    let args = [
        "certify",
        "--bound",
        "LOCAL_UNIFORM",
        "--samples",
        "100",
        "--x-radius",
        "2",
        "--y-radius",
        "2",
    ];
    let first = ougauss(&args);
    assert!(first.status.success(), "stderr: {}", stderr(&first));
    let second = ougauss(&args);
    let mut single_thread: Vec<&str> = args.to_vec();
    single_thread.extend_from_slice(&["--threads", "1"]);
    let third = ougauss(&single_thread);
    assert_eq!(stdout(&first), stdout(&second));
    assert_eq!(stdout(&first), stdout(&third));

    // Canonical schema: key order is pinned.
    let text = stdout(&first);
    let keys = ["bound_id", "c", "n_samples", "max_ratio", "argmax", "skipped", "stable"];
    let mut last = 0;
    for key in keys {
        let pos = text.find(&format!("\"{key}\"")).expect(key);
        assert!(pos > last, "key {key} out of canonical order");
        last = pos;
    }
}

#[test]
fn config_file_mirrors_flags_and_flags_override() {
    let dir = std::env::temp_dir().join("ougauss-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("config.json");
    std::fs::write(
        &path,
        r#"{"command":"transform","f":"COORD:1","n":1,"t":1.0,"x":[0.7]}"#,
    )
    .unwrap();
    let path = path.to_str().unwrap();

    // Command and all parameters from the file.
    let out = ougauss(&["--config", path]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    let expect = (-1.0f64).exp() * 0.7;
    assert!((report["value"].as_f64().unwrap() - expect).abs() < 1e-6);

    // Flags override file values: t = 2 halves the decay again.
    let out = ougauss(&["--config", path, "transform", "--t", "2"]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    let expect = (-2.0f64).exp() * 0.7;
    assert!((report["value"].as_f64().unwrap() - expect).abs() < 1e-6);
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = std::env::temp_dir().join("ougauss-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad-config.json");
    std::fs::write(&path, r#"{"command":"catalog","banana":1}"#).unwrap();
    let out = ougauss(&["--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_str(stderr(&out).trim()).unwrap();
    assert_eq!(err["error"]["kind"], "validation");
}

#[test]
fn kernel_sweep_emits_csv_schema() {
    let out = ougauss(&[
        "kernel", "--n", "1", "--x", "0.5", "--y", "1.0", "--t-count", "5", "--t-min", "0.1",
        "--t-max", "10",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,x1,y1,value"));
    assert_eq!(lines.count(), 5);
}

#[test]
fn seminorm_trace_csv_and_estimate_json() {
    let dir = std::env::temp_dir().join("ougauss-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let trace = dir.join("trace.csv");
    let out = ougauss(&[
        "seminorm",
        "--estimator",
        "poisson",
        "--f",
        "COORD:1",
        "--alpha",
        "0.5",
        "--t-min",
        "0.1",
        "--t-max",
        "10",
        "--t-points",
        "5",
        "--x-radius",
        "2",
        "--x-points",
        "5",
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let estimate: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    for key in ["value", "alpha", "arg_t", "arg_x", "grid"] {
        assert!(estimate.get(key).is_some(), "missing key {key}");
    }
    let csv = std::fs::read_to_string(&trace).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,x1,objective"));
    assert_eq!(lines.count(), 25);
}

#[test]
fn env_var_mirrors_threads_flag() {
    let out = Command::new(env!("CARGO_BIN_EXE_ougauss"))
        .env("OUGAUSS_THREADS", "1")
        .args(["transform", "--f", "CONST:1", "--t", "1", "--x", "0"])
        .output()
        .expect("binary runs");
    assert!(out.status.success(), "stderr: {}", stderr(&out));
}

#[test]
fn output_flag_writes_artifact_file() {
    let dir = std::env::temp_dir().join("ougauss-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("kernel.json");
    let out = ougauss(&[
        "--output",
        path.to_str().unwrap(),
        "kernel",
        "--n",
        "1",
        "--t",
        "1",
        "--x",
        "0",
        "--y",
        "0",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert!(stdout(&out).is_empty());
    let report: serde_json::Value =
        serde_json::from_str(std::fs::read_to_string(&path).unwrap().trim()).unwrap();
    assert!(report["value"].as_f64().unwrap() > 0.0);
}
