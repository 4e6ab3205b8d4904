//! Drives the installed binary end to end: exit codes, output bytes, and
//! the cell-cap environment knob.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::atomic::{AtomicUsize, Ordering};

fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn scratch_file(tag: &str) -> PathBuf {
    static COUNTER: AtomicUsize = AtomicUsize::new(0);
    let n = COUNTER.fetch_add(1, Ordering::Relaxed);
    std::env::temp_dir().join(format!(
        "linkpack-cli-{}-{}-{}",
        std::process::id(),
        n,
        tag
    ))
}

fn run_with_env(args: &[&str], envs: &[(&str, &str)]) -> (i32, String, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_linkpack"));
    cmd.args(args).current_dir(workspace_root());
    for (key, value) in envs {
        cmd.env(key, value);
    }
    let out = cmd.output().expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).expect("stdout is utf-8"),
        String::from_utf8(out.stderr).expect("stderr is utf-8"),
    )
}

fn run(args: &[&str]) -> (i32, String, String) {
    run_with_env(args, &[])
}

#[test]
fn certify_of_the_shipped_link_reports_eq1() {
    let (code, stdout, stderr) = run(&["certify"]);
    assert_eq!(code, 0, "stderr: {stderr}");
    let parsed: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(parsed["eq1"], serde_json::json!(1));
}

#[test]
fn pack_then_verify_round_trips_and_strict_bound_is_a_finding() {
    let packing = scratch_file("packing.json");
    let packing_text = packing.to_str().unwrap();
    let (code, _, stderr) = run(&["--out", packing_text, "pack", "--epsilon", "0.05"]);
    assert_eq!(code, 0, "stderr: {stderr}");

    let (code, stdout, _) = run(&["verify", "--input", packing_text, "--epsilon", "0.05"]);
    assert_eq!(code, 0);
    let report: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(report["pass"], serde_json::json!(true));

    // The same file cannot promise a four-times-larger separation.
    let (code, stdout, _) = run(&["verify", "--input", packing_text, "--epsilon", "0.2"]);
    assert_eq!(code, 2);
    let report: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(report["pass"], serde_json::json!(false));

    std::fs::remove_file(&packing).ok();
}

#[test]
fn usage_problems_exit_one_and_help_exits_zero() {
    let (code, _, stderr) = run(&["no-such-command"]);
    assert_eq!(code, 1);
    assert!(!stderr.is_empty());

    let (code, _, stderr) = run(&["pack"]);
    assert_eq!(code, 1, "missing required flag");
    assert!(stderr.contains("epsilon"));

    let (code, _, _) = run(&["--help"]);
    assert_eq!(code, 0);
    let (code, _, _) = run(&["--version"]);
    assert_eq!(code, 0);
}

#[test]
fn repeat_runs_emit_identical_bytes() {
    for args in [
        vec!["demo", "--seed", "7"],
        vec!["certify"],
        vec!["density", "--epsilons", "0.05,0.025,0.0125"],
    ] {
        let (code_a, out_a, _) = run(&args);
        let (code_b, out_b, _) = run(&args);
        assert_eq!(code_a, 0);
        assert_eq!(code_b, 0);
        assert_eq!(out_a, out_b, "{args:?} drifted between runs");
    }
}

#[test]
fn cell_cap_variable_limits_grid_size() {
    let (code, _, stderr) = run_with_env(&["certify"], &[("LINKPACK_MAX_CELLS", "100")]);
    assert_eq!(code, 1);
    assert!(stderr.contains("cells"), "stderr: {stderr}");

    let (code, _, stderr) = run_with_env(&["certify"], &[("LINKPACK_MAX_CELLS", "10000000")]);
    assert_eq!(code, 0, "stderr: {stderr}");

    let (code, _, stderr) = run_with_env(&["certify"], &[("LINKPACK_MAX_CELLS", "junk")]);
    assert_eq!(code, 1);
    assert!(!stderr.is_empty());
}

#[test]
fn density_emits_csv_on_request() {
    let (code, stdout, _) = run(&[
        "--format",
        "csv",
        "density",
        "--epsilons",
        "0.05,0.025,0.0125",
    ]);
    assert_eq!(code, 0);
    assert!(stdout.starts_with("epsilon,generation,count,min_pair_distance"));
    assert_eq!(stdout.lines().count(), 4);

    let table = scratch_file("density.csv");
    let (code, stdout, _) = run(&[
        "density",
        "--epsilons",
        "0.05,0.025,0.0125",
        "--csv",
        table.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let parsed: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    let exponent = parsed["exponent"].as_f64().unwrap();
    assert!((exponent - 3.0).abs() < 1e-9);
    let written = std::fs::read_to_string(&table).unwrap();
    assert_eq!(written.lines().count(), 4);
    std::fs::remove_file(&table).ok();
}

#[test]
fn csv_format_is_rejected_outside_density() {
    let (code, _, stderr) = run(&["--format", "csv", "burnside", "--m", "2"]);
    assert_eq!(code, 1);
    assert!(!stderr.is_empty());
}
