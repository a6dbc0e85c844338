use std::path::Path;
use std::process::{Command, Output};

fn armijo(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_armijo")).current_dir(dir).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

#[test]
fn cosh_run_converges_and_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = armijo(
        dir.path(),
        &[
            "run",
            "--problem",
            "cosh",
            "--dim",
            "1",
            "--optimizer",
            "memory-armijo",
            "--lambda",
            "0.5",
            "--f1",
            "2",
            "--f2",
            "2",
            "--eta-init",
            "1",
            "--eps",
            "1e-3",
            "--theta0",
            "ones",
        ],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("iter,r_value,grad_norm,eta,backtracks,func_evals,grad_evals"));
    assert!(lines.count() >= 1);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["terminated_by"], "GradBelowEps");
    for key in ["iterations", "final_grad_norm", "final_r", "counters"] {
        assert!(summary.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn divergent_gd_exits_with_max_iter_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = armijo(
        dir.path(),
        &[
            "run",
            "--problem",
            "quadratic",
            "--diag",
            "1",
            "--optimizer",
            "gd",
            "--gd-eta",
            "2.5",
            "--eps",
            "1e-6",
            "--max-iter",
            "50",
            "--theta0",
            "ones",
        ],
    );
    assert_eq!(code(&out), 2);
}

#[test]
fn invalid_flags_exit_64() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&armijo(dir.path(), &["run", "--problem", "cosh", "--dim", "1", "--eps", "0"])), 64);
    assert_eq!(code(&armijo(dir.path(), &["run", "--problem", "sphere", "--dim", "1"])), 64);
    assert_eq!(code(&armijo(dir.path(), &["run", "--problem", "cosh", "--dim", "2", "--theta0", "1"])), 64);
    assert_eq!(
        code(&armijo(dir.path(), &["run", "--problem", "cosh", "--optimizer", "gd", "--dim", "1"])),
        64
    );
    assert_eq!(code(&armijo(dir.path(), &["bogus"])), 64);
}

#[test]
fn step_underflow_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = armijo(
        dir.path(),
        &[
            "run",
            "--problem",
            "cosh",
            "--dim",
            "1",
            "--theta0",
            "5",
            "--eta-init",
            "1e6",
            "--eta-max",
            "1e6",
            "--max-backtracks",
            "2",
        ],
    );
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn identical_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "run",
        "--problem",
        "rosenbrock",
        "--dim",
        "2",
        "--optimizer",
        "eia",
        "--theta0",
        "-1.2,1",
        "--eps",
        "1e-4",
    ];
    armijo(dir.path(), &args);
    let first = std::fs::read(dir.path().join("trace.csv")).unwrap();
    armijo(dir.path(), &args);
    assert_eq!(first, std::fs::read(dir.path().join("trace.csv")).unwrap());
    assert!(!first.contains(&b'\r'));
}

#[test]
fn sweep_keeps_input_order_and_respects_bound() {
    let dir = tempfile::tempdir().unwrap();
    let out =
        armijo(dir.path(), &["sweep-eps", "--problem", "cosh", "--dim", "1", "--eps-list", "1e-2,1e-1,1e-3"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let rows: Vec<Vec<&str>> = csv.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 3);
    let eps: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert_eq!(eps, [1e-2, 1e-1, 1e-3]);
    for r in &rows {
        let iterations: f64 = r[1].parse().unwrap();
        let bound: f64 = r[2].parse().unwrap();
        assert!(iterations <= bound.ceil());
    }
}

#[test]
fn sweep_rejects_empty_list_and_non_armijo() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&armijo(dir.path(), &["sweep-eps", "--problem", "cosh", "--dim", "1"])), 64);
    assert_eq!(
        code(&armijo(dir.path(), &["sweep-eps", "--problem", "cosh", "--dim", "1", "--eps-list", ""])),
        64
    );
    let gd = [
        "sweep-eps",
        "--problem",
        "cosh",
        "--dim",
        "1",
        "--optimizer",
        "gd",
        "--gd-eta",
        "0.1",
        "--eps-list",
        "0.1",
    ];
    assert_eq!(code(&armijo(dir.path(), &gd)), 64);
}

#[test]
fn eia_sweep_bound_needs_constants() {
    let dir = tempfile::tempdir().unwrap();
    let base = [
        "sweep-eps",
        "--problem",
        "quadratic",
        "--diag",
        "1,4",
        "--optimizer",
        "eia",
        "--eps-list",
        "1e-3,1e-6",
    ];
    assert_eq!(code(&armijo(dir.path(), &base)), 0);
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert!(csv.lines().skip(1).all(|l| l.split(',').nth(2) == Some("")));

    let with = [&base[..], &["--s-tilde", "0", "--phi-value", "1"]].concat();
    assert_eq!(code(&armijo(dir.path(), &with)), 0);
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let bounds: Vec<f64> =
        csv.lines().skip(1).map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
    assert!((bounds[1] / bounds[0] - 1e3).abs() < 1e-9);
}

#[test]
fn verify_single_audit() {
    let dir = tempfile::tempdir().unwrap();
    let out = armijo(dir.path(), &["verify", "--only", "audit_finite_diff"]);
    assert_eq!(code(&out), 0);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("verification.json")).unwrap())
            .unwrap();
    assert_eq!(report["pass"], true);
    let audits = report["audits"].as_array().unwrap();
    assert!(!audits.is_empty());
    assert!(audits.iter().all(|a| a["name"] == "audit_finite_diff" && a["passed"] == true));
    assert!(report["bounds"].is_array());
}

#[test]
fn verify_full_suite_reports_every_criterion() {
    let dir = tempfile::tempdir().unwrap();
    let out = armijo(dir.path(), &["verify"]);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("verification.json")).unwrap())
            .unwrap();
    let criteria = report["criteria"].as_array().unwrap();
    assert_eq!(criteria.len(), 11);
    let all_pass = criteria.iter().all(|c| c["passed"] == true);
    assert_eq!(report["pass"], all_pass);
    assert_eq!(code(&out), if all_pass { 0 } else { 1 });
}

#[test]
fn verify_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&armijo(dir.path(), &["verify", "--only", "nope"])), 64);
    let missing = dir.path().join("missing").join("v.json");
    let out = armijo(dir.path(), &["verify", "--only", "c2", "--out", missing.to_str().unwrap()]);
    assert_eq!(code(&out), 74);
}
