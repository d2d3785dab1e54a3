//! End-to-end tests of the command-line surface: artifact formats,
//! exit-status semantics, config merging, and byte-level determinism.

use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], out_dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tricomi"))
        .args(args)
        .arg("--out")
        .arg(out_dir)
        .env_remove("TRICOMI_OUT_DIR")
        .output()
        .expect("spawn tricomi")
}

fn stdout_json(output: &Output) -> serde_json::Value {
    serde_json::from_slice(&output.stdout).expect("stdout is JSON")
}

#[test]
fn kernel_check_ell_zero_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["kernel-check", "--ell", "0"], dir.path());
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("kernel-residuals.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "t,b,r,e_tt,e_rr,residual,bound,pass");
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[5], "0.0000000000000000e0", "nonzero residual row: {line}");
        assert_eq!(fields[7], "true");
    }
}

#[test]
fn solve_writes_solution_and_oracle_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &["solve", "--ell", "1", "--preset", "separable-k1", "--t", "1", "--grid", "32,32"],
        dir.path(),
    );
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("solution.csv")).unwrap();
    assert!(csv.starts_with("x,t,value\n"));
    assert_eq!(csv.lines().count(), 1 + 32 * 32);

    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("solve-summary.json")).unwrap())
            .unwrap();
    let dev = summary["max_oracle_deviation"].as_f64().unwrap();
    assert!(dev < 1e-6, "oracle deviation {dev}");
    assert!(summary["oracle_comparison"].as_array().unwrap().len() == 8);
}

#[test]
fn domains_expose_figure_caption_exponent() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["domains", "--ell", "1", "--x0", "0.5"], dir.path());
    assert!(out.status.success());
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("domains-summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["caption_exponent"].as_f64().unwrap(), 2.25);

    // the caption column follows x0 - (2/3)^(5/2) tau^(9/4)
    let csv = std::fs::read_to_string(dir.path().join("omega_phi.csv")).unwrap();
    let mut checked = 0;
    for line in csv.lines().skip(1) {
        let fields: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        let (tau, caption) = (fields[0], fields[2]);
        let expected = 0.5 - (2.0f64 / 3.0).powf(2.5) * tau.powf(2.25);
        assert!((caption - expected).abs() < 1e-12, "tau={tau}");
        checked += 1;
    }
    assert!(checked > 100);
}

#[test]
fn exit_status_reflects_tolerances() {
    let dir = tempfile::tempdir().unwrap();
    // absurd tolerance forces a UI-visible failure with exit code 1
    let out = run(
        &["compare-fd", "--ell", "1", "--grid", "32,64", "--tol", "1e-30"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    let report = stdout_json(&out);
    assert!(!report["failures"].as_array().unwrap().is_empty());

    // invalid exponent is a hard error, not a check failure
    let out = run(&["solve", "--ell", "-2"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_supplies_fields_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("run.json");
    std::fs::write(&cfg_path, r#"{ "ell": 3.0, "seed": 11, "x0": 0.25 }"#).unwrap();
    let out = run(
        &["domains", "--config", cfg_path.to_str().unwrap(), "--ell", "1"],
        dir.path(),
    );
    assert!(out.status.success());
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("domains-summary.json")).unwrap())
            .unwrap();
    // flag overrode the file's ell, file supplied x0
    assert_eq!(summary["ell"].as_f64().unwrap(), 1.0);
    assert_eq!(summary["x0"].as_f64().unwrap(), 0.25);
}

#[test]
fn identical_config_and_seed_give_byte_identical_outputs() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    for dir in [&dir_a, &dir_b] {
        let out = run(&["idcheck", "--ell", "1", "--seed", "7"], dir.path());
        assert!(out.status.success());
    }
    let a = std::fs::read(dir_a.path().join("idcheck-report.json")).unwrap();
    let b = std::fs::read(dir_b.path().join("idcheck-report.json")).unwrap();
    assert_eq!(a, b, "idcheck outputs differ between identical runs");

    // different seed changes the sampled lattice but still passes
    let dir_c = tempfile::tempdir().unwrap();
    let out = run(&["idcheck", "--ell", "1", "--seed", "8"], dir_c.path());
    assert!(out.status.success());
}

#[test]
fn k0k1_report_covers_theorem_values() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["k0k1", "--ell", "3", "--t", "1"], dir.path());
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report = stdout_json(&out);
    let names: Vec<&str> = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(names.contains(&"k0k1.initial_values"));
    assert!(names.contains(&"k0k1.initial_derivatives"));
    assert!(names.contains(&"k0k1.cauchy_vs_oracle"));
}

#[test]
fn env_var_sets_default_output_root() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_tricomi"))
        .args(["domains", "--ell", "1"])
        .env("TRICOMI_OUT_DIR", dir.path())
        .output()
        .expect("spawn tricomi");
    assert!(out.status.success());
    assert!(dir.path().join("omega.csv").exists());
}

#[test]
fn appendix_runs_for_edes_exponent() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["appendix", "--ell", "-1.3333333333333333"], dir.path());
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}
