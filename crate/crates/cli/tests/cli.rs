//! End-to-end tests of the `sg2` binary: exit codes, file formats,
//! config-file precedence, and byte-level determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sg2"))
}

fn work_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("sg2-cli-{name}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not json ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

#[test]
fn eval_writes_grid_and_metadata() {
    let dir = work_dir("eval");
    let out_path = dir.join("field.csv");
    let out = bin()
        .args([
            "eval",
            "--family",
            "kink-a",
            "--r",
            "0.03125",
            "--eta",
            "0.5",
            "--grid",
            "21x21",
            "--x-max",
            "1",
            "--t-max",
            "1",
            "--out",
        ])
        .arg(&out_path)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(&out_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x,t,u"));
    assert_eq!(csv.lines().count(), 1 + 21 * 21);
    assert!(!csv.contains('\r'), "CSV must use LF endings");
    let meta = stdout_json(&out);
    assert_eq!(meta["family"], "kink-a");
    assert_eq!(meta["c"], 64.0);
    let residual = meta["residual"]["max"].as_f64().unwrap();
    assert!(residual < 1e-4, "residual {residual:.3e}");
    assert_eq!(meta["grid"]["nx"], 21);
}

#[test]
fn eval_rejects_invalid_params_with_exit_2() {
    let out = bin()
        .args([
            "eval", "--family", "breather-b", "--phi1", "2.0", "--phi2", "1.0",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("ParamOutOfRange"), "stderr: {err}");
}

#[test]
fn eval_missing_family_is_usage_error() {
    let out = bin().args(["eval", "--r", "0.03"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("MissingParameter"), "stderr: {err}");
}

#[test]
fn eval_calibration_records_the_field_scale() {
    let dir = work_dir("calibrate");
    let out_path = dir.join("field.csv");
    let out = bin()
        .args([
            "eval",
            "--family",
            "breather-b",
            "--phi1",
            "1.0",
            "--phi2",
            "2.0",
            "--grid",
            "11x11",
            "--x-max",
            "0.5",
            "--t-max",
            "0.5",
            "--C",
            "calibrate",
            "--out",
        ])
        .arg(&out_path)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let meta = stdout_json(&out);
    let c_star = meta["calibration"]["c_star"].as_f64().unwrap();
    assert!((c_star - 64.0).abs() < 0.01, "calibrated scale {c_star}");
    let resid = meta["calibration"]["residual"].as_f64().unwrap();
    assert!(resid < 1e-6, "calibration residual {resid:.3e}");
    assert_eq!(meta["c"], meta["calibration"]["c_star"]);
}

#[test]
fn eval_outputs_are_byte_identical_across_runs() {
    let dir = work_dir("determinism");
    let args = |path: &PathBuf| {
        let mut cmd = bin();
        cmd.args([
            "eval",
            "--family",
            "breather-a",
            "--r",
            "0.03125",
            "--phi",
            "1.0",
            "--grid",
            "9x9",
            "--x-max",
            "1",
            "--t-max",
            "1",
            "--seed",
            "42",
            "--out",
        ])
        .arg(path);
        cmd
    };
    let p1 = dir.join("run1.csv");
    let p2 = dir.join("run2.csv");
    let o1 = args(&p1).output().unwrap();
    let o2 = args(&p2).output().unwrap();
    assert!(o1.status.success() && o2.status.success());
    assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
    // Metadata differs only in the output path; normalize it before diffing.
    let s1 = String::from_utf8(o1.stdout).unwrap().replace("run1.csv", "X");
    let s2 = String::from_utf8(o2.stdout).unwrap().replace("run2.csv", "X");
    assert_eq!(s1, s2);
}

#[test]
fn eval_json_format_round_trips() {
    let dir = work_dir("json");
    let out_path = dir.join("field.json");
    let out = bin()
        .args([
            "eval",
            "--family",
            "kink-b",
            "--eta1",
            "1.0",
            "--eta2",
            "0.4",
            "--grid",
            "7x7",
            "--x-max",
            "1",
            "--t-max",
            "1",
            "--format",
            "json",
            "--out",
        ])
        .arg(&out_path)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let field: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(field["xs"].as_array().unwrap().len(), 7);
    assert_eq!(field["values"].as_array().unwrap().len(), 49);
}

#[test]
fn periods_reports_pass_for_both_kink_families() {
    let out = bin()
        .args([
            "periods", "--case", "a", "--kind", "kink", "--r", "0.03125", "--eta", "0.5",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let rep = stdout_json(&out);
    assert_eq!(rep["pass"], true);
    assert!(rep["max_residual"].as_f64().unwrap() < 1e-8);
    for v in rep["relations"]["standard"].as_array().unwrap() {
        assert!(v.as_f64().unwrap() < 1e-8);
    }

    let out = bin()
        .args([
            "periods", "--case", "b", "--kind", "kink", "--eta1", "1.0", "--eta2", "0.4",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let rep = stdout_json(&out);
    assert_eq!(rep["pass"], true);
    for v in rep["relations"]["nested"].as_array().unwrap() {
        assert!(v.as_f64().unwrap() < 1e-8);
    }
}

#[test]
fn periods_breather_reports_reduced_defects_only() {
    let out = bin()
        .args([
            "periods", "--case", "b", "--kind", "breather", "--phi1", "0.9", "--phi2", "2.0",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let rep = stdout_json(&out);
    assert_eq!(rep["pass"], true);
    assert!(rep["relations"].is_null());
    for v in rep["reduced_defects"].as_array().unwrap() {
        assert!(v.as_f64().unwrap() < 1e-8);
    }
}

#[test]
fn periods_degenerate_input_is_exit_2() {
    let out = bin()
        .args([
            "periods", "--case", "a", "--kind", "kink", "--r", "0.03125", "--eta", "0",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("DegenerateSpectrum"), "stderr: {err}");
}

#[test]
fn verify_filter_selects_suites() {
    let out = bin()
        .args(["verify", "--filter", "basis-change", "--seed", "7"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rep = stdout_json(&out);
    assert_eq!(rep["pass"], true);
    assert_eq!(rep["seed"], 7);
    let suites = rep["suites"].as_array().unwrap();
    assert_eq!(suites.len(), 1);
    assert_eq!(suites[0]["name"], "basis-change");

    let out = bin()
        .args(["verify", "--filter", "no-such-suite"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("UnknownSuite"));
}

#[test]
fn verify_is_deterministic_for_a_fixed_seed() {
    let run = || {
        bin()
            .args(["verify", "--filter", "characteristic", "--seed", "11"])
            .output()
            .unwrap()
    };
    let a = run();
    let b = run();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn floquet_scan_free_matches_the_closed_form() {
    let out = bin()
        .args(["floquet-scan", "--potential", "free", "--n", "6"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("re_e,im_e,re_delta,im_delta,defect"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 6);
    for row in rows {
        let cols: Vec<f64> = row.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cols.len(), 5);
        assert!(cols[4] < 1e-8, "closed-form defect {:.3e}", cols[4]);
    }
}

#[test]
fn floquet_scan_even_potential_has_small_symmetry_defect() {
    let dir = work_dir("scan");
    let out_path = dir.join("scan.csv");
    let out = bin()
        .args([
            "floquet-scan",
            "--potential",
            "even",
            "--a",
            "0.9",
            "--l",
            "3.0",
            "--n",
            "8",
            "--out",
        ])
        .arg(&out_path)
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = std::fs::read_to_string(&out_path).unwrap();
    for row in text.lines().skip(1) {
        let cols: Vec<f64> = row.split(',').map(|c| c.parse().unwrap()).collect();
        assert!(cols[4] < 1e-6, "symmetry defect {:.3e}", cols[4]);
    }
}

#[test]
fn floquet_scan_empty_grid_is_exit_2() {
    let out = bin().args(["floquet-scan", "--n", "0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("EmptyGrid"));
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = work_dir("config");
    let cfg_path = dir.join("run.cfg");
    std::fs::write(
        &cfg_path,
        "# spectrum under study\nfamily = kink-a\nr = 0.03125\neta = 0.9\ngrid = 7x7\nx_max = 1\nt_max = 1\n",
    )
    .unwrap();
    let out_path = dir.join("field.csv");
    let out = bin()
        .args(["eval", "--config"])
        .arg(&cfg_path)
        .args(["--eta", "0.5", "--out"])
        .arg(&out_path)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let meta = stdout_json(&out);
    // The flag wins over the config entry.
    assert_eq!(meta["curve"]["params"]["eta"], 0.5);
    assert_eq!(meta["grid"]["nx"], 7);
}

#[test]
fn config_file_unknown_key_is_exit_2() {
    let dir = work_dir("badconfig");
    let cfg_path = dir.join("bad.cfg");
    std::fs::write(&cfg_path, "famly = kink-a\n").unwrap();
    let out = bin().args(["eval", "--config"]).arg(&cfg_path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ConfigUnknownKey"));
}

#[test]
fn unknown_subcommand_is_exit_2() {
    let out = bin().arg("frobnicate").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
