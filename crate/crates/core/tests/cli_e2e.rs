//! End-to-end tests of the `specbound` binary: exit codes, file outputs,
//! schema conformance, determinism.

mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use common::schema::{shipped_dir, SchemaSet};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_specbound")
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("specbound-e2e-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn validate_schema(file: &Path, schema: &str) {
    let set = SchemaSet::load(&shipped_dir());
    let value: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(file).unwrap()).unwrap();
    set.validate(schema, &value)
        .unwrap_or_else(|e| panic!("{} violates {schema}: {e}", file.display()));
}

#[test]
fn estimate_flat_lags_gives_constant_density() {
    let dir = temp_dir("flat");
    let out = run(&[
        "estimate",
        "--lags",
        "1,0",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
    let csv = std::fs::read_to_string(dir.join("density.csv")).unwrap();
    for line in csv.lines().filter(|l| !l.starts_with('#') && *l != "theta,phi") {
        let phi: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!((phi - 1.0).abs() < 1e-8, "{line}");
    }
    validate_schema(&dir.join("estimate.json"), "estimate_summary.schema.json");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn estimate_ar1_lags_peaks_at_zero() {
    let dir = temp_dir("ar1");
    let out = run(&[
        "estimate",
        "--lags",
        "1.3333,0.6667",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
    let csv = std::fs::read_to_string(dir.join("density.csv")).unwrap();
    let mut max_phi = f64::NEG_INFINITY;
    let mut arg_theta = 0.0;
    for line in csv.lines().filter(|l| !l.starts_with('#') && *l != "theta,phi") {
        let mut fields = line.split(',');
        let theta: f64 = fields.next().unwrap().parse().unwrap();
        let phi: f64 = fields.next().unwrap().parse().unwrap();
        if phi > max_phi {
            max_phi = phi;
            arg_theta = theta;
        }
    }
    assert!(arg_theta.abs() < 0.01, "peak at {arg_theta}");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn non_pd_lags_exit_2_with_json_error() {
    let dir = temp_dir("nonpd");
    let out = run(&[
        "estimate",
        "--lags",
        "1,2",
        "--out",
        dir.to_str().unwrap(),
        "--json-errors",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let payload: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(payload["exit_code"], 2);
    let kind = payload["error"]["kind"].as_str().unwrap();
    assert!(kind == "Invalid" || kind == "ToeplitzNotPd", "{kind}");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn maxent_flat_window() {
    let dir = temp_dir("maxent");
    let out = run(&[
        "maxent",
        "--lags",
        "1,0",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
    let csv = std::fs::read_to_string(dir.join("density.csv")).unwrap();
    for line in csv.lines().filter(|l| !l.starts_with('#') && *l != "theta,phi") {
        let phi: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!((phi - 1.0).abs() < 1e-8);
    }
    validate_schema(&dir.join("maxent.json"), "maxent_summary.schema.json");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn bounds_noise_white_on_white() {
    let dir = temp_dir("bounds");
    let config = write_config(
        &dir,
        "config.json",
        r#"{
            "grid_size": 1024,
            "bounds": {
                "kind": "noise",
                "clean_lags": [1.0, 0.0],
                "noise_lags": [0.2, 0.0]
            }
        }"#,
    );
    let out = run(&[
        "bounds",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("bound_report.json")).unwrap())
            .unwrap();
    let term2 = report["terms"]
        .as_array()
        .unwrap()
        .iter()
        .find(|t| t["name"] == "maxent_shift_tv")
        .unwrap()["value"]
        .as_f64()
        .unwrap();
    assert!((term2 - 2.0 * std::f64::consts::PI * 0.2).abs() < 1e-4);
    validate_schema(&dir.join("bound_report.json"), "bound_report.schema.json");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn bounds_finite_sample_with_cantelli_assessment() {
    let dir = temp_dir("fsbounds");
    let config = write_config(
        &dir,
        "config.json",
        r#"{
            "grid_size": 1024,
            "bounds": {
                "kind": "finite_sample",
                "clean_lags": [1.3333333333333333, 0.6666666666666666, 0.3333333333333333],
                "delta": 0.05,
                "n_samples": 10000,
                "model": {"kind": "ar", "coeffs": [0.5], "innovation_variance": 1.0},
                "assessment": "cantelli"
            }
        }"#,
    );
    let out = run(&[
        "bounds",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("bound_report.json")).unwrap())
            .unwrap();
    assert_eq!(report["kind"], "FiniteSampleTvUpper");
    let level = report["probability_level"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&level));
    assert_eq!(
        report["assessment"]["per_lag"][0]["method"],
        "MomentCantelli"
    );
    validate_schema(&dir.join("bound_report.json"), "bound_report.schema.json");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn bounds_kl_lower_flags_trivial() {
    let dir = temp_dir("klbounds");
    let config = write_config(
        &dir,
        "config.json",
        r#"{
            "grid_size": 1024,
            "bounds": {
                "kind": "kl_lower",
                "model": {"kind": "white_gaussian", "variance": 1.0},
                "order": 1,
                "delta": 0.05,
                "n_samples": 1000
            }
        }"#,
    );
    let out = run(&[
        "bounds",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("bound_report.json")).unwrap())
            .unwrap();
    // flat truth gives the vacuous negative bound, flagged not hidden
    assert!(report["bound_value"].as_f64().unwrap() <= 0.0);
    assert!(report["caveats"]
        .as_array()
        .unwrap()
        .iter()
        .any(|c| c.as_str().unwrap().starts_with("trivial-bound")));
    validate_schema(&dir.join("bound_report.json"), "bound_report.schema.json");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn multivariate_estimate_from_two_column_csv() {
    let dir = temp_dir("multicsv");
    // two-column sample input: moments are estimated through the product form
    let mut csv = String::from("# seed=5, model=external\ny1,y2\n");
    let mut x: f64 = 0.3;
    for i in 0..4000 {
        x = 0.9 * x + if i % 7 == 0 { 0.5 } else { -0.1 };
        csv.push_str(&format!("{},{}\n", x, -0.5 * x + 0.01 * (i % 11) as f64));
    }
    std::fs::write(dir.join("input.csv"), csv).unwrap();
    let config = write_config(
        &dir,
        "config.json",
        r#"{
            "maxent": {
                "multivariate": {
                    "basis": [[0, 0], [1, 0], [0, 1]],
                    "axis_grid": 32
                }
            }
        }"#,
    );
    let out = run(&[
        "maxent",
        "--config",
        config.to_str().unwrap(),
        "--input",
        dir.join("input.csv").to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
    validate_schema(&dir.join("maxent.json"), "maxent_summary.schema.json");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn simulate_is_byte_identical_per_seed() {
    let dir = temp_dir("simulate");
    let config = write_config(
        &dir,
        "config.json",
        r#"{
            "simulate": {
                "model": {"kind": "ar", "coeffs": [0.5], "innovation_variance": 1.0},
                "length": 500
            }
        }"#,
    );
    let out_a = dir.join("a");
    let out_b = dir.join("b");
    for out in [&out_a, &out_b] {
        let res = run(&[
            "simulate",
            "--config",
            config.to_str().unwrap(),
            "--seed",
            "42",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(res.status.success());
    }
    let a = std::fs::read(out_a.join("series.csv")).unwrap();
    let b = std::fs::read(out_b.join("series.csv")).unwrap();
    assert_eq!(a, b);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn estimate_from_simulated_csv_round_trips() {
    let dir = temp_dir("roundtrip");
    let config = write_config(
        &dir,
        "config.json",
        r#"{
            "order": 1,
            "simulate": {
                "model": {"kind": "ar", "coeffs": [0.5], "innovation_variance": 1.0},
                "length": 200000
            }
        }"#,
    );
    let res = run(&[
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--seed",
        "7",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(res.status.success());
    let res = run(&[
        "estimate",
        "--config",
        config.to_str().unwrap(),
        "--input",
        dir.join("series.csv").to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "{res:?}");
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("estimate.json")).unwrap())
            .unwrap();
    // estimated lags from 200k samples of AR(1) a=0.5 land near (4/3, 2/3)
    let lags = summary["lags"].as_array().unwrap();
    assert!((lags[0].as_f64().unwrap() - 4.0 / 3.0).abs() < 0.05);
    assert!((lags[1].as_f64().unwrap() - 2.0 / 3.0).abs() < 0.05);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn validate_breach_exits_4() {
    // white clean + white noise leaves the bound with zero slack, so roughly
    // half the sampled trials land above it: a guaranteed allowance breach
    let dir = temp_dir("breach");
    let config = write_config(
        &dir,
        "config.json",
        r#"{
            "grid_size": 256,
            "validate": {
                "allowance": 0.01,
                "scenario": {
                    "bound": "noise",
                    "model": {"kind": "white_gaussian", "variance": 1.0},
                    "noise_variance": 0.25,
                    "order": 1,
                    "n_samples": 2000,
                    "trials": 100
                }
            }
        }"#,
    );
    let out = run(&[
        "validate",
        "--config",
        config.to_str().unwrap(),
        "--seed",
        "3",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(4), "{out:?}");
    validate_schema(&dir.join("validation.json"), "validation_report.schema.json");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn validate_seed_pinned_is_byte_identical() {
    let dir = temp_dir("determinism");
    let config = write_config(
        &dir,
        "config.json",
        r#"{
            "grid_size": 256,
            "validate": {
                "allowance": 1.0,
                "scenario": {
                    "bound": "kl_lower",
                    "model": {"kind": "ar", "coeffs": [0.5], "innovation_variance": 1.0},
                    "order": 1,
                    "delta": 0.1,
                    "n_samples": 2000,
                    "trials": 100
                }
            }
        }"#,
    );
    let out_a = dir.join("a");
    let out_b = dir.join("b");
    for out in [&out_a, &out_b] {
        let res = run(&[
            "validate",
            "--config",
            config.to_str().unwrap(),
            "--seed",
            "11",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(res.status.code() == Some(0) || res.status.code() == Some(4));
    }
    let a = std::fs::read(out_a.join("validation.json")).unwrap();
    let b = std::fs::read(out_b.join("validation.json")).unwrap();
    assert_eq!(a, b);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn unknown_config_keys_rejected() {
    let dir = temp_dir("badcfg");
    let config = write_config(&dir, "config.json", r#"{"grid_sizes": 512}"#);
    let out = run(&[
        "estimate",
        "--config",
        config.to_str().unwrap(),
        "--lags",
        "1,0",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn multivariate_estimate_via_config() {
    let dir = temp_dir("multi");
    let config = write_config(
        &dir,
        "config.json",
        r#"{
            "estimate": {
                "multivariate": {
                    "basis": [[0, 0], [1, 0], [0, 1]],
                    "moments": [1.0, 0.2, 0.1],
                    "axis_grid": 32
                }
            }
        }"#,
    );
    let out = run(&[
        "estimate",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
    let csv = std::fs::read_to_string(dir.join("density.csv")).unwrap();
    assert!(csv.contains("theta1,theta2,phi"));
    validate_schema(&dir.join("estimate.json"), "estimate_summary.schema.json");
    std::fs::remove_dir_all(&dir).unwrap();
}
