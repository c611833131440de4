use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use weyl_core::spectra_io::{save_dataset, synthesize_weyl_spectrum, DatasetKind, CONFIG_ENV};

fn weylbench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weylbench")).args(args).env_remove(CONFIG_ENV).output().unwrap()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn data_file(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name).to_string_lossy().into_owned()
}

fn assert_schema(v: &Value) {
    for key in ["command", "status", "checks", "results", "error", "elapsed_seconds"] {
        assert!(v.get(key).is_some(), "missing {key} in {v}");
    }
}

#[test]
fn zeta_check_passes() {
    let out = weylbench(&["zeta", "check"]);
    assert_eq!(out.status.code(), Some(0));
    let v = report(&out);
    assert_schema(&v);
    assert_eq!(v["status"], "pass");
    assert_eq!(v["checks"].as_array().unwrap().len(), 3);
    for c in v["checks"].as_array().unwrap() {
        assert!(c["value"].as_f64().unwrap() <= 1e-10);
    }
}

#[test]
fn ms2_verify_within_tolerance() {
    let out = weylbench(&["ms2", "verify", "--t", "5", "--C", "2", "--tol", "1e-4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = report(&out);
    assert!(v["checks"][0]["value"].as_f64().unwrap() < 1e-4);
    assert!(v["results"]["closed_form"].as_f64().unwrap() > 0.0);
}

#[test]
fn usage_errors_exit_with_two() {
    let out = weylbench(&["zeta", "check", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert_eq!(weylbench(&[]).status.code(), Some(2));
    assert_eq!(weylbench(&["ms2", "verify", "--t", "5"]).status.code(), Some(2));
    assert_eq!(weylbench(&["sl3", "beta", "--T", "x"]).status.code(), Some(2));
    let out = weylbench(&["sl3", "beta", "--T", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(report(&out)["error"]["kind"], "InvalidArgument");
}

#[test]
fn failed_check_exits_with_one_and_reports() {
    // ten forms cannot reach the asymptotic count
    let out = weylbench(&["weyl", "sweep", "--dataset", &data_file("maass_sl2.csv"), "--tmax", "380", "--steps", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let v = report(&out);
    assert_schema(&v);
    assert_eq!(v["status"], "fail");
    let ratio = v["results"]["sweep"][0]["ratio"].as_f64().unwrap();
    assert!((ratio - 11.0 / (380.0 / 12.0)).abs() < 1e-12);
    let out = weylbench(&["weyl", "sweep", "--dataset", &data_file("maass_sl2.csv"), "--tmax", "400"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&out)["error"]["kind"], "IncompleteDataset");
}

#[test]
fn synthetic_weyl_sweep_passes() {
    let out = weylbench(&["weyl", "sweep", "--tmax", "10000", "--steps", "4", "--lo", "0.97", "--hi", "1.03"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn count_and_csv_output() {
    let dir = tempfile::tempdir().unwrap();
    let ds = synthesize_weyl_spectrum(DatasetKind::SL3, 101.0, 40.0, 1).unwrap();
    let path = dir.path().join("sl3.csv");
    save_dataset(&ds, &path).unwrap();
    let csv = dir.path().join("rows.csv");
    let region = r#"{"shape": {"shape": "ball", "radius": 1.0}, "scale": 10.0}"#;
    let out = weylbench(&["count", "--dataset", path.to_str().unwrap(), "--region", region, "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = report(&out);
    assert_schema(&v);
    assert_eq!(v["results"]["size"].as_u64().unwrap() as usize, ds.len());
    assert_eq!(v["results"]["tempered"].as_u64().unwrap() as usize, ds.len());
    let ratio = v["results"]["equidistribution_ratio"].as_f64().unwrap();
    assert!((0.9..=1.1).contains(&ratio), "{ratio}");
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("row,in_region,tempered,self_dual\n"));
    assert_eq!(text.lines().count(), ds.len() + 1);
}

#[test]
fn sl3_commands_pass_at_reference_points() {
    let out = weylbench(&["sl3", "diagonal", "--t1", "2", "--t2", "3", "--t3", "-5", "--c", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = report(&out);
    assert!((v["results"]["closed_form"]["re"].as_f64().unwrap() - 1.158037817670769666834).abs() < 1e-11);
    assert_eq!(weylbench(&["sl3", "residue", "--t", "5", "--c", "1"]).status.code(), Some(0));
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("beta.csv");
    let out = weylbench(&["sl3", "beta", "--T", "10000", "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(std::fs::read_to_string(&csv).unwrap().starts_with("T,ball_integral,asymptotic,ratio\n"));
}

#[test]
fn config_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"sigma": 3.0}"#).unwrap();
    let run = |cfg: &Path| {
        Command::new(env!("CARGO_BIN_EXE_weylbench"))
            .args(["transform", "roundtrip", "--T", "20"])
            .env(CONFIG_ENV, cfg)
            .output()
            .unwrap()
    };
    let out = run(&cfg);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(report(&out)["results"]["sigma"].as_f64(), Some(3.0));
    std::fs::write(&cfg, "{ not json").unwrap();
    let out = run(&cfg);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&out)["error"]["kind"], "ParseError");
}
