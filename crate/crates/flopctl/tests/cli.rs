//! Drives the built binary: exit codes and output shapes.

use std::path::PathBuf;
use std::process::{Command, Output};

use grflop::cone::{PointTheory, TableTheory, Tampered};

fn flopctl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flopctl")).args(args).output().expect("spawn flopctl")
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("flopctl-cli-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d.join(name)
}

#[test]
fn demo_point_json_is_all_green() {
    let out = flopctl(&["cone", "demo-point", "--order", "6", "--json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for key in ["round_trip_ok", "tau_identity_ok", "off_cone_detected", "axioms_ok"] {
        assert_eq!(v["transcript"][key], serde_json::Value::Bool(true), "{key}");
    }
}

#[test]
fn k_equal_n_is_a_contract_error() {
    let out = flopctl(&["chow", "--k", "3", "--n", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_eps_is_a_contract_error() {
    let out = flopctl(&["chow", "--k", "2", "--n", "3", "--eps", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn chow_small_case() {
    let out = flopctl(&["chow", "--k", "2", "--n", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["param_stamp"].is_object());
}

#[test]
fn emit_ifun_csv_header() {
    let out = flopctl(&["emit", "ifun-plus", "--csv", "--k", "1", "--n", "2", "--dq", "1", "--logy", "1", "--x", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let header = text.lines().next().unwrap();
    assert!(header.starts_with("d,"), "{header}");
    assert!(header.ends_with("numerator,denominator"), "{header}");
    assert!(text.lines().count() > 1);
}

#[test]
fn cached_only_without_cache_fails() {
    let out = Command::new(env!("CARGO_BIN_EXE_flopctl"))
        .args(["emit", "U", "--cached-only", "--k", "1", "--n", "2"])
        .env_remove("FLOPCTL_CACHE")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn correlator_tables() {
    let good = scratch("point.json");
    std::fs::write(&good, TableTheory::tabulate(&PointTheory, 9, 6).to_json().to_string()).unwrap();
    let out = flopctl(&["cone", "table", good.to_str().unwrap(), "--order", "4", "--kmax", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let bad = scratch("tampered.json");
    let th = Tampered::psi_shift(&PointTheory);
    std::fs::write(&bad, TableTheory::tabulate(&th, 9, 6).to_json().to_string()).unwrap();
    let out = flopctl(&["cone", "table", bad.to_str().unwrap(), "--order", "4", "--kmax", "1"]);
    assert_eq!(out.status.code(), Some(3));

    let garbage = scratch("garbage.json");
    std::fs::write(&garbage, "{not json").unwrap();
    assert_eq!(flopctl(&["cone", "table", garbage.to_str().unwrap()]).status.code(), Some(2));
}
