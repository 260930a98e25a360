use std::io::Write;

use clap::Parser;
use kflat_core::cli::instance::InstanceFile;
use kflat_core::cli::{main_with_args, run, Cli};
use serde_json::Value;

fn json(args: &[&str]) -> (Value, bool) {
    let cli = Cli::try_parse_from(std::iter::once("kflat").chain(args.iter().copied())).unwrap();
    let out = run(&cli).unwrap();
    (serde_json::from_str(&out.output).unwrap(), out.passed)
}

fn instance_file(file: &InstanceFile) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(serde_json::to_string(file).unwrap().as_bytes()).unwrap();
    f
}

fn code(args: &[&str]) -> i32 {
    main_with_args(std::iter::once("kflat").chain(args.iter().copied()))
}

#[test]
#[allow(clippy::approx_constant)]
fn bound_values() {
    let (v, _) = json(&["bound", "--r", "4", "--k", "3"]);
    assert_eq!(v["value"].as_f64().unwrap(), 1.0);
    let (v, _) = json(&["bound", "--r", "2"]);
    assert!((v["value"].as_f64().unwrap() - 0.707106781187).abs() < 1e-12);
    let (v, _) = json(&["bound", "--n", "4", "--r", "2"]);
    assert!((v["value"].as_f64().unwrap() - 1.0 / 3f64.sqrt()).abs() < 1e-12);
}

#[test]
fn bound_rejects_k_at_least_r() {
    assert_eq!(code(&["bound", "--r", "2", "--k", "2"]), 2);
}

#[test]
fn unknown_subcommand_is_an_input_error() {
    assert_eq!(code(&["frobnicate"]), 2);
}

#[test]
fn malformed_instance_is_an_input_error() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(br#"{"dim": 3, "families": "nope"}"#).unwrap();
    assert_eq!(code(&["solve", f.path().to_str().unwrap()]), 2);
    assert_eq!(code(&["solve", "/nonexistent/instance.json"]), 2);
}

#[test]
fn solve_cube_stays_within_bound() {
    let f = instance_file(&InstanceFile::cube(8));
    let (v, passed) = json(&["solve", f.path().to_str().unwrap()]);
    assert!(passed);
    let cert = &v["certificate"];
    assert!(cert["max_distance"].as_f64().unwrap() <= cert["bound"].as_f64().unwrap() + 1e-9);
    assert_eq!(v["k"].as_u64(), Some(1));
    assert_eq!(v["premise"]["passed"], Value::Bool(true));
    assert_eq!(code(&["solve", f.path().to_str().unwrap()]), 0);
}

#[test]
fn solve_random_kflat_instance() {
    let f = instance_file(&InstanceFile::random_kflat(4, 3, 1, 2, 11));
    let (v, passed) = json(&["solve", f.path().to_str().unwrap(), "--seed", "3"]);
    assert!(passed);
    assert_eq!(v["premise"]["violations"].as_array().unwrap().len(), 0);
    assert_eq!(v["certificate"]["flat"]["basis"].as_array().unwrap().len(), 1);
}

#[test]
fn solve_csv_has_field_rows() {
    let f = instance_file(&InstanceFile::random_kflat(3, 2, 0, 2, 5));
    let cli = Cli::try_parse_from(["kflat", "solve", f.path().to_str().unwrap(), "--format", "csv"]).unwrap();
    let out = run(&cli).unwrap();
    let mut rd = csv::Reader::from_reader(out.output.as_bytes());
    assert_eq!(rd.headers().unwrap().iter().collect::<Vec<_>>(), ["field", "value"]);
    assert!(rd
        .records()
        .any(|r| r.unwrap()[0].starts_with("certificate.max_distance")));
}

#[test]
fn verify_aronov_reports_claims() {
    let (v, passed) = json(&["verify", "aronov", "--grid", "32,2", "--truncation", "12"]);
    let claims = v["claims"].as_array().unwrap();
    assert!(claims.iter().any(|c| c["name"] == "min_max_lower_bound"));
    assert!(claims.iter().all(|c| c["passed"].is_boolean()));
    assert_eq!(passed, claims.iter().all(|c| c["passed"] == Value::Bool(true)));
}

#[test]
fn oracle_on_cube_line() {
    let f = instance_file(&InstanceFile::cube(6));
    let (v, _) = json(&[
        "oracle",
        f.path().to_str().unwrap(),
        "--grid",
        "24,16,2",
        "--truncation",
        "6",
    ]);
    let text = v.to_string();
    assert!(text.contains("value") || text.contains("min_max"), "{text}");
}

#[test]
fn premise_on_random_instance() {
    let f = instance_file(&InstanceFile::random_kflat(3, 2, 0, 2, 9));
    let (v, passed) = json(&["premise", f.path().to_str().unwrap()]);
    assert!(passed, "{v}");
}

#[test]
fn instance_round_trips_through_json() {
    let file = InstanceFile::cube(5);
    let text = serde_json::to_string(&file).unwrap();
    let again = InstanceFile::from_json(&text).unwrap();
    assert_eq!(serde_json::to_string(&again).unwrap(), text);
    let inst = again.load().unwrap();
    assert_eq!(inst.families.len(), 3);
    assert_eq!(inst.materialize(Some(4)).unwrap()[0].len(), 4);
}
