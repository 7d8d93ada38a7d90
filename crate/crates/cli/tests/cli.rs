use std::process::{Command, Output};

use serde_json::{json, Value};

fn besico(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_besico")).args(args).output().expect("binary runs")
}

fn report(args: &[&str]) -> Value {
    let out = besico(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("JSON report")
}

#[test]
fn dbar_of_alternating_against_zero_is_half() {
    let r = report(&["dist", "--metric", "dbar", "--x", "|01", "--y", "|0", "--horizon", "1000"]);
    assert_eq!(r["command"], "dist");
    assert_eq!(r["results"]["value"], json!({"num": 1, "den": 2}));
    assert_eq!(r["inputs"]["params"]["metric"], "dbar");
}

#[test]
fn sum_check_is_a_quarter() {
    let r = report(&["y-lab", "sum-check", "--terms", "40"]);
    assert_eq!(r["command"], "y-lab sum-check");
    assert!((r["results"]["value_f64"].as_f64().unwrap() - 0.25).abs() <= 1e-12);
    assert_eq!(r["results"]["partial_plus_tail_is_quarter"], true);
}

#[test]
fn star_check_example_holds() {
    let r = report(&["star-check", "--trials", "100", "--horizon", "10000", "--seed", "7"]);
    assert_eq!(r["results"]["violations"], 0);
    assert_eq!(r["table"]["rows"].as_array().unwrap().len(), 100);
}

#[test]
fn reports_are_byte_identical_across_runs_and_threads() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<String> = (0..3).map(|i| dir.path().join(format!("r{i}.json")).display().to_string()).collect();
    for (i, p) in paths.iter().enumerate() {
        let threads = (i + 1).to_string();
        let out = besico(&["star-check", "--trials", "12", "--horizon", "500", "--seed", "3", "--threads", &threads, "--output", p]);
        assert!(out.status.success());
    }
    let texts: Vec<Vec<u8>> = paths.iter().map(|p| std::fs::read(p).unwrap()).collect();
    assert_eq!(texts[0], texts[1]);
    assert_eq!(texts[0], texts[2]);
}

#[test]
fn csv_export_of_a_schedule() {
    let out = besico(&["dist", "--metric", "besicovitch", "--x", "|01", "--y", "|0", "--horizon", "8", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text, "n,value\n1,0\n2,1/2\n4,1/2\n8,1/2\n");
}

#[test]
fn input_errors_exit_2() {
    // sampling without a seed
    assert_eq!(besico(&["star-check", "--trials", "2"]).status.code(), Some(2));
    // unknown metric (usage error)
    assert_eq!(besico(&["dist", "--metric", "nope", "--x", "|0", "--y", "|0"]).status.code(), Some(2));
    // symbol outside the alphabet
    assert_eq!(besico(&["dist", "--metric", "dbar", "--x", "|2", "--y", "|0"]).status.code(), Some(2));
    // finite word shorter than the horizon
    assert_eq!(besico(&["dist", "--metric", "dbar", "--x", "01", "--y", "00", "--horizon", "5"]).status.code(), Some(2));
    assert_eq!(besico(&["dist", "--metric", "dbar", "--x", "|0", "--y", "|0", "--horizon", "0"]).status.code(), Some(2));
}

#[test]
fn no_partial_report_on_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("r.json");
    let out = besico(&["dist", "--metric", "jdelta", "--x", "|0", "--y", "|1", "--output", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!p.exists());
}

#[test]
fn resource_limit_exits_3() {
    let out = Command::new(env!("CARGO_BIN_EXE_besico"))
        .args(["entropy", "--shift", "f:2,10", "--n", "12"])
        .env("BESICO_MAX_STATES", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn failed_certification_exits_4() {
    // segments of odd length cannot match a period-2 orbit exactly
    let out = besico(&["shadow", "sigmund", "--r", "3", "--tolerance", "0", "--horizon", "100"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("invariant"));
}

#[test]
fn prokhorov_with_oracle() {
    let mu = r#"{"atoms":[{"point":"0","num":1,"den":2},{"point":"1/2","num":1,"den":2}]}"#;
    let nu = r#"{"atoms":[{"point":"1/4","num":1,"den":1}]}"#;
    let r = report(&["measures", "prokhorov", "--space", "circle", "--mu", mu, "--nu", nu, "--oracle"]);
    assert_eq!(r["results"]["oracle_agrees"], true);
    assert_eq!(r["results"]["value"], r["results"]["oracle"]);
    assert_eq!(r["results"]["value"], json!({"num": 1, "den": 2}));
}

#[test]
fn config_file_matches_command_line() {
    let dir = tempfile::tempdir().unwrap();
    let direct = dir.path().join("direct.json");
    let via = dir.path().join("via.json");
    let cfg = dir.path().join("cfg.json");
    let out = besico(&["dist", "--metric", "dprime", "--x", "|0011", "--y", "|0", "--horizon", "64", "--output", direct.to_str().unwrap()]);
    assert!(out.status.success());
    let config = json!({
        "subcommand": "dist",
        "params": {"metric": "dprime", "x": "|0011", "y": "|0"},
        "horizon": 64,
        "seed": null,
        "output_path": via.to_str().unwrap(),
    });
    std::fs::write(&cfg, config.to_string()).unwrap();
    let out = besico(&["run", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(std::fs::read(&direct).unwrap(), std::fs::read(&via).unwrap());

    std::fs::write(&cfg, r#"{"subcommand": "dist", "bogus": 1}"#).unwrap();
    assert_eq!(besico(&["run", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn entropy_of_golden_mean_and_y2() {
    let r = report(&["entropy", "--shift", "golden", "--n", "20"]);
    assert!(r["results"]["abs_error"].as_f64().unwrap() < 0.01);
    let r = report(&["entropy", "--shift", "y2", "--n", "40"]);
    assert!(r["results"]["estimate"].as_f64().unwrap() > 0.05);
}

#[test]
fn y_lab_reports_have_decisions_and_densities() {
    let r = report(&["y-lab", "project", "--eps", "51/5000", "--samples", "2", "--seed", "5", "--horizon", "2000"]);
    for key in ["horizon", "depth", "decisions", "densities"] {
        assert!(r["results"].get(key).is_some(), "missing {key}");
    }
    assert_eq!(r["results"]["all_accepted"], true);
}

#[test]
fn maps_tn_and_search() {
    let r = report(&["maps", "tn", "--n", "4"]);
    assert_eq!(r["results"]["continuous"], true);
    assert_eq!(r["results"]["arc_violations"], 0);
    let r = report(&["maps", "search", "--range", "1"]);
    let found = r["results"]["found"].as_array().unwrap();
    assert!(found.iter().any(|f| f["a"] == -1 && f["b"] == -1));
}
