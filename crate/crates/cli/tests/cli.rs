use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_monogenic"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn tmp(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn json_report(args: &[&str], file: &str) -> (i32, Value, String) {
    let path = tmp(file);
    let mut full = args.to_vec();
    let p = path.to_str().unwrap();
    full.extend(["--out", p]);
    let out = run(&full);
    let text = std::fs::read_to_string(&path).unwrap_or_default();
    let value = serde_json::from_str(&text).unwrap_or(Value::Null);
    (out.status.code().unwrap(), value, text)
}

#[test]
fn gram_defaults_pass() {
    let (code, v, _) = json_report(&["gram"], "gram.json");
    assert_eq!(code, 0);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["passed"], true);
    assert_eq!(v["config"]["n_max"], 6);
    assert_eq!(v["config"]["rule"]["n_r"], 24);
    assert_eq!(v["norm_table_sha256"].as_str().unwrap().len(), 64);
    assert_eq!(v["result"]["size"], 63);
    assert!(
        v["result"]["parts"][0]["max_deviation_from_identity"]
            .as_f64()
            .unwrap()
            <= 1e-8
    );
    assert!(v["timestamp"].is_u64());
}

#[test]
fn under_resolved_rule_is_a_config_error() {
    let out = run(&["gram", "--rule", "2x24x48"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exact to degree"));
    assert_eq!(run(&["gram", "--rule", "24x24"]).status.code(), Some(2));
    assert_eq!(
        run(&["derivative", "--radii", "0.5,1.0"]).status.code(),
        Some(2)
    );
}

#[test]
fn gram_csv_has_one_row_per_pair() {
    let path = tmp("gram.csv");
    let out = run(&[
        "gram",
        "--n-max",
        "2",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let mut reader = csv::Reader::from_path(&path).unwrap();
    assert_eq!(
        reader.headers().unwrap(),
        vec!["part", "row", "col", "value", "deviation"]
    );
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    // 4 parts × 15² pairs for degrees up to 2
    assert_eq!(rows.len(), 4 * 15 * 15);
    assert_eq!(&rows[0][0], "full");
    assert_eq!(&rows[0][1], "X_0^0");
    let value: f64 = rows[0][3].parse().unwrap();
    assert!((value - 1.0).abs() < 1e-12);

    let mut meta = path.into_os_string();
    meta.push(".meta.json");
    let v: Value = serde_json::from_str(&std::fs::read_to_string(meta).unwrap()).unwrap();
    assert_eq!(v["config"]["format"], "csv");
}

#[test]
fn monogenicity_detects_phase_convention() {
    let (code, v, _) = json_report(
        &["monogenicity", "--n-max", "4", "--points", "10"],
        "mono.json",
    );
    assert_eq!(code, 0);
    let order = v["result"]["observed_order"].as_f64().unwrap();
    assert!((order - 2.0).abs() < 0.1);

    let (code, v, _) = json_report(
        &[
            "monogenicity",
            "--n-max",
            "4",
            "--points",
            "10",
            "--condon-shortley",
        ],
        "mono_cs.json",
    );
    assert_eq!(code, 1);
    assert_eq!(v["passed"], false);
    assert_eq!(v["config"]["condon_shortley"], true);
}

#[test]
fn bohr_sweep_passes() {
    let (code, v, _) = json_report(&["bohr", "--series", "3", "--samples", "2000"], "bohr.json");
    assert_eq!(code, 0);
    let majorant = v["result"]["majorant"].as_array().unwrap();
    assert_eq!(majorant.len(), 2);
    assert_eq!(majorant[0]["paper_reference_value"], 0.125);
    assert_eq!(majorant[1]["paper_reference_value"], 0.026);
    assert_eq!(
        v["result"]["sweeps"][0]["values"].as_array().unwrap().len(),
        3
    );
}

#[test]
fn derivative_reports_are_deterministic() {
    let args = [
        "derivative",
        "--series",
        "2",
        "--samples",
        "2000",
        "--seed",
        "9",
    ];
    let strip = |text: &str| -> String {
        text.lines()
            .filter(|l| !l.trim_start().starts_with("\"timestamp\""))
            .collect::<Vec<_>>()
            .join("\n")
    };
    let (code, v, first) = json_report(&args, "deriv.json");
    assert_eq!(code, 0);
    assert_eq!(v["result"]["violations"], 0);
    assert_eq!(v["result"]["series_identity"][0]["sum"], 8.0);
    let (_, _, second) = json_report(&args, "deriv.json");
    assert_eq!(strip(&first), strip(&second));
}
