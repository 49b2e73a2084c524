use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qsig(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsig"))
        .args(args)
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

const REFERENCE: [&str; 8] = ["--alpha", "0.25", "--d", "1024", "--T", "10", "--nu", "0.3"];

#[test]
fn params_reference_document() {
    let out = qsig(&[&["params"][..], &REFERENCE].concat());
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let doc = json(&out);
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["command"], "params");
    assert_eq!(doc["params"]["z_acc"], 23_450);
    assert_eq!(doc["params"]["z_rej"], 24_464);
    assert_eq!(doc["params"]["code"]["codeword_len"], 89_090);
    assert!(doc["notes"][0].as_str().unwrap().contains("1 + O(alpha)"));
}

#[test]
fn params_as_csv() {
    let out = qsig(&[&["params"][..], &REFERENCE, &["--format", "csv"]].concat());
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("key,value\n"));
    assert!(text.lines().any(|l| l == "params.z_acc,23450"));
}

#[test]
fn inadmissible_parameters_exit_2() {
    let out = qsig(&["params", "--alpha", "0.1", "--d", "1024", "--T", "10"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("S must be an integer dividing d"));
    let out = qsig(&["params", "--alpha", "0.25", "--d", "64", "--T", "100"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(qsig(&["params", "--alpha", "0.25"]).status.code(), Some(64));
    assert_eq!(qsig(&["frobnicate"]).status.code(), Some(64));
    // --codeword-len needs both thresholds.
    let out = qsig(
        &[
            &[
                "simulate",
                "--mode",
                "genuine",
                "--trials",
                "5",
                "--codeword-len",
                "10",
            ][..],
            &REFERENCE,
        ]
        .concat(),
    );
    assert_eq!(out.status.code(), Some(64));
    let out = qsig(
        &[
            &[
                "simulate",
                "--mode",
                "repudiate",
                "--trials",
                "5",
                "--engine",
                "full",
            ][..],
            &REFERENCE,
        ]
        .concat(),
    );
    assert_eq!(out.status.code(), Some(64));
    assert_eq!(qsig(&["--help"]).status.code(), Some(0));
}

#[test]
fn unwritable_output_exits_74() {
    let out = qsig(&[
        "gc",
        "--d",
        "100000",
        "--gamma",
        "0.01",
        "--beta",
        "0.05",
        "--T",
        "100",
        "--out",
        "/nonexistent/dir/x.json",
    ]);
    assert_eq!(out.status.code(), Some(74));
}

#[test]
fn simulate_forgery_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let hist = dir.path().join("hist.csv");
    let out = qsig(
        &[
            &[
                "simulate",
                "--mode",
                "forge",
                "--trials",
                "50",
                "--seed",
                "4",
                "--histogram",
                hist.to_str().unwrap(),
            ][..],
            &REFERENCE,
        ]
        .concat(),
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let doc = json(&out);
    assert_eq!(doc["report"]["verdicts"]["rej"], 500);
    assert_eq!(doc["report"]["mismatched"], 28_954);
    let text = std::fs::read_to_string(&hist).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("z,count"));
    let total: u64 = lines
        .map(|l| l.split(',').nth(1).unwrap().parse::<u64>().unwrap())
        .sum();
    assert_eq!(total, 500);
}

fn sweep_rows(extra: &[&str], path: &Path) -> Vec<csv::StringRecord> {
    let out = qsig(
        &[
            &[
                "sweep",
                "--T",
                "100",
                "--alpha-list",
                "0.01",
                "--d-min",
                "3e5",
                "--d-max",
                "8e7",
                "--points",
                "9",
            ][..],
            extra,
            &["--out", path.to_str().unwrap()],
        ]
        .concat(),
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let mut reader = csv::Reader::from_path(path).unwrap();
    let headers = reader.headers().unwrap().clone();
    assert_eq!(&headers[0], "alpha");
    assert_eq!(&headers[2], "theta");
    assert_eq!(&headers[3], "N");
    reader.records().map(Result::unwrap).collect()
}

#[test]
fn sweep_orderings() {
    let dir = tempfile::tempdir().unwrap();
    let by_gap = sweep_rows(&[], &dir.path().join("gap.csv"));
    assert_eq!(by_gap.len(), 9);
    let gaps: Vec<f64> = by_gap.iter().map(|r| r[5].parse().unwrap()).collect();
    assert!(gaps.windows(2).all(|w| w[0] <= w[1]));
    let by_n = sweep_rows(&["--x-axis", "codelength"], &dir.path().join("n.csv"));
    let ns: Vec<u64> = by_n.iter().map(|r| r[3].parse().unwrap()).collect();
    assert!(ns.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn sweep_without_admissible_points_exits_2() {
    let out = qsig(&[
        "sweep",
        "--T",
        "100",
        "--alpha-list",
        "0.01",
        "--d-min",
        "1e3",
        "--d-max",
        "1e4",
        "--points",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn conjecture_and_gc_documents() {
    let out = qsig(&["conjecture", "--x-max", "300"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["holds"], true);
    assert_eq!(doc["largest_checked"], 300);
    assert!(String::from_utf8_lossy(&out.stderr).contains("checked x <= 300"));

    let out = qsig(&[
        "gc", "--d", "1048576", "--gamma", "0.1", "--beta", "0.1", "--T", "100",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["command"], "gc");
    assert!((doc["delta"].as_f64().unwrap() - 0.6).abs() < 1e-12);
    assert_eq!(doc["d_min"]["approx"], 664);
}
