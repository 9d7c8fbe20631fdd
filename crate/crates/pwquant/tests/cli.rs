use std::process::{Command, Output};

use pwquant::golden::table1;
use serde_json::Value;

fn pwquant(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pwquant"))
        .args(args)
        .env_remove("PWQUANT_SEED")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = pwquant(args);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn data(name: &str) -> String {
    format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn canonical_eleven() {
    let v = json(&["canonical", "--n", "11"]);
    assert_eq!(v["sequence"], serde_json::json!([6, 3, 1, 1]));
    let row = table1().into_iter().find(|r| r.n == 11).unwrap();
    assert_eq!(v["V_n"], Value::String(row.v_n));
    assert_eq!(v["points"].as_array().unwrap().len(), 11);
}

#[test]
fn canonical_below_two_is_a_usage_error() {
    let out = pwquant(&["canonical", "--n", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("start at order 2"));
}

#[test]
fn allocate_from_config() {
    let cfg = data("three_piece.json");
    let v = json(&["allocate", "--config", &cfg, "--n", "100"]);
    assert_eq!(v["allocations"], serde_json::json!([[56, 22, 22]]));
    assert_eq!(v["V_n"], "1873/737662464");
    let v = json(&["allocate", "--dist", &cfg, "--n", "7"]);
    assert_eq!(v["allocations"], serde_json::json!([[4, 2, 1], [4, 1, 2]]));
    assert_eq!(v["V_n"], "19/31104");
}

#[test]
fn table_matches_golden_sequences() {
    let out = pwquant(&["table", "--max-n", "58", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,sequence,V_n,V_n_float"));
    let golden = table1();
    let rows: Vec<_> = lines.collect();
    assert_eq!(rows.len(), golden.len());
    for (line, g) in rows.iter().zip(&golden) {
        let cols: Vec<&str> = line.split(',').collect();
        let seq: Vec<u32> = cols[1].split(' ').map(|x| x.parse().unwrap()).collect();
        assert_eq!(seq, g.sequence, "n = {}", g.n);
        assert_eq!(cols[2], g.v_n);
    }
}

#[test]
fn same_seed_gives_identical_bytes() {
    let args = ["compare", "--n", "2..6", "--trials", "50", "--seed", "9"];
    let a = pwquant(&args);
    let b = pwquant(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = pwquant(&["compare", "--n", "2..6", "--trials", "50", "--seed", "10"]);
    assert_ne!(a.stdout, c.stdout);

    let env = Command::new(env!("CARGO_BIN_EXE_pwquant"))
        .args(["random", "--n", "5", "--trials", "100"])
        .env("PWQUANT_SEED", "9")
        .output()
        .unwrap();
    let flag = pwquant(&["random", "--n", "5", "--trials", "100", "--seed", "9"]);
    assert_eq!(env.stdout, flag.stdout);
    let v: Value = serde_json::from_slice(&flag.stdout).unwrap();
    assert_eq!(v["seed"], 9);
}

#[test]
fn compare_csv_columns() {
    let out = pwquant(&[
        "compare", "--dist", "infinite", "--n", "3,8", "--trials", "20", "--format", "csv",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("n,V_opt,V_iid_mean,V_iid_se,V_kron,Dstar_iid_mean,Dstar_kron")
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0], "3");
    assert!((row[1].parse::<f64>().unwrap() - 29.0 / 5508.0).abs() < 1e-15);
    assert!(lines.next().unwrap().split(',').all(|c| !c.is_empty()));
}

#[test]
fn out_writes_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let out = pwquant(&[
        "table",
        "--max-n",
        "5",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn distortion_and_moments() {
    let v = json(&["distortion", "--dist", "three-piece", "--points", "1/6,5/6"]);
    assert_eq!(v["distortion"], "11/972");
    let v = json(&["distortion", "--points", "1/6, 13/18, 17/18"]);
    assert_eq!(v["distortion"], "29/5508");
    let v = json(&["moments", "--pieces", "3"]);
    assert_eq!(v["mean"], "1/2");
    assert_eq!(v["variance"], "25/204");
    assert_eq!(v["rows"][1]["conditional_mean"], "13/18");
}

#[test]
fn kronecker_and_random() {
    let v = json(&["kronecker", "--theta", "golden", "--n", "3"]);
    let p = v["points"].as_array().unwrap();
    assert!((p[1].as_f64().unwrap() - 0.2360679775).abs() < 1e-9);
    let out = pwquant(&["kronecker", "--theta", "1/2", "--n", "3"]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&["random", "--n", "1", "--trials", "10"]);
    assert_eq!(v["mean_min_distance"], 0.25);
}

#[test]
fn verify_passes_on_both_distributions() {
    let v = json(&["verify", "--n", "1..8", "--restarts", "20"]);
    assert_eq!(v["all_ok"], true);
    let v = json(&[
        "verify",
        "--dist",
        "three-piece",
        "--n",
        "1..8",
        "--restarts",
        "20",
    ]);
    assert_eq!(v["all_ok"], true);
}

#[test]
fn bad_inputs_fail() {
    assert_eq!(pwquant(&["allocate", "--n", "5"]).status.code(), Some(1));
    assert_eq!(
        pwquant(&["allocate", "--dist", "three-piece", "--n", "2"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        pwquant(&["table", "--max-n", "5", "--dist", "nope.json"])
            .status
            .code(),
        Some(1)
    );
    let cfg = data("three_piece.json");
    assert_eq!(
        pwquant(&["table", "--max-n", "5", "--dist", "infinite", "--config", &cfg])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        pwquant(&["distortion", "--points", "1/2,1/3"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(pwquant(&["compare", "--n", "5..2"]).status.code(), Some(2));
}
