use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_jacobi-spectral"))
}

fn run(args: &[&str]) -> Output {
    bin()
        .args(args)
        .env_remove("JACOBI_THREADS")
        .output()
        .expect("binary runs")
}

fn json_stdout(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn resolvent_closed_form() {
    let out = run(&[
        "resolvent",
        "--family",
        "constant:0,0.5",
        "--lambda",
        "0+1i",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_stdout(&out);
    let im = v["value"]["im"].as_f64().unwrap();
    assert!((im - 2.0 * (2f64.sqrt() - 1.0)).abs() < 1e-10);
    assert_eq!(v["certificate"]["converged"], true);
    assert_eq!(v["metadata"]["config"]["lambda"], "0+1i");
}

#[test]
fn resolvent_rejects_real_lambda() {
    let out = run(&["resolvent", "--family", "constant:0,0.5", "--lambda", "0.5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Im lambda must be nonzero"));
}

#[test]
fn resolvent_with_dense_check() {
    let out = run(&[
        "resolvent",
        "--family",
        "hermite",
        "--lambda",
        "1+1i",
        "--oracle-n",
        "5000",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_stdout(&out);
    assert!(v["oracle"]["abs_delta"].as_f64().unwrap() <= 1e-6);
}

#[test]
fn resolvent_non_convergence_exits_2() {
    let out = run(&[
        "resolvent",
        "--family",
        "hermite",
        "--lambda",
        "1+0.01i",
        "--n-max",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json_stdout(&out)["certificate"]["converged"], false);
}

#[test]
fn weights_file_output_with_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let curve = dir.path().join("curve.csv");
    let sigma = dir.path().join("sigma.csv");
    let out = run(&[
        "weights",
        "--family",
        "hermite",
        "--n",
        "100",
        "--grid",
        "-2:2:401",
        "--output",
        curve.to_str().unwrap(),
        "--sigma-output",
        sigma.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let (header, rows) = read_csv(&curve);
    assert_eq!(header, ["x", "value"]);
    assert_eq!(rows.len(), 401);
    assert!(rows.iter().all(|r| r[1] >= 0.0));
    let side: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("curve.csv.json")).unwrap())
            .unwrap();
    assert_eq!(side["n"], 100);
    assert_eq!(side["metadata"]["artifact"], "jacobi-spectral");
    assert_eq!(side["metadata"]["config"]["grid"]["count"], 401);
    let (_, sig) = read_csv(&sigma);
    assert!(sig.windows(2).all(|p| p[1][1] >= p[0][1] - 1e-14));
    assert!(dir.path().join("sigma.csv.json").exists());
}

#[test]
fn weights_semicircle_exact() {
    let out = run(&[
        "weights",
        "--family",
        "constant:0,0.5",
        "--n",
        "10",
        "--grid",
        "-1:1:201",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let mut r = csv::Reader::from_reader(out.stdout.as_slice());
    let mut rows = 0;
    for rec in r.records() {
        let rec = rec.unwrap();
        let x: f64 = rec[0].parse().unwrap();
        let f: f64 = rec[1].parse().unwrap();
        let exact = 2.0 / std::f64::consts::PI * (1.0 - x * x).max(0.0).sqrt();
        assert!((f - exact).abs() <= 1e-12, "x={x}: {f} vs {exact}");
        rows += 1;
    }
    assert_eq!(rows, 201);
}

#[test]
fn weights_missing_grid_is_config_error() {
    let out = run(&["weights", "--family", "hermite", "--n", "10"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unknown_family_is_config_error() {
    let out = run(&["resolvent", "--family", "laguerre", "--lambda", "1+1i"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bad_thread_count_is_config_error() {
    let out = bin()
        .args(["resolvent", "--family", "hermite", "--lambda", "1+1i"])
        .env("JACOBI_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let ok = bin()
        .args(["resolvent", "--family", "hermite", "--lambda", "1+1i"])
        .env("JACOBI_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
}

#[test]
fn discreteness_from_table() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("quad.jcoef.csv");
    let text: String = (0..=600)
        .map(|n| format!("{},{}\n", (n + 1) * (n + 1), n + 1))
        .collect();
    std::fs::write(&table, text).unwrap();
    let spec = format!("table:{}", table.display());
    let out = run(&[
        "criteria",
        "discreteness",
        "--family",
        &spec,
        "--window",
        "1:500",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_stdout(&out);
    assert_eq!(v["verdict"], "certified-at-scale");
    for key in [
        "criterion",
        "window",
        "statistics",
        "verdict",
        "witnesses",
        "notes",
    ] {
        assert!(v.get(key).is_some(), "{key}");
    }
}

#[test]
fn growth_conditions_hermite() {
    let out = run(&[
        "criteria", "thm39", "--family", "hermite", "--n-max", "5000",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_stdout(&out);
    let names: Vec<&str> = v["blocks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|b| b["name"].as_str().unwrap())
        .collect();
    assert_eq!(
        names,
        [
            "condition-1",
            "condition-2",
            "condition-3",
            "condition-4",
            "condition-5"
        ]
    );
}

#[test]
fn bounded_weight_violated_for_paired_growth() {
    let out = run(&[
        "criteria",
        "bounded-weight",
        "--family",
        "paired-growing",
        "--interval",
        "-0.5:0.5",
        "--window",
        "1:200",
    ]);
    assert_eq!(out.status.code(), Some(4));
    let v = json_stdout(&out);
    assert_eq!(v["verdict"], "violated");
    assert_eq!(v["witnesses"][0]["x"], 0.0);
}

#[test]
fn inconclusive_exits_3() {
    let out = run(&[
        "criteria",
        "discreteness",
        "--family",
        "constant:5,1",
        "--window",
        "1:100",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn hermite_demo_table() {
    let out = run(&["hermite-demo"]);
    assert_eq!(out.status.code(), Some(0));
    let mut r = csv::Reader::from_reader(out.stdout.as_slice());
    assert_eq!(
        r.headers().unwrap(),
        vec!["n", "x", "f_n", "target", "abs_error"]
    );
    let rows: Vec<Vec<f64>> = r
        .records()
        .map(|rec| rec.unwrap().iter().map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 15);
    let at = |n: f64, x: f64| {
        rows.iter()
            .find(|r| r[0] == n && r[1] == x)
            .unwrap()
            .clone()
    };
    assert!((at(10_000.0, 0.0)[3] - 0.56419).abs() < 1e-5);
    assert!(at(10_000.0, 0.0)[4] <= 0.01);
    assert!((at(10_000.0, 1.0)[3] - 0.20755).abs() < 1e-5);
    let errs: Vec<f64> = [100.0, 1000.0, 10_000.0]
        .iter()
        .map(|&n| at(n, 0.0)[4])
        .collect();
    assert!(errs[0] > errs[1] && errs[1] > errs[2]);
}

#[test]
fn oracle_compare_hermite() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("measure.csv");
    let out = run(&[
        "oracle-compare",
        "--family",
        "hermite",
        "--n",
        "2000",
        "--truncation",
        "4000",
        "--grid",
        "-3:3:301",
        "--measure-output",
        m.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = json_stdout(&out);
    assert!(v["kolmogorov_distance"].as_f64().unwrap() <= 0.02);
    let (header, rows) = read_csv(&m);
    assert_eq!(header, ["lambda", "weight"]);
    assert_eq!(rows.len(), 4000);
}

#[test]
fn help_exits_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["criteria", "--help"]).status.code(), Some(0));
}
