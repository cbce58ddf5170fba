use std::process::{Command, Output};

use serde_json::Value;

fn gsnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gsnet")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = gsnet(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn noiseless_ring_has_unit_fidelity() {
    let v = json(&["fidelity", "--graph", "ring:10", "--protocol", "s1", "--p", "0"]);
    let r = &v["records"][0];
    assert_eq!(r["F"], 1.0);
    assert_eq!(r["method"], "exact");
    assert_eq!(v["version"], concat!("v", env!("CARGO_PKG_VERSION")));
}

#[test]
fn first_order_ring_rate() {
    let v =
        json(&["decay", "--graph", "ring:100", "--protocol", "bipartite-a", "--p", "1e-3", "--method", "first-order"]);
    assert_eq!(v["records"][0]["f"], 4.5);
    assert_eq!(v["records"][0]["f_exact"], "9/2");
}

#[test]
fn oracle_check_on_small_ring() {
    let v = json(&["oracle-check", "--graph", "ring:4", "--protocol", "s2"]);
    assert!(v["result"]["max_abs_diff"].as_f64().unwrap() <= 1e-12);
    assert_eq!(v["result"]["passed"], true);
}

#[test]
fn csv_columns_are_fixed() {
    let out =
        gsnet(&["decay", "--graph", "ring:8", "--protocol", "bipartite-b", "--p", "0.01:0.03:3", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(lines[0], "p,N,F,beta_f,f,stderr,method");
    assert_eq!(lines.len(), 4);
    assert!(lines[1..].iter().all(|l| l.ends_with(",exact")));
}

#[test]
fn identical_runs_give_identical_bytes_for_any_thread_count() {
    let args = [
        "ensemble",
        "--dist",
        "poisson:2",
        "--protocol",
        "subgraph",
        "--p",
        "1e-3",
        "--graphs",
        "4",
        "--nodes",
        "60",
        "--samples",
        "300",
        "--seed",
        "9",
    ];
    let run = |threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_gsnet")).args(args).env("GSNET_THREADS", threads).output().unwrap();
        assert!(out.status.success());
        out.stdout
    };
    let a = run("1");
    assert_eq!(a, run("1"));
    assert_eq!(a, run("3"));
    let mc = [
        "fidelity",
        "--graph",
        "er:200:3",
        "--protocol",
        "subgraph",
        "--p",
        "0.01",
        "--method",
        "mc",
        "--seed",
        "5",
        "--samples",
        "4000",
    ];
    assert_eq!(gsnet(&mc).stdout, gsnet(&mc).stdout);
}

#[test]
fn crossover_report() {
    let v = json(&["crossover", "--a", "subgraph", "--b", "bipartite-b"]);
    let k = v["result"]["mean_degree"].as_f64().unwrap();
    assert!((k - 2.8).abs() < 0.1);
    let none = json(&["crossover", "--a", "subgraph", "--b", "subgraph"]);
    assert_eq!(none["result"]["mean_degree"], Value::Null);
}

#[test]
fn transfer_and_genfunc_agree() {
    let t = json(&["transfer", "--protocol", "s2", "--n", "10,12", "--p", "0.02"]);
    let g = json(&["genfunc", "--protocol", "s2", "--n", "10,12", "--p", "0.02"]);
    for i in 0..2 {
        let (a, b) = (t["records"][i]["F"].as_f64().unwrap(), g["records"][i]["F"].as_f64().unwrap());
        assert!((a - b).abs() < 1e-12);
        assert_eq!(t["records"][i]["method"], "transfer");
        assert_eq!(g["records"][i]["method"], "genfunc");
    }
}

#[test]
fn threshold_and_purify() {
    let v = json(&["threshold", "--j", "1,9"]);
    let t1 = v["records"][0]["threshold"].as_f64().unwrap();
    let t9 = v["records"][1]["threshold"].as_f64().unwrap();
    assert!(t9 < t1);
    let p = json(&["purify", "--j", "3", "--p", "0.001", "--first-order"]);
    assert!((p["result"]["fidelity"].as_f64().unwrap() - (1.0 - 2.5e-3)).abs() < 1e-12);
}

#[test]
fn graph_file_input() {
    let dir = std::env::temp_dir().join(format!("gsnet-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("path.txt");
    std::fs::write(&path, "# path on four nodes\n0 1\n1 2\n2 3\n").unwrap();
    let v = json(&["decay", "--graph", path.to_str().unwrap(), "--protocol", "bipartite-b", "--p", "0.01"]);
    assert_eq!(v["records"][0]["N"], 4);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn invalid_input_fails_with_structured_error() {
    for args in [
        &["decay", "--graph", "ring:8", "--protocol", "s1", "--p", "0.02,0.01"][..],
        &["decay", "--graph", "er:8:2", "--protocol", "s2", "--p", "0.01"][..],
        &["fidelity", "--graph", "ring:8", "--protocol", "s1", "--method", "first-order"][..],
        &["decay", "--graph", "ring:8", "--protocol", "s1", "--p", "1.5"][..],
    ] {
        let out = gsnet(args);
        assert!(!out.status.success(), "{args:?}");
        let err: Value = serde_json::from_slice(&out.stderr).expect("JSON error");
        assert!(err["error"].is_string());
    }
}
