use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use knapmatch::io::{read_instance, Instance};

fn knapmatch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_knapmatch"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = knapmatch(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_is_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, c) = (dir.path().join("a.json"), dir.path().join("b.json"), dir.path().join("c.json"));
    ok(&["gen", "--kind", "d2d", "--seed", "7", "--delta", "0.3", "--out", path(&a)]);
    ok(&["gen", "--kind", "d2d", "--seed", "7", "--delta", "0.3", "--out", path(&b)]);
    ok(&["gen", "--kind", "d2d", "--seed", "8", "--delta", "0.3", "--out", path(&c)]);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_ne!(fs::read(&a).unwrap(), fs::read(&c).unwrap());
    let g = read_instance(&a).unwrap().to_bipartite();
    assert_eq!((g.left_count(), g.right_count()), (50, 100));
    assert_eq!(g.edges().len(), 50 * 30);
}

#[test]
fn gen_knapsack_then_run_each_algorithm() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("k.json");
    ok(&["gen", "--kind", "knapsack", "--seed", "3", "--out", path(&inst)]);
    assert!(matches!(read_instance(&inst).unwrap(), Instance::Knapsack(_)));
    for algo in ["on", "virtual", "on-truth", "threshold", "greedy"] {
        let out = ok(&["run", "--instance", path(&inst), "--algo", algo, "--seed", "2"]);
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(v["algo"], algo);
        assert!(v["value"].as_f64().unwrap() >= 0.0);
    }
}

#[test]
fn run_reads_an_explicit_order() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("m.json");
    let order = dir.path().join("order.json");
    ok(&["gen", "--kind", "matching", "--seed", "4", "--n-left", "5", "--n-right", "4", "--delta", "0.8", "--out", path(&inst)]);
    fs::write(&order, "[4, 3, 2, 1, 0]").unwrap();
    let a = ok(&["run", "--instance", path(&inst), "--algo", "on-truth", "--order", path(&order), "--seed", "1"]);
    let b = ok(&["run", "--instance", path(&inst), "--algo", "on-truth", "--order", path(&order), "--seed", "1"]);
    assert_eq!(a.stdout, b.stdout);

    fs::write(&order, "[0, 0, 1, 2, 3]").unwrap();
    let bad = knapmatch(&["run", "--instance", path(&inst), "--order", path(&order)]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn experiment_csv_is_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = |out: &Path, threads: &'static str| {
        vec![
            "--threads".to_string(),
            threads.to_string(),
            "experiment".into(),
            "--kind".into(),
            "d2d".into(),
            "--trials".into(),
            "12".into(),
            "--delta".into(),
            "0.2,0.6".into(),
            "--seed".into(),
            "9".into(),
            "--out".into(),
            path(out).to_string(),
        ]
    };
    let run = |v: Vec<String>| ok(&v.iter().map(String::as_str).collect::<Vec<_>>());
    run(args(&a, "1"));
    run(args(&b, "4"));
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    let header = text.lines().next().unwrap();
    assert_eq!(
        header,
        "kind,delta,trial,seed,algo,baseline,n_left,n_right,budget,online_value,baseline_value,ratio,spend,payments_total,feasible,gamma,t"
    );
    // 12 trial rows plus a mean and a stderr row per delta.
    assert_eq!(text.lines().count(), 1 + 2 * (12 + 2));
}

#[test]
fn experiment_reads_a_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{"kind": "knapsack", "n_left": 40, "n_right": 40, "budget": 25.0,
            "bid_range": [1.0, 2.0], "bpb_range": [0.5, 1.0], "trials": 5, "seed": 2,
            "algo": "on", "baseline": "threshold"}"#,
    )
    .unwrap();
    let out = ok(&["experiment", "--config", path(&cfg)]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 1 + 5 + 2);
    assert!(text.lines().nth(1).unwrap().starts_with("knapsack,"));

    fs::write(&cfg, r#"{"kind": "knapsack", "trails": 5}"#).unwrap();
    assert_eq!(knapmatch(&["experiment", "--config", path(&cfg)]).status.code(), Some(2));
}

#[test]
fn experiment_refuses_budget_blind_algorithms() {
    let out = knapmatch(&["experiment", "--kind", "knapsack", "--algo", "greedy", "--trials", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_lists_and_runs_suites() {
    let list = ok(&["verify", "--list"]);
    let names = String::from_utf8(list.stdout).unwrap();
    assert_eq!(names.lines().count(), 19);
    assert!(names.lines().any(|l| l == "two-item"));

    let out = ok(&["verify", "--suite", "two-item", "--suite", "coupling", "--quick"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().all(|l| l.starts_with("PASS ")), "{text}");

    assert_eq!(knapmatch(&["verify", "--suite", "nope"]).status.code(), Some(2));
}
