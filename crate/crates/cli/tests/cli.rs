use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn kcommute(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kcommute"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// CSV text without the trailing timing columns.
fn strip_timings(csv: &str) -> String {
    csv.lines()
        .map(|l| l.split(',').take(17).collect::<Vec<_>>().join(","))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn estimate_exact_mode_matches_oracle() {
    let out = kcommute(&[
        "estimate",
        "--model",
        "heisenberg",
        "--n",
        "5",
        "--k",
        "2",
        "--mode",
        "exact",
        "--seed",
        "9",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["diff"].as_f64().unwrap().abs() <= 1e-9);
    assert_eq!(
        v["report"]["groups"].as_u64().unwrap() as usize,
        v["report"]["per_group"].as_array().unwrap().len()
    );
}

#[test]
fn estimate_from_hamiltonian_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.txt");
    std::fs::write(&path, "# two qubits\n2\n0.5 ZZ\n-0.25 XI\n1.5 II\n").unwrap();
    let out = kcommute(&[
        "estimate",
        "--hamiltonian",
        path.to_str().unwrap(),
        "--shots",
        "500",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = read_json(&dir.path().join("estimate.json"));
    assert_eq!(v["report"]["identity_offset"].as_f64().unwrap(), 1.5);
    assert_eq!(v["report"]["shots_realized"].as_u64().unwrap(), 500);
}

#[test]
fn config_errors_exit_with_two() {
    let out = kcommute(&["bench", "--experiment", "k-sweep", "--model", "tfim", "--n", "4", "--k", "0"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("`k`"));

    let out = kcommute(&[
        "bench",
        "--experiment",
        "scheme-compare",
        "--model",
        "tfim",
        "--n",
        "4",
        "--scheme",
        "median",
    ]);
    assert_eq!(code(&out), 2);
    for name in ["uniform", "max", "max_sq", "mean", "mean_sq"] {
        assert!(stderr(&out).contains(name));
    }

    let out = kcommute(&["estimate", "--model", "ising", "--n", "4"]);
    assert_eq!(code(&out), 2);

    let out = kcommute(&["estimate", "--hamiltonian", "/nonexistent/h.txt"]);
    assert_eq!(code(&out), 2);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "2\n1.0 ZQ\n").unwrap();
    let out = kcommute(&["estimate", "--hamiltonian", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("line 2"));

    // clap rejects malformed flags with the same code
    let out = kcommute(&["estimate", "--model", "tfim", "--n", "four"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn runtime_errors_exit_with_three() {
    let out = kcommute(&["estimate", "--model", "tfim", "--n", "30", "--shots", "100"]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));
}

#[test]
fn bench_output_is_deterministic_apart_from_timings() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = |dir: &Path| {
        vec![
            "bench".to_string(),
            "--experiment".into(),
            "k-sweep".into(),
            "--model".into(),
            "heisenberg".into(),
            "--n".into(),
            "4".into(),
            "--periodic".into(),
            "--scheme".into(),
            "uniform,mean".into(),
            "--shots".into(),
            "300".into(),
            "--reps".into(),
            "5".into(),
            "--seed".into(),
            "17".into(),
            "--out".into(),
            dir.to_str().unwrap().into(),
        ]
    };
    for dir in [a.path(), b.path()] {
        let argv = args(dir);
        let out = kcommute(&argv.iter().map(String::as_str).collect::<Vec<_>>());
        assert_eq!(code(&out), 0, "{}", stderr(&out));
    }
    let csv_a = std::fs::read_to_string(a.path().join("metrics.csv")).unwrap();
    let csv_b = std::fs::read_to_string(b.path().join("metrics.csv")).unwrap();
    assert_eq!(strip_timings(&csv_a), strip_timings(&csv_b));
    assert_eq!(
        std::fs::read(a.path().join("summary.json")).unwrap(),
        std::fs::read(b.path().join("summary.json")).unwrap()
    );
    // 3 default k values x 2 schemes x 5 reps plus header
    assert_eq!(csv_a.lines().count(), 31);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"experiment": "scheme-compare", "model": "tfim", "n": 4, "periodic": true,
            "scheme": ["uniform", "mean"], "shots": 400, "reps": 3, "out": "results"}"#,
    )
    .unwrap();
    let out = kcommute(&["bench", "--config", cfg.to_str().unwrap(), "--reps", "2"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let summary = read_json(&dir.path().join("results/summary.json"));
    let points = summary["points"].as_array().unwrap();
    assert_eq!(points.len(), 2);
    assert!(points.iter().all(|p| p["reps"] == 2 && p["k"] == 4));
    assert!(summary["winner"].is_string());

    std::fs::write(&cfg, r#"{"experiment": "k-sweep", "modle": "tfim"}"#).unwrap();
    let out = kcommute(&["bench", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
}

#[test]
fn shot_sweep_emits_one_point_per_budget_and_crossover() {
    let dir = tempfile::tempdir().unwrap();
    let out = kcommute(&[
        "bench",
        "--experiment",
        "shot-sweep",
        "--model",
        "imbalanced",
        "--n",
        "4",
        "--scheme",
        "uniform,mean",
        "--shots",
        "1000,2500,4000,5500,7000,8500",
        "--reps",
        "20",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let summary = read_json(&dir.path().join("summary.json"));
    let points = summary["points"].as_array().unwrap();
    assert_eq!(points.iter().filter(|p| p["scheme"] == "uniform").count(), 6);
    assert_eq!(points.iter().filter(|p| p["scheme"] == "mean").count(), 6);
    assert_eq!(summary["crossover"].as_array().unwrap().len(), 6);

    let out = kcommute(&[
        "bench",
        "--experiment",
        "shot-sweep",
        "--model",
        "tfim",
        "--n",
        "4",
        "--shots",
        "1000",
        "--reps",
        "3",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(read_json(&dir.path().join("summary.json")).get("crossover").is_none());
}

#[test]
fn trotter_evolve_labels_and_exact_column() {
    let dir = tempfile::tempdir().unwrap();
    let out = kcommute(&[
        "bench",
        "--experiment",
        "trotter-evolve",
        "--model",
        "tfim",
        "--n",
        "4",
        "--periodic",
        "--trotter-steps",
        "1,2",
        "--time",
        "0.1",
        "--mode",
        "exact",
        "--reps",
        "1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let csv = std::fs::read_to_string(dir.path().join("metrics.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert!(rows[0].starts_with("trotter_evolve:r=1,"));
    assert!(rows[1].starts_with("trotter_evolve:r=2,"));
    let summary = read_json(&dir.path().join("summary.json"));
    let errs: Vec<f64> = summary["trotter"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| t["trotter_error"].as_f64().unwrap())
        .collect();
    assert!(errs[1].abs() < errs[0].abs());

    // n above the evolution limit: exact column empty, warning recorded
    let out = kcommute(&[
        "bench",
        "--experiment",
        "trotter-evolve",
        "--model",
        "tfim",
        "--n",
        "12",
        "--trotter-steps",
        "1",
        "--shots",
        "200",
        "--reps",
        "1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let csv = std::fs::read_to_string(dir.path().join("metrics.csv")).unwrap();
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[14], "");
    assert!(!read_json(&dir.path().join("summary.json"))["warnings"]
        .as_array()
        .unwrap()
        .is_empty());
}

#[test]
fn zero_time_evolution_returns_neel_energy() {
    let out = kcommute(&[
        "estimate",
        "--model",
        "tfim",
        "--n",
        "6",
        "--periodic",
        "--trotter-steps",
        "1",
        "--time",
        "0",
        "--mode",
        "exact",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    // Neel state: all six bonds anti-aligned
    assert!((v["estimate"].as_f64().unwrap() + 6.0).abs() <= 1e-9);
}
