use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn cli() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_degen-dt"));
    c.env_remove("DEGEN_DT_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    cli().args(args).output().expect("binary runs")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn sim_grid_is_byte_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let base = ["sim-grid", "--m", "2", "--iters", "1000000", "--seed", "7"];
    assert!(run(&[&base[..], &["-o", a.to_str().unwrap()]].concat())
        .status
        .success());
    assert!(
        run(&[&base[..], &["--threads", "2", "-o", b.to_str().unwrap()]].concat())
            .status
            .success()
    );
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let v = read_json(&a);
    assert_eq!(v["manifest"]["command"], "sim-grid");
    assert_eq!(v["manifest"]["master_seed"], 7);
    assert_eq!(v["manifest"]["discards"], 0);
    assert_eq!(v["report"]["iterations"], 1_000_000);

    let side = read_json(&dir.path().join("a.json.manifest.json"));
    assert!(side["wall_clock_seconds"].as_f64().unwrap() >= 0.0);
    assert_eq!(side["parameters"], v["manifest"]["parameters"]);
}

#[test]
fn analytic_grid2_groups_into_three_levels() {
    let out = run(&["analytic-grid2"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["report"]["entries"].as_array().unwrap().len(), 16);
    let levels = v["report"]["levels"].as_array().unwrap();
    let expected = [(0.0842, 4), (0.0609, 8), (0.0440, 4)];
    assert_eq!(levels.len(), 3);
    for (level, (p, size)) in levels.iter().zip(expected) {
        assert!((level["probability"].as_f64().unwrap() - p).abs() < 1e-3);
        assert_eq!(level["codes"].as_array().unwrap().len(), size);
    }
    assert!((v["report"]["sum"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    // The full manifest goes to stderr when writing to stdout.
    let side: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(side["command"], "analytic-grid2");
}

#[test]
fn corner_of_square_is_one_half() {
    let out = run(&["corner", "--n", "4"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let p = v["report"]["rows"][0]["p"].as_f64().unwrap();
    assert!((p - 0.5).abs() < 1e-6);
    assert_eq!(v["report"]["rows"][0]["r_exact"], "1/2");
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = run(&["sim-grid", "--m", "2", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--bogus"));
}

#[test]
fn out_of_range_argument_is_a_usage_error() {
    let out = run(&["sim-poly", "--n", "40", "--iters", "10"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "invalid_argument");
}

#[test]
fn quadrature_failure_exits_one_with_error_record() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    let out = run(&[
        "corner",
        "--n",
        "8",
        "--tolerance",
        "1e-14",
        "-o",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "accuracy_failure");
    // The partial table is still written, with the failed value left empty.
    let v = read_json(&path);
    assert!(v["report"]["rows"][0]["p"].is_null());
}

#[test]
fn report_converts_to_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("h.json");
    let svg = dir.path().join("h.svg");
    assert!(run(&["analytic-poly", "--n", "6", "-o", json.to_str().unwrap()])
        .status
        .success());

    let out = run(&[
        "report",
        "--input",
        json.to_str().unwrap(),
        "--format",
        "csv",
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("code,class,probability,standard_error,method"));
    assert_eq!(lines.count(), 14);
    let chart = std::fs::read_to_string(&svg).unwrap();
    assert!(chart.starts_with("<svg") && chart.matches("<rect").count() == 14);

    let out = run(&["report", "--input", json.to_str().unwrap(), "--format", "json"]);
    let round: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(round, read_json(&json));
}

#[test]
fn rerun_reproduces_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("w.json");
    let second = dir.path().join("w2.json");
    let args = [
        "walk",
        "--walks",
        "2000",
        "--cap",
        "12",
        "--seed",
        "5",
        "-o",
        first.to_str().unwrap(),
    ];
    assert!(run(&args).status.success());
    let side = dir.path().join("w.json.manifest.json");
    assert!(run(&[
        "rerun",
        "--input",
        side.to_str().unwrap(),
        "-o",
        second.to_str().unwrap()
    ])
    .status
    .success());
    assert_eq!(std::fs::read(&first).unwrap(), std::fs::read(&second).unwrap());
    let v = read_json(&first);
    assert_eq!(v["report"]["runs"].as_array().unwrap().len(), 2);
    assert!(v["report"]["p_value_dt_longer"].is_number());
}

#[test]
fn seed_defaults_from_environment() {
    let from_env = cli()
        .args(["tri-freq", "--n", "6", "--iters", "5000"])
        .env("DEGEN_DT_SEED", "11")
        .output()
        .unwrap();
    let from_flag = run(&["tri-freq", "--n", "6", "--iters", "5000", "--seed", "11"]);
    assert!(from_env.status.success());
    assert_eq!(from_env.stdout, from_flag.stdout);
    let v: Value = serde_json::from_slice(&from_env.stdout).unwrap();
    assert_eq!(v["manifest"]["master_seed"], 11);
}

#[test]
fn gen_emits_labelled_points() {
    let out = run(&["gen", "--kind", "grid", "--size", "2"]);
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "label,x,y");
    assert_eq!(lines.len(), 10);
    assert_eq!(lines[9], "9,2.0,2.0");
}

#[test]
fn census_compares_both_models() {
    let out = run(&["census", "--m", "6", "--iters", "20", "--seed", "1"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let runs = v["report"]["runs"].as_array().unwrap();
    assert_eq!(runs[0]["model"], "dt_perturbed");
    assert_eq!(runs[1]["model"], "uniform_diagonals");
    assert!(v["report"]["p_value_dt_fewer"].is_number());
}
