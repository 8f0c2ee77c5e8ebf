mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use decision_queue::cli::{execute, ScenarioConfig};
use proptest::prelude::*;

use common::Logistic;

const PEW: Logistic = Logistic { p0: 1.0, a: 1.0, b: 5.0 };

fn bin(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_decision-queue")).args(args).current_dir(cwd).output().expect("binary runs")
}

fn golden(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    fs::read_to_string(path).unwrap()
}

fn run_to_file(args: &[&str], file: &str) -> String {
    let dir = tempfile::tempdir().unwrap();
    let out = bin(args, dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    fs::read_to_string(dir.path().join(file)).unwrap()
}

#[test]
fn static_time_golden() {
    let csv = run_to_file(&["static-time", "--pew", "1,1,5", "--tasks", "10", "--budget", "30"], "allocation.csv");
    assert_eq!(csv, golden("static_time.csv"));
    let row = csv.lines().find(|l| l.starts_with("1,")).unwrap();
    let reward: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
    assert!((reward - PEW.value(7.5)).abs() < 1e-8);
}

#[test]
fn static_latency_golden() {
    let args = ["static-latency", "--pew", "1,1,5", "--tasks", "10", "--penalty", "0.02"];
    assert_eq!(run_to_file(&args, "allocation.csv"), golden("static_latency.csv"));
}

#[test]
fn dynamic_golden() {
    let args = ["dynamic", "--pew", "1,1,5", "--tasks", "4", "--arrival-rate", "0.3", "--penalty", "0.01"];
    assert_eq!(run_to_file(&args, "allocation.csv"), golden("dynamic.csv"));
}

#[test]
fn simulate_golden() {
    let args =
        ["simulate", "--pew", "1,1,5", "--arrival-rate", "0.2", "--penalty", "0.01", "--horizon", "3", "--stages", "5"];
    assert_eq!(run_to_file(&args, "trace.csv"), golden("simulate.csv"));
}

#[test]
fn arrival_rate_summary_golden() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin(&["arrival-rate", "--pew", "1,1,5", "--penalty", "0.125"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), golden("arrival_rate.txt"));
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| bin(args, dir.path()).status.code();
    assert_eq!(code(&["--help"]), Some(0));
    assert_eq!(code(&["--version"]), Some(0));
    assert_eq!(code(&["static-time", "--help"]), Some(0));
    assert_eq!(code(&[]), Some(1));
    assert_eq!(code(&["no-such-command"]), Some(1));
    assert_eq!(code(&["static-time", "--pew", "1,1,5", "--tasks", "10"]), Some(1));
    assert_eq!(code(&["static-time", "--pew", "1,1,5", "--ddm", "1,1,2", "--tasks", "3", "--budget", "9"]), Some(1));
    assert_eq!(code(&["static-latency", "--pew", "2,1,5", "--tasks", "3", "--penalty", "0.1"]), Some(1));
    assert_eq!(code(&["static-latency", "--pew", "1,1,5", "--tasks", "3", "--penalty", "-0.1"]), Some(1));
    assert_eq!(code(&["simulate", "--pew", "1,1,5", "--penalty", "0.01"]), Some(1));
    assert_eq!(code(&["static-time", "--config", "missing.conf"]), Some(1));
    // 2^20 candidates exceed the default cap
    assert_eq!(code(&["dynamic", "--pew", "1,1,5", "--tasks", "20", "--penalty", "0.01"]), Some(2));
    // 2c above the peak slope leaves no tangency
    assert_eq!(code(&["arrival-rate", "--pew", "1,1,5", "--penalty", "0.2"]), Some(2));
}

#[test]
fn capacity_message_names_the_limit() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin(&["dynamic", "--pew", "1,1,5", "--tasks", "20", "--penalty", "0.01"], dir.path());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("16"), "{err}");
    assert!(err.contains("2^N"), "{err}");
}

#[test]
fn flags_override_the_file() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("run.conf"), "# budget study\npew = 1,1,5\ntasks = 10\nbudget = 12\n").unwrap();
    let from_file = bin(&["static-time", "--config", "run.conf", "--out", "a"], dir.path());
    assert!(from_file.status.success());
    let first = fs::read_to_string(dir.path().join("a/allocation.csv")).unwrap();
    assert!(first.contains("# budget = 12\n"));
    let overridden = bin(&["static-time", "--config", "run.conf", "--budget", "30", "--out", "b"], dir.path());
    assert!(overridden.status.success());
    let second = fs::read_to_string(dir.path().join("b/allocation.csv")).unwrap();
    assert_eq!(second, golden("static_time.csv"));
}

#[test]
fn config_file_errors_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    for text in ["pew = 1,1,5\npew = 1,1,4\n", "colour = blue\n", "tasks\n", "tasks = many\n"] {
        fs::write(dir.path().join("bad.conf"), text).unwrap();
        let out = bin(&["static-time", "--config", "bad.conf"], dir.path());
        assert_eq!(out.status.code(), Some(1), "{text}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn sampled_output_is_byte_identical() {
    let args = [
        "simulate",
        "--pew",
        "1,1,5",
        "--arrival-rate",
        "0.4",
        "--penalty",
        "0.01",
        "--horizon",
        "3",
        "--stages",
        "40",
        "--evolution",
        "sampled",
        "--seed",
        "9",
    ];
    assert_eq!(run_to_file(&args, "trace.csv"), run_to_file(&args, "trace.csv"));
}

#[test]
fn execute_writes_the_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let scenario =
        ScenarioConfig::parse("kind = sweep\npew = 1,1,5\npenalty = 0.01\nhorizon = 2\nstages = 20\nrates = 0.1,0.2\n")
            .unwrap();
    let mut summary = Vec::new();
    execute(&scenario, dir.path(), &mut summary).unwrap();
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[1].starts_with("0.1,"));
    assert!(rows[2].starts_with("0.2,"));
}

fn scenario() -> impl Strategy<Value = ScenarioConfig> {
    let kind =
        prop::sample::select(vec!["static-time", "static-latency", "dynamic", "simulate", "sweep", "arrival-rate"]);
    let model = prop_oneof![
        (0.1f64..=1.0, 0.1f64..5.0, 0.0f64..10.0).prop_map(|(p, a, b)| format!("pew = {p},{a},{b}")),
        (0.1f64..3.0, 0.1f64..3.0, 0.1f64..5.0).prop_map(|(d, s, t)| format!("ddm = {d},{s},{t}")),
    ];
    (
        kind,
        prop::option::of(model),
        prop::option::of(1usize..50),
        prop::option::of(0.01f64..100.0),
        prop::option::of(0.0f64..2.0),
        prop::option::of(any::<u64>()),
        prop::option::of(prop::sample::select(vec!["expected", "sampled"])),
        prop::option::of(prop::collection::vec(0.0f64..1.0, 1..5)),
    )
        .prop_map(|(kind, model, tasks, penalty, rate, seed, evolution, rates)| {
            let mut lines = vec![format!("kind = {kind}")];
            lines.extend(model);
            lines.extend(tasks.map(|v| format!("tasks = {v}")));
            lines.extend(penalty.map(|v| format!("penalty = {v}")));
            lines.extend(rate.map(|v| format!("arrival-rate = {v}")));
            lines.extend(seed.map(|v| format!("seed = {v}")));
            lines.extend(evolution.map(|v| format!("evolution = {v}")));
            let rates = rates.map(|r| r.iter().map(f64::to_string).collect::<Vec<_>>().join(","));
            lines.extend(rates.map(|v| format!("rates = {v}")));
            ScenarioConfig::parse(&lines.join("\n")).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn config_text_round_trips(config in scenario()) {
        let text = config.to_text();
        prop_assert_eq!(ScenarioConfig::parse(&text).unwrap(), config);
    }

    #[test]
    fn merging_with_itself_is_identity(config in scenario(), other in scenario()) {
        prop_assert_eq!(config.clone().merge(config.clone()), config.clone());
        prop_assert_eq!(ScenarioConfig::default().merge(config.clone()), config.clone());
        prop_assert_eq!(config.clone().merge(ScenarioConfig::default()), config.clone());
        prop_assert_eq!(other.merge(config.clone()).kind, config.kind);
    }
}
