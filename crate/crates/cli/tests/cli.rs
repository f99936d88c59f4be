//! End-to-end tests against the compiled binary: exit codes, stream
//! separation, and output shapes.

use std::path::PathBuf;
use std::process::{Command, Output};

fn caseflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_caseflow"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).unwrap()
}

fn scenario_path(name: &str) -> String {
    let mut path = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    path.push("../../scenarios");
    path.push(name);
    path.to_string_lossy().into_owned()
}

#[test]
fn capacity_prints_the_rounded_worked_example() {
    let output = caseflow(&[
        "capacity",
        "--cases-closed",
        "4",
        "--span",
        "6",
        "--availability",
        "6",
        "--availability",
        "3",
        "--downtime",
        "0",
    ]);
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    let text = stdout(&output);
    assert!(text.contains("average investigators: 1.5"), "{text}");
    assert!(text.contains("per-investigator rate: 2.7"), "{text}");
    assert!(text.contains("capacity: 4.0"), "{text}");
}

#[test]
fn capacity_prints_the_national_estimate() {
    let mut args: Vec<&str> = vec!["capacity", "--cases-closed", "500", "--span", "365"];
    for _ in 0..10 {
        args.extend_from_slice(&["--availability", "365"]);
    }
    args.extend_from_slice(&["--downtime", "0.2"]);
    let output = caseflow(&args);
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    assert!(stdout(&output).contains("capacity: 600.0"), "{}", stdout(&output));
}

#[test]
fn capacity_rejects_bad_downtime_as_domain_error() {
    let output = caseflow(&[
        "capacity",
        "--cases-closed",
        "4",
        "--span",
        "6",
        "--availability",
        "6",
        "--downtime",
        "1.5",
    ]);
    assert_eq!(output.status.code(), Some(1));
    assert!(stdout(&output).is_empty());
    assert!(stderr(&output).contains("downtime"), "{}", stderr(&output));
}

#[test]
fn saturation_prints_the_ratio() {
    let output = caseflow(&["saturation", "--requests", "750", "--capacity", "600"]);
    assert_eq!(output.status.code(), Some(0));
    assert_eq!(stdout(&output), "1.25\n");
}

#[test]
fn missing_scenario_file_exits_one_and_names_the_path() {
    let output = caseflow(&["simulate", "--scenario", "missing.file"]);
    assert_eq!(output.status.code(), Some(1));
    assert!(stdout(&output).is_empty(), "result stream must stay clean");
    assert!(stderr(&output).contains("missing.file"), "{}", stderr(&output));
}

#[test]
fn usage_errors_exit_two() {
    let unknown_flag = caseflow(&["simulate", "--scneario", "x.toml"]);
    assert_eq!(unknown_flag.status.code(), Some(2));
    assert!(stdout(&unknown_flag).is_empty());

    let bad_value = caseflow(&[
        "optimize",
        "--scenario",
        &scenario_path("bottleneck.toml"),
        "--budget",
        "1",
        "--strategy",
        "fastest",
        "--objective",
        "global",
    ]);
    assert_eq!(bad_value.status.code(), Some(2), "{}", stderr(&bad_value));
    assert!(stdout(&bad_value).is_empty());
}

#[test]
fn simulate_emits_csv_by_default() {
    let output = caseflow(&["simulate", "--scenario", &scenario_path("minimal.toml")]);
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    let text = stdout(&output);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "period,country,arrivals_national,arrivals_international,served,closed,backlog,saturation"
    );
    assert_eq!(text.lines().count(), 11, "header plus one row per period");
}

#[test]
fn simulate_summary_format() {
    let output = caseflow(&[
        "simulate",
        "--scenario",
        &scenario_path("bottleneck.toml"),
        "--format",
        "summary",
    ]);
    assert_eq!(output.status.code(), Some(0));
    let text = stdout(&output);
    assert!(text.contains("== country A =="), "{text}");
    assert!(text.contains("== network =="), "{text}");
}

#[test]
fn simulate_writes_to_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("trace.csv");
    let output = caseflow(&[
        "simulate",
        "--scenario",
        &scenario_path("minimal.toml"),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0));
    assert!(stdout(&output).is_empty());
    let written = std::fs::read_to_string(&out).unwrap();
    assert!(written.starts_with("period,country,"));
}

#[test]
fn echo_scenario_round_trips() {
    let first = caseflow(&[
        "simulate",
        "--scenario",
        &scenario_path("bottleneck.toml"),
        "--echo-scenario",
    ]);
    assert_eq!(first.status.code(), Some(0));
    let echoed = stdout(&first);
    assert!(echoed.contains("horizon"), "{echoed}");

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("echoed.toml");
    std::fs::write(&path, &echoed).unwrap();
    let second = caseflow(&["simulate", "--scenario", path.to_str().unwrap(), "--echo-scenario"]);
    assert_eq!(second.status.code(), Some(0));
    assert_eq!(stdout(&second), echoed, "echo must be a fixed point");
}

#[test]
fn invalid_network_in_scenario_exits_one_with_country_named() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(
        &path,
        "horizon = 5\nseed = 0\n[[countries]]\nid = \"A\"\ncapacity_per_period = 1.0\ninternational_fraction = 0.5\npartner_weights = { A = 1.0 }\n",
    )
    .unwrap();
    let output = caseflow(&["simulate", "--scenario", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));
    assert!(stdout(&output).is_empty());
    let diagnostics = stderr(&output);
    assert!(diagnostics.contains("references the country itself"), "{diagnostics}");
}

#[test]
fn optimize_allocates_to_the_saturated_partner() {
    for strategy in ["greedy", "brute", "saturation"] {
        let output = caseflow(&[
            "optimize",
            "--scenario",
            &scenario_path("bottleneck.toml"),
            "--budget",
            "3",
            "--unit",
            "1.0",
            "--strategy",
            strategy,
            "--objective",
            "own:A",
        ]);
        assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
        let text = stdout(&output);
        assert!(text.contains("B: +3"), "{strategy}: {text}");
        assert!(text.contains("objective value:"), "{text}");
    }
}

#[test]
fn optimize_uses_the_scenario_block_as_fallback() {
    let output = caseflow(&["optimize", "--scenario", &scenario_path("bottleneck.toml")]);
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    let text = stdout(&output);
    assert!(text.contains("strategy: greedy"), "{text}");
    assert!(text.contains("budget: 3 units of 1"), "{text}");
}

#[test]
fn optimize_without_budget_anywhere_is_a_usage_error() {
    let output = caseflow(&[
        "optimize",
        "--scenario",
        &scenario_path("minimal.toml"),
        "--strategy",
        "greedy",
        "--objective",
        "global",
    ]);
    assert_eq!(output.status.code(), Some(2));
    assert!(stdout(&output).is_empty());
    assert!(stderr(&output).contains("--budget"), "{}", stderr(&output));
}

#[test]
fn identical_runs_emit_identical_bytes() {
    for scenario in ["bottleneck.toml", "poisson.toml"] {
        let a = caseflow(&["simulate", "--scenario", &scenario_path(scenario)]);
        let b = caseflow(&["simulate", "--scenario", &scenario_path(scenario)]);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout, "{scenario}");
    }
}
