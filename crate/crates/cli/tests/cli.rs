use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn spsched(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spsched")).args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn temp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("spsched-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn oracle_solves_two_job_instance() {
    let summary = json_of(&spsched(&["solve", "--instance", &data("one_machine_pair.json"), "--solver", "oracle"]));
    assert_eq!(summary["objective"], 7);
    assert_eq!(summary["solver"], "oracle");
    assert_eq!(summary["alpha"], 1);
}

#[test]
fn exact_and_oracle_agree_on_two_machines() {
    let oracle = json_of(&spsched(&["solve", "--instance", &data("two_machine_trio.json"), "--solver", "oracle"]));
    let exact = json_of(&spsched(&["solve", "--instance", &data("two_machine_trio.json"), "--solver", "exact"]));
    assert_eq!(oracle["objective"], 37);
    assert_eq!(exact["objective"], 37);
}

#[test]
fn float_mode_reports_numbers() {
    let summary = json_of(&spsched(&[
        "solve",
        "--instance",
        &data("two_machine_trio.json"),
        "--solver",
        "exact",
        "--arith",
        "float",
    ]));
    assert!((summary["objective"].as_f64().unwrap() - 37.0).abs() < 1e-6);
    assert_eq!(summary["arithmetic"], "float");
}

#[test]
fn alpha_flow_schedule_evaluates_to_its_summary() {
    let path = temp("alpha_flow.json");
    let path = path.to_str().unwrap();
    let summary = json_of(&spsched(&[
        "solve",
        "--instance",
        &data("two_machine_trio.json"),
        "--solver",
        "alpha-flow",
        "--output",
        path,
    ]));
    assert_eq!(summary["capacity"]["variant"], "corrected");
    assert_eq!(summary["alpha"], "7/12");
    let evaluated = json_of(&spsched(&["evaluate", "--instance", &data("two_machine_trio.json"), "--schedule", path]));
    assert_eq!(evaluated["objective"], summary["objective"]);
}

#[test]
fn narrow_capacity_is_selectable_and_reported() {
    let run = |extra: &[&str]| {
        let mut args = vec!["solve", "--instance", &data("single_job.json"), "--solver", "alpha-flow"]
            .into_iter()
            .map(String::from)
            .collect::<Vec<_>>();
        args.extend(extra.iter().map(|s| s.to_string()));
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        json_of(&spsched(&args))
    };
    let corrected = run(&[]);
    let narrow = run(&["--paper-flow-capacity"]);
    assert_eq!(corrected["objective"], "9/2");
    assert_eq!(narrow["objective"], 3);
    assert_eq!(narrow["capacity"]["variant"], "narrow");
}

#[test]
fn capacity_flag_needs_the_flow_solver() {
    let out = spsched(&["solve", "--instance", &data("one_machine_pair.json"), "--solver", "oracle", "--paper-flow-capacity"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn staircase_svg_labels_every_breakpoint() {
    let out = spsched(&[
        "render",
        "--instance",
        &data("staircase.json"),
        "--schedule",
        &data("staircase_schedule.json"),
        "--format",
        "svg",
    ]);
    assert!(out.status.success());
    let svg = String::from_utf8(out.stdout).unwrap();
    let labels: Vec<&str> = svg
        .lines()
        .filter(|l| l.contains(r#"class="breakpoint""#))
        .map(|l| l.rsplit_once('>').unwrap().0.rsplit_once('<').unwrap().0.rsplit_once('>').unwrap().1)
        .collect();
    assert_eq!(labels, ["1", "2", "7/2", "7", "10"]);
    // 4 shared rows and 5 private rows
    assert_eq!(svg.matches(r#"class="row""#).count(), 9);
    assert_eq!(svg.matches(r#"class="piece""#).count(), 4 + 3 + 3 + 1 + 1 + 5);
}

#[test]
fn staircase_text_chart() {
    let out = spsched(&[
        "render",
        "--instance",
        &data("staircase.json"),
        "--schedule",
        &data("staircase_schedule.json"),
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("breakpoints: 1 2 7/2 7 10"));
    assert!(text.lines().next().unwrap().starts_with("M1 c=1 |AAAAAA"));
    assert_eq!(text.lines().filter(|l| l.contains('|')).count(), 9);
}

#[test]
fn render_is_byte_identical_across_runs() {
    let args = [
        "render",
        "--instance",
        &data("staircase.json"),
        "--schedule",
        &data("staircase_schedule.json"),
        "--format",
        "svg",
    ];
    assert_eq!(spsched(&args).stdout, spsched(&args).stdout);
}

#[test]
fn fuzz_is_deterministic() {
    let args = ["fuzz", "--seed", "3", "--jobs", "3", "--machines", "2", "--cases", "3"];
    let first = spsched(&args);
    assert!(first.status.success(), "stderr: {}", String::from_utf8_lossy(&first.stderr));
    assert_eq!(first.stdout, spsched(&args).stdout);
    let last = String::from_utf8(first.stdout).unwrap().lines().last().unwrap().to_string();
    let summary: Value = serde_json::from_str(&last).unwrap();
    assert_eq!(summary["failures"], 0);
}

#[test]
fn empty_job_list_is_an_input_error() {
    let out = spsched(&["solve", "--instance", &data("empty_jobs.json"), "--solver", "oracle"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("jobs"));
}

#[test]
fn missing_file_is_an_input_error() {
    let out = spsched(&["solve", "--instance", &data("no_such_file.json"), "--solver", "oracle"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn refusals_exit_with_three() {
    let budget = spsched(&["solve", "--instance", &data("seven_jobs.json"), "--solver", "oracle"]);
    assert_eq!(budget.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&budget.stderr).contains("budget"));
    let class = spsched(&["solve", "--instance", &data("two_machine_trio.json"), "--solver", "antithetical"]);
    assert_eq!(class.status.code(), Some(3));
}

#[test]
fn unsorted_costs_are_resorted_with_a_warning() {
    let out = spsched(&["solve", "--instance", &data("unsorted_costs.json"), "--solver", "oracle"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("re-sorted"));
    assert_eq!(json_of(&out)["objective"], 37);
}

#[test]
fn validate_reports_conflicts() {
    let ok = spsched(&[
        "validate",
        "--instance",
        &data("staircase.json"),
        "--schedule",
        &data("staircase_schedule.json"),
    ]);
    assert_eq!(json_of(&ok)["feasible"], true);
    let bad = spsched(&["validate", "--instance", &data("one_machine_pair.json"), "--schedule", &data("overlapping.json")]);
    assert_eq!(bad.status.code(), Some(2));
    let report: Value = serde_json::from_slice(&bad.stdout).unwrap();
    assert_eq!(report["feasible"], false);
    assert_eq!(report["violations"][0]["condition"], 2);
}

#[test]
fn make_sequential_keeps_the_objective() {
    let path = temp("for_transform.json");
    let path = path.to_str().unwrap();
    json_of(&spsched(&["solve", "--instance", &data("two_machine_trio.json"), "--solver", "alpha-lp", "--output", path]));
    let summary = json_of(&spsched(&[
        "transform",
        "--instance",
        &data("two_machine_trio.json"),
        "--schedule",
        path,
        "--op",
        "make-sequential",
    ]));
    assert_eq!(summary["objective_before"], summary["objective_after"]);
    assert_eq!(summary["relabel_gain"], 0);
    assert_eq!(summary["sequential"], true);
    assert_eq!(summary["processor_descending"], true);
}

#[test]
fn canonicalize_reports_progress() {
    let summary = json_of(&spsched(&[
        "transform",
        "--instance",
        &data("staircase.json"),
        "--schedule",
        &data("staircase_schedule.json"),
        "--op",
        "canonicalize",
        "--max-iterations",
        "10",
    ]));
    // already split-free and synchronized
    assert_eq!(summary["converged"], true);
    assert_eq!(summary["iterations"], 0);
    assert_eq!(summary["objective_after"], 96);
}
