//! End-to-end tests of the ptri binary: exit codes, stream discipline, and
//! byte-level round trips.

use std::io::Write as _;
use std::process::{Command, Output, Stdio};

use poisson_trinomial::io::{parse_model, to_json_string_17};
use poisson_trinomial::parity::split_parity;

fn run(args: &[&str], stdin: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ptri"));
    cmd.args(args);
    match stdin {
        Some(text) => {
            cmd.stdin(Stdio::piped())
                .stdout(Stdio::piped())
                .stderr(Stdio::piped());
            let mut child = cmd.spawn().expect("spawn ptri");
            child
                .stdin
                .as_mut()
                .expect("stdin piped")
                .write_all(text.as_bytes())
                .expect("write stdin");
            child.wait_with_output().expect("collect output")
        }
        None => cmd.output().expect("run ptri"),
    }
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is utf8")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is utf8")
}

fn json_of(out: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout_of(out)).expect("stdout is JSON")
}

fn temp_path(name: &str) -> std::path::PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("ptri-test-{}-{name}", std::process::id()));
    p
}

const MODEL_1: &str = r#"{"trials":[{"t":0.2,"w":0.5}]}"#;
const MODEL_SYM_2: &str = r#"{"trials":[{"t":0.5,"w":0.25},{"t":0.5,"w":0.25}]}"#;
const INSTANCE_6: &str = r#"{"alpha":0.015625,"beta":0.5,
  "team_a":[1.25,1.0,0.75,0.5,0.25,0.0],"team_b":[1.25,1.0,0.75,0.5,0.25,0.0],"k":"5"}"#;

#[test]
fn pmf_output_repipes_into_decompose_bit_for_bit() {
    let mixed = r#"{"trials":[{"t":"1/3","w":0.25},{"t":0.1,"w":"0.6"},{"t":0,"w":1}]}"#;
    let pmf_out = run(&["pmf", "-"], Some(mixed));
    assert!(pmf_out.status.success(), "{}", stderr_of(&pmf_out));
    let piped = run(&["decompose", "-"], Some(&stdout_of(&pmf_out)));
    assert!(piped.status.success(), "{}", stderr_of(&piped));

    let (model, _) = parse_model(mixed).unwrap();
    assert_eq!(
        stdout_of(&pmf_out).trim_end(),
        to_json_string_17(&model.pmf()),
        "pmf stage diverged"
    );
    let in_process = to_json_string_17(&split_parity(&model.pmf()));
    assert_eq!(stdout_of(&piped).trim_end(), in_process);
}

#[test]
fn pmf_reads_files_and_standard_input_identically() {
    let path = temp_path("model.json");
    std::fs::write(&path, MODEL_1).unwrap();
    let from_file = run(&[&"pmf", &path.to_str().unwrap()], None);
    let from_stdin = run(&["pmf", "-"], Some(MODEL_1));
    assert!(from_file.status.success());
    assert_eq!(stdout_of(&from_file), stdout_of(&from_stdin));
    std::fs::remove_file(&path).ok();
}

#[test]
fn pmf_of_twelve_trials_has_twenty_five_entries() {
    let trials: Vec<String> = (0..12).map(|_| r#"{"t":0.25,"w":0.5}"#.to_string()).collect();
    let model = format!(r#"{{"trials":[{}]}}"#, trials.join(","));
    let out = run(&["pmf", "-"], Some(&model));
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["n"], 12);
    assert_eq!(v["probs"].as_array().unwrap().len(), 25);
}

#[test]
fn malformed_json_exits_two_and_keeps_stdout_empty() {
    let out = run(&["pmf", "-"], Some("not json"));
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(stderr_of(&out).contains("invalid JSON"));
}

#[test]
fn invalid_trial_exits_two_naming_the_field() {
    let out = run(&["pmf", "-"], Some(r#"{"trials":[{"t":0.7,"w":0.5}]}"#));
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("trials[0]"), "{}", stderr_of(&out));
}

#[test]
fn unreadable_file_exits_two() {
    let out = run(&["pmf", "/nonexistent/model.json"], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("/nonexistent/model.json"));
}

#[test]
fn summary_reports_the_worked_single_trial_moments() {
    let out = run(&["summary", "-"], Some(MODEL_1));
    assert!(out.status.success());
    let v = json_of(&out);
    assert!((v["mu"].as_f64().unwrap() - 0.6).abs() < 1e-15);
    assert!((v["mu_even"].as_f64().unwrap() - 0.625).abs() < 1e-15);
    assert!((v["mu_odd"].as_f64().unwrap() - 0.5).abs() < 1e-15);
    assert!(v["gaps"]["mu_even_gap"].is_number());
    assert_eq!(v["degenerate"], serde_json::Value::Null);
}

#[test]
fn summary_of_degenerate_model_nulls_the_empty_side() {
    let out = run(&["summary", "-"], Some(r#"{"trials":[{"t":1,"w":0}]}"#));
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["even"], serde_json::Value::Null);
    assert!(v["odd"].is_object());
    assert_eq!(v["degenerate"]["k"], 0);
    assert!((v["degenerate"]["shift"].as_f64().unwrap() - 0.5).abs() < 1e-15);
}

#[test]
fn summary_csv_flag_emits_the_coefficient_table() {
    let out = run(&["summary", "--csv", "-"], Some(MODEL_1));
    assert!(out.status.success());
    let text = stdout_of(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "index,p_k,q_k");
    assert_eq!(lines.len(), 3);
    assert!(lines[2].ends_with(','), "odd column exhausted: {}", lines[2]);
}

#[test]
fn factor_matches_the_symmetric_quadratic_roots() {
    let out = run(&["factor", "-"], Some(MODEL_SYM_2));
    assert!(out.status.success());
    let v = json_of(&out);
    let even: Vec<f64> = v["even"]["success_probs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    // Roots of z^2 + 6z + 1 are -3 +- 2 sqrt 2; success probs 1/(1 - root).
    let hi = 1.0 / (4.0 - 2.0 * 2.0_f64.sqrt());
    let lo = 1.0 / (4.0 + 2.0 * 2.0_f64.sqrt());
    assert!((even[0] - hi).abs() < 1e-10, "{even:?}");
    assert!((even[1] - lo).abs() < 1e-10, "{even:?}");
    assert!(v["even"]["residual"].as_f64().unwrap() <= 1e-8);
    let odd: Vec<f64> = v["odd"]["success_probs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    assert_eq!(odd, vec![0.5]);
}

#[test]
fn factor_of_a_no_tie_model_reports_the_odd_part_null() {
    let out = run(&["factor", "-"], Some(r#"{"trials":[{"t":0,"w":0.3},{"t":0,"w":0.7}]}"#));
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["odd"], serde_json::Value::Null);
    assert!(v["even"].is_object());
}

#[test]
fn factor_accepts_a_pmf_document() {
    let pmf_out = run(&["pmf", "-"], Some(MODEL_SYM_2));
    let out = run(&["factor", "-"], Some(&stdout_of(&pmf_out)));
    assert!(out.status.success(), "{}", stderr_of(&out));
    assert!(json_of(&out)["even"].is_object());
}

#[test]
fn optimize_decides_strong_vs_strong_above_the_upper_threshold() {
    let out = run(&["optimize", "-"], Some(INSTANCE_6));
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["decision"]["kind"], "strong_vs_strong");
    assert_eq!(
        v["best_orderings"],
        serde_json::json!([[1, 2, 3, 4, 5, 6]])
    );
    assert!(v["tail"].as_f64().unwrap() > 0.0);
    assert!((v["mu"].as_f64().unwrap() - 3.0).abs() < 1e-15);
}

#[test]
fn optimize_k_override_flips_the_regime() {
    let out = run(&["optimize", "--k", "1.5", "-"], Some(INSTANCE_6));
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["decision"]["kind"], "strong_vs_weak");
    assert_eq!(
        v["best_orderings"],
        serde_json::json!([[6, 5, 4, 3, 2, 1]])
    );
}

#[test]
fn optimize_in_band_reports_no_ordering_without_search() {
    let out = run(&["optimize", "--k", "3", "-"], Some(INSTANCE_6));
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["decision"]["kind"], "indeterminate_band");
    assert_eq!(v["best_orderings"], serde_json::json!([]));
    assert_eq!(v["tail"], serde_json::Value::Null);
}

#[test]
fn optimize_exhaustive_lists_the_full_argmax_set_on_ties() {
    let inst = r#"{"alpha":"1/64","beta":"0.4","team_a":[1,1,1],"team_b":[1,1,1],"k":"1.5"}"#;
    let out = run(&["optimize", "--strategy", "exhaustive", "-"], Some(inst));
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["best_orderings"].as_array().unwrap().len(), 6);
    assert_eq!(v["best_orderings"][0], serde_json::json!([1, 2, 3]));
}

#[test]
fn optimize_local_search_agrees_with_the_theorem_here() {
    let out = run(&["optimize", "--strategy", "local", "-"], Some(INSTANCE_6));
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(
        v["best_orderings"],
        serde_json::json!([[1, 2, 3, 4, 5, 6]])
    );
}

#[test]
fn optimize_rejects_an_off_grid_threshold() {
    let out = run(&["optimize", "--k", "1.3", "-"], Some(INSTANCE_6));
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("k"), "{}", stderr_of(&out));
    assert!(out.stdout.is_empty());
}

#[test]
fn optimize_rejects_out_of_domain_strengths_naming_the_pair() {
    let inst = r#"{"alpha":1,"beta":0.1,"team_a":[4,0],"team_b":[0,0],"k":1}"#;
    let out = run(&["optimize", "-"], Some(inst));
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_of(&out);
    assert!(err.contains("a = 4") && err.contains("b = 0"), "{err}");
}

#[test]
fn optimize_csv_lists_every_ordering_one_based() {
    let inst = r#"{"alpha":"1/64","beta":"0.4","team_a":[1,0.5],"team_b":[1,0],"k":"1"}"#;
    let out = run(&["optimize", "--csv", "-"], Some(inst));
    assert!(out.status.success());
    let text = stdout_of(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "ordering,tail");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("1 2,"));
    assert!(lines[2].starts_with("2 1,"));
}

#[test]
fn optimize_csv_caps_at_six_players() {
    let team: Vec<String> = (0..7).rev().map(|i| format!("{i}")).collect();
    let inst = format!(
        r#"{{"alpha":"1/64","beta":0.5,"team_a":[{t}],"team_b":[{t}],"k":2}}"#,
        t = team.join(",")
    );
    let out = run(&["optimize", "--csv", "-"], Some(&inst));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_runs_are_byte_identical_for_a_fixed_seed() {
    let args = [
        "verify", "--seed", "9", "--count", "8", "--n-min", "1", "--n-max", "5", "--suite",
        "structure",
    ];
    let a = run(&args, None);
    let b = run(&args, None);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(stderr_of(&a).contains("structure: 8 cases"));
}

#[test]
fn verify_all_writes_json_out_and_reports_both_suites() {
    let path = temp_path("report.json");
    let path_str = path.to_str().unwrap();
    let out = run(
        &[
            "verify", "--seed", "2", "--count", "4", "--n-min", "2", "--n-max", "4", "--suite",
            "all", "--json-out", path_str,
        ],
        None,
    );
    assert!(out.status.success(), "{}", stderr_of(&out));
    assert!(out.stdout.is_empty());
    let err = stderr_of(&out);
    assert!(err.contains("structure: 4 cases"));
    assert!(err.contains("matchup: 4 cases"));
    let written: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let suites: Vec<&str> = written
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["suite"].as_str().unwrap())
        .collect();
    assert_eq!(suites, ["structure", "matchup"]);
    std::fs::remove_file(&path).ok();
}

#[test]
fn verify_rejects_an_unknown_family() {
    let out = run(&["verify", "--family", "weird", "--count", "1"], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("weird"));
}

#[test]
fn verify_rejects_a_range_outside_the_matchup_window() {
    let out = run(
        &["verify", "--suite", "matchup", "--n-min", "8", "--n-max", "9", "--count", "1"],
        None,
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("matchup"));
}
