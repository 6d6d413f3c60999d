//! End-to-end checks of the command-line interface: exit codes, report
//! round-trips, and the pinned examples of every subcommand.

use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_burau3"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 output")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(out)).expect("report parses as JSON")
}

fn temp_path(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("burau3-cli-test-{}-{name}", std::process::id()));
    p
}

fn counterexample_word() -> String {
    burau3::selftest::known_counterexample_word().to_string()
}

#[test]
fn search_empty_bound_exits_three() {
    let out = run(&["--format", "json", "search", "--max", "2"]);
    assert_eq!(out.status.code(), Some(3));
    let v = json(&out);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["found"].as_array().unwrap().len(), 0);
    assert_eq!(v["stats"]["pairs_surviving"], 0);
}

#[test]
fn search_rejects_bad_bound() {
    let out = run(&["search", "--max", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--max"));
}

#[test]
fn search_emit_tree_writes_root() {
    let tree = temp_path("tree.txt");
    let out = run(&[
        "search",
        "--max",
        "4",
        "--emit-tree",
        tree.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let dumped = std::fs::read_to_string(&tree).expect("tree file written");
    assert!(dumped.starts_with("(0, 0, 0, 0)"));
    std::fs::remove_file(&tree).ok();
}

#[test]
fn verify_trivial_word() {
    let out = run(&["verify", "--word", "g[0]"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("trivial biminimal chain"));
    assert!(text.contains("(k, l) = (1, 1)"));
}

#[test]
fn verify_names_failed_condition() {
    let out = run(&["verify", "--word", "g[-1] g[-1]"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("alternate"));
}

#[test]
fn verify_counterexample_certificate() {
    let word = counterexample_word();
    let out = run(&["--format", "json", "verify", "--word", &word]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let cert = &v["results"][0]["certificate"];
    assert_eq!(cert["rd"], 40);
    assert_eq!(cert["mrf"], "3081");
    assert_eq!(cert["k"], "1");
    assert_eq!(cert["l"], "1");
    assert_eq!(cert["witnesses_nonsurjectivity"], true);
    // The reported word re-parses to the input word.
    assert_eq!(cert["word"], serde_json::Value::String(word));
}

#[test]
fn verify_chain_file_line_by_line() {
    let path = temp_path("chains.txt");
    std::fs::write(&path, format!("# two chains\ng[0]\n{}\n", counterexample_word()))
        .expect("chain file written");
    let out = run(&["--format", "json", "verify", "--chain", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let results = v["results"].as_array().unwrap();
    assert_eq!(results.len(), 2);
    assert!(results.iter().all(|r| r["verified"] == true));
    std::fs::remove_file(&path).ok();
}

#[test]
fn verify_requires_exactly_one_source() {
    let out = run(&["verify"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reduce_elementary_generator() {
    let out = run(&["reduce", "--g1", "t - 1", "--g2", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "g[1]");
}

#[test]
fn reduce_identity_to_empty_word() {
    let out = run(&["--format", "json", "reduce", "--g1", "1", "--g2", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["word"], "1");
    assert_eq!(v["length"], 0);
    assert_eq!(v["round_trip"], true);
}

#[test]
fn reduce_output_reparses_and_round_trips() {
    // A six-letter word evaluated and fed back through the flags.
    let word = "g[2] g[-1/2]^-1 g[3]^2 g[0]^-1 g[1/3] g[-1]^-1";
    let parsed: burau3::quaternionic::GenWord = word.parse().unwrap();
    let el = burau3::quaternionic::eval_word(&parsed);
    let out = run(&[
        "reduce",
        "--g1",
        &el.g1().to_string(),
        "--g2",
        &el.g2().to_string(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), word);
}

#[test]
fn reduce_rejects_non_member() {
    let out = run(&["reduce", "--g1", "t", "--g2", "t"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("not a group element"));
}

#[test]
fn certify_full_twist_braid() {
    let out = run(&["--format", "json", "certify-burau", "--braid", "1 2 1 1 2 1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["member"], true);
    assert_eq!(v["det_exponent"], 6);
    assert_eq!(v["phi"]["integral"], true);
    assert_eq!(v["phi"]["g11"]["num"], "t^3");
    assert_eq!(v["phi"]["g11"]["den"], "1");
    assert_eq!(v["rho"][0][0], "-1");
    assert_eq!(v["rho"][0][1], "0");
    assert_eq!(v["rho"][1][1], "-1");
}

#[test]
fn certify_identity_matrix() {
    let out = run(&["certify-burau", "--entries", "1, 0, 0; 0, 1, 0; 0, 0, 1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("member: true"));
}

#[test]
fn certify_names_row_sum_failure() {
    let out = run(&["certify-burau", "--entries", "1, 0, 0; 0, 1, 0; 0, 0, t"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("member: false"));
    assert!(text.contains("row-sum"));
}

#[test]
fn certify_rejects_malformed_entries() {
    let out = run(&["certify-burau", "--entries", "1, 0; 0, 1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn selftest_quick_passes_with_seed() {
    let out = run(&["selftest", "--quick", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("seed 7"));
    assert!(text.contains("all suites passed"));
}

#[test]
fn output_flag_writes_report_file() {
    let path = temp_path("report.json");
    let out = run(&[
        "--format",
        "json",
        "--output",
        path.to_str().unwrap(),
        "search",
        "--max",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let contents = std::fs::read_to_string(&path).expect("report written");
    let v: serde_json::Value = serde_json::from_str(&contents).expect("valid JSON");
    assert_eq!(v["command"], "search");
    std::fs::remove_file(&path).ok();
}
