//! End-to-end runs of the `srclique` binary: file formats, report metadata,
//! config replay and exit codes.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn srclique(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_srclique"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn srclique_threads(args: &[&str], threads: usize) -> Output {
    Command::new(env!("CARGO_BIN_EXE_srclique"))
        .args(args)
        .env("SRCLIQUE_THREADS", threads.to_string())
        .output()
        .expect("binary runs")
}

fn read(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_then_listdecode_recovers_planted_set() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    let out = srclique(&[
        "gen",
        "--n",
        "30",
        "--k",
        "14",
        "--p",
        "0.5",
        "--plan",
        "delete-all-cut",
        "--seed",
        "5",
        "-o",
        s(&inst),
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let instance = read(&inst);
    let solution = instance["solution"].clone();
    assert_eq!(solution.as_array().unwrap().len(), 14);
    for key in ["tool", "version", "config", "config_hash", "timings"] {
        assert!(!instance["run"][key].is_null(), "missing run.{key}");
    }

    let report = dir.path().join("ld.json");
    let out = srclique(&[
        "listdecode",
        "--input",
        s(&inst),
        "--t",
        "1",
        "--degree",
        "4",
        "--seed",
        "9",
        "-o",
        s(&report),
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let first = read(&report);
    let list = first["report"]["final_list"].as_array().unwrap();
    assert!(list.contains(&solution));

    // Replaying the emitted config reproduces the result.
    let replay = dir.path().join("replay.json");
    let out = srclique(&["--config", s(&report), "-o", s(&replay)]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let second = read(&replay);
    assert_eq!(first["report"], second["report"]);
    assert_eq!(first["run"]["config_hash"], second["run"]["config_hash"]);
}

#[test]
fn thread_count_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    srclique(&[
        "gen",
        "--n",
        "16",
        "--k",
        "6",
        "--plan",
        "delete-all-cut",
        "--add",
        "clique",
        "--add-param",
        "6",
        "--seed",
        "2",
        "-o",
        s(&inst),
    ]);
    let args = [
        "listdecode",
        "--input",
        s(&inst),
        "--t",
        "1",
        "--degree",
        "4",
        "--seed",
        "3",
    ];
    let one: Value = serde_json::from_slice(&srclique_threads(&args, 1).stdout).unwrap();
    let three: Value = serde_json::from_slice(&srclique_threads(&args, 3).stdout).unwrap();
    assert_eq!(one["report"], three["report"]);
}

#[test]
fn certify_reports_inapplicable_with_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bip = dir.path().join("bip.json");
    let out = srclique(&[
        "gen",
        "--kind",
        "bipartite",
        "--n",
        "200",
        "--k",
        "12",
        "--seed",
        "1",
        "-o",
        s(&bip),
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let out = srclique(&[
        "certify",
        "--input",
        s(&bip),
        "--method",
        "geometric",
        "--r",
        "1",
        "--k",
        "12",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let cert: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(cert["applicable"], Value::Bool(false));
    assert!(cert["certified_bound"].is_null());
}

#[test]
fn lowdeg_prints_exact_value_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("terms.csv");
    let out = srclique(&[
        "lowdeg",
        "--k",
        "4",
        "--n",
        "6",
        "--l",
        "2",
        "--degree",
        "2",
        "--csv",
        s(&csv),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["norm_sq_minus_one_exact"], "9/16");
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("L,R,degrees,count,moment,contribution"));
}

#[test]
fn oracle_lists_the_isolated_clique() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    srclique(&[
        "gen",
        "--n",
        "30",
        "--k",
        "14",
        "--plan",
        "delete-all-cut",
        "--seed",
        "5",
        "-o",
        s(&inst),
    ]);
    let solution = read(&inst)["solution"].clone();
    let out = srclique(&[
        "oracle",
        "--input",
        s(&inst),
        "--mode",
        "quasi",
        "--k",
        "14",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["cliques"].as_array().unwrap().contains(&solution));
}

#[test]
fn error_exit_codes() {
    assert_eq!(srclique(&["gen", "--bogus"]).status.code(), Some(64));
    assert_eq!(srclique(&[]).status.code(), Some(64));
    let out = srclique(&["certify", "--input", "/nonexistent/graph.json", "--k", "3"]);
    assert_eq!(out.status.code(), Some(1));
}
