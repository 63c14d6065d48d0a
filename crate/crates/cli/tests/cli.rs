//! End-to-end checks of the binary: exit codes, round trips, reproducibility.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use gainflock_cli::formats::{parse_graph, write_graph};

const BIN: &str = env!("CARGO_BIN_EXE_gainflock");

const RING_GRAPH: &str = "3 3\n1 1 0\n2 2 0\n3 3 0\n3 1 0\n1 2 1\n2 3 2\n";
const RING_SEQUENCE: &str = "3 3 1\n1 1 0\n2 2 0\n3 3 0\n3 1 0\n1 2 1\n2 3 2\n";
// Strongly connected, unbalanced at m = 3: 2-cycle with gains α₁, α₁.
const UNBALANCED_SEQUENCE: &str = "2 3 1\n1 1 0\n2 2 0\n1 2 1\n2 1 1\n";

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("GAINFLOCK_SEED")
        .env_remove("GAINFLOCK_OUT")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, contents: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, contents).unwrap();
    path.display().to_string()
}

#[test]
fn check_balance_exit_codes_and_output() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write(dir.path(), "g.txt", RING_GRAPH);

    let out = run(&["check-balance", &graph]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("balanced"));
    assert!(stdout.contains("b = [0, 1, 0]"));
    assert!(stdout.contains("V1 = {1, 3} V2 = {2} V3 = {}"));

    let unbalanced = write(dir.path(), "u.txt", "2 3\n1 2 1\n2 1 1\n");
    let out = run(&["check-balance", &unbalanced]);
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("unbalanced"));
    assert!(stdout.contains("witness"));

    let bad = write(dir.path(), "bad.txt", "2 3\n1 5 0\n");
    let out = run(&["check-balance", &bad]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("line 2"));

    let out = run(&["check-balance", "/nonexistent/file.txt"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn canonical_serializer_round_trips() {
    // Scrambled arc order and comments parse to the same graph; the canonical
    // form is a fixed point of parse -> write.
    let scrambled = "# scrambled\n3 3\n2 3 2\n3 3 0\n1 2 1\n1 1 0\n3 1 0\n2 2 0\n";
    let g = parse_graph(scrambled).unwrap();
    let canonical = write_graph(&g);
    let reparsed = parse_graph(&canonical).unwrap();
    assert_eq!(g, reparsed);
    assert_eq!(canonical, write_graph(&reparsed));
    assert_eq!(parse_graph(RING_GRAPH).unwrap(), g);
}

#[test]
fn lift_writes_all_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write(dir.path(), "g.txt", RING_GRAPH);
    let out_dir = dir.path().join("out");
    let out = run(&["lift", &graph, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    for name in [
        "lifted_matrix.csv",
        "gain_matrix.csv",
        "components.txt",
        "report.txt",
    ] {
        assert!(out_dir.join(name).exists(), "{name} missing");
    }
    let components = fs::read_to_string(out_dir.join("components.txt")).unwrap();
    assert_eq!(components, "1 3 8\n2 4 6\n5 7 9\n");
}

#[test]
fn classify_sequence_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let balanced = write(dir.path(), "b.txt", RING_SEQUENCE);
    let out = run(&["classify-sequence", &balanced]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("b = [0, 1, 0]"));

    let unbalanced = write(dir.path(), "u.txt", UNBALANCED_SEQUENCE);
    let out = run(&["classify-sequence", &unbalanced]);
    assert_eq!(out.status.code(), Some(1));

    // Alternating graphs balanced with respect to different clusterings.
    let mixed = write(
        dir.path(),
        "m.txt",
        "2 3 2\n1 1 0\n2 2 0\n1 2 1\n2 1 2\n---\n1 1 0\n2 2 0\n1 2 2\n2 1 1\n",
    );
    let out = run(&["classify-sequence", &mixed]);
    assert_eq!(out.status.code(), Some(3));
    let out = run(&["classify-sequence", &mixed, "--p", "2"]);
    assert_eq!(out.status.code(), Some(1));

    // No arcs beyond self-loops: never jointly strongly connected.
    let isolated = write(dir.path(), "i.txt", "2 3 1\n1 1 0\n2 2 0\n");
    let out = run(&["classify-sequence", &isolated]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn simulate_exit_codes_follow_aggregate_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let balanced = write(dir.path(), "b.txt", RING_SEQUENCE);
    let out = run(&[
        "simulate",
        &balanced,
        "--trials",
        "2",
        "--seed",
        "7",
        "--T",
        "600",
        "--out",
        dir.path().join("ok").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));

    let unbalanced = write(dir.path(), "u.txt", UNBALANCED_SEQUENCE);
    let out = run(&[
        "simulate",
        &unbalanced,
        "--trials",
        "2",
        "--seed",
        "7",
        "--T",
        "4000",
        "--out",
        dir.path().join("zero").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));

    // T = 0 leaves every trial undecided.
    let out = run(&[
        "simulate",
        &balanced,
        "--trials",
        "2",
        "--seed",
        "7",
        "--T",
        "0",
        "--out",
        dir.path().join("und").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let summary =
        fs::read_to_string(dir.path().join("und").join("summary.json")).unwrap();
    assert!(summary.contains("\"undecided\": 2"));
    let trace = fs::read_to_string(dir.path().join("und").join("trace_000.csv")).unwrap();
    assert_eq!(trace.lines().count(), 2); // header + t = 0
}

#[test]
fn identical_seed_and_config_give_identical_summaries() {
    let dir = tempfile::tempdir().unwrap();
    let seq = write(dir.path(), "s.txt", RING_SEQUENCE);
    let args = |out: &str| {
        vec![
            "simulate".to_string(),
            seq.clone(),
            "--trials".into(),
            "4".into(),
            "--seed".into(),
            "123".into(),
            "--T".into(),
            "500".into(),
            "--out".into(),
            out.to_string(),
        ]
    };
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    let run_a = Command::new(BIN)
        .args(args(out_a.to_str().unwrap()))
        .output()
        .unwrap();
    // Different worker counts must not change results either.
    let run_b = Command::new(BIN)
        .args(args(out_b.to_str().unwrap()))
        .arg("--workers")
        .arg("1")
        .output()
        .unwrap();
    assert_eq!(run_a.status.code(), Some(0));
    assert_eq!(run_b.status.code(), Some(0));

    let sum_a = fs::read(out_a.join("summary.json")).unwrap();
    let sum_b = fs::read(out_b.join("summary.json")).unwrap();
    assert_eq!(sum_a, sum_b, "summaries differ between identical runs");
    for trial in 0..4 {
        let t_a = fs::read(out_a.join(format!("trace_{trial:03}.csv"))).unwrap();
        let t_b = fs::read(out_b.join(format!("trace_{trial:03}.csv"))).unwrap();
        assert_eq!(t_a, t_b, "trace {trial} differs");
    }
}

#[test]
fn env_variables_mirror_flags() {
    let dir = tempfile::tempdir().unwrap();
    let seq = write(dir.path(), "s.txt", RING_SEQUENCE);
    let out_dir = dir.path().join("env-out");
    let out = Command::new(BIN)
        .args(["simulate", &seq, "--trials", "1", "--T", "100"])
        .env("GAINFLOCK_SEED", "99")
        .env("GAINFLOCK_OUT", out_dir.to_str().unwrap())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let summary = fs::read_to_string(out_dir.join("summary.json")).unwrap();
    assert!(summary.contains("\"seed\": 99"));
}
