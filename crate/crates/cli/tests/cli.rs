//! End-to-end checks of the `scuba` binary: determinism, instance-file
//! round-trips, trace output and parameter validation.

use std::path::Path;
use std::process::{Command, Output};

fn scuba(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scuba"))
        .args(args)
        .output()
        .expect("spawning scuba")
}

fn stdout_of(args: &[&str]) -> String {
    let out = scuba(args);
    assert!(
        out.status.success(),
        "scuba {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 CSV")
}

#[test]
fn run_is_byte_deterministic() {
    let args = [
        "run",
        "--problem",
        "nkq",
        "--n",
        "24",
        "--k",
        "2",
        "--q",
        "3",
        "--heuristic",
        "ss",
        "--runs",
        "20",
        "--seed",
        "9",
    ];
    assert_eq!(stdout_of(&args), stdout_of(&args));
}

#[test]
fn worker_count_leaves_bytes_unchanged() {
    let base = [
        "table2", "--n", "16", "--l", "6,8", "--runs", "12", "--seed", "3",
    ];
    let single: Vec<&str> = base.iter().copied().chain(["--workers", "1"]).collect();
    let multi: Vec<&str> = base.iter().copied().chain(["--workers", "4"]).collect();
    assert_eq!(stdout_of(&single), stdout_of(&multi));
}

#[test]
fn table1_has_the_pinned_schema_and_grid() {
    let out = stdout_of(&["table1", "--n", "20", "--samples", "40", "--seed", "5"]);
    let mut lines = out.lines();
    assert_eq!(
        lines.next().unwrap(),
        "problem,q,k,l,samples,mean_degree"
    );
    // 4 q-values x 6 K-values.
    assert_eq!(lines.count(), 24);
}

#[test]
fn fig1_reports_proportions_for_each_lattice_size() {
    let out = stdout_of(&[
        "fig1", "--n", "12", "--samples", "30", "--seed", "4", "--l", "6,9",
    ]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "problem,q,k,l,samples,mean_proportion");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("tspn,,,6,30,"));
    assert!(lines[2].starts_with("tspn,,,9,30,"));
}

#[test]
fn instance_files_round_trip_through_gen_and_run() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("inst.nkq");
    let path_str = path.to_str().unwrap();

    let gen = scuba(&[
        "gen", "--problem", "nkq", "--n", "16", "--k", "3", "--q", "4", "--seed", "77", "--out",
        path_str,
    ]);
    assert!(gen.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("NKQ 1\n16 3 4 random 77\n"));

    // Running from the file matches running from inline parameters with the
    // same instance seed.
    let from_file = stdout_of(&[
        "run",
        "--instance",
        path_str,
        "--heuristic",
        "hc",
        "--runs",
        "10",
        "--seed",
        "21",
    ]);
    let inline = stdout_of(&[
        "run",
        "--problem",
        "nkq",
        "--n",
        "16",
        "--k",
        "3",
        "--q",
        "4",
        "--heuristic",
        "hc",
        "--runs",
        "10",
        "--seed",
        "21",
        "--instance-seed",
        "77",
    ]);
    assert_eq!(from_file, inline);
}

#[test]
fn tspn_instance_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("inst.tspn");
    let path_str = path.to_str().unwrap();
    let gen = scuba(&[
        "gen", "--problem", "tspn", "--l", "8", "--n", "20", "--seed", "3", "--out", path_str,
    ]);
    assert!(gen.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("TSPN 1\n8 20 3\n"));
    let first = stdout_of(&[
        "run",
        "--instance",
        path_str,
        "--heuristic",
        "ss",
        "--runs",
        "5",
        "--seed",
        "11",
    ]);
    assert!(first.lines().count() == 6);
}

#[test]
fn trace_file_records_accepted_moves() {
    let dir = tempfile::tempdir().unwrap();
    let trace_path = dir.path().join("trace.csv");
    let out = stdout_of(&[
        "run",
        "--problem",
        "nkq",
        "--n",
        "16",
        "--k",
        "1",
        "--q",
        "2",
        "--heuristic",
        "ss",
        "--runs",
        "5",
        "--seed",
        "2",
        "--trace",
        trace_path.to_str().unwrap(),
    ]);
    let trace = std::fs::read_to_string(&trace_path).unwrap();
    let mut lines = trace.lines();
    assert_eq!(
        lines.next().unwrap(),
        "run,move,kind,fitness_before,fitness_after,evaluations"
    );
    // Sum of flat and gate counters in the run CSV equals trace records.
    let moves: u64 = out
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            f[7].parse::<u64>().unwrap() + f[8].parse::<u64>().unwrap()
        })
        .sum();
    assert_eq!(lines.count() as u64, moves);
    for line in trace.lines().skip(1) {
        let kind = line.split(',').nth(2).unwrap();
        assert!(kind == "neutral" || kind == "jump");
    }
}

#[test]
fn invalid_parameters_exit_nonzero() {
    // K >= N.
    let out = scuba(&[
        "run", "--problem", "nkq", "--n", "8", "--k", "8", "--q", "2", "--heuristic", "hc",
        "--runs", "1", "--seed", "1",
    ]);
    assert!(!out.status.success());

    // q < 2.
    let out = scuba(&[
        "gen", "--problem", "nkq", "--n", "8", "--k", "1", "--q", "1", "--seed", "1", "--out",
        "/tmp/never-written.nkq",
    ]);
    assert!(!out.status.success());

    // N > L^2.
    let out = scuba(&[
        "run", "--problem", "tspn", "--l", "3", "--n", "10", "--heuristic", "hc", "--runs", "1",
        "--seed", "1",
    ]);
    assert!(!out.status.success());

    // Unknown problem family.
    let out = scuba(&[
        "run", "--problem", "maxsat", "--heuristic", "hc", "--runs", "1", "--seed", "1",
    ]);
    assert!(!out.status.success());

    // Missing required parameter.
    let out = scuba(&["table1", "--n", "16"]);
    assert!(!out.status.success());
}

#[test]
fn out_flag_writes_the_same_bytes_as_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let args = ["table1", "--n", "20", "--samples", "25", "--seed", "8"];
    let streamed = stdout_of(&args);
    let with_out: Vec<&str> = args
        .iter()
        .copied()
        .chain(["--out", path.to_str().unwrap()])
        .collect();
    let out = scuba(&with_out);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), streamed);
}

#[test]
fn gen_requires_an_output_path() {
    let out = scuba(&[
        "gen", "--problem", "tspn", "--l", "5", "--n", "5", "--seed", "1",
    ]);
    assert!(!out.status.success());
    assert!(Path::new("/tmp/never-written.nkq").metadata().is_err());
}
