//! End-to-end tests of the `jigsaw` binary: exit codes, wrapper fidelity
//! against direct library calls, and manifest replay.

use std::fs;
use std::process::{Command, Output};

use jigsaw_core::{
    cluster_stats, gen_double, parse_edge_list, subcritical_union_bound, write_edge_list,
    ERParams, SeedSpec,
};

const HAND_EXAMPLE: &str = "4 3 3\nR 1 2\nR 1 3\nR 1 4\nB 1 2\nB 2 3\nB 3 4\n";

fn jigsaw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jigsaw"))
        .args(args)
        .output()
        .expect("spawn jigsaw")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no exit code")
}

#[test]
fn solve_prints_solver_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("hand.txt");
    fs::write(&path, HAND_EXAMPLE).unwrap();
    let v = stdout_json(&jigsaw(&["solve", path.to_str().unwrap()]));
    assert_eq!(v["percolates"], true);
    assert_eq!(v["cluster_counts"], serde_json::json!([4, 3, 2, 1]));
}

#[test]
fn solve_reference_flag_agrees_with_fast_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("hand.txt");
    fs::write(&path, HAND_EXAMPLE).unwrap();
    let p = path.to_str().unwrap();
    let fast = stdout_json(&jigsaw(&["solve", p]));
    let slow = stdout_json(&jigsaw(&["solve", p, "--reference"]));
    assert_eq!(fast["percolates"], slow["percolates"]);
    assert_eq!(fast["cluster_counts"], slow["cluster_counts"]);
    assert_eq!(fast["final_blocks"], slow["final_blocks"]);
}

#[test]
fn solve_edge_disjoint_reports_singletons() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("disjoint.txt");
    fs::write(&path, "4 1 1\nR 1 2\nB 3 4\n").unwrap();
    let v = stdout_json(&jigsaw(&["solve", path.to_str().unwrap()]));
    assert_eq!(v["percolates"], false);
    assert_eq!(v["cluster_counts"], serde_json::json!([4]));
    for block in v["final_blocks"].as_array().unwrap() {
        assert_eq!(block.as_array().unwrap().len(), 1);
    }
}

#[test]
fn self_loop_line_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    fs::write(&path, "3 1 0\nR 1 1\n").unwrap();
    let out = jigsaw(&["solve", path.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 3);
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("line 2"), "want line number, got: {msg}");
}

#[test]
fn unreadable_input_is_a_parse_error() {
    let out = jigsaw(&["solve", "/nonexistent/graph.txt"]);
    assert_eq!(exit_code(&out), 3);
}

#[test]
fn sample_certain_percolation_estimates_one() {
    let v = stdout_json(&jigsaw(&[
        "--seed", "1", "sample", "--n", "8", "--p1", "1", "--p2", "1", "--trials", "10",
    ]));
    assert_eq!(v["estimate"], 1.0);
    assert_eq!(v["percolated"], 10);
}

#[test]
fn sample_csv_equals_direct_stats_call() {
    let out = jigsaw(&[
        "--seed", "11", "--format", "csv", "sample", "--n", "64", "--p1", "0.3", "--p2", "0.3",
        "--trials", "40",
    ]);
    assert!(out.status.success());
    let direct = cluster_stats(
        ERParams::new(64, 0.3, 0.3).unwrap(),
        40,
        SeedSpec::new(11, 0),
    );
    assert_eq!(String::from_utf8_lossy(&out.stdout), direct.to_csv());
}

#[test]
fn sample_rejects_zero_trials() {
    let out = jigsaw(&[
        "--seed", "1", "sample", "--n", "8", "--p1", "0.5", "--p2", "0.5", "--trials", "0",
    ]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn bounds_csv_matches_direct_evaluation() {
    let out = jigsaw(&["bounds", "--n", "4096", "--q", "1e-8,1e-6,1e-4", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("n,q,p1,p2,k_lo,k_hi,ln_exact"));
    let fields: Vec<&str> = lines[2].split(',').collect();
    let p = 1e-6f64.sqrt();
    let (exact, chain) = subcritical_union_bound(4096, p, p);
    // shortest round-trip formatting both ways, so parse-and-compare is exact
    assert_eq!(fields[6].parse::<f64>().unwrap(), exact.log_value);
    assert_eq!(fields[12].parse::<f64>().unwrap(), chain[2].log_value);
}

#[test]
fn bounds_rejects_out_of_range_product() {
    let out = jigsaw(&["bounds", "--n", "4096", "--q", "1.5"]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn stochastic_subcommands_require_a_seed() {
    let out = jigsaw(&["threshold", "--n", "256"]);
    assert_eq!(exit_code(&out), 2);
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("--seed"), "got: {msg}");
    // solve is deterministic and must not demand one
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("hand.txt");
    fs::write(&path, HAND_EXAMPLE).unwrap();
    assert!(jigsaw(&["solve", path.to_str().unwrap()]).status.success());
}

#[test]
fn bare_invocation_is_a_usage_error() {
    let out = jigsaw(&[]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn manifest_and_subcommand_are_mutually_exclusive() {
    let out = jigsaw(&["--manifest", "whatever.json", "bounds", "--n", "64", "--q", "1e-4"]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn scale_rerun_and_manifest_replay_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let c = dir.path().join("c.csv");
    let run = |out_path: &std::path::Path| {
        let out = Command::new(env!("CARGO_BIN_EXE_jigsaw"))
            .args(["--seed", "5", "--format", "csv", "--out"])
            .arg(out_path)
            .args(["scale", "--ns", "64,128", "--trials-per-probe", "50", "--rel-tol", "0.2"])
            .output()
            .expect("spawn jigsaw");
        assert!(
            out.status.success(),
            "stderr: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    };
    run(&a);
    run(&b);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap(), "same flags, same bytes");

    let manifest = dir.path().join("a.csv.manifest.json");
    assert!(manifest.exists());
    let out = jigsaw(&[
        "--manifest",
        manifest.to_str().unwrap(),
        "--out",
        c.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(fs::read(&a).unwrap(), fs::read(&c).unwrap(), "manifest replay bytes");

    // replay may not silently change the stream or the artifact shape
    let bad = jigsaw(&["--manifest", manifest.to_str().unwrap(), "--seed", "6"]);
    assert_eq!(exit_code(&bad), 2);
    let bad = jigsaw(&["--manifest", manifest.to_str().unwrap(), "--format", "json"]);
    assert_eq!(exit_code(&bad), 2);
}

#[test]
fn dump_graph_round_trips_through_the_parser() {
    let out = jigsaw(&[
        "--seed", "9", "dump-graph", "--n", "12", "--p1", "0.4", "--p2", "0.6",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    let direct = gen_double(
        ERParams::new(12, 0.4, 0.6).unwrap(),
        SeedSpec::new(9, 0),
    );
    assert_eq!(text, write_edge_list(&direct));
    let parsed = parse_edge_list(&text).unwrap();
    assert_eq!(write_edge_list(&parsed), text);
}

#[test]
fn cycle_below_minimum_size_is_a_usage_error() {
    let out = jigsaw(&["--seed", "1", "cycle", "--n", "512"]);
    assert_eq!(exit_code(&out), 2);
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("1024"), "got: {msg}");
}

#[test]
fn fixed_output_shapes_reject_conflicting_format() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("hand.txt");
    fs::write(&path, HAND_EXAMPLE).unwrap();
    let out = jigsaw(&["--format", "csv", "solve", path.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 2);
    let out = jigsaw(&[
        "--seed", "1", "--format", "json", "dump-graph", "--n", "4", "--p1", "0.5", "--p2", "0.5",
    ]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn probe_flags_are_validated() {
    let out = jigsaw(&["--seed", "1", "threshold", "--n", "256", "--rel-tol", "1.5"]);
    assert_eq!(exit_code(&out), 2);
    let out = jigsaw(&["--seed", "1", "threshold", "--n", "256", "--trials-per-probe", "0"]);
    assert_eq!(exit_code(&out), 2);
    let out = jigsaw(&["--seed", "1", "--workers", "0", "sample", "--n", "8", "--p1", "0.5",
        "--p2", "0.5", "--trials", "1"]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn threshold_csv_has_the_documented_header() {
    let out = jigsaw(&[
        "--seed", "2", "--format", "csv", "threshold", "--n", "64", "--trials-per-probe", "30",
        "--rel-tol", "0.2",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("n,q_lo,q_hi,est_lo,est_hi,q_hat,trials_per_probe,probes,normalized\n"));
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn explore_emits_certificate_and_optional_trace() {
    let n = 1024u32;
    let q = 64.0 / (n as f64 * (n as f64).ln());
    let p = format!("{}", q.sqrt());
    let v = stdout_json(&jigsaw(&[
        "--seed", "7", "explore", "--n", "1024", "--p1", &p, "--p2", &p,
    ]));
    assert_eq!(v["union_percolates"], true);
    assert!(v["stage1_queries"].as_u64().unwrap() > 0);
    assert!(v.get("trace").is_none());

    let traced = stdout_json(&jigsaw(&[
        "--seed", "7", "explore", "--n", "1024", "--p1", &p, "--p2", &p, "--trace",
    ]));
    assert_eq!(traced["union_percolates"], true);
    assert!(!traced["trace"]["stage1_rounds"].as_array().unwrap().is_empty());
    assert!(!traced["trace"]["stage2_steps"].as_array().unwrap().is_empty());
}
