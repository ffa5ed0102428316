//! End-to-end tests spawning the actual binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn xdpk(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xdpk"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary should spawn")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout must be a single JSON document")
}

fn write_fixture(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("fixture.json");
    fs::write(
        &path,
        r#"{"capacity":2.0,"items":[[3.0,1.0],[2.0,1.0],[1.0,1.0]]}"#,
    )
    .unwrap();
    path
}

#[test]
fn solve_xdp_reports_certified_result() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(dir.path());
    let out = xdpk(
        &["solve", "--algo", "xdp", "--emit-selection", "fixture.json"],
        dir.path(),
    );
    let value = stdout_json(&out);
    assert_eq!(value["profit"], 5.0);
    assert_eq!(value["e"], 0.0);
    assert_eq!(value["pmax"], 5.0);
    assert_eq!(value["selection"], serde_json::json!([1, 2]));
    assert!(value["runtime_seconds"].as_f64().unwrap() >= 0.0);
    assert!(value["bins"].as_u64().unwrap() >= 1);
}

#[test]
fn solve_greedy_and_exact_agree_on_fixture() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(dir.path());
    let greedy = stdout_json(&xdpk(&["solve", "--algo", "greedy", "fixture.json"], dir.path()));
    let exact = stdout_json(&xdpk(&["solve", "--algo", "exact", "fixture.json"], dir.path()));
    assert_eq!(greedy["profit"], 5.0);
    assert_eq!(greedy["gefr"], 0.0);
    assert_eq!(exact["profit"], 5.0);
    assert_eq!(exact["method"], "exhaustive");
}

#[test]
fn solve_does_not_mutate_the_input_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_fixture(dir.path());
    let before = fs::read(&path).unwrap();
    let out = xdpk(&["solve", "--algo", "xdp", "fixture.json"], dir.path());
    assert!(out.status.success());
    assert_eq!(fs::read(&path).unwrap(), before);
}

#[test]
fn exact_refuses_oversized_instances_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let items: Vec<[f64; 2]> = (0..50).map(|i| [1.0 + i as f64, 1.0]).collect();
    let inst = serde_json::json!({ "capacity": 10.0, "items": items });
    fs::write(dir.path().join("big.json"), inst.to_string()).unwrap();
    let out = xdpk(&["solve", "--algo", "exact", "big.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("40"), "refusal must name the limit: {stderr}");
    let err: serde_json::Value = serde_json::from_str(stderr.trim()).unwrap();
    assert!(err["error"].is_string());
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = xdpk(&["solve", "--no-such-flag"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("Usage"), "usage text expected: {stderr}");
}

#[test]
fn gen_is_deterministic_and_solvable() {
    let dir = tempfile::tempdir().unwrap();
    let a = xdpk(&["gen", "--n", "64", "--seed", "9", "--out", "a.json"], dir.path());
    let b = xdpk(&["gen", "--n", "64", "--seed", "9", "--out", "b.json"], dir.path());
    assert!(a.status.success() && b.status.success());
    assert_eq!(
        fs::read(dir.path().join("a.json")).unwrap(),
        fs::read(dir.path().join("b.json")).unwrap()
    );

    let solved = stdout_json(&xdpk(&["solve", "--algo", "xdp", "a.json"], dir.path()));
    assert!(solved["e"].as_f64().unwrap() >= 0.0);
}

#[test]
fn gen_fixed_k_hits_the_window() {
    let dir = tempfile::tempdir().unwrap();
    let out = xdpk(
        &["gen", "--n", "200", "--fixed-k", "10", "--seed", "5", "--out", "k.json"],
        dir.path(),
    );
    assert!(out.status.success());
    let greedy = stdout_json(&xdpk(
        &["solve", "--algo", "greedy", "--emit-selection", "k.json"],
        dir.path(),
    ));
    let size = greedy["selection"].as_array().unwrap().len();
    assert!((9..=11).contains(&size), "greedy selected {size} objects");
}

#[test]
fn gen_rejects_bad_fixed_k() {
    let dir = tempfile::tempdir().unwrap();
    let out = xdpk(
        &["gen", "--n", "10", "--fixed-k", "11", "--out", "x.json"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

/// CSV comparison with the runtime column masked out.
fn strip_runtime(csv: &str) -> String {
    csv.lines()
        .map(|line| {
            let cols: Vec<&str> = line.split(',').collect();
            cols[..cols.len() - 1].join(",")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn bench_is_reproducible_except_runtime() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["r1.csv", "r2.csv"] {
        let out = xdpk(
            &[
                "bench", "--table", "4", "--trials", "2", "--seed", "7", "--quiet", "--out", name,
            ],
            dir.path(),
        );
        assert!(
            out.status.success(),
            "stderr: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let r1 = fs::read_to_string(dir.path().join("r1.csv")).unwrap();
    let r2 = fs::read_to_string(dir.path().join("r2.csv")).unwrap();
    assert_eq!(strip_runtime(&r1), strip_runtime(&r2));
    assert!(r1.lines().next().unwrap().contains("mean_e"));
    assert_eq!(r1.lines().count(), 4); // header + k in {5, 50, 500}
}

#[test]
fn bench_stdout_matches_format_flag() {
    let dir = tempfile::tempdir().unwrap();
    let out = xdpk(
        &[
            "bench", "--table", "1", "--trials", "2", "--format", "json", "--out", "t1.json",
        ],
        dir.path(),
    );
    let value = stdout_json(&out);
    assert!(value.is_array());
    assert_eq!(value.as_array().unwrap().len(), 3); // desk preset sizes
}

#[test]
fn jooken_reports_per_file_rows_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    for (name, body, opt) in [
        ("a", "2\n1 10 5\n2 7 4\n8\n", "10"),
        ("b", "1\n1 3 2\n2\n", "3"),
    ] {
        let case = data.join(name);
        fs::create_dir_all(&case).unwrap();
        fs::write(case.join("test.in"), body).unwrap();
        fs::write(case.join("test.opt"), opt).unwrap();
    }
    let out = xdpk(
        &["jooken", "--dir", "data", "--report", "report.csv"],
        dir.path(),
    );
    let summary = stdout_json(&out);
    assert_eq!(summary["files"], 2);
    assert_eq!(summary["pmax_violations"], 0);
    assert_eq!(summary["mean_fractional_error"], 0.0);

    let report = fs::read_to_string(dir.path().join("report.csv")).unwrap();
    let lines: Vec<&str> = report.lines().collect();
    assert_eq!(lines.len(), 4); // header + 2 rows + summary
    assert!(lines[0].starts_with("path,n,greedy_k,xdp_k"));
    assert!(lines[3].starts_with("SUMMARY,"));
}

#[test]
fn jooken_errors_on_empty_directory() {
    let dir = tempfile::tempdir().unwrap();
    fs::create_dir(dir.path().join("empty")).unwrap();
    let out = xdpk(
        &["jooken", "--dir", "empty", "--report", "r.csv"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}
