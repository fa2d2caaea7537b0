use std::path::Path;
use std::process::{Command, Output};

use ccbo::harness::{read_batch_csv, BATCH_HEADER, TRACE_HEADER};

fn ccbo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ccbo")).args(args).env("CCBO_JOBS", "2").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn list_names_experiments() {
    let o = ccbo(&["list"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for name in ["quadratic-ellipse", "ackley-d20-case3", "thomson-k470", "ackley-case-b-projected"] {
        assert!(text.lines().any(|l| l == name), "{name} missing");
    }
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(ccbo(&["run", "no-such-problem"]).status.code(), Some(2));
    assert_eq!(ccbo(&["run", "quadratic-line", "--bogus"]).status.code(), Some(2));
    assert_eq!(ccbo(&["run", "quadratic-line", "--param.bogus", "1"]).status.code(), Some(2));
    assert_eq!(ccbo(&["run", "quadratic-line", "--param.alpha", "-1"]).status.code(), Some(2));
    assert_eq!(ccbo(&["run", "quadratic-line", "--param.alpha"]).status.code(), Some(2));
    assert_eq!(ccbo(&["compare", "z"]).status.code(), Some(2));
    assert_eq!(ccbo(&[]).status.code(), Some(2));
    assert_eq!(ccbo(&["--help"]).status.code(), Some(0));
}

#[test]
fn runtime_failure_exits_1() {
    let o = ccbo(&["run", "quadratic-line", "--param.max_steps", "5", "--trace", "/nonexistent/dir/t.csv"]);
    assert_eq!(o.status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("missing.json");
    assert_eq!(ccbo(&["run", "quadratic-line", "--config", path_str(&cfg)]).status.code(), Some(1));
}

#[test]
fn trace_file_has_fixed_header() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.csv");
    let o = ccbo(&["run", "thomson-k2", "--param.max_total_steps", "40", "--trace", path_str(&trace)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&trace).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), TRACE_HEADER.join(","));
    assert_eq!(lines.count(), 41 + stdout(&o).lines().find(|l| l.starts_with("restarts:")).map_or(0, |l| {
        l["restarts: ".len()..].parse::<usize>().unwrap()
    }));
}

#[test]
fn batch_rows_replay_with_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("b.csv");
    let o = ccbo(&["batch", "quadratic-ellipse", "--runs", "3", "--seed", "7", "--param.max_steps", "60", "--out", path_str(&out)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("success_rate="));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().next().unwrap(), BATCH_HEADER.join(","));
    let rows = read_batch_csv(text.as_bytes()).unwrap();
    assert_eq!(rows.iter().map(|r| r.seed).collect::<Vec<_>>(), vec![7, 8, 9]);

    let o = ccbo(&["run", "quadratic-ellipse", "--seed", "8", "--param.max_steps", "60"]);
    let text = stdout(&o);
    let field = |key: &str| text.lines().find_map(|l| l.strip_prefix(key)).unwrap().trim().to_string();
    assert_eq!(field("objective:").parse::<f64>().unwrap(), rows[1].final_objective);
    assert_eq!(field("distance_D:").parse::<f64>().unwrap(), rows[1].distance_d);
    assert_eq!(field("steps:").parse::<u64>().unwrap(), rows[1].steps);
}

#[test]
fn batch_without_out_prints_csv_then_summary() {
    let o = ccbo(&["batch", "ackley-d3-case5", "--runs", "2", "--param.max_steps", "30"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], BATCH_HEADER.join(","));
    assert_eq!(lines.len(), 4);
    assert!(lines[3].starts_with("# ackley-d3-case5: runs=2"));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"max_steps": 7, "n_particles": 5}"#).unwrap();
    let o = ccbo(&["run", "quadratic-line", "--config", path_str(&cfg)]);
    assert!(stdout(&o).contains("steps: 7\n"));
    let o = ccbo(&["run", "quadratic-line", "--config", path_str(&cfg), "--param.max_steps", "4"]);
    assert!(stdout(&o).contains("steps: 4\n"));
}

#[test]
fn compare_prints_one_row_per_method() {
    let o = ccbo(&["compare", "ackley-case-b", "--runs", "2", "--param.max_steps", "20"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    for (row, label) in rows.iter().zip(["constrained", "penalized", "projected"]) {
        assert!(row.starts_with(label), "{row}");
    }
    let o = ccbo(&["compare", "c", "--runs", "1", "--param.max_steps", "10"]);
    assert_eq!(stdout(&o).lines().count(), 3);
}

#[test]
fn sweep_reports_each_value() {
    let o = ccbo(&["sweep", "ackley-d3-case5", "--param", "alpha", "--values", "10,30", "--runs", "2", "--param.max_steps", "30"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "alpha,success_rate,avg_distance,avg_relative_error,avg_total_steps");
    assert!(lines[1].starts_with("10,") && lines[2].starts_with("30,"));
    assert_eq!(ccbo(&["sweep", "ackley-d3-case5", "--param", "nope", "--values", "1"]).status.code(), Some(2));
}
