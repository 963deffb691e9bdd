use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lanefowler"))
        .args(args)
        .env("LANEFOWLER_THREADS", "2")
        .output()
        .unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn pair(v: &Value) -> [f64; 2] {
    [v[0].as_f64().unwrap(), v[1].as_f64().unwrap()]
}

#[test]
fn help_documents_every_flag() {
    let cases: [(&str, &[&str]); 5] = [
        ("solve", &["--example", "--problem", "--order", "--degree", "--c1", "--c2", "--nodes", "--output", "--format"]),
        (
            "tune",
            &[
                "--example", "--problem", "--order", "--degree", "--search", "--budget", "--nodes",
                "--residual", "--stationarity", "--output", "--format",
            ],
        ),
        ("bench", &["--all", "--example", "--degree", "--search", "--budget", "--nodes", "--output", "--format"]),
        (
            "landscape",
            &[
                "--example", "--problem", "--order", "--degree", "--search", "--resolution", "--nodes",
                "--residual", "--output", "--format",
            ],
        ),
        ("examples", &["--output", "--format"]),
    ];
    for (sub, flags) in cases {
        let out = run(&[sub, "--help"]);
        assert_eq!(out.status.code(), Some(0), "{sub}");
        let text = String::from_utf8(out.stdout).unwrap();
        for flag in flags {
            assert!(text.contains(flag), "{sub} --help lacks {flag}");
        }
        assert!(text.contains("--verbose"), "{sub}");
    }
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["solve"][..],
        &["solve", "--example", "3", "--problem", "x.toml"],
        &["solve", "--example", "3", "--format", "xml"],
        &["tune", "--example", "2", "--search", "-1:0.5"],
        &["frobnicate"],
        &["bench"],
        &["solve", "--example", "9"],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
    let out = Command::new(env!("CARGO_BIN_EXE_lanefowler"))
        .args(["examples"])
        .env("LANEFOWLER_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn run_failures_exit_with_one() {
    assert_eq!(run(&["solve", "--problem", "/nonexistent/problem.toml"]).status.code(), Some(1));
    assert_eq!(run(&["solve", "--example", "3", "--order", "0"]).status.code(), Some(1));
}

#[test]
fn solve_recovers_the_polynomial_example() {
    let v = json(&["solve", "--example", "3", "--format", "json"]);
    let err = pair(&v["max_err"]);
    assert!(err[0] <= 1e-10 && err[1] <= 1e-10, "{err:?}");
    assert!(!v["rows"].as_array().unwrap().is_empty());
}

#[test]
fn tune_finds_the_example_two_optimum() {
    let v = json(&["tune", "--example", "2:v1", "--format", "json"]);
    let c = pair(&v["tune"]["c_opt"]);
    assert!((c[0] + 0.7673).abs() < 5e-3 && (c[1] + 0.7998).abs() < 5e-3, "{c:?}");
    assert_eq!(v["tune"]["converged"], Value::Bool(true));
    assert!(v["bounds"]["delta"].as_f64().unwrap().is_finite());
}

#[test]
fn output_files_follow_their_extension() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("ex3.csv");
    let js = dir.path().join("ex3.json");
    for p in [&csv, &js] {
        let out = run(&["solve", "--example", "3", "--output", p.to_str().unwrap()]);
        assert!(out.status.success());
        assert!(out.stdout.is_empty());
    }
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("x,phi1,phi2,"), "{text}");
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&js).unwrap()).unwrap();
    assert!(v["max_err"].is_array());
}

#[test]
fn problem_files_are_solved_like_builtins() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ex3.toml");
    let b = lanefowler::bench::builtin(3, None).unwrap();
    let file = lanefowler::bench::ProblemFile::from_problem("ex3", b.description, b.problem);
    std::fs::write(&path, file.to_toml()).unwrap();
    let from_file = json(&["solve", "--problem", path_str(&path), "--format", "json"]);
    let builtin = json(&["solve", "--example", "3", "--format", "json"]);
    assert_eq!(from_file["rows"], builtin["rows"]);
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn examples_lists_every_variant() {
    let out = run(&["examples", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for (id, v) in lanefowler::bench::catalog::all() {
        assert!(text.contains(&format!("{id}:{v},")), "{id}:{v} missing from\n{text}");
    }
}

#[test]
fn landscape_table_reports_the_argmin() {
    let out = run(&["landscape", "--example", "3", "--resolution", "5", "--order", "2"]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("smallest E"));
}
