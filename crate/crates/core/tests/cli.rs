mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::*;

fn datatrace(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_datatrace"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn run_prints_the_dump_and_exits_zero() {
    let tmp = tempfile::tempdir().unwrap();
    copy_fixtures(tmp.path());
    let o = datatrace(&["run", "supermarkets_logged_1.ljk"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "Dumped a log at spm_cellwise.csv\n");
    assert!(tmp.path().join("spm_cellwise.csv").is_file());
    assert!(tmp.path().join("supermarkets_treated.csv").is_file());
}

#[test]
fn quiet_and_log_dir() {
    let tmp = tempfile::tempdir().unwrap();
    copy_fixtures(tmp.path());
    let o = datatrace(
        &[
            "run",
            "--quiet",
            "--log-dir",
            "logs",
            "supermarkets_logged_2.ljk",
        ],
        tmp.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "");
    assert!(tmp.path().join("logs/spm_cellwise.csv").is_file());
    assert!(tmp.path().join("logs/spm_expression.csv").is_file());
}

#[test]
fn fixed_time_lands_in_the_log() {
    let tmp = tempfile::tempdir().unwrap();
    copy_fixtures(tmp.path());
    let o = datatrace(
        &["run", "--fixed-time", TIME, "supermarkets_logged_1.ljk"],
        tmp.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let log = std::fs::read_to_string(tmp.path().join("spm_cellwise.csv")).unwrap();
    assert!(log
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("2,\"2020-05-08 15:24:36 +02:00\",\"supermarkets_logged_1.ljk#7-7\""));
}

#[test]
fn script_errors_exit_one() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("broken.ljk"), "x <- 1\n\ny <- (x +\n").unwrap();
    let o = datatrace(&["check", "broken.ljk"], tmp.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));

    std::fs::write(tmp.path().join("fails.ljk"), "x <- 1\ny <- nope\n").unwrap();
    let o = datatrace(&["run", "fails.ljk"], tmp.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("fails.ljk#2-2"), "{}", stderr(&o));
}

#[test]
fn usage_and_missing_files_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(
        datatrace(&["run", "missing.ljk"], tmp.path()).status.code(),
        Some(2)
    );
    assert_eq!(
        datatrace(&["check", "missing.ljk"], tmp.path())
            .status
            .code(),
        Some(2)
    );
    assert_eq!(datatrace(&["run"], tmp.path()).status.code(), Some(2));
    assert_eq!(
        datatrace(&["frobnicate"], tmp.path()).status.code(),
        Some(2)
    );
    assert_eq!(
        datatrace(&["run", "--fixed-time", "soon", "x.ljk"], tmp.path())
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn check_counts_statements() {
    let o = datatrace(&["check", "supermarkets_logged_1.ljk"], &fixtures());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "supermarkets_logged_1.ljk: 8 statements\n");
}

#[test]
fn loggers_and_grammar() {
    let dir = fixtures();
    let o = datatrace(&["loggers"], &dir);
    assert_eq!(o.status.code(), Some(0));
    let kinds: Vec<_> = stdout(&o)
        .lines()
        .map(|l| l.split('(').next().unwrap().to_string())
        .collect();
    assert_eq!(
        kinds,
        ["simple", "cellwise", "expression", "filedump", "trivial"]
    );
    assert!(stdout(&o).contains("cellwise(key = \"<column>\")"));

    let o = datatrace(&["grammar"], &dir);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("```ebnf"));
    assert!(stdout(&o).contains("start_log"));
}

#[test]
fn help_exits_zero() {
    let o = datatrace(&["--help"], &fixtures());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("run"));
}
