use std::fs;
use std::process::{Command, Output};

use propdisc_cli::LOCK_NAME;

fn propdisc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_propdisc")).args(args).output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn out_of_range_flag_exits_2_naming_field() {
    let o = propdisc(&["cone", "--c", "1.2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("invalid c"), "{}", stderr(&o));
    let o = propdisc(&["lift", "--r1", "1.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("invalid r1"));
}

#[test]
fn unknown_config_key_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "c = 0.5\nwobble = 1\n").unwrap();
    let o = propdisc(&["cone", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("wobble"), "{}", stderr(&o));
}

#[test]
fn mismatched_config_command_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "command = \"tube\"\n").unwrap();
    let o = propdisc(&["cone", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("invalid command"), "{}", stderr(&o));
}

#[test]
fn held_lock_exits_2_and_is_left_alone() {
    let dir = tempfile::tempdir().unwrap();
    let lock = dir.path().join(LOCK_NAME);
    fs::write(&lock, "").unwrap();
    let o = propdisc(&["diagnose", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("invalid out"));
    assert!(lock.exists());
    assert!(!dir.path().join("report.toml").exists());
}

#[test]
fn diagnose_writes_report_and_releases_lock() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = propdisc(&["diagnose", "--seed", "3", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report = fs::read_to_string(out.join("report.toml")).unwrap();
    assert!(report.starts_with("[provenance]"));
    assert!(report.contains("command = \"diagnose\""));
    assert!(report.contains("seed = 3"));
    assert!(report.contains("stage-map diagnostics"));
    assert!(!report.contains('\r'));
    assert!(!out.join(LOCK_NAME).exists());
    let again = dir.path().join("again");
    propdisc(&["diagnose", "--seed", "3", "--out", again.to_str().unwrap()]);
    assert_eq!(fs::read(again.join("report.toml")).unwrap(), report.as_bytes());
}
