use std::path::PathBuf;
use std::process::{Command, Output};

fn greenberg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_greenberg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("greenberg-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn scan_table_check() {
    let journal = tmp("one.jsonl");
    let golden = tmp("golden.txt");
    std::fs::write(&golden, "61629; T^3, 3; 1; T^3\n").unwrap();
    let j = journal.to_str().unwrap();
    let out = greenberg(&["scan", "--min", "61629", "--max", "61630", "--out", j]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("(T^3, 3)"));
    let text = std::fs::read_to_string(&journal).unwrap();
    assert!(text.starts_with("#cfg "));
    assert_eq!(text.lines().count(), 2);

    let out = greenberg(&["table", "--in", j]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("n,T^3,total\n1,1,1"));

    let out = greenberg(&["check", "--in", j, "--golden", golden.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("PASS"));
}

#[test]
fn exit_codes() {
    // stabilization at level 2 is out of reach with a cap of 1
    let out = greenberg(&["field", "--f", "60513", "--level-max", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains("UNRESOLVED"));
    let out = greenberg(&["scan", "--min", "50", "--max", "10"]);
    assert_eq!(out.status.code(), Some(1));
    let out = greenberg(&["field", "--f", "7"]);
    assert_eq!(out.status.code(), Some(1));
    let out = greenberg(&["table", "--in", "/nonexistent/journal"]);
    assert_eq!(out.status.code(), Some(1));
}
