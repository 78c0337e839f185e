use std::process::{Command, Output};

use dronesim_harness::EvaluationReport;

fn dronesim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dronesim")).args(args).output().expect("spawn dronesim")
}

#[test]
fn eval_csv_to_stdout() {
    let out = dronesim(&["eval", "--team", "sleep", "--episodes", "5", "--seed", "3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 6);
    assert!(text.starts_with("episode,seed,score,steps,compromised,fingerprint\n"));
}

#[test]
fn eval_json_parses() {
    let out = dronesim(&["eval", "--team", "cw:9,sleep", "--episodes", "4", "--format", "json"]);
    assert!(out.status.success());
    let r: EvaluationReport = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!((r.episodes, r.records.len(), r.label.as_str()), (4, 4, "cw:9,sleep:9"));
}

#[test]
fn sweep_writes_one_row_per_k() {
    let out = dronesim(&["sweep", "--substitute", "sleep", "--ks", "0,18", "--episodes", "3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "k,team,episodes,mean,std,fingerprint");
    assert!(rows[1].starts_with("0,cw:18,3,") && rows[2].starts_with("18,sleep:18,3,"));
}

#[test]
fn config_file_and_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.toml");
    std::fs::write(&path, "seed = 9\nhorizon = 50\n").unwrap();
    let out = dronesim(&["eval", "--config", path.to_str().unwrap(), "--team", "remove", "--episodes", "2", "--no-malware"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[3], "50");
}

#[test]
fn bad_input_is_rejected() {
    for args in [
        &["eval", "--team", "cw:20"][..],
        &["eval", "--team", "wizard"],
        &["eval", "--episodes", "0"],
        &["eval", "--obs-mode", "fancy"],
        &["eval", "--format", "xml"],
    ] {
        let out = dronesim(args);
        assert!(!out.status.success(), "{args:?} was accepted");
        assert!(!out.stderr.is_empty());
    }
}
