use std::path::PathBuf;
use std::process::Command;

use opens_cli::{execute, Outcome, EXIT_FAILURE, EXIT_USAGE};
use serde_json::Value;

fn run(args: &[&str]) -> Outcome {
    execute(std::iter::once("opens").chain(args.iter().copied()))
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("opens-cli-{}-{name}", std::process::id()));
    std::fs::write(&path, text).unwrap();
    path
}

fn data_rows(csv: &str) -> Vec<&str> {
    csv.lines().skip(1).filter(|l| !l.starts_with('#')).collect()
}

const SMALL_ED: [&str; 11] = ["ed-verify", "--sites", "6", "--l1", "2", "--d", "1", "--l2", "2", "--n", "1:2"];

#[test]
fn boson_moments_smoke() {
    let out = run(&["boson-moments", "--gamma", "0.3,0.7"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let header = out.stdout.lines().next().unwrap();
    assert_eq!(header, "L,a,b,eps,K,n,gamma,log_ratio,ratio,route,status");
    let rows = data_rows(&out.stdout);
    assert_eq!(rows.len(), 1);
    assert!(rows[0].ends_with(",boson-closed-form,ok"), "{}", rows[0]);
    assert!(out.stdout.contains("# command: boson-moments"));
}

#[test]
fn sweeps_expand_grids() {
    let out = run(&["boson-mie", "--n", "2:5"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert_eq!(data_rows(&out.stdout).len(), 4);
}

#[test]
fn output_is_independent_of_jobs() {
    let one = run(&[&SMALL_ED[..], &["--jobs", "1"]].concat());
    let two = run(&[&SMALL_ED[..], &["--jobs", "3"]].concat());
    let again = run(&SMALL_ED);
    assert_eq!(one.code, 0, "{}", one.stderr);
    assert_eq!(one.stdout, two.stdout);
    assert_eq!(one.stdout, again.stdout);
}

#[test]
fn unknown_command_is_a_usage_error() {
    let out = run(&["no-such-command"]);
    assert_eq!(out.code, EXIT_USAGE);
    assert!(out.stderr.contains("Usage"), "{}", out.stderr);
    assert!(out.stdout.is_empty());
}

#[test]
fn bad_grid_is_a_usage_error() {
    let out = run(&["boson-mie", "--n", "5:2:x"]);
    assert_eq!(out.code, EXIT_USAGE);
}

#[test]
fn help_exits_cleanly() {
    let out = run(&["--help"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("lattice-moments"));
}

#[test]
fn config_file_supplies_command_and_flags() {
    let path = scratch("mie.conf", "# sweep\ncommand = boson-mie\nn = 2:3\n");
    let out = run(&["--config", path.to_str().unwrap()]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert_eq!(data_rows(&out.stdout).len(), 2);
    assert!(out.stdout.contains("# config: n = 2:3"));

    let over = run(&["--config", path.to_str().unwrap(), "boson-mie", "--n", "2:6"]);
    assert_eq!(over.code, 0, "{}", over.stderr);
    assert_eq!(data_rows(&over.stdout).len(), 5);
    std::fs::remove_file(path).ok();
}

#[test]
fn config_echo_matches_direct_flags() {
    let path = scratch("holevo.conf", "command = boson-mie\nn = 2:4\n");
    let from_file = run(&["--config", path.to_str().unwrap()]);
    let direct = run(&["boson-mie", "--n", "2:4"]);
    assert_eq!(from_file.stdout, direct.stdout);
    std::fs::remove_file(path).ok();
}

#[test]
fn json_mirrors_csv() {
    let csv = run(&["boson-mie", "--n", "2:3"]);
    let json = run(&["--format", "json", "boson-mie", "--n", "2:3"]);
    assert_eq!(json.code, 0, "{}", json.stderr);
    let doc: Value = serde_json::from_str(&json.stdout).unwrap();
    assert_eq!(doc["command"], "boson-mie");
    let columns: Vec<&str> = doc["columns"].as_array().unwrap().iter().map(|c| c.as_str().unwrap()).collect();
    assert_eq!(columns.join(","), csv.stdout.lines().next().unwrap());
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0].as_array().unwrap().len(), columns.len());
    assert_eq!(rows[0].as_array().unwrap().last().unwrap(), "ok");
}

#[test]
fn failed_checks_set_the_exit_code() {
    let out = run(&[&SMALL_ED[..], &["--tol", "1e-300"]].concat());
    assert_eq!(out.code, EXIT_FAILURE);
    assert!(out.stdout.lines().any(|l| l.ends_with(",fail")));
    assert!(!out.stderr.is_empty());
}

#[test]
fn ed_verify_passes_at_default_tolerance() {
    let out = run(&SMALL_ED);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(data_rows(&out.stdout).iter().all(|l| l.ends_with(",ok")));
}

#[test]
fn binary_writes_output_file_and_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_opens");
    let path = std::env::temp_dir().join(format!("opens-cli-{}-out.csv", std::process::id()));
    let status = Command::new(bin)
        .args(["--output", path.to_str().unwrap(), "boson-mie", "--n", "2:3"])
        .status()
        .unwrap();
    assert!(status.success());
    let written = std::fs::read_to_string(&path).unwrap();
    assert_eq!(written, run(&["boson-mie", "--n", "2:3"]).stdout);
    std::fs::remove_file(path).ok();

    let bad = Command::new(bin).arg("no-such-command").output().unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_USAGE));
    assert!(bad.stdout.is_empty());
}
