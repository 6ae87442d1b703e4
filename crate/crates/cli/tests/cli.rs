//! End-to-end runs of the binary and its exit codes.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn thzmec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thzmec")).args(args).output().unwrap()
}

fn run_with(dir: &Path, config: &str) -> Output {
    let path = dir.join("scenario.toml");
    fs::write(&path, config).unwrap();
    let out = dir.join("out");
    thzmec(&["run", "--config", path.to_str().unwrap(), "--out", out.to_str().unwrap()])
}

#[test]
fn windows_lists_the_table() {
    let out = thzmec(&["windows"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("f3,3420000000000,137000000000,0.28,-52.63"));
    assert_eq!(text.lines().count(), 11);
}

#[test]
fn run_writes_csv_and_script() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_with(dir.path(), "[run]\ntrials = 3\n[demand]\nusers = [4, 6]\n");
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("out/run.csv")).unwrap();
    assert!(csv.contains("users,energy_mean_J,energy_std_J,max_offload_bits_per_user_bits,infeasible_rate"));
    assert!(dir.path().join("out/run.gp").exists());
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_with(dir.path(), "[noma]\nbeta_edge = 2.0\n");
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("noma.beta_edge"));
    let missing = thzmec(&["run", "--config", "/nonexistent/scenario.toml"]);
    assert_ne!(missing.status.code(), Some(0));
}

#[test]
fn infeasible_scenario_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_with(dir.path(), "[run]\ntrials = 2\n[demand]\nbits_edge = 4e10\nbits_center = 4e10\n");
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn solver_non_convergence_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "[run]\ntrials = 3\n[demand]\nusers = [4]\nbits_edge = 1e7\nbits_center = 1e7\n\
               [power]\np_max_dbm = 39.0\n[mode]\nobjective = \"cee_max\"\n[solver]\nmax_iters = 1\n";
    let out = run_with(dir.path(), cfg);
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn figure_preset_runs() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("figs");
    let out = thzmec(&["figure", "fig4", "--trials", "2", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(fs::read_to_string(out_dir.join("fig4.csv")).unwrap().contains("users,energy_noma_J,energy_oma_J"));
    assert_ne!(thzmec(&["figure", "fig2"]).status.code(), Some(0));
}
