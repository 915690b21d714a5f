use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_golomb-rmt"))
        .arg("--out")
        .arg(out)
        .args(args)
        .env_remove("GOLOMB_RMT_OUT")
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn seq_audits_a_primitive_polynomial() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["seq", "--poly", "x^5+x^2+1", "--seed", "11010", "--checks", "all"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&dir.path().join("report.json"));
    assert_eq!(report["linear_complexity"], 5);
    assert_eq!(fs::read_to_string(dir.path().join("sequence.txt")).unwrap().trim().len(), 31);
}

#[test]
fn seq_reports_long_period() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["seq", "--poly", "x^13+x^8+x^5+x^3+1", "--seed", "ones", "--checks", "none"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(fs::read_to_string(dir.path().join("sequence.txt")).unwrap().trim().len(), 8191);
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["seq", "--poly", "x^2+1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not primitive"));
    assert_eq!(run(dir.path(), &["spectrum", "--family", "paley", "--q", "15"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["no-such-command"]).status.code(), Some(2));
}

#[test]
fn paley_spectrum_has_three_spikes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["spectrum", "--family", "paley", "--q", "157"]);
    assert_eq!(out.status.code(), Some(0));
    let summary = json(&dir.path().join("summary.json"));
    assert_eq!(summary["clusters"].as_array().unwrap().len(), 3);
    let csv = fs::read_to_string(dir.path().join("histogram.csv")).unwrap();
    assert!(csv.starts_with("bin_lo,bin_hi,count,density\n"));
}

#[test]
fn verify_suites_pass() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["verify", "--suite", "codes", "--m", "3"][..],
        &["verify", "--suite", "solvers", "--n", "31"],
        &["verify", "--suite", "axioms", "--m", "2..6"],
    ] {
        let out = run(dir.path(), args);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn ensemble_writes_moment_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["ensemble", "--family", "pseudo", "--m", "5..7", "--r-max", "4"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("moments.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("m,n,r,mean,std,reference,delta"));
    assert_eq!(lines.count(), 3 * 4);
}

#[test]
fn runs_are_byte_identical_and_replayable() {
    let args = ["spectrum", "--family", "pseudo", "--m", "9", "--shifts", "5", "--rng", "3"];
    let (a, b, c) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert_eq!(run(a.path(), &args).status.code(), Some(0));
    assert_eq!(run(b.path(), &args).status.code(), Some(0));
    let manifest = a.path().join("manifest.json");
    let replay = run(c.path(), &["replay", manifest.to_str().unwrap()]);
    assert_eq!(replay.status.code(), Some(0), "{}", String::from_utf8_lossy(&replay.stderr));
    for file in ["spectrum.csv", "histogram.csv", "summary.json"] {
        let first = fs::read(a.path().join(file)).unwrap();
        assert_eq!(first, fs::read(b.path().join(file)).unwrap(), "{file}");
        assert_eq!(first, fs::read(c.path().join(file)).unwrap(), "{file} (replay)");
    }
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("from-env");
    let out = Command::new(env!("CARGO_BIN_EXE_golomb-rmt"))
        .args(["seq", "--m", "4"])
        .env("GOLOMB_RMT_OUT", &target)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(target.join("manifest.json").exists());
}
