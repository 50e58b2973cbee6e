//! End-to-end runs of the `erblock` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use erblock::config::Settings;
use erblock::testkit::{DESK_AC_THRESHOLD, DESK_DYN_THRESHOLD, DESK_NAME_KEY_MODE};
use erblock::Schema;

fn repo() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn sample() -> PathBuf {
    repo().join("fixtures/sample.csv")
}

fn sample_gold() -> PathBuf {
    repo().join("fixtures/sample_gold.csv")
}

fn erblock(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_erblock"))
        .args(args)
        .env_remove("ERBLOCK_CONFIG")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = erblock(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn ensemble_on_the_sample_tags_sources() {
    let out = ok(&["block", "--blocker", "ensemble", "--threshold", "2", "--in", s(&sample())]);
    assert_eq!(out, "id_a,id_b,source\nP1,P3,dyn\nP4,P5,ac_extra\n");
}

#[test]
fn agnostic_ac_on_the_sample() {
    let out = ok(&["block", "--blocker", "ac", "--mode", "schema_agnostic", "--threshold", "2", "--in", s(&sample())]);
    assert_eq!(out, "id_a,id_b,source\nP2,P4,ac\nP4,P5,ac\n");
}

#[test]
fn empty_corpus_gives_empty_pair_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("empty.csv");
    fs::write(&input, "id,first_name,last_name\n").unwrap();
    let out_dir = dir.path().join("run");
    ok(&["block", "--blocker", "dynamic", "--in", s(&input), "--out", s(&out_dir)]);
    assert_eq!(fs::read_to_string(out_dir.join("pairs.csv")).unwrap(), "id_a,id_b,source\n");
    assert!(out_dir.join("manifest.json").is_file());
}

#[test]
fn block_then_evaluate() {
    let dir = tempfile::tempdir().unwrap();
    let run = dir.path().join("sample");
    ok(&["block", "--threshold", "2", "--in", s(&sample()), "--out", s(&run), "--workers", "1"]);

    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(run.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["complete"], true);
    assert_eq!(manifest["profile_count"], 5);
    assert_eq!(manifest["blocker"], "ensemble");
    assert_eq!(manifest["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), 2);

    let report = ok(&["evaluate", "--in", s(&run), "--gold", s(&sample_gold()), "--json"]);
    let rows: serde_json::Value = serde_json::from_str(&report).unwrap();
    assert_eq!(rows[0]["blocker"], "dynamic");
    assert_eq!((rows[0]["pc_exact"].as_str(), rows[0]["rr_exact"].as_str()), (Some("1/2"), Some("9/10")));
    assert_eq!(rows[1]["blocker"], "ensemble");
    assert_eq!((rows[1]["pc_exact"].as_str(), rows[1]["rr_exact"].as_str()), (Some("1"), Some("4/5")));

    let table = ok(&["evaluate", "--in", s(&run.join("pairs.csv")), "--gold", s(&sample_gold())]);
    assert!(table.lines().next().unwrap().starts_with("Name"));
    assert!(table.contains("1.0000") && table.contains("0.8000"));
}

#[test]
fn evaluate_needs_gold_and_size() {
    let dir = tempfile::tempdir().unwrap();
    let pairs = dir.path().join("pairs.csv");
    fs::write(&pairs, "id_a,id_b,source\nP1,P3,dyn\n").unwrap();
    let missing = dir.path().join("nope.csv");
    let out = erblock(&["evaluate", "--in", s(&pairs), "--gold", s(&missing), "--n", "5"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope.csv"));

    let out = erblock(&["evaluate", "--in", s(&pairs), "--gold", s(&sample_gold())]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("--n"));

    let table = ok(&["evaluate", "--in", s(&pairs), "--gold", s(&sample_gold()), "--n", "5"]);
    assert!(table.contains("dynamic") && table.contains("0.5000") && table.contains("0.9000"));
}

#[test]
fn empty_gold_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let gold = dir.path().join("gold.csv");
    fs::write(&gold, "id_a,id_b\n").unwrap();
    let pairs = dir.path().join("pairs.csv");
    fs::write(&pairs, "id_a,id_b,source\n").unwrap();
    let out = erblock(&["evaluate", "--in", s(&pairs), "--gold", s(&gold), "--n", "3"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("empty gold"));
}

#[test]
fn generate_without_out_is_a_usage_error() {
    let out = erblock(&["generate", "--n", "10"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--out"));
}

#[test]
fn generate_without_duplicates() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d");
    ok(&["generate", "--n", "10", "--dup-rate", "0", "--out", s(&out)]);
    let profiles = fs::read_to_string(out.join("profiles.csv")).unwrap();
    assert_eq!(profiles.lines().count(), 11);
    let run = dir.path().join("run");
    ok(&["block", "--in", s(&out), "--out", s(&run)]);
    let res = erblock(&["evaluate", "--in", s(&run), "--gold", s(&out.join("gold.csv"))]);
    assert!(!res.status.success(), "a corpus without duplicates has an empty gold standard");
}

#[test]
fn preset_sizes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d1");
    ok(&["generate", "--preset", "febrl1", "--seed", "7", "--out", s(&out)]);
    let profiles = fs::read_to_string(out.join("profiles.csv")).unwrap();
    let originals = profiles.lines().filter(|l| l.contains("-org,")).count();
    assert_eq!(originals, 2000);
    assert!(profiles.lines().count() > 2001);
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 7);
}

#[test]
fn bench_rows_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d");
    ok(&["generate", "--n", "200", "--seed", "1", "--out", s(&out)]);
    let csv = ok(&["bench", "--in", s(&out), "--attrs", "4,8", "--runs", "2", "--worker-counts", "1,2"]);
    assert_eq!(csv.lines().count(), 1 + 4 + 4);
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",false")));

    let res = erblock(&["bench", "--in", s(&out), "--attrs", "17", "--runs", "1"]);
    assert!(res.status.success());
    let text = String::from_utf8(res.stdout).unwrap();
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")));
    assert!(String::from_utf8_lossy(&res.stderr).contains("noisy"));

    let res = erblock(&["bench", "--in", s(&out), "--attrs", "20"]);
    assert!(!res.status.success());
    assert!(String::from_utf8_lossy(&res.stderr).contains("exceeds"));
}

#[test]
fn config_file_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    fs::write(&conf, "threshold = 2\nac.mode = schema_agnostic\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_erblock"))
        .args(["block", "--blocker", "ac", "--in", s(&sample())])
        .env("ERBLOCK_CONFIG", &conf)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "id_a,id_b,source\nP2,P4,ac\nP4,P5,ac\n");

    // flags override the file
    let out = Command::new(env!("CARGO_BIN_EXE_erblock"))
        .args(["block", "--blocker", "ac", "--mode", "schema_aware", "--in", s(&sample())])
        .env("ERBLOCK_CONFIG", &conf)
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "id_a,id_b,source\nP4,P5,ac\n");
}

#[test]
fn bad_config_and_schema_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("bad.conf");
    fs::write(&conf, "thresold = 2\n").unwrap();
    let out = erblock(&["--config", s(&conf), "block", "--in", s(&sample())]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("thresold"));

    fs::write(&conf, "schema = first_name,last_name,city\n").unwrap();
    let out = erblock(&["--config", s(&conf), "block", "--in", s(&sample())]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("occupation"));
}

#[test]
fn desk_config_file_matches_experiment_settings() {
    let s = Settings::from_file(&repo().join("configs/desk.conf")).unwrap();
    let schema = Schema::default();
    assert_eq!(s.ac_config(&schema).unwrap().purge_threshold, DESK_AC_THRESHOLD);
    let d = s.dyn_config(&schema).unwrap();
    assert_eq!((d.threshold, d.name_key_mode), (DESK_DYN_THRESHOLD, DESK_NAME_KEY_MODE));
}
