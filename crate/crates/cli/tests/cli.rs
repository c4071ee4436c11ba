use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn skylane(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_skylane")).args(args).output().expect("spawn skylane")
}

fn small_config(dir: &Path) -> String {
    let path = dir.join("small.toml");
    fs::write(&path, "n_drops = 6\npanel_rows = 4\npanel_cols = 4\n").unwrap();
    path.to_string_lossy().into_owned()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn eigenscore_table_has_one_row_per_route_and_sector() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("es");
    let res = skylane(&["eigenscore", "--out", out.to_str().unwrap()]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let csv = fs::read_to_string(out.join("eigenscore.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("route_rotation_deg,sector_name,es,lambda_1"));
    assert_eq!(lines.count(), 54);
    assert!(out.join("manifest.json").exists());
}

#[test]
fn unit_threshold_gives_binary_eigenscores() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("t.toml");
    fs::write(&cfg, "eigen_threshold = 1.0\n").unwrap();
    let out = dir.path().join("es");
    let res =
        skylane(&["eigenscore", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--top-k", "2"]);
    assert!(res.status.success());
    let csv = fs::read_to_string(out.join("eigenscore.csv")).unwrap();
    for line in csv.lines().skip(1) {
        let es: usize = line.split(',').nth(2).unwrap().parse().unwrap();
        assert!(es <= 1);
        assert_eq!(line.split(',').count(), 5);
    }
}

#[test]
fn missing_config_exits_2_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("never");
    let res = skylane(&["run", "--config", "/definitely/not/here.toml", "--out", out.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&res.stderr);
    assert_eq!(stderr.lines().count(), 1);
    assert!(stderr.starts_with("skylane: error[config]:"));
    assert!(!out.exists());
}

#[test]
fn bad_metric_and_route_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let o = out.to_str().unwrap();
    assert_eq!(skylane(&["run", "--metric", "m3", "--out", o]).status.code(), Some(2));
    assert_eq!(skylane(&["run", "--route-deg", "45", "--out", o]).status.code(), Some(2));
    assert_eq!(skylane(&["sweep", "--n-min", "3", "--n-max", "2", "--out", o]).status.code(), Some(2));
    assert_eq!(skylane(&["sweep", "--n-max", "50", "--out", o]).status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn run_writes_summaries_sharing_the_placement_hash() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let out = dir.path().join("run");
    let res =
        skylane(&["run", "--config", &cfg, "--route-deg", "90", "--out", out.to_str().unwrap(), "--dump-channels"]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));

    let hashes: Vec<Value> = ["rsrp", "m1", "m2"]
        .iter()
        .map(|m| {
            let s = read_json(&out.join(format!("summary_{m}.json")));
            assert!(s["aerial_mean_db"].is_number());
            assert!(s["aerial_p5_db"].is_number());
            assert_eq!(s["schema_version"], 1);
            assert!(s.get("timestamp_unix").is_none());
            s["placement_hash"].clone()
        })
        .collect();
    assert_eq!(hashes[0], hashes[1]);
    assert_eq!(hashes[1], hashes[2]);

    let samples = fs::read_to_string(out.join("sinr_samples_m1.csv")).unwrap();
    assert_eq!(samples.lines().count(), 1 + 6 * 5);
    let rates = fs::read_to_string(out.join("selection_rates_rsrp.csv")).unwrap();
    assert_eq!(rates.lines().next().unwrap(), "ccuav,sector_name,rate");

    let dump = fs::read_to_string(out.join("channels.tsv")).unwrap();
    let header = dump.lines().next().unwrap();
    assert_eq!(header.split('\t').filter(|c| c.starts_with("h_")).count(), 16);
    let first = dump.lines().nth(1).unwrap();
    assert!(first.split('\t').next_back().unwrap().ends_with('j'));

    let manifest = read_json(&out.join("manifest.json"));
    assert_eq!(manifest["config"]["n_drops"], 6);
    assert!(manifest["timestamp_unix"].is_number());
}

#[test]
fn rerun_versions_files_and_is_reproducible_from_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let out = dir.path().join("run");
    let o = out.to_str().unwrap();
    assert!(skylane(&["run", "--config", &cfg, "--metric", "m1", "--seed", "7", "--out", o]).status.success());
    let manifest = out.join("manifest.json");
    let res = skylane(&["run", "--config", manifest.to_str().unwrap(), "--metric", "m1", "--out", o, "--threads", "1"]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    assert!(out.join("summary_m1-v2.json").exists());
    assert!(out.join("manifest-v2.json").exists());
    assert_eq!(fs::read(out.join("summary_m1.json")).unwrap(), fs::read(out.join("summary_m1-v2.json")).unwrap());
    assert_eq!(read_json(&out.join("summary_m1.json"))["master_seed"], 7);
}

#[test]
fn sweep_rows_sorted_by_metric_then_size() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let out = dir.path().join("sweep");
    let res = skylane(&["sweep", "--config", &cfg, "--n-min", "1", "--n-max", "3", "--out", out.to_str().unwrap()]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let csv = fs::read_to_string(out.join("sweep.csv")).unwrap();
    let rows: Vec<(String, usize)> = csv
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].to_string(), f[1].parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 9);
    let mut sorted = rows.clone();
    sorted.sort();
    assert_eq!(rows, sorted);
    assert_eq!(csv.lines().next().unwrap(), "metric,n_ccuav,aerial_mean_db,aerial_p5_db");
}

#[test]
fn single_size_sweep_has_three_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let out = dir.path().join("s");
    let res = skylane(&["sweep", "--config", &cfg, "--n-min", "1", "--n-max", "1", "--out", out.to_str().unwrap()]);
    assert!(res.status.success());
    assert_eq!(fs::read_to_string(out.join("sweep.csv")).unwrap().lines().count(), 4);
}
