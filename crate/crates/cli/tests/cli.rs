use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn symsq(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symsq"))
        .current_dir(dir)
        .env_remove("SYMSQ_CACHE_DIR")
        .args(args)
        .output()
        .unwrap()
}

fn summary(out: &Output) -> Value {
    let text = if out.status.success() { &out.stdout } else { &out.stderr };
    serde_json::from_slice(text).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(text)))
}

#[test]
fn trace_check_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = symsq(tmp.path(), &["trace-check", "--k", "12", "--n", "1", "--m", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let s = summary(&out);
    assert!(s["summary"]["defect"].as_f64().unwrap() <= 1e-6);
    assert!(tmp.path().join("reports/trace-check_k12_n1_m1_c1000.csv").exists());
}

#[test]
fn config_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = symsq(tmp.path(), &["ratio", "--K", "40", "--a", "0.6"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(summary(&out)["kind"], "config");

    fs::write(tmp.path().join("bad.conf"), "[run]\nK = 40\nfrobnicate = 1\n").unwrap();
    let out = symsq(tmp.path(), &["mollifier", "--config", "bad.conf"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(summary(&out)["message"].as_str().unwrap().contains("frobnicate"));

    let out = symsq(tmp.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_then_flags() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("run.conf"), "[run]\nK = 100\na = 0.25\n\n[paths]\nout_dir = conf-out\n").unwrap();
    let out = symsq(tmp.path(), &["mollifier", "--config", "run.conf", "--K", "60"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let reports = summary(&out)["reports"].clone();
    let json_path = reports[0].as_str().unwrap();
    assert!(json_path.starts_with("conf-out"));
    let report: Value = serde_json::from_str(&fs::read_to_string(tmp.path().join(json_path)).unwrap()).unwrap();
    assert_eq!(report["config"]["run.K"], "60");
    assert_eq!(report["config"]["run.a"], "0.25");
}

#[test]
fn identities_quick() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("q.conf"), "[identities]\nsize = quick\n").unwrap();
    let out = symsq(tmp.path(), &["identities", "--config", "q.conf"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn corrupted_cache_exit_4() {
    let tmp = tempfile::tempdir().unwrap();
    let cache = tmp.path().join("c");
    fs::create_dir(&cache).unwrap();
    fs::write(cache.join("weight_012.json"), "{ not json").unwrap();
    let out = symsq(tmp.path(), &["eigenforms", "--k", "12", "--cache-dir", "c"]);
    assert_eq!(out.status.code(), Some(4));
    let s = summary(&out);
    assert_eq!(s["kind"], "io");
    assert!(s["path"].as_str().unwrap().ends_with("weight_012.json"));
}

#[test]
fn env_cache_dir() {
    let tmp = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_symsq"))
        .current_dir(tmp.path())
        .env("SYMSQ_CACHE_DIR", "from-env")
        .args(["eigenforms", "--k", "12"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(tmp.path().join("from-env/weight_012.json").exists());
}

#[test]
fn cache_gc_empty() {
    let tmp = tempfile::tempdir().unwrap();
    fs::create_dir(tmp.path().join("c")).unwrap();
    let out = symsq(tmp.path(), &["cache-gc", "--cache-dir", "c"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(summary(&out)["summary"]["removed"], 0);
    let out = symsq(tmp.path(), &["cache-gc", "--cache-dir", "missing"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn reports_are_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let run = |out_dir: &str| {
        let out = symsq(tmp.path(), &["lvalues", "--k", "24", "--out-dir", out_dir]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        summary(&out)["reports"].as_array().unwrap().iter().map(|p| fs::read(tmp.path().join(p.as_str().unwrap())).unwrap()).collect::<Vec<_>>()
    };
    // second run reads the values written back to the cache
    assert_eq!(run("a"), run("b"));
}
