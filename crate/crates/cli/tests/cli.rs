use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ntqpt(args: &[&str], cache: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ntqpt"));
    cmd.args(args).env_remove("NTQPT_CACHE");
    if let Some(c) = cache {
        cmd.env("NTQPT_CACHE", c);
    }
    cmd.output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn validate_prints_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v");
    let o = ntqpt(&["validate", "--out", out.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0));
    let stdout = String::from_utf8(o.stdout).unwrap();
    for model in ["bh", "lmg", "dicke"] {
        assert!(stdout.contains(&format!("oracle             {model}")), "{stdout}");
    }
    assert!(!stdout.contains("FAIL"));
    let manifest = fs::read_to_string(out.join("manifest.json")).unwrap();
    assert!(manifest.contains("\"anchor\": \"oracle\""));
}

#[test]
fn config_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.toml", "sizes = [20]\nlambda_i = 0.3\nlamda_f = 0.7\n[model]\nkind = \"lmg\"\n");
    let o = ntqpt(&["quench", "--config", &cfg], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stderr).unwrap().contains("lamda_f"));
    let o = ntqpt(&["sweep", "--preset", "no-such-preset"], None);
    assert_eq!(o.status.code(), Some(2));
    let o = ntqpt(&["sweep", "--preset", "fig2-lmg-small", "--config", &cfg], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn failed_quench_points_exit_with_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("q");
    let cfg = write(dir.path(), "q.toml", "sizes = [40]\nlambda_i_grid = [0.4, 0.95]\n[model]\nkind = \"lmg\"\n");
    let o = ntqpt(&["quench", "--config", &cfg, "--out", out.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(1));
    let rows = fs::read_to_string(out.join("quench_lmg.csv")).unwrap();
    assert_eq!(rows.lines().count(), 2);
    assert!(rows.starts_with("model,N,lambda_i,lambda_f,E_f_excitation,reduced_e,"));
    let failures = fs::read_to_string(out.join("failures_lmg.csv")).unwrap();
    assert_eq!(failures.lines().count(), 2);
}

#[test]
fn sweep_reruns_are_byte_identical_and_leave_cache_alone() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let o = ntqpt(&["sweep", "--preset", "fig2-lmg-small", "--out", a.to_str().unwrap(), "--workers", "1"], Some(&cache));
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let entries: Vec<_> = fs::read_dir(&cache).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(entries.len(), 2);
    let stamps: Vec<_> = entries.iter().map(|p| fs::metadata(p).unwrap().modified().unwrap()).collect();
    let o = ntqpt(&["sweep", "--preset", "fig2-lmg-small", "--out", b.to_str().unwrap(), "--workers", "4"], Some(&cache));
    assert_eq!(o.status.code(), Some(0));
    for name in ["sweep_lmg.csv", "manifest.json", "failures_lmg.csv"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
    let after: Vec<_> = entries.iter().map(|p| fs::metadata(p).unwrap().modified().unwrap()).collect();
    assert_eq!(stamps, after);
    let csv = fs::read_to_string(a.join("sweep_lmg.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 17);
}

#[test]
fn flag_cache_beats_environment() {
    let dir = tempfile::tempdir().unwrap();
    let (env_cache, flag_cache) = (dir.path().join("env"), dir.path().join("flag"));
    let cfg = write(dir.path(), "s.toml", "sizes = [30]\n[model]\nkind = \"lmg\"\n");
    let out = dir.path().join("o");
    let o = ntqpt(
        &["spectrum", "--config", &cfg, "--cache", flag_cache.to_str().unwrap(), "--out", out.to_str().unwrap()],
        Some(&env_cache),
    );
    assert!(o.status.code() == Some(0) || o.status.code() == Some(1));
    assert!(flag_cache.exists());
    assert!(!env_cache.exists());
}

#[test]
fn spectrum_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.toml", "sizes = [400]\nlambda_f = 0.7\n[model]\nkind = \"lmg\"\n[detector]\nkind = \"density_peak\"\n");
    let out = dir.path().join("o");
    let o = ntqpt(&["spectrum", "--config", &cfg, "--out", out.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("spectrum_lmg_N400.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("index,energy,excitation_energy,parity,doublet_id,splitting"));
    assert_eq!(lines.count(), 401);
    let first: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(first[2], "0.0000000000000000e0");
    assert_eq!(first[4], "0");
    let manifest: serde_json::Value = serde_json::from_slice(&fs::read(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["anchor"], "fig3");
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), 3);
    let precursor: serde_json::Value = serde_json::from_slice(&fs::read(out.join("precursor_lmg_N400.json")).unwrap()).unwrap();
    assert!(precursor["precursor"]["energy"].as_f64().unwrap() > 0.0);
}

#[test]
fn exponents_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "e.toml",
        "sizes = [400, 800, 1600]\n[model]\nkind = \"lmg\"\n[detector]\nkind = \"density_peak\"\n",
    );
    let out = dir.path().join("o");
    let o = ntqpt(&["exponents", "--config", &cfg, "--out", out.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_slice(&fs::read(out.join("exponents_lmg.json")).unwrap()).unwrap();
    let zeta = report["zeta"]["exponent"].as_f64().unwrap();
    assert!(zeta > 0.0 && zeta < 0.5, "{zeta}");
    assert_eq!(report["sizes"].as_array().unwrap().len(), 3);
    assert!(report["nu"]["r_squared"].as_f64().is_some());
    let loglog = fs::read_to_string(out.join("loglog_lmg.csv")).unwrap();
    assert_eq!(loglog.lines().count(), 1 + 3 * 3);
    let manifest = fs::read_to_string(out.join("manifest.json")).unwrap();
    assert!(manifest.contains("\"anchor\": \"table1\""));
}
