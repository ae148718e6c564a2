use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn azema(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_azema")).args(args).output().expect("binary runs")
}

fn azema_env(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_azema"))
        .args(args)
        .env("AZEMA_THREADS", threads)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().into_string().unwrap(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn simulate_writes_paths_and_manifest_reproducibly() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        let o = azema(&[
            "simulate", "--kind", "second", "--alpha", "0.5", "--t-max", "1", "--dt", "1e-3", "--paths", "100", "--seed", "7",
            "--out", dir.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let files = read_dir_sorted(&a);
    assert_eq!(files.len(), 101);
    assert_eq!(files, read_dir_sorted(&b));

    let manifest: Value = serde_json::from_slice(&fs::read(a.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 7);
    assert_eq!(manifest["n_paths"], 100);
    assert_eq!(manifest["dt"], 1e-3);
    assert!(manifest["version"].is_string());
    let first = String::from_utf8(fs::read(a.join("path_000000.csv")).unwrap()).unwrap();
    assert!(first.starts_with("t,W,B,Y,X,sign_state\n"));
}

#[test]
fn skew_parameter_outside_unit_interval_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let o = azema(&["simulate", "--kind", "skew", "--alpha", "1.5", "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("|alpha| <= 1"));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(azema(&["verify", "--experiment", "nope"]).status.code(), Some(2));
    assert_eq!(azema(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(azema(&["table", "density", "--x", "1:0:5"]).status.code(), Some(2));
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.cfg");
    fs::write(&cfg, "no equals sign here\n").unwrap();
    assert_eq!(azema(&["--config", cfg.to_str().unwrap(), "table", "moments"]).status.code(), Some(2));
}

#[test]
fn verify_density_passes_and_embeds_provenance() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("density.json");
    let o = azema(&["verify", "--experiment", "density", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("PASS 4/4"));
    let doc: Value = serde_json::from_slice(&fs::read(&out).unwrap()).unwrap();
    let reports = doc.as_array().unwrap();
    assert_eq!(reports.len(), 4);
    for r in reports {
        for key in ["name", "n_paths", "dt", "estimate", "stderr", "ci95", "statistic", "pass", "seed", "params"] {
            assert!(r.get(key).is_some(), "missing {key}");
        }
        assert_eq!(r["params"]["resolved"]["experiment"], "density");
    }
}

#[test]
fn statistical_failure_exits_with_one() {
    let o = azema(&["verify", "--experiment", "jump-fairness", "--paths", "200"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning: jump_fairness: insufficient N"));
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let args = ["verify", "--experiment", "sign-posterior", "--paths", "3000", "--dt", "1e-2"];
    let one = azema_env(&args, "1");
    let four = azema_env(&args, "4");
    assert_eq!(one.status.code(), four.status.code());
    assert_eq!(stdout(&one), stdout(&four));
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.cfg");
    fs::write(&cfg, "# moments table\nt = 1\ng = 0.4\ny = 0.7\nalpha = 1.3\nn_max = 2\n").unwrap();
    let o = azema(&["--config", cfg.to_str().unwrap(), "table", "moments"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 4);
    let o = azema(&["--config", cfg.to_str().unwrap(), "table", "moments", "--n-max", "4"]);
    assert_eq!(stdout(&o).lines().count(), 6);
}

#[test]
fn moments_table_values() {
    let o = azema(&["table", "moments", "--t", "1", "--g", "0.4", "--y", "0.7", "--alpha", "1.3", "--n-max", "4"]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,density_exact,paper_verbatim"));
    let col: Vec<f64> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!((col[0] - 1.0).abs() < 1e-12);
    assert!((col[1] - (0.8 / std::f64::consts::PI).sqrt() * 0.91f64.tanh()).abs() < 1e-12);
    assert!((col[2] - 1.0).abs() < 1e-10);
}

#[test]
fn density_table_without_information_is_the_heat_kernel() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("d.csv");
    let o = azema(&["table", "density", "--alpha", "0", "--t", "2", "--x", "-3:3:61", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(&out).unwrap();
    for line in text.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        let heat = (-v[0] * v[0] / 4.0).exp() / (4.0 * std::f64::consts::PI).sqrt();
        assert!((v[1] - heat).abs() < 1e-12);
    }
    let manifest: Value = serde_json::from_slice(&fs::read(tmp.path().join("d.csv.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["params"]["alpha"], 0.0);
}

#[test]
fn second_kind_filter_table_is_constant_between_zero_rows() {
    let o = azema(&["table", "filter", "--kind", "second", "--alpha", "0.5", "--seed", "4"]);
    let text = stdout(&o);
    let rows: Vec<(f64, f64)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|s| s.parse().unwrap()).collect();
            (v[1], v[2])
        })
        .collect();
    assert_eq!(rows.len(), 1001);
    for w in rows.windows(2) {
        if w[0].0 == w[1].0 {
            assert_eq!(w[0].1, w[1].1);
        }
    }
}
