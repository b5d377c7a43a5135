//! The `fracctrl` binary end to end: outputs, exit codes and the cache.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use fracctrl::analysis::ConvergenceReport;
use fracctrl_cli::render::STUDY_COLUMNS;

const SMALL_STUDY: &str = "[problem]\nalpha = 1.8\ntheta = 0.5\nbeta = -0.4\n\n[solver]\nn = 32\nns = [16, 32]\nn_ref = 128\n";

fn fracctrl(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracctrl"))
        .args(args)
        .env("FRACCTRL_CACHE_DIR", cache)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn sigma_table_prints_published_cells() {
    let dir = tempfile::tempdir().unwrap();
    let out = fracctrl(dir.path(), &["sigma-table"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("(0.8602, 0.5398)"));
    assert!(text.contains("(1.0000, 0.2000)"));
    assert!(text.contains("(0.7000, 0.7000)"));
}

#[test]
fn study_csv_has_contract_columns_and_expected_order() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.toml", SMALL_STUDY);
    let out = fracctrl(dir.path(), &["study", "--config", &cfg, "--format", "csv"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), STUDY_COLUMNS.join(","));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][2], "16");
    assert_eq!(rows[0][4], "");
    assert!(rows[1][4].parse::<f64>().unwrap() > 2.0);
    assert!((rows[1][13].parse::<f64>().unwrap() - 2.9).abs() < 1e-12);

    let md = stdout(&fracctrl(dir.path(), &["study", "--config", &cfg]));
    let footer = md.lines().find(|l| l.starts_with("| Expected order")).unwrap();
    assert!(footer.contains(" 2.9 "), "{footer}");
}

#[test]
fn study_json_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.toml", SMALL_STUDY);
    let out = fracctrl(dir.path(), &["study", "--config", &cfg, "--format", "json"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let report: ConvergenceReport = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_string_pretty(&report).unwrap() + "\n", text);
    assert_eq!(report.rows.len(), 2);
}

#[test]
fn repeated_cold_studies_have_identical_bodies() {
    let body = |o: &Output| -> Vec<String> {
        stdout(o)
            .lines()
            .map(|l| {
                let mut f: Vec<&str> = l.split(',').collect();
                f.remove(12);
                f.join(",")
            })
            .collect()
    };
    let runs: Vec<Vec<String>> = (0..2)
        .map(|_| {
            let dir = tempfile::tempdir().unwrap();
            let cfg = write_config(dir.path(), "c.toml", SMALL_STUDY);
            body(&fracctrl(dir.path(), &["study", "--config", &cfg, "--format", "csv"]))
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(dir.path(), "bad.toml", "[problem]\nalpha = 1.8\ntheta = 0.7\n\n[solver]\nnn = 3\n");
    let out = fracctrl(dir.path(), &["solve", "--config", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 6"), "{}", stderr(&out));

    let empty = write_config(dir.path(), "e.toml", "[problem]\nalpha = 1.8\ntheta = 0.7\n\n[solver]\nns = []\n");
    assert_eq!(fracctrl(dir.path(), &["study", "--config", &empty]).status.code(), Some(2));

    let invalid = write_config(dir.path(), "i.toml", "[problem]\nalpha = 2.4\ntheta = 0.7\n");
    assert_eq!(fracctrl(dir.path(), &["solve", "--config", &invalid]).status.code(), Some(2));

    let missing = dir.path().join("missing.toml");
    let out = fracctrl(dir.path(), &["solve", "--config", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn solver_failure_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.toml",
        "[problem]\nalpha = 1.2\ntheta = 0.7\n\n[solver]\nn = 32\nouter_max = 2\n",
    );
    let out = fracctrl(dir.path(), &["solve", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
}

#[test]
fn bootstrap_sized_direct_solve_converges() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        r#"{"problem": {"alpha": 1.8, "theta": 0.7}, "solver": {"n": 8, "mode": "direct"}}"#,
    );
    let out = fracctrl(dir.path(), &["solve", "--config", &cfg, "--format", "json", "--no-cache"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let triple: fracctrl::solver::OptimalTriple = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(triple.state.len(), 9);
    assert_eq!(triple.stats.bootstrap_iterations, 0);
    assert!(fs::read_dir(dir.path()).unwrap().all(|e| e.unwrap().file_type().unwrap().is_file()));
}

#[test]
fn cache_lifecycle() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let out = fracctrl(&cache, &["cache", "list"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("(empty)"));

    let cfg = write_config(dir.path(), "c.toml", "[problem]\nalpha = 1.6\ntheta = 0.7\n\n[solver]\nn = 24\n");
    let out = fracctrl(&cache, &["solve", "--config", &cfg, "--out", dir.path().join("s.json").to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stderr(&out).contains("outer iterations"));
    let out = fracctrl(&cache, &["cache", "verify"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("1 entries verified"));

    // Corrupt the entry: it is listed and verify fails, but nothing is deleted.
    let entry = fs::read_dir(&cache).unwrap().next().unwrap().unwrap().path();
    let text = fs::read_to_string(&entry).unwrap();
    fs::write(&entry, text.replacen("\"alpha\"", "\"alpha\" ", 1)).unwrap();
    assert!(stdout(&fracctrl(&cache, &["cache", "list"])).contains("corrupt"));
    assert_eq!(fracctrl(&cache, &["cache", "verify"]).status.code(), Some(4));
    assert_eq!(fracctrl(&cache, &["cache", "clear"]).status.code(), Some(4));
    assert!(entry.exists());

    let out = fracctrl(&cache, &["cache", "clear", "--force"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("removed 1"));
    assert!(stdout(&fracctrl(&cache, &["cache", "list"])).contains("(empty)"));
}
