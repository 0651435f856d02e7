//! End-to-end runs of the `hqst` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn hqst(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hqst")).args(args).env_remove("HQST_JOBS").output().expect("binary runs")
}

fn hqst_with_jobs(jobs: &str, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hqst")).args(args).env("HQST_JOBS", jobs).output().expect("binary runs")
}

fn configs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

/// Data rows of a CSV artifact as numbers, after the comment and header lines.
fn rows(out: &Output) -> (String, Vec<Vec<String>>) {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let mut lines = text.lines();
    let comment = lines.next().unwrap().to_string();
    let header = lines.next().unwrap();
    assert!(!header.starts_with('#'));
    let body = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
    (comment, body)
}

fn col(body: &[Vec<String>], i: usize) -> Vec<f64> {
    body.iter().map(|r| r[i].parse().unwrap()).collect()
}

#[test]
fn psuccess_at_the_reference_error_point() {
    let (comment, body) = rows(&hqst(&["psuccess", "--xi", "0.75", "--timing", "17"]));
    assert!(comment.starts_with("# hqst psuccess scenario="));
    let overlap = col(&body, 7)[0];
    let ode = col(&body, 8)[0];
    assert!((overlap - 0.186).abs() <= 1e-3, "{overlap}");
    assert!((ode - 0.186).abs() <= 1e-3, "{ode}");
}

#[test]
fn frequency_sweep_has_the_expected_width() {
    let (_, body) = rows(&hqst(&["sweep", "--axis", "omega0", "--range", "-3:3:201"]));
    let (x, p) = (col(&body, 0), col(&body, 1));
    let peak = p.iter().cloned().fold(0.0, f64::max);
    let above: Vec<f64> = x.iter().zip(&p).filter(|(_, &v)| v >= 0.5 * peak).map(|(&x, _)| x).collect();
    let width = above.last().unwrap() - above.first().unwrap();
    // Sample-resolution estimate of the full width at half maximum.
    assert!((width - 1.4).abs() <= 0.05 + 0.03, "{width}");
}

#[test]
fn validate_reports_small_discrepancies() {
    let out = hqst(&["validate", "--points", "25"]);
    let stderr = String::from_utf8_lossy(&out.stderr).to_string();
    assert!(stderr.contains("max |P_ode - P_overlap|"));
    let (_, body) = rows(&out);
    assert_eq!(body.len(), 25);
    let worst = col(&body, 5).into_iter().fold(0.0, f64::max);
    assert!(worst <= 1e-5, "{worst}");
}

#[test]
fn output_is_deterministic_across_runs_and_thread_counts() {
    let args = ["sweep", "--axis", "timing", "--range", "-2:2:9", "--axis2", "xi", "--range2", "-1:1:5"];
    let a = hqst_with_jobs("1", &args);
    let b = hqst_with_jobs("4", &args);
    let c = hqst(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn scenario_hash_follows_the_inputs() {
    let a = rows(&hqst(&["psuccess", "--no-ode", "--xi", "0.75"])).0;
    let b = rows(&hqst(&["psuccess", "--no-ode", "--xi", "0.7"])).0;
    assert_ne!(a, b);
}

#[test]
fn shipped_configs_parse() {
    let mut n = 0;
    for entry in std::fs::read_dir(configs_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let out = hqst(&["-c", path.to_str().unwrap(), "ecz", "--epsilon", "0:0.5:2"]);
            assert!(out.status.success(), "{}: {}", path.display(), String::from_utf8_lossy(&out.stderr));
            n += 1;
        }
    }
    assert!(n >= 10);
}

#[test]
fn reference_config_reproduces_the_error_point() {
    let cfg = configs_dir().join("reference_transfer.toml");
    let (_, body) = rows(&hqst(&["-c", cfg.to_str().unwrap(), "psuccess", "--no-ode"]));
    assert!((col(&body, 7)[0] - 0.186).abs() <= 1e-3);
}

#[test]
fn table_lists_every_bundled_row() {
    let (_, body) = rows(&hqst(&["table"]));
    assert_eq!(body.len(), 13);
    assert!(body.iter().any(|r| r[0] == "Deist 2022" && r[4].is_empty()));
}

#[test]
fn csv_goes_to_the_requested_file() {
    let dir = std::env::temp_dir().join(format!("hqst-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("ecz.csv");
    let out = hqst(&["ecz", "--epsilon", "0:0.5:3", "-o", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert!(!text.contains('\r'));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(hqst(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(hqst(&["sweep", "--range", "3:1:5"]).status.code(), Some(1));
    assert_eq!(hqst_with_jobs("zero", &["table"]).status.code(), Some(1));
}

#[test]
fn config_errors_name_the_line() {
    let dir = std::env::temp_dir().join(format!("hqst-cli-cfg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.toml");
    std::fs::write(&path, "[link]\ngamma1 = 2.0\nkappa = 1.0\n").unwrap();
    let out = hqst(&["-c", path.to_str().unwrap(), "psuccess"]);
    assert_eq!(out.status.code(), Some(1));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("line 3") && msg.contains("kappa"), "{msg}");
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn domain_errors_exit_with_two() {
    assert_eq!(hqst(&["psuccess", "--xi=-1"]).status.code(), Some(2));
    assert_eq!(hqst(&["decay", "--cooperativity=-1"]).status.code(), Some(2));
}

#[test]
fn help_exits_cleanly() {
    assert_eq!(hqst(&["--help"]).status.code(), Some(0));
}
