//! End-to-end tests of the binary: exit codes, file outputs, and
//! determinism of the JSON summaries.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_borel-resum"))
}

fn run(args: &[&str], out_dir: &Path) -> Output {
    bin()
        .args(args)
        .arg("--out-dir")
        .arg(out_dir)
        .output()
        .expect("binary runs")
}

#[test]
fn eval_matches_quoted_value() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "eval",
            "--builtin",
            "geometric",
            "--n",
            "4",
            "--lambda",
            "0.8",
            "--p",
            "5",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    let value: f64 = stdout
        .split('=')
        .nth(1)
        .and_then(|s| s.trim().parse().ok())
        .expect("value printed");
    assert!((value - 0.512).abs() < 0.005, "got {value}");
    assert!(dir.path().join("summary.json").exists());
}

#[test]
fn scan_finds_prototype_minimum() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "scan",
            "--builtin",
            "prototype",
            "--n",
            "2",
            "--lambda0",
            "1",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("GlobalMin"), "{stdout}");
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap())
            .unwrap();
    let p = summary["records"][0]["p_star"].as_f64().unwrap();
    assert!((p - 2.65).abs() < 0.05 * 2.65);
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &["eval", "--builtin", "nosuch", "--n", "2", "--lambda", "1", "--p", "1"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));

    // precondition violation in the series source
    let bad = dir.path().join("empty.json");
    fs::write(&bad, r#"{"name":"x","coefficients":[]}"#).unwrap();
    let out = run(
        &["eval", "--file", bad.to_str().unwrap(), "--n", "0", "--lambda", "1", "--p", "1"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));

    // missing source entirely
    let out = run(&["eval", "--n", "2", "--lambda", "1", "--p", "1"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn all_positive_series_is_inconclusive_with_exit_0() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("positive.json");
    fs::write(
        &path,
        r#"{"name":"positive","coefficients":[1.0, 0.5, 0.25, 0.125, 0.0625]}"#,
    )
    .unwrap();
    let out = run(
        &[
            "sequence",
            "--file",
            path.to_str().unwrap(),
            "--n-range",
            "2..4",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{:?}", out);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("Inconclusive"), "{stdout}");
    assert!(stdout.contains("no extrema"), "{stdout}");
}

#[test]
fn reproduce_section_writes_curves_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["reproduce", "--example", "sec33"], dir.path());
    assert!(out.status.success(), "{:?}", out);
    assert!(dir.path().join("summary.json").exists());
    assert!(dir.path().join("fig3a.csv").exists());
    assert!(dir.path().join("fig3b.csv").exists());
    // header row names the columns, first of which is lambda
    let csv = fs::read_to_string(dir.path().join("fig3a.csv")).unwrap();
    assert!(csv.starts_with("lambda,S_2,S_3,S_4,S_5,S_pert"));
    // no leftover temp files from the atomic writes
    assert!(!fs::read_dir(dir.path())
        .unwrap()
        .any(|e| e.unwrap().path().extension().is_some_and(|x| x == "tmp")));
}

#[test]
fn reproduce_all_exits_4_on_documented_discrepancy() {
    // the geometric p(2)=1.2 row cannot pass (true stationary point 4/3),
    // so the full run reports it and signals the tolerance failure
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["reproduce", "--example", "all"], dir.path());
    assert_eq!(out.status.code(), Some(4));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("sec32/p(2)"), "{stderr}");
    let stdout = String::from_utf8(out.stdout).unwrap();
    let fails: Vec<&str> = stdout.lines().filter(|l| l.starts_with("FAIL")).collect();
    assert_eq!(fails.len(), 1, "exactly the known row fails: {fails:?}");
}

#[test]
fn identical_config_gives_byte_identical_summaries() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    for (dir, _) in [(&dir_a, 0), (&dir_b, 1)] {
        let out = run(&["reproduce", "--example", "sec35"], dir.path());
        assert!(out.status.success());
    }
    let a = fs::read(dir_a.path().join("summary.json")).unwrap();
    let b = fs::read(dir_b.path().join("summary.json")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn export_writes_figure_data() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["export", "--example", "sec31"], dir.path());
    assert!(out.status.success());
    for name in ["fig1a.csv", "fig1b.csv", "fig1c.csv"] {
        assert!(dir.path().join(name).exists(), "{name} missing");
    }
}

#[test]
fn out_dir_env_override() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["eval", "--builtin", "prototype", "--n", "2", "--lambda", "0.5", "--p", "2.65"])
        .env("BOREL_RESUM_OUT", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("summary.json").exists());
}

#[test]
fn csv_series_round_trip_via_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("series.csv");
    fs::write(&path, "# prototype coefficients\n1,-1,2,-6,24\n").unwrap();
    let args = [
        "eval", "--file", path.to_str().unwrap(), "--n", "4", "--lambda", "0.5", "--p", "8.4",
    ];
    let out1 = run(&args, dir.path());
    let out2 = run(&args, dir.path());
    assert!(out1.status.success());
    assert_eq!(out1.stdout, out2.stdout);
    let printed = String::from_utf8(out1.stdout).unwrap();
    let value: f64 = printed.split('=').nth(1).unwrap().trim().parse().unwrap();
    assert!((value - 0.711).abs() < 0.005);
}
