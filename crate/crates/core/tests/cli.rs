//! End-to-end tests of the command-line front end through `cli::run`.

use std::fs;

use vn_readout::cli;
use vn_readout::scenarios::ScenarioReport;

fn run(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let mut argv = vec!["vn-readout"];
    argv.extend_from_slice(args);
    let code = cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn list_is_stable() {
    let (code, first, _) = run(&["scenario", "list"]);
    assert_eq!(code, 0);
    assert_eq!(first.lines().count(), 7);
    assert!(first.contains("epr"));
    assert_eq!(run(&["scenario", "list"]).1, first);
}

#[test]
fn run_writes_a_report_with_the_documented_keys() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let (code, _, err) = run(&["scenario", "run", "weak-noselect", "--gA", "0.2", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let text = fs::read_to_string(&path).unwrap();
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    let keys: Vec<&str> = value.as_object().unwrap().keys().map(String::as_str).collect();
    for k in [
        "scenario",
        "config",
        "readouts",
        "predictions",
        "defects",
        "readability",
        "schmidt",
        "purity",
        "pass",
        "runtime_seconds",
    ] {
        assert!(keys.contains(&k), "missing {k}");
    }
    assert_eq!(keys.len(), 10);
    let report: ScenarioReport = serde_json::from_str(&text).unwrap();
    assert_eq!(report.config.g_a, 0.2);
    assert!(report.passed());
    let again: ScenarioReport = serde_json::from_str(&serde_json::to_string(&report).unwrap()).unwrap();
    assert_eq!(again, report);
}

#[test]
fn csv_report_uses_full_precision() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    let (code, _, _) = run(&["scenario", "run", "eigenstate", "--out", path.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(code, 0);
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("section,key,value"));
    let purity = text.lines().find(|l| l.starts_with("purity,system,")).unwrap();
    let value = purity.rsplit(',').next().unwrap();
    let mantissa = value.split('e').next().unwrap();
    assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17);
    assert!(!value.contains(' '));
}

#[test]
fn errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.json");
    let out = out.to_str().unwrap();
    let (code, _, err) = run(&["scenario", "run", "no-such", "--out", out]);
    assert_eq!(code, 1);
    assert!(err.contains("no-such"));
    let (code, _, err) = run(&["scenario", "run", "weak-noselect", "--gA", "1e6", "--out", out]);
    assert_eq!(code, 1);
    assert!(err.contains("leaves the box"), "{err}");
    assert_eq!(run(&["scenario", "run", "weak-noselect", "--gA", "abc", "--out", out]).0, 1);
    assert_eq!(run(&["scenario", "run", "weak-noselect"]).0, 1);
    assert_eq!(run(&["frobnicate"]).0, 1);
    assert_eq!(run(&["sweep", "weak-noselect", "--param", "nope", "--from", "0", "--to", "1", "--steps", "2"]).0, 1);
    assert_eq!(run(&["sweep", "weak-noselect", "--param", "gA", "--from", "0.1", "--to", "0.1", "--steps", "2"]).0, 1);
    assert_eq!(run(&["sweep", "weak-noselect", "--param", "gA", "--from", "0", "--to", "0.1", "--steps", "1"]).0, 1);
}

#[test]
fn failed_checks_exit_with_two() {
    // a post-selected mean at gt = 0.5 misses the weak-value prediction by far more than 1%
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let (code, _, err) = run(&["scenario", "run", "weak-postselect", "--gA", "0.5", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 2, "{err}");
    let report: ScenarioReport = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert!(!report.passed());
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.txt");
    fs::write(&cfg, "# weak run\ngA = 0.3\ntheta = 0.5\n").unwrap();
    let path = dir.path().join("r.json");
    let (code, _, err) = run(&[
        "scenario",
        "run",
        "weak-noselect",
        "--config",
        cfg.to_str().unwrap(),
        "--gA",
        "0.1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let report: ScenarioReport = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report.config.g_a, 0.1);
    assert_eq!(report.config.theta, 0.5);
}

fn column(csv_text: &str, name: &str) -> Vec<f64> {
    let mut rdr = csv::Reader::from_reader(csv_text.as_bytes());
    let idx = rdr.headers().unwrap().iter().position(|h| h == name).unwrap();
    rdr.records().map(|r| r.unwrap()[idx].parse().unwrap()).collect()
}

#[test]
fn log_sweep_defect_grows_monotonically() {
    let (code, out, err) = run(&[
        "sweep",
        "weak-postselect",
        "--param",
        "gA",
        "--from",
        "1e-3",
        "--to",
        "1e-1",
        "--steps",
        "8",
        "--log",
        "--jobs",
        "3",
    ]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(out.lines().count(), 9);
    let ga = column(&out, "gA");
    assert_eq!(ga.first(), Some(&1e-3));
    assert_eq!(ga.last(), Some(&1e-1));
    assert!(ga.windows(2).all(|w| w[0] < w[1]));
    let defect = column(&out, "defect:normalized_mean");
    assert!(defect.windows(2).all(|w| w[0] < w[1]), "{defect:?}");
}

#[test]
fn minimal_sweep_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.csv");
    let (code, out, _) = run(&[
        "sweep",
        "eigenstate",
        "--param",
        "gA",
        "--from",
        "0.25",
        "--to",
        "0.5",
        "--steps",
        "2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(column(&text, "step"), vec![0.0, 1.0]);
}

#[test]
fn failing_sweep_step_is_recorded() {
    // the second point pushes the pointer out of the box
    let (code, out, err) =
        run(&["sweep", "weak-noselect", "--param", "gA", "--from", "0.1", "--to", "100", "--steps", "2"]);
    assert_eq!(code, 2);
    assert!(err.contains("step 1"));
    let mut rdr = csv::Reader::from_reader(out.as_bytes());
    let statuses: Vec<String> = rdr.records().map(|r| r.unwrap()[2].to_string()).collect();
    assert_eq!(statuses, ["pass", "error"]);
}
