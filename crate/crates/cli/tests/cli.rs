//! End-to-end runs of the `rigidity` binary.

use std::path::Path;
use std::process::{Command, Output};

fn rigidity(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rigidity"))
        .args(args)
        .env_remove("RIGIDITY_OUT_DIR")
        .output()
        .expect("spawn rigidity")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data_lines(text: &str) -> Vec<String> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

fn without_timestamp(text: &str) -> String {
    text.lines()
        .filter(|l| !l.contains("timestamp_unix"))
        .collect::<Vec<_>>()
        .join("\n")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn goe_closed_fejer_is_one_third() {
    let o = rigidity(&["goe-closed", "--family", "fejer"]);
    assert!(o.status.success());
    let rows = data_lines(&stdout(&o));
    assert_eq!(rows[0], "family,beta,sigma2_goe");
    let v: f64 = rows[1].split(',').nth(2).unwrap().parse().unwrap();
    assert!((v - 1.0 / 3.0).abs() < 1e-12);
}

#[test]
fn negative_length_is_a_usage_error() {
    let o = rigidity(&["variance", "--L", "-3"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert_eq!(err.trim_end().lines().count(), 1, "{err}");
    assert!(
        err.contains("L must be positive") && err.contains("--L"),
        "{err}"
    );
    assert!(o.stdout.is_empty());
}

#[test]
fn unknown_flag_is_rejected() {
    let o = rigidity(&["goe-closed", "--gamma", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stderr).unwrap().contains("--gamma"));
}

#[test]
fn numerical_failure_exits_one() {
    // βL beyond the overflow-safe range of the expectation
    let o = rigidity(&["expectation", "--L", "5000"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8(o.stderr).unwrap().starts_with("error: "));
}

#[test]
fn variance_json_has_metadata_and_rows() {
    let o = rigidity(&[
        "variance",
        "--family",
        "fejer",
        "--L",
        "10",
        "--tau",
        "0",
        "--k-budget",
        "400",
        "--format",
        "json",
    ]);
    assert!(o.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let meta = &doc["metadata"];
    assert_eq!(meta["command"], "variance");
    assert_eq!(
        meta["fixture_version"],
        rigidity_core::fixtures::FIXTURE_VERSION
    );
    assert_eq!(meta["config"]["command"]["l"], 10.0);
    let row = &doc["rows"][0];
    let parts = ["goe_term", "diag_correction", "offdiag_term"].map(|k| row[k].as_f64().unwrap());
    assert_eq!(
        row["total"].as_f64().unwrap(),
        parts[0] + parts[1] + parts[2]
    );
    assert!(row["tail_bound"].as_f64().unwrap() < 1e-3);
}

#[test]
fn output_is_deterministic_apart_from_timestamp() {
    let args = ["goe-mc", "--dim", "128", "--samples", "40", "--seed", "7"];
    let (a, b) = (rigidity(&args), rigidity(&args));
    assert!(a.status.success() && b.status.success());
    assert_eq!(
        without_timestamp(&stdout(&a)),
        without_timestamp(&stdout(&b))
    );
    let c = rigidity(&["goe-mc", "--dim", "128", "--samples", "40", "--seed", "8"]);
    assert_ne!(data_lines(&stdout(&a)), data_lines(&stdout(&c)));
}

#[test]
fn output_flag_and_environment_directory() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("closed.json");
    let o = rigidity(&[
        "goe-closed",
        "--format",
        "json",
        "--output",
        target.to_str().unwrap(),
    ]);
    assert!(o.status.success() && o.stdout.is_empty());
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    assert!(doc["rows"][0]["sigma2_goe"].is_number());

    let o = Command::new(env!("CARGO_BIN_EXE_rigidity"))
        .args(["goe-closed", "--family", "hann"])
        .env("RIGIDITY_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    let text = std::fs::read_to_string(dir.path().join("goe-closed.csv")).unwrap();
    assert!(data_lines(&text)[1].starts_with("hann,"));
}

#[test]
fn trace_eval_vanishes_below_systole() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "spec.txt",
        "genus 3\n# short list\n4.5 2 sns\n5.1 1 ssep\n6.0 3 nonsimple\n",
    );
    let o = rigidity(&[
        "trace-eval",
        "--spectrum",
        &spec,
        "--L",
        "4",
        "--taus",
        "0,1,2.5",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = data_lines(&stdout(&o));
    assert_eq!(rows[0], "L,tau,sns,ssep,nonsimple,unknown,n_osc,statistic");
    assert_eq!(rows.len(), 4);
    for r in &rows[1..] {
        let n_osc: f64 = r.split(',').nth(6).unwrap().parse().unwrap();
        assert_eq!(n_osc, 0.0);
    }

    let o = rigidity(&["trace-eval", "--spectrum", &spec, "--L", "8"]);
    let n_osc: f64 = data_lines(&stdout(&o))[1]
        .split(',')
        .nth(6)
        .unwrap()
        .parse()
        .unwrap();
    assert!(n_osc != 0.0);
}

#[test]
fn trace_eval_reports_parse_errors_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "bad.txt", "genus 3\n4.5 2 sns\n4.0 1 sns\n");
    let o = rigidity(&["trace-eval", "--spectrum", &spec, "--L", "4"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8(o.stderr).unwrap().contains("line 3"));
}

#[test]
fn trace_eval_with_eigenvalues() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "spec.txt", "genus 2\n3.0 1 sns\n");
    let ev = write(dir.path(), "ev.txt", "genus 2\n0.0\n0.3\n1.1\n2.0\n");
    let o = rigidity(&[
        "trace-eval",
        "--family",
        "hann",
        "--spectrum",
        &spec,
        "--eigenvalues",
        &ev,
        "--L",
        "2",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = data_lines(&stdout(&o));
    let stat = rows[1].split(',').nth(7).unwrap();
    assert!(stat.parse::<f64>().is_ok(), "{stat}");
}

#[test]
fn decay_study_reports_slope() {
    let o = rigidity(&[
        "decay-study",
        "--family",
        "cinf_bump",
        "--L",
        "6",
        "--taus",
        "16,32,64,128",
        "--format",
        "json",
    ]);
    assert!(o.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["rows"].as_array().unwrap().len(), 4);
    assert!(doc["summary"]["slope"].as_f64().unwrap() < 0.0);
}

#[test]
fn convergence_study_rows() {
    let o = rigidity(&["convergence-study", "--Ls", "10,20", "--k-budget", "100"]);
    assert!(o.status.success());
    let rows = data_lines(&stdout(&o));
    assert_eq!(rows[0], "L,total,deviation,log_bound,tail_bound");
    let dev: Vec<f64> = rows[1..]
        .iter()
        .map(|r| r.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert!(dev[1] < dev[0]);
}

#[test]
fn expectation_with_genus_band() {
    let o = rigidity(&["expectation", "--L", "4", "--genus", "1e12"]);
    assert!(o.status.success());
    let rows = data_lines(&stdout(&o));
    let hw: f64 = rows[1].split(',').nth(8).unwrap().parse().unwrap();
    assert!(hw < 1e-9);
    let o = rigidity(&["expectation", "--L", "4"]);
    assert!(data_lines(&stdout(&o))[1].ends_with(",,,"));
}
