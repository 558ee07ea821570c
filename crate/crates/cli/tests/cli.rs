use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn config(name: &str) -> PathBuf {
    manifest_dir().join("configs").join(name)
}

fn nct(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nct"))
        .args(args)
        .env_remove("NCT_THREADS")
        .output()
        .expect("nct runs")
}

fn run_report(config: &Path, extra: &[&str]) -> (i32, String) {
    let mut args = vec!["run", "--config", config.to_str().unwrap()];
    args.extend_from_slice(extra);
    let out = nct(&args);
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
    )
}

fn strip_seconds(v: &mut Value) {
    match v {
        Value::Object(map) => {
            map.remove("seconds");
            map.values_mut().for_each(strip_seconds);
        }
        Value::Array(items) => items.iter_mut().for_each(strip_seconds),
        _ => {}
    }
}

fn normalized(report: &str) -> Value {
    let mut v: Value = serde_json::from_str(report).expect("report is JSON");
    strip_seconds(&mut v);
    v
}

/// Set `NCT_BLESS=1` to rewrite the golden file.
fn check_golden(config_name: &str, golden_name: &str) {
    let (code, stdout) = run_report(&config(config_name), &[]);
    assert_eq!(code, 0, "{stdout}");
    let got = normalized(&stdout);
    let path = manifest_dir().join("tests/golden").join(golden_name);
    if std::env::var_os("NCT_BLESS").is_some() {
        std::fs::write(&path, serde_json::to_string_pretty(&got).unwrap() + "\n").unwrap();
    }
    let want: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(got, want, "report differs from {}", path.display());
}

#[test]
fn gauss_bonnet_report_matches_golden() {
    check_golden("gauss_bonnet.json", "gauss_bonnet.report.json");
}

#[test]
fn connections_report_matches_golden() {
    check_golden("connections.json", "connections.report.json");
}

#[test]
fn reports_are_deterministic() {
    let cfg = config("connections.json");
    let (_, a) = run_report(&cfg, &["--seed", "11"]);
    let (_, b) = run_report(&cfg, &["--seed", "11"]);
    let (_, c) = run_report(&cfg, &["--seed", "12"]);
    assert_eq!(normalized(&a), normalized(&b));
    assert_eq!(normalized(&c)["seed"], 12);
}

#[test]
fn report_written_to_out_file() {
    let dir = std::env::temp_dir().join(format!("nct-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("report.json");
    let (code, stdout) = run_report(
        &config("gauss_bonnet.json"),
        &["--out", out.to_str().unwrap()],
    );
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let report = normalized(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(report["schema"], "nct-report/1");
    assert_eq!(report["status"], "pass");
    std::fs::remove_dir_all(&dir).unwrap();
}

fn write_temp(name: &str, text: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("nct-{}-{name}", std::process::id()));
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn max_n_drops_larger_radii() {
    let (code, stdout) = run_report(&config("gauss_bonnet.json"), &["--max-n", "30"]);
    assert_eq!(code, 0);
    let class_i = &normalized(&stdout)["experiments"][1];
    assert_eq!(class_i["sweep"].as_array().unwrap().len(), 2);
    assert_eq!(class_i["skipped"][0], "N = 40 exceeds --max-n");
}

#[test]
fn undetected_violation_exits_1() {
    // i E11 is skew-adjoint, so it stays in the kernel for the flat metric.
    let cfg = write_temp(
        "undetected.json",
        r#"{"version": 1, "experiments": [{
            "type": "proposition1", "name": "skew", "metric": {"kind": "flat"}, "radius": 4,
            "polynomials": [[1.0]],
            "violations": [[[{"coeffs": [[0, 0, 0, 1]]}, {"scalar": 0}], [{"scalar": 0}, {"scalar": 0}]]]
        }]}"#,
    );
    let (code, stdout) = run_report(&cfg, &[]);
    assert_eq!(code, 1);
    let report = normalized(&stdout);
    assert_eq!(report["status"], "fail");
    assert_eq!(report["experiments"][0]["status"], "fail");
    std::fs::remove_file(cfg).unwrap();
}

#[test]
fn numerical_failure_is_reported_and_run_continues() {
    let cfg = write_temp(
        "degenerate.json",
        r#"{"version": 1, "experiments": [
            {"type": "gauss_bonnet", "name": "degenerate", "radii": [8],
             "metric": {"kind": "conformal", "h": {"scalar": 0}}},
            {"type": "gauss_bonnet", "name": "singular", "radii": [8],
             "metric": {"kind": "diagonal",
                        "a1": {"coeffs": [[-1, 0, 1, 0], [0, 0, 1, 0], [1, 0, 1, 0]]},
                        "a2": {"scalar": 1}}}
        ]}"#,
    );
    let (code, stdout) = run_report(&cfg, &[]);
    assert_eq!(code, 1);
    let report = normalized(&stdout);
    assert_eq!(report["experiments"][0]["status"], "pass");
    assert_eq!(report["experiments"][1]["status"], "fail");
    assert!(report["experiments"][1]["error"].as_str().unwrap().len() > 0);

    let (code, stdout) = run_report(&cfg, &["--fail-fast"]);
    assert_eq!(code, 1);
    let report = normalized(&stdout);
    assert_eq!(report["experiments"].as_array().unwrap().len(), 2);
    std::fs::remove_file(cfg).unwrap();
}

#[test]
fn config_errors_exit_2() {
    let cases = [
        (
            "syntax.json",
            "{\"version\": 1,\n \"experiments\": [",
            "line",
        ),
        (
            "unknown.json",
            r#"{"version": 1, "experiments": [], "extra": 0}"#,
            "extra",
        ),
        (
            "radii.json",
            r#"{"version": 1, "experiments": [{"type": "gauss_bonnet", "name": "e", "metric": {"kind": "flat"}, "radii": []}]}"#,
            "radii",
        ),
    ];
    for (name, text, needle) in cases {
        let cfg = write_temp(name, text);
        let out = nct(&["run", "--config", cfg.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "{name}");
        let stderr = String::from_utf8(out.stderr).unwrap();
        assert!(stderr.contains(needle), "{name}: {stderr}");
        std::fs::remove_file(cfg).unwrap();
    }
    let gb = config("gauss_bonnet.json");
    let out = nct(&["run", "--config", gb.to_str().unwrap(), "--max-n", "3"]);
    assert_eq!(out.status.code(), Some(2));
    let out = nct(&["run", "--config", "/nonexistent/config.json"]);
    assert_eq!(out.status.code(), Some(2));
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    csv::Reader::from_reader(text.as_bytes())
        .records()
        .map(|r| r.unwrap().iter().map(str::to_owned).collect())
        .collect()
}

#[test]
fn sweep_over_n_writes_csv() {
    let gb = config("gauss_bonnet.json");
    let out = nct(&[
        "sweep",
        "--config",
        gb.to_str().unwrap(),
        "--experiment",
        "class-i",
        "--param",
        "N",
        "--values",
        "8,16",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("param,gb_value_re,gb_value_im,tail_mass,max_residual,seconds\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][0], "8");
    assert_eq!(rows[1][0], "16");
    for row in &rows {
        let value: f64 = row[1].parse().unwrap();
        assert!(value.abs() <= 1e-8);
        assert!(row[3].parse::<f64>().unwrap() >= 0.0);
    }
}

#[test]
fn sweep_over_theta_and_tol_uses_defaults() {
    let gb = config("gauss_bonnet.json");
    let out = nct(&[
        "sweep",
        "--config",
        gb.to_str().unwrap(),
        "--param",
        "theta",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(csv_rows(&String::from_utf8(out.stdout).unwrap()).len(), 3);
    let out = nct(&["sweep", "--config", gb.to_str().unwrap(), "--param", "tol"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(csv_rows(&String::from_utf8(out.stdout).unwrap()).len(), 4);
}

#[test]
fn sweep_rejects_bad_values() {
    let gb = config("gauss_bonnet.json");
    let gb = gb.to_str().unwrap();
    for args in [
        vec!["sweep", "--config", gb, "--param", "N", "--values", "2.5"],
        vec![
            "sweep", "--config", gb, "--param", "theta", "--values", "1.5",
        ],
        vec![
            "sweep",
            "--config",
            gb,
            "--param",
            "N",
            "--experiment",
            "missing",
        ],
        vec![
            "sweep", "--config", gb, "--param", "N", "--values", "50", "--max-n", "40",
        ],
    ] {
        assert_eq!(nct(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn curved_examples_pass() {
    let (code, stdout) = run_report(&config("curved.json"), &[]);
    assert_eq!(code, 0, "{stdout}");
    for e in normalized(&stdout)["experiments"].as_array().unwrap() {
        assert_eq!(e["status"], "pass", "{}", e["name"]);
    }
}
