//! End-to-end tests of the qspec binary: exit codes, output schema,
//! determinism, and consistency across subcommands.

use std::process::{Command, Output};

fn qspec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qspec"))
        .args(args)
        .env_remove("QSPEC_TOL")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

/// Parses CSV output into (header, rows of cells).
fn csv(out: &Output) -> (Vec<String>, Vec<Vec<String>>) {
    let text = stdout(out);
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .expect("header row")
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    (header, rows)
}

fn column(header: &[String], rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let i = header
        .iter()
        .position(|h| h == name)
        .expect("column exists");
    rows.iter().map(|r| r[i].parse().expect("parses")).collect()
}

#[test]
fn eval_phi_matches_the_closed_form_at_zero() {
    let out = qspec(&[
        "eval", "phi", "--q", "0.5", "--nu", "1.5", "--x", "0", "--format", "json",
    ]);
    assert_eq!(code(&out), 0);
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid json");
    let rec = &parsed.as_array().expect("array")[0];
    let value = rec["value"].as_f64().expect("number");
    let expected = 1.0 / (1.0 - 0.5f64.powf(1.5));
    assert!((value - expected).abs() < 1e-12 * expected);
    assert_eq!(rec["route"].as_str(), Some("series"));
    assert!(rec["terms"].as_u64().is_some());
    assert!(rec["est_err"].as_f64().expect("number") >= 0.0);
}

#[test]
fn eval_j_vanishes_at_the_origin_for_positive_order() {
    let out = qspec(&["eval", "j", "--q", "0.5", "--nu", "1", "--z", "0"]);
    assert_eq!(code(&out), 0);
    let (header, rows) = csv(&out);
    assert_eq!(rows.len(), 1);
    assert_eq!(column(&header, &rows, "value")[0], 0.0);
}

#[test]
fn eval_psi_rejects_determinate_orders() {
    let out = qspec(&["eval", "psi", "--q", "0.5", "--nu", "1.2", "--x", "0.1"]);
    assert_eq!(code(&out), 2);
    assert!(!out.stderr.is_empty());
}

#[test]
fn spectrum_rows_are_increasing_with_tight_brackets() {
    let out = qspec(&[
        "spectrum",
        "--friedrichs",
        "--q",
        "0.5",
        "--nu",
        "1",
        "--count",
        "3",
    ]);
    assert_eq!(code(&out), 0);
    let (header, rows) = csv(&out);
    assert_eq!(header, ["n", "xi", "residual", "bracket_lo", "bracket_hi"]);
    assert_eq!(rows.len(), 3);
    let xi = column(&header, &rows, "xi");
    assert!(xi[0] < xi[1] && xi[1] < xi[2]);
    let lo = column(&header, &rows, "bracket_lo");
    let hi = column(&header, &rows, "bracket_hi");
    for i in 0..3 {
        assert!(lo[i] <= xi[i] && xi[i] <= hi[i]);
    }
}

#[test]
fn kappa_spectrum_interlaces_the_friedrichs_spectrum() {
    let fr = qspec(&[
        "spectrum",
        "--q",
        "0.5",
        "--nu",
        "0.5",
        "--friedrichs",
        "--count",
        "3",
    ]);
    let ks = qspec(&[
        "spectrum", "--q", "0.5", "--nu", "0.5", "--kappa", "0", "--count", "3",
    ]);
    assert_eq!(code(&fr), 0);
    assert_eq!(code(&ks), 0);
    let (h1, r1) = csv(&fr);
    let (h2, r2) = csv(&ks);
    let f = column(&h1, &r1, "xi");
    let k = column(&h2, &r2, "xi");
    for i in 0..3 {
        assert!(k[i] < f[i]);
        if i + 1 < 3 {
            assert!(f[i] < k[i + 1]);
        }
    }
}

#[test]
fn spectrum_count_zero_is_a_domain_error() {
    let out = qspec(&["spectrum", "--q", "0.5", "--nu", "1", "--count", "0"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn validate_green_passes_at_the_default_scale() {
    let out = qspec(&["validate", "green", "--q", "0.5", "--nu", "1"]);
    assert_eq!(code(&out), 0);
    let (header, rows) = csv(&out);
    assert_eq!(header, ["check", "measured", "bound", "pass"]);
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r[3] == "true"));
}

#[test]
fn validate_ortho_passes() {
    let out = qspec(&[
        "validate", "ortho", "--q", "0.5", "--nu", "1", "--count", "4",
    ]);
    assert_eq!(code(&out), 0);
}

#[test]
fn validate_oracle_passes_in_the_determinate_regime() {
    let out = qspec(&[
        "validate", "oracle", "--q", "0.5", "--nu", "2", "--count", "4", "--N", "300",
    ]);
    assert_eq!(code(&out), 0);
    let (header, rows) = csv(&out);
    let dev = column(&header, &rows, "measured")[0];
    assert!(dev < 1e-8);
}

#[test]
fn validate_interlace_and_form_identity_pass() {
    let a = qspec(&[
        "validate",
        "interlace",
        "--q",
        "0.5",
        "--nu",
        "0.5",
        "--kappa",
        "-2",
    ]);
    assert_eq!(code(&a), 0);
    let b = qspec(&[
        "validate",
        "form-identity",
        "--q",
        "0.5",
        "--nu",
        "0.5",
        "--kappa",
        "3",
    ]);
    assert_eq!(code(&b), 0);
}

#[test]
fn failed_validation_exits_one_with_the_report_still_emitted() {
    // an impossible bound forces the failure path without any domain error
    let out = qspec(&[
        "validate", "oracle", "--q", "0.5", "--nu", "2", "--bound", "1e-30",
    ]);
    assert_eq!(code(&out), 1);
    let (_, rows) = csv(&out);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][3], "false");
}

#[test]
fn sweep_with_one_step_matches_the_spectrum_command() {
    let sweep = qspec(&[
        "sweep-kappa",
        "--q",
        "0.5",
        "--nu",
        "0.5",
        "--count",
        "3",
        "--kappa-min",
        "0",
        "--kappa-max",
        "7",
        "--steps",
        "1",
    ]);
    let spec = qspec(&[
        "spectrum", "--q", "0.5", "--nu", "0.5", "--kappa", "0", "--count", "3",
    ]);
    assert_eq!(code(&sweep), 0);
    let (h1, r1) = csv(&sweep);
    let (h2, r2) = csv(&spec);
    assert_eq!(h1, ["kappa", "n", "xi"]);
    // the eigenvalues agree to the printed digit
    let i1 = h1.iter().position(|h| h == "xi").unwrap();
    let i2 = h2.iter().position(|h| h == "xi").unwrap();
    for (a, b) in r1.iter().zip(r2.iter()) {
        assert_eq!(a[i1], b[i2]);
    }
}

#[test]
fn sweep_columns_increase_with_kappa() {
    let out = qspec(&[
        "sweep-kappa",
        "--q",
        "0.5",
        "--nu",
        "0.5",
        "--count",
        "2",
        "--kappa-min",
        "-1",
        "--kappa-max",
        "1",
        "--steps",
        "5",
    ]);
    assert_eq!(code(&out), 0);
    let (header, rows) = csv(&out);
    let ns = column(&header, &rows, "n");
    let xi = column(&header, &rows, "xi");
    for level in [1.0, 2.0] {
        let series: Vec<f64> = ns
            .iter()
            .zip(xi.iter())
            .filter(|(n, _)| **n == level)
            .map(|(_, x)| *x)
            .collect();
        assert_eq!(series.len(), 5);
        for w in series.windows(2) {
            assert!(w[0] < w[1]);
        }
    }
}

#[test]
fn identical_configuration_gives_byte_identical_output() {
    let args = [
        "validate", "diffeq", "--count", "40", "--seed", "7", "--format", "json",
    ];
    let a = qspec(&args);
    let b = qspec(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn json_records_round_trip_through_a_parser() {
    let out = qspec(&[
        "spectrum", "--q", "0.5", "--nu", "1", "--count", "2", "--format", "json",
    ]);
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid json");
    let records = parsed.as_array().expect("array");
    assert_eq!(records.len(), 2);
    for rec in records {
        assert!(rec["n"].as_u64().is_some());
        for key in ["xi", "residual", "bracket_lo", "bracket_hi"] {
            assert!(rec[key].as_f64().expect("number").is_finite());
        }
    }
}

#[test]
fn tolerance_comes_from_flag_then_environment() {
    let bad = Command::new(env!("CARGO_BIN_EXE_qspec"))
        .args(["eval", "phi", "--q", "0.5", "--nu", "1.5", "--x", "0"])
        .env("QSPEC_TOL", "banana")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));

    let env_ok = Command::new(env!("CARGO_BIN_EXE_qspec"))
        .args(["eval", "phi", "--q", "0.5", "--nu", "1.5", "--x", "0"])
        .env("QSPEC_TOL", "1e-6")
        .output()
        .unwrap();
    assert_eq!(env_ok.status.code(), Some(0));

    // the flag wins over a broken environment value
    let flag_wins = Command::new(env!("CARGO_BIN_EXE_qspec"))
        .args([
            "eval", "phi", "--q", "0.5", "--nu", "1.5", "--x", "0", "--tol", "1e-10",
        ])
        .env("QSPEC_TOL", "banana")
        .output()
        .unwrap();
    assert_eq!(flag_wins.status.code(), Some(0));
}

#[test]
fn out_flag_writes_the_stream_to_a_file() {
    let dir = std::env::temp_dir().join("qspec-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("spectrum.csv");
    let out = qspec(&[
        "spectrum",
        "--q",
        "0.5",
        "--nu",
        "1",
        "--count",
        "2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("n,xi,"));
    std::fs::remove_file(&path).unwrap();
}
