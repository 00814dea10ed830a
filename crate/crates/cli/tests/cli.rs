use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use framethresh::frame::{analyze, Subspace};
use framethresh::io::{read_coefficients, read_signal, write_coefficients, write_signal};
use framethresh::simulate::rng::standard_normal;
use framethresh::simulate::{trial_rng, two_sine_signal};
use framethresh::transforms::{CycleSpinFrame, WaveletBasis, WaveletFilterPair};
use framethresh::{Frame, Signal};
use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_framethresh"));
    cmd.env_remove("FRAMETHRESH_THREADS");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn rows(table: &Value) -> &Vec<Value> {
    table["rows"].as_array().unwrap()
}

fn row<'a>(table: &'a Value, rule: &str) -> &'a Value {
    rows(table).iter().find(|r| r["rule"] == rule).unwrap()
}

#[test]
fn thresholds_table() {
    let out = ok(&["thresholds", "--n", "1024", "--alpha", "0.1"]);
    let table: Value = serde_json::from_slice(&out.stdout).unwrap();
    let evt = row(&table, "evt")["threshold"].as_f64().unwrap();
    // high-precision value 3.91397954568325...; the rounded table value is 3.914
    assert!((evt - 3.913_979_545_683_250_4).abs() < 1e-12, "{evt}");
    assert_eq!(format!("{evt:.3}"), "3.914");
    let universal = row(&table, "universal")["threshold"].as_f64().unwrap();
    assert!((universal - 3.723297).abs() < 1e-6, "{universal}");
    assert!(row(&table, "ti")["threshold"].as_f64().is_some());
}

#[test]
fn thresholds_scale_with_sigma() {
    let one = ok(&[
        "thresholds",
        "--n",
        "512",
        "--alpha",
        "0.05,0.2",
        "--M",
        "8",
    ]);
    let two = ok(&[
        "thresholds",
        "--n",
        "512",
        "--alpha",
        "0.05,0.2",
        "--M",
        "8",
        "--sigma",
        "2",
    ]);
    let one: Value = serde_json::from_slice(&one.stdout).unwrap();
    let two: Value = serde_json::from_slice(&two.stdout).unwrap();
    assert_eq!(rows(&one).len(), 1 + 2 * 4);
    for (a, b) in rows(&one).iter().zip(rows(&two)) {
        assert_eq!(a["rule"], b["rule"]);
        assert_eq!(
            2.0 * a["threshold"].as_f64().unwrap(),
            b["threshold"].as_f64().unwrap()
        );
    }
}

#[test]
fn thresholds_without_differentiable_wavelet() {
    let out = ok(&["thresholds", "--n", "64", "--wavelet", "haar"]);
    let table: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(table["c"].is_null());
    assert!(table["ti_note"].is_string());
    assert!(rows(&table).iter().all(|r| r["rule"] != "ti"));
}

fn simulate_args(dir: &Path, name: &str) -> Vec<String> {
    [
        "simulate",
        "--experiment",
        "gumbel",
        "--frame-spec",
        r#"{"type":"wavelet","n":256,"filters":"d4"}"#,
        "--trials",
        "2000",
        "--seed",
        "77",
        "--out",
        path_str(&dir.join(format!("{name}.json"))),
        "--qq",
        path_str(&dir.join(format!("{name}.csv"))),
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()
}

#[test]
fn simulate_is_byte_identical_across_runs_and_threads() {
    let dir = TempDir::new().unwrap();
    let a = simulate_args(dir.path(), "a");
    let b = simulate_args(dir.path(), "b");
    ok(&a.iter().map(String::as_str).collect::<Vec<_>>());
    let out = bin()
        .args(&b)
        .env("FRAMETHRESH_THREADS", "1")
        .output()
        .unwrap();
    assert!(out.status.success());
    for ext in ["json", "csv"] {
        let x = fs::read(dir.path().join(format!("a.{ext}"))).unwrap();
        let y = fs::read(dir.path().join(format!("b.{ext}"))).unwrap();
        assert_eq!(x, y, "{ext} differs");
    }
    let report = json(&dir.path().join("a.json"));
    assert_eq!(report["experiment"], "gumbel");
    assert_eq!(report["report"]["trials"], 2000);
    let manifest = json(&dir.path().join("b.manifest.json"));
    assert_eq!(manifest["seed"], 77);
    assert_eq!(manifest["threads"], 1);
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), 2);
}

#[test]
fn diagnose_translation_invariant_bounds() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("ti.json");
    ok(&[
        "diagnose",
        "--frame-spec",
        r#"{"type":"ti","n":64}"#,
        "--n-list",
        "64,128",
        "--out",
        path_str(&out),
    ]);
    let report = json(&out);
    let rows = report["stability"]["rows"].as_array().unwrap();
    for (row, n) in rows.iter().zip([64.0, 128.0]) {
        let b = row["upper_frame_bound"].as_f64().unwrap();
        assert!((b - n).abs() < 1e-6 * n, "{b}");
    }
    assert_eq!(
        report["comparison"][0]["bounds"].as_array().unwrap().len(),
        3
    );
    assert!(report["remainders"][1]["rest_sum"].as_f64().unwrap() > 0.0);
}

#[test]
fn denoise_fixture_keeps_two_coefficients() {
    let dir = TempDir::new().unwrap();
    let n = 1024;
    let clean = two_sine_signal(n, 150.0, 380.0).unwrap();
    let mut rng = trial_rng(0, 0);
    let noisy: Vec<f64> = clean
        .samples()
        .iter()
        .map(|v| v + standard_normal(&mut rng))
        .collect();
    let input = dir.path().join("noisy.bin");
    let clean_path = dir.path().join("clean.csv");
    write_signal(&input, &Signal::new(noisy).unwrap()).unwrap();
    write_signal(&clean_path, &clean).unwrap();
    let output = dir.path().join("estimate.csv");
    ok(&[
        "denoise",
        "--input",
        path_str(&input),
        "--frame-spec",
        r#"{"type":"sine","n":1024}"#,
        "--threshold-rule",
        "universal",
        "--sigma",
        "1",
        "--clean",
        path_str(&clean_path),
        "--output",
        path_str(&output),
    ]);
    let report = json(&dir.path().join("estimate.report.json"));
    assert_eq!(report["kept_count"], 2);
    let t = report["threshold_used"].as_f64().unwrap();
    assert!((t - (2.0 * (n as f64).ln()).sqrt()).abs() < 1e-12);
    assert!(report["mse"].as_f64().unwrap() < 0.05);
    assert_eq!(read_signal(&output).unwrap().len(), n);
    assert!(dir.path().join("estimate.manifest.json").exists());
}

#[test]
fn replay_reproduces_simulate_and_diagnose() {
    let dir = TempDir::new().unwrap();
    let spec_path = dir.path().join("frame.json");
    fs::write(&spec_path, r#"{"type":"cyclespin","n":128,"M":4}"#).unwrap();
    let sim = dir.path().join("coverage.json");
    ok(&[
        "simulate",
        "--experiment",
        "coverage",
        "--frame-spec",
        path_str(&spec_path),
        "--threshold-rule",
        "cyclespin",
        "--trials",
        "1500",
        "--seed",
        "5",
        "--out",
        path_str(&sim),
    ]);
    let diag = dir.path().join("diag.json");
    ok(&[
        "diagnose",
        "--frame-spec",
        path_str(&spec_path),
        "--n-list",
        "32,64,128",
        "--out",
        path_str(&diag),
    ]);
    // the spec file is inlined into the manifest
    fs::remove_file(&spec_path).unwrap();
    for (report, manifest) in [
        (&sim, dir.path().join("coverage.manifest.json")),
        (&diag, dir.path().join("diag.manifest.json")),
    ] {
        let replay_dir = dir.path().join(format!(
            "replay-{}",
            report.file_stem().unwrap().to_str().unwrap()
        ));
        fs::create_dir(&replay_dir).unwrap();
        ok(&[
            "replay",
            path_str(&manifest),
            "--output-dir",
            path_str(&replay_dir),
        ]);
        let replayed = replay_dir.join(report.file_name().unwrap());
        assert_eq!(fs::read(report).unwrap(), fs::read(&replayed).unwrap());
        let first = json(&manifest);
        let second = json(&replay_dir.join(format!(
            "{}.manifest.json",
            report.file_stem().unwrap().to_str().unwrap()
        )));
        assert_eq!(first["command"], second["command"]);
        assert_eq!(
            first["config"]["frame_spec"],
            second["config"]["frame_spec"]
        );
    }
}

fn error_of(out: &Output) -> Value {
    serde_json::from_slice(out.stderr.trim_ascii()).unwrap_or_else(|_| {
        panic!(
            "stderr is not JSON: {}",
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn assert_fails(args: &[&str], code: i32, kind: &str) -> Value {
    let out = run(args);
    assert_eq!(out.status.code(), Some(code), "{args:?}");
    let err = error_of(&out);
    assert_eq!(err["kind"], kind);
    assert_eq!(err["code"], code);
    err
}

#[test]
fn error_codes() {
    let dir = TempDir::new().unwrap();
    let out = path_str(&dir.path().join("x.json")).to_string();
    let spec = r#"{"type":"wavelet","n":64}"#;
    // usage: --seed is mandatory
    assert_fails(
        &[
            "simulate",
            "--experiment",
            "gumbel",
            "--frame-spec",
            spec,
            "--out",
            &out,
        ],
        2,
        "usage",
    );
    assert_fails(&["frobnicate"], 2, "usage");
    // validation names the flag
    let err = assert_fails(
        &["thresholds", "--n", "64", "--alpha", "1.5"],
        3,
        "validation",
    );
    assert_eq!(err["parameter"], "alpha");
    assert_fails(
        &[
            "simulate",
            "--experiment",
            "gumbel",
            "--frame-spec",
            r#"{"type":"wavelet","n":100}"#,
            "--seed",
            "1",
            "--out",
            &out,
        ],
        3,
        "validation",
    );
    let bad_threads = bin()
        .args(["thresholds", "--n", "64"])
        .env("FRAMETHRESH_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad_threads.status.code(), Some(3));
    // i/o
    assert_fails(
        &[
            "denoise",
            "--input",
            "/nonexistent/signal.csv",
            "--frame-spec",
            spec,
            "--sigma",
            "1",
            "--output",
            &out,
        ],
        4,
        "io",
    );
    // parse
    assert_fails(
        &[
            "diagnose",
            "--frame-spec",
            r#"{"type":"wavelet""#,
            "--out",
            &out,
        ],
        5,
        "parse",
    );
    let garbage = dir.path().join("garbage.csv");
    fs::write(&garbage, "1.0\nnot-a-number\n").unwrap();
    assert_fails(
        &[
            "denoise",
            "--input",
            path_str(&garbage),
            "--frame-spec",
            spec,
            "--sigma",
            "1",
            "--output",
            &out,
        ],
        5,
        "parse",
    );
}

#[test]
fn file_formats_round_trip() {
    let dir = TempDir::new().unwrap();
    let samples: Vec<f64> = (0..64)
        .map(|k| (k as f64 * 0.37).sin() / 3.0 + 1e-300 * k as f64)
        .collect();
    let signal = Signal::new(samples).unwrap();
    for name in ["s.csv", "s.bin"] {
        let path: PathBuf = dir.path().join(name);
        write_signal(&path, &signal).unwrap();
        assert_eq!(read_signal(&path).unwrap(), signal);
    }
    let frame = CycleSpinFrame::new(
        WaveletBasis::new(WaveletFilterPair::daubechies4(), 64, 1).unwrap(),
        4,
    )
    .unwrap();
    let coeffs = analyze(&frame, &signal).unwrap();
    let path = dir.path().join("c.csv");
    write_coefficients(&path, &coeffs).unwrap();
    let back = read_coefficients(&path, frame.layout().clone()).unwrap();
    assert_eq!(back.values(), coeffs.values());
    assert_eq!(back.layout().indices(), coeffs.layout().indices());
    assert!(frame.effective_count(Subspace::Full) <= frame.atom_count());
}

#[test]
fn manifest_round_trips_through_replay() {
    let dir = TempDir::new().unwrap();
    let table = dir.path().join("t.json");
    let manifest = dir.path().join("t.manifest.json");
    ok(&[
        "thresholds",
        "--n",
        "256",
        "--M",
        "2",
        "--out",
        path_str(&table),
        "--manifest",
        path_str(&manifest),
    ]);
    let first = json(&manifest);
    fs::remove_file(&table).unwrap();
    let second_manifest = dir.path().join("again.json");
    ok(&[
        "replay",
        path_str(&manifest),
        "--manifest",
        path_str(&second_manifest),
    ]);
    assert!(table.exists());
    let second = json(&second_manifest);
    assert_eq!(first["config"], second["config"]);
    assert_eq!(first["outputs"], second["outputs"]);
}
