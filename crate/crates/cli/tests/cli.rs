use std::path::Path;
use std::process::{Command, Output};

use bmdm::estimation::read_trace_csv;
use bmdm::harness::read_sweep_csv;
use bmdm::scenario::load_scenario;

fn bmdm(args: &[&str], workers: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_bmdm"));
    cmd.args(args);
    match workers {
        Some(w) => cmd.env("BMDM_WORKERS", w),
        None => cmd.env_remove("BMDM_WORKERS"),
    };
    let out = cmd.output().expect("bmdm runs");
    assert!(
        out.status.success(),
        "bmdm {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn preset_then_run_writes_a_scored_trace() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("cond3.toml");
    let trace = dir.path().join("trace.csv");
    let report = dir.path().join("report.csv");

    bmdm(
        &["preset", "--condition", "3", "--out", path(&scenario)],
        None,
    );
    let cfg = load_scenario(&scenario).unwrap();
    assert_eq!(cfg.interferers.len(), 3);

    let out = bmdm(
        &[
            "run",
            "--scenario",
            path(&scenario),
            "--seed",
            "5",
            "--out",
            path(&trace),
            "--report",
            path(&report),
        ],
        None,
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("rmse"), "{stdout}");

    let rows = read_trace_csv(&trace).unwrap();
    assert_eq!(rows.len(), cfg.radio.frames);
    assert_eq!(rows[0].estimate_m, 0.0);
    let report_text = std::fs::read_to_string(&report).unwrap();
    assert_eq!(report_text.lines().count(), cfg.radio.frames + 1);
}

#[test]
fn sweep_is_byte_identical_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = |out: &Path| {
        vec![
            "sweep".to_string(),
            "--condition".into(),
            "2".into(),
            "--axis".into(),
            "snr".into(),
            "--values".into(),
            "-10,0,10".into(),
            "--count".into(),
            "3".into(),
            "--frames".into(),
            "60".into(),
            "--out".into(),
            path(out).into(),
        ]
    };
    let args_a = args(&a);
    let args_b = args(&b);
    bmdm(
        &args_a.iter().map(String::as_str).collect::<Vec<_>>(),
        Some("1"),
    );
    bmdm(
        &args_b.iter().map(String::as_str).collect::<Vec<_>>(),
        Some("3"),
    );

    let bytes_a = std::fs::read(&a).unwrap();
    assert_eq!(bytes_a, std::fs::read(&b).unwrap());
    let points = read_sweep_csv(&a).unwrap();
    assert_eq!(points.len(), 3);
    assert_eq!(
        points.iter().map(|p| p.value).collect::<Vec<_>>(),
        [-10.0, 0.0, 10.0]
    );
    assert!(points.iter().all(|p| p.trials == 3 && p.rmse_m.is_finite()));
    for p in &points {
        assert!((p.measured_snr_db - p.value).abs() < 0.5);
    }
}

#[test]
fn sweep_over_interferer_count_accepts_integers() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("k.csv");
    bmdm(
        &[
            "sweep",
            "--condition",
            "1",
            "--axis",
            "K",
            "--values",
            "0,1",
            "--count",
            "2",
            "--frames",
            "40",
            "--out",
            path(&out),
        ],
        Some("2"),
    );
    assert_eq!(read_sweep_csv(&out).unwrap().len(), 2);
}

#[test]
fn invalid_inputs_fail_with_a_message() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let cases: [&[&str]; 3] = [
        &["preset", "--condition", "4", "--out", path(&out)],
        &[
            "sweep",
            "--condition",
            "1",
            "--axis",
            "M",
            "--values",
            "12.5",
            "--count",
            "1",
            "--out",
            path(&out),
        ],
        &[
            "run",
            "--scenario",
            "/nonexistent/scenario.toml",
            "--seed",
            "1",
        ],
    ];
    for args in cases {
        let o = Command::new(env!("CARGO_BIN_EXE_bmdm"))
            .args(args)
            .output()
            .unwrap();
        assert!(!o.status.success(), "{args:?} should fail");
        assert!(!o.stderr.is_empty());
    }
}
