use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scene(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("scenes")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hilbert-lab"))
        .args(args)
        .env("HILBERT_LAB_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

#[test]
fn distance_report_has_closed_form_value() {
    let s = scene("ball_boost.json");
    let out = run(&["distance", "--scene", s.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["command"], "distance");
    assert_eq!(r["scene_version"], 1);
    let pair = &r["results"]["pairs"][0];
    assert_eq!(
        (pair["from"].as_str(), pair["to"].as_str()),
        (Some("origin"), Some("x"))
    );
    let d = pair["distance"].as_f64().unwrap();
    assert!((d - 0.5 * 3f64.ln()).abs() < 1e-12, "{d}");
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let s = scene("schottky.json");
    let a = run(&["limitset", "--scene", s.to_str().unwrap()]);
    let b = run(&["limitset", "--scene", s.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn overrides_reach_the_report() {
    let s = scene("ball_boost.json");
    let out = run(&[
        "orbit",
        "--scene",
        s.to_str().unwrap(),
        "--word-len",
        "2",
        "--seed",
        "9",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["config"]["run"]["word_len"], 2);
    assert_eq!(r["config"]["run"]["seed"], 9);
}

#[test]
fn failed_check_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{"version": 1,
            "domain": {"simplex": {"vertices": [[1,0,0],[0,1,0],[0,0,1]]}},
            "checks": [{"simplex": {"vertices": [[1,0,0],[0,1,0],[0,0,1]], "expect": false}}]}"#,
    )
    .unwrap();
    let out = run(&["checks", "--scene", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(report(&out)["passed"], false);
}

#[test]
fn scene_errors_exit_one_with_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{"version": 1, "domain": {"ball": {"dim": 2}}, "config": {"windw": 3}}"#,
    )
    .unwrap();
    let out = run(&["orbit", "--scene", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("config.windw"));
}

#[test]
fn unknown_command_and_bad_flags_exit_one() {
    let s = scene("ball_boost.json");
    assert_eq!(
        run(&["frobnicate", "--scene", s.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(run(&["orbit"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn plot_writes_svg_and_rejects_three_dimensions() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("out.svg");
    let s = scene("ball_boost.json");
    let out = run(&[
        "plot",
        "--scene",
        s.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg"));
    assert!(text.contains("<circle"));

    let s3 = scene("ball3.json");
    let out = run(&["plot", "--scene", s3.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dimension 3"));
}

#[test]
fn report_goes_to_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let s = scene("coxeter_237.json");
    let out = run(&[
        "orbit",
        "--scene",
        s.to_str().unwrap(),
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(r["command"], "orbit");
}
