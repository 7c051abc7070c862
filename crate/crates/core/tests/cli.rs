use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn aalg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aalg"))
        .args(args)
        .env_remove("AALG_TOL")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn ricci_reports_header_and_flatness() {
    let out = aalg(&["ricci", "--spec", r#"{"metric":"a","A":[[0,1],[-1,0]]}"#]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = json(&out);
    assert_eq!(v["tool"], "aalg");
    assert_eq!(v["command"], "ricci");
    assert_eq!(v["n"], 3);
    assert_eq!(v["flat"], true);
    assert_eq!(v["ricci_flat"], true);
}

#[test]
fn malformed_input_exits_with_two() {
    assert_eq!(
        aalg(&["ricci", "--spec", "{not json"]).status.code(),
        Some(2)
    );
    assert_eq!(
        aalg(&["ricci", "--spec", r#"{"metric":"b","A":[[1]],"extra":0}"#])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(aalg(&["petrov", "--lambda", "1,x"]).status.code(), Some(2));
    assert_eq!(aalg(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn domain_violation_exits_with_three() {
    let out = aalg(&["petrov", "--lambda", "-1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("negate"));
    assert_eq!(aalg(&["petrov", "--lambda", "0,0"]).status.code(), Some(3));
    assert!(aalg(&["petrov", "--lambda", "0,0", "--allow-minkowski"])
        .status
        .success());
}

#[test]
fn failed_verification_exits_with_five_after_printing() {
    let out = aalg(&[
        "verify",
        "--spec",
        r#"{"lambda":[1]}"#,
        "--fd-tol",
        "1e-30",
        "--points",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(5));
    let v = json(&out);
    assert_eq!(v["command"], "verify");
}

#[test]
fn verify_passes_and_is_deterministic() {
    let args = [
        "verify",
        "--spec",
        r#"{"lambda":[2,1]}"#,
        "--seed",
        "7",
        "--points",
        "3",
    ];
    let first = aalg(&args);
    let second = aalg(&args);
    assert!(
        first.status.success(),
        "{}",
        String::from_utf8_lossy(&first.stdout)
    );
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn outputs_are_not_overwritten_without_force() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("traj.csv");
    let p = path.to_str().unwrap();
    let run = |extra: &[&str]| {
        let mut args = vec!["geodesic", "--lambda", "1", "--t-end", "5", "--out", p];
        args.extend_from_slice(extra);
        aalg(&args)
    };
    assert!(run(&[]).status.success());
    let header = fs::read_to_string(&path)
        .unwrap()
        .lines()
        .next()
        .unwrap()
        .to_string();
    assert_eq!(header, "t,u1,u2,u3,u4,Q");

    assert_eq!(run(&[]).status.code(), Some(2));
    assert!(run(&["--force"]).status.success());
}

#[test]
fn ctc_writes_samples_and_plot_data() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("ctc.csv");
    let plots = dir.path().join("plots");
    let out = aalg(&[
        "ctc",
        "--lambda",
        "1,-1",
        "--samples",
        "1000",
        "--out",
        csv.to_str().unwrap(),
        "--plot-dir",
        plots.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = json(&out);
    assert_eq!(v["all_timelike"], true);
    assert_eq!(v["f_max_below_threshold"], true);

    let body = fs::read_to_string(&csv).unwrap();
    let mut lines = body.lines();
    assert_eq!(lines.next(), Some("t,x1,x2,x3,x4,x5,norm"));
    assert_eq!(lines.count(), 1000);
    for name in [
        "plot_f.csv",
        "plot_ctc.csv",
        "plot_x1xn.csv",
        "plot_x2xn.csv",
    ] {
        assert!(plots.join(name).is_file(), "{name} missing");
    }
}

#[test]
fn geodesic_without_planar_part_reports_the_sphere() {
    let out = aalg(&[
        "geodesic",
        "--lambda",
        "2,1",
        "--u0",
        "0,0,0.6,0.8,0",
        "--t-end",
        "20",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = json(&out);
    let sphere = &v["sphere"];
    assert!((sphere["radius_sq"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!(sphere["max_drift"].as_f64().unwrap() < 1e-8);
    assert!(v["polar"]["not_applicable"].is_string());
}

#[test]
fn tolerance_can_come_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_aalg"))
        .args(["petrov", "--lambda", "1"])
        .env("AALG_TOL", "1e-8")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(json(&out)["tol"], 1e-8);
}
