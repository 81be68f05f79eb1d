//! End-to-end checks of the CLI and its exit-code contract:
//! 0 success, 1 i/o, 2 validation, 3 divisor point, 4 identity failure.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_kptau")
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("kptau_cli_{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write_curve() -> PathBuf {
    let p = tmp("curve.json");
    std::fs::write(&p, r#"{"type":"hyperelliptic","branch_points":[-2.0,-1.0,0.0,1.0,2.0]}"#)
        .unwrap();
    p
}

#[test]
fn periods_expand_verify_roundtrip() {
    let curve = write_curve();
    let periods = tmp("periods.json");
    let out = Command::new(bin())
        .args(["periods"])
        .arg(&curve)
        .arg("-o")
        .arg(&periods)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("legendre residual"));

    // period file round-trips bit-exactly through the loader
    let text1 = std::fs::read_to_string(&periods).unwrap();
    let pd = kptau::periods::PeriodData::from_json(&text1).unwrap();
    assert_eq!(text1, pd.to_json());

    let pi = tmp("pi.json");
    let out = Command::new(bin())
        .args(["expand"])
        .arg(&curve)
        .arg(&periods)
        .args(["--v", "0.31,0.12,-0.42,0.2", "--max-weight", "6", "-o"])
        .arg(&pi)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let parsed: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&pi).unwrap()).unwrap();
    // pi_empty = 1 heads the table
    let first = &parsed["entries"][0];
    assert_eq!(first["partition"].as_array().unwrap().len(), 0);
    assert!((first["value"][0].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!(parsed["giambelli_residual"].as_f64().unwrap() < 1e-6);

    let report = tmp("report.json");
    let out = Command::new(bin())
        .args(["verify"])
        .arg(&curve)
        .arg(&periods)
        .args(["--samples", "5", "-o"])
        .arg(&report)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("not run"), "trigonal rows should be gated: {text}");
}

#[test]
fn exit_code_io_error() {
    let out = Command::new(bin())
        .args(["periods", "/nonexistent/curve.json", "-o", "/tmp/x.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn exit_code_validation_for_trigonal_periods() {
    let out = Command::new(bin())
        .args(["periods"])
        .arg(fixture("trigonal_g3_curve.json"))
        .args(["-o", "/tmp/should_not_exist.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("not computable internally"), "{err}");
}

#[test]
fn exit_code_divisor_point() {
    let curve = write_curve();
    let periods = tmp("periods_div.json");
    let status = Command::new(bin())
        .args(["periods"])
        .arg(&curve)
        .arg("-o")
        .arg(&periods)
        .status()
        .unwrap();
    assert!(status.success());
    // construct an honest divisor point: a single-point Abel image plus
    // the Riemann half-period lies on the shifted theta divisor
    let h = kptau::curve::HyperellipticCurve::from_branch_points(vec![-2.0, -1.0, 0.0, 1.0, 2.0])
        .unwrap();
    let pd = kptau::periods::PeriodData::load(&periods, true).unwrap();
    let half = kptau::identities::riemann_half_period(&h, &pd).unwrap();
    let x = num_complex::Complex64::new(2.9, 0.7);
    let y = {
        let mut a = num_complex::Complex64::new(0.0, 0.0);
        for &l in h.lambda().iter().rev() {
            a = a * x + l;
        }
        a.sqrt()
    };
    let img = kptau::periods::abel_map(&h, &[(x, y)], &[0]).unwrap();
    let v: Vec<f64> = (0..2).flat_map(|i| [(img[i] + half[i]).re, (img[i] + half[i]).im]).collect();
    let vs = v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(",");
    let out = Command::new(bin())
        .args(["expand"])
        .arg(&curve)
        .arg(&periods)
        .args(["--v", &vs, "--max-weight", "4", "-o", "/tmp/unused.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn exit_code_identity_failure_at_impossible_tolerance() {
    let curve = write_curve();
    let out = Command::new(bin())
        .args(["verify"])
        .arg(&curve)
        .args(["--suite", "genus2", "--samples", "3", "--tol", "1e-15"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn trigonal_suite_runs_with_fixture() {
    let out = Command::new(bin())
        .args(["verify"])
        .arg(fixture("trigonal_g3_curve.json"))
        .arg(fixture("trigonal_g3_periods.json"))
        .args(["--suite", "trigonal", "--samples", "4"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("pass") && !text.contains("not run"), "{text}");
}

#[test]
fn theta_and_wp_emit_values() {
    let curve = write_curve();
    let periods = tmp("periods_theta.json");
    assert!(Command::new(bin())
        .args(["periods"])
        .arg(&curve)
        .arg("-o")
        .arg(&periods)
        .status()
        .unwrap()
        .success());
    let out = Command::new(bin())
        .args(["theta"])
        .arg(&periods)
        .args(["--z", "0.2,0.1,0.3,-0.1"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let out = Command::new(bin())
        .args(["wp"])
        .arg(&periods)
        .arg(&curve)
        .args(["--v", "0.31,0.12,-0.42,0.2"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let parsed: serde_json::Value =
        serde_json::from_slice(&out.stdout).expect("wp emits a JSON Klein point");
    assert!(parsed["wp2"][0][1] == parsed["wp2"][1][0]);
}
