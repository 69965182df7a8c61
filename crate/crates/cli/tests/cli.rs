use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_cmc-glue"));
    c.env_remove("CMC_GLUE_OUTPUT_DIR");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stderr_json(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stderr);
    serde_json::from_str(text.trim()).unwrap_or_else(|_| panic!("stderr is not JSON: {text}"))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn verify_delaunay_suite_passes() {
    let out = run(&[
        "verify",
        "--suite",
        "delaunay",
        "--tau-grid",
        "0.6,0.1,-0.5",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["failed"], 0);
    assert!(report["passed"].as_u64().unwrap() > 0);
    assert_eq!(report["schema_version"], 1);
}

#[test]
fn indicial_small_neck_root_near_two() {
    let out = run(&["indicial", "--tau", "0.01", "--jmax", "4"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("j,gamma,trace,det,classification"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 5);
    let j2 = rows.iter().find(|r| r[0] == "2").unwrap();
    let gamma: f64 = j2[1].parse().unwrap();
    assert!((gamma - 2.0).abs() <= 0.1, "gamma_2 = {gamma}");
    // 17 significant digits in scientific notation
    assert!(j2[1].contains('e') && j2[1].split('e').next().unwrap().len() >= 18);
}

#[test]
fn out_of_range_tau_is_a_domain_error() {
    let out = run(&["profile", "--tau", "2.0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    assert_eq!(stderr_json(&out)["error"]["kind"], "invalid-parameter");
}

#[test]
fn unknown_flag_rejected() {
    let out = run(&["profile", "--tau", "0.5", "--bogus", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"]["kind"], "usage");
}

#[test]
fn help_and_version_exit_zero() {
    assert!(run(&["--help"]).status.success());
    let v = run(&["--version"]);
    assert!(v.status.success());
    assert!(String::from_utf8_lossy(&v.stdout).contains(env!("CARGO_PKG_VERSION")));
}

#[test]
fn profile_json_round_trips() {
    let out = run(&["profile", "--tau=-0.5"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let p = cmc_glue::DelaunayProfile::from_json(&text).unwrap();
    assert_eq!(p.tau(), -0.5);
}

#[test]
fn glue_writes_obj_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let obj = dir.path().join("g.obj");
    let out = run(&[
        "glue",
        "--base",
        "sphere",
        "--tau",
        "0.1",
        "--resolution",
        "64",
        "--out",
        obj.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    let r = &report["result"];
    assert!(r["interface_mismatch"].as_f64().unwrap() < 1e-3);
    assert!(r["interior_H_error"].as_f64().unwrap() < 0.1);
    let mesh = std::fs::read_to_string(&obj).unwrap();
    let v = mesh.lines().filter(|l| l.starts_with("v ")).count();
    let f = mesh.lines().filter(|l| l.starts_with("f ")).count();
    assert_eq!(v as u64, r["report"]["vertices"].as_u64().unwrap());
    assert_eq!(f as u64, r["report"]["faces"].as_u64().unwrap());
}

#[test]
fn glue_rejects_large_tau_before_writing() {
    let dir = tempfile::tempdir().unwrap();
    let obj = dir.path().join("g.obj");
    let out = run(&[
        "glue",
        "--base",
        "sphere",
        "--tau",
        "0.9",
        "--out",
        obj.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"]["kind"], "parameter-out-of-range");
    assert!(!obj.exists());
}

#[test]
fn output_dir_override_applies_to_relative_paths() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .env("CMC_GLUE_OUTPUT_DIR", dir.path())
        .args([
            "mesh",
            "--tau",
            "0.5",
            "--res",
            "9x8",
            "--format",
            "ply",
            "--out",
            "sub/m.ply",
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let bytes = std::fs::read(dir.path().join("sub/m.ply")).unwrap();
    assert!(bytes.starts_with(b"ply"));
}

#[test]
fn outputs_are_deterministic() {
    let a = run(&["jacobi", "--tau", "0.3", "--field", "rot_x"]);
    let b = run(&["jacobi", "--tau", "0.3", "--field", "rot_x"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v1 = run(&["verify", "--suite", "harmonic", "--seed", "7"]);
    let v2 = run(&["verify", "--suite", "harmonic", "--seed", "7"]);
    assert_eq!(v1.status.code(), Some(0));
    assert_eq!(v1.stdout, v2.stdout);
}

#[test]
fn jacobi_csv_has_small_residual() {
    let out = run(&["jacobi", "--tau", "0.5", "--field", "trans_x"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("s,phi,residual"));
    let worst = lines
        .map(|l| l.split(',').nth(2).unwrap().parse::<f64>().unwrap().abs())
        .fold(0.0, f64::max);
    assert!(worst < 1e-6, "{worst}");
}

#[test]
fn unknown_jacobi_field_rejected() {
    let out = run(&["jacobi", "--tau", "0.5", "--field", "spin"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"]["kind"], "invalid-parameter");
}

#[test]
fn harmonic_interior_scales_modes() {
    let dir = tempfile::tempdir().unwrap();
    let h = write(dir.path(), "h.json", "[[2, 1.0, 0.0], [-2, 1.0, 0.0]]");
    let out = run(&[
        "harmonic", "--op", "interior", "--in", &h, "--rho", "1", "--r", "0.5",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let e: Value = serde_json::from_slice(&out.stdout).unwrap();
    let value = e["value"].as_array().unwrap();
    let c2 = value.iter().find(|t| t[0] == 2).unwrap()[1]
        .as_f64()
        .unwrap();
    let d2 = e["r_dr"]
        .as_array()
        .unwrap()
        .iter()
        .find(|t| t[0] == 2)
        .unwrap()[1]
        .as_f64()
        .unwrap();
    assert!((c2 - 0.25).abs() < 1e-15);
    assert!((d2 - 0.5).abs() < 1e-15);
}

#[test]
fn harmonic_dtn_rejects_nonzero_mean() {
    let dir = tempfile::tempdir().unwrap();
    let h = write(
        dir.path(),
        "h.json",
        "[[0, 1.0, 0.0], [3, 1.0, 0.0], [-3, 1.0, 0.0]]",
    );
    let out = run(&["harmonic", "--op", "dtn", "--in", &h]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"]["kind"], "nonzero-mean");
    let ok = write(dir.path(), "g.json", "[[3, 1.0, 0.0], [-3, 1.0, 0.0]]");
    let out = run(&["harmonic", "--op", "dtn", "--in", &ok]);
    let g: Value = serde_json::from_slice(&out.stdout).unwrap();
    let c3 = g.as_array().unwrap().iter().find(|t| t[0] == 3).unwrap()[1].as_f64();
    assert_eq!(c3, Some(6.0));
}

#[test]
fn match_zero_data_gives_zero_state() {
    let dir = tempfile::tempdir().unwrap();
    let zero = write(dir.path(), "z.json", r#"{"dirichlet": [], "neumann": []}"#);
    let out = run(&[
        "match",
        "--tau",
        "0.1",
        "--delaunay-corr",
        &zero,
        "--surface-corr",
        &zero,
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["tool"], "cmc-glue");
    assert!(doc["config"]["radius"].as_f64().unwrap() > 0.0);
    let state = &doc["result"]["state"];
    for k in ["t", "a0", "a1", "a_neg1"] {
        assert_eq!(state[k].as_f64(), Some(0.0), "{k}");
    }
    for k in ["g", "h"] {
        for t in state[k].as_array().unwrap() {
            assert_eq!((t[1].as_f64(), t[2].as_f64()), (Some(0.0), Some(0.0)));
        }
    }
}

#[test]
fn verify_failures_exit_two() {
    // Principal curvatures near 4/τ² cancel to H = 1, so at τ = 1e-5 the
    // 1e-8 curvature bound is below double-precision roundoff.
    let out = run(&["verify", "--suite", "delaunay", "--tau-grid", "1e-5"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.lines().any(|l| l.starts_with("FAILED delaunay/")),
        "{err}"
    );
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["failed"].as_u64().unwrap() > 0);
}
