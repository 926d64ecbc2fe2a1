use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn srlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_srlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn identity_mtx(n: usize) -> String {
    let mut s = format!("%%MatrixMarket matrix array real general\n{n} {n}\n");
    for j in 0..n {
        for i in 0..n {
            s += if i == j { "1\n" } else { "0\n" };
        }
    }
    s
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn compute_quantities() {
    let dir = tempfile::tempdir().unwrap();
    let id5 = write(dir.path(), "identity_5.mtx", &identity_mtx(5));
    let out = srlab(&["compute", s(&id5), "--quantity", "sr"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["value"], 5.0);

    let zero = write(dir.path(), "zero.csv", "0,0,0\n0,0,0\n");
    let out = srlab(&["compute", s(&zero), "--format", "text"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "0");

    let out = srlab(&["compute", s(&id5), "-q", "schatten", "-p", "1", "--format", "csv"]);
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    assert!(text.starts_with("quantity,p,value\n"));
    assert!(text.contains("schatten,1,5"));

    let out = srlab(&["compute", s(&id5), "-q", "srp", "-p", "inf", "--format", "text"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "1");
    let out = srlab(&["compute", s(&id5), "-q", "rank", "--format", "text"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "5");
}

#[test]
fn compute_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.mtx", "%%MatrixMarket matrix array real general\n2 2\n1\n");
    let out = srlab(&["compute", s(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.mtx"));
    let out = srlab(&["compute", "/nonexistent/file.mtx"]);
    assert_eq!(out.status.code(), Some(2));

    let indefinite = write(dir.path(), "indef.csv", "1,0\n0,-0.5\n");
    let out = srlab(&["compute", s(&indefinite), "-q", "intdim"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("lambda_min = -5e-1"));
}

#[test]
fn gallery_deletion_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = srlab(&[
        "gallery", "deletion", "--n", "5", "--alpha", "2", "--out-dir", s(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["threshold_met"], true);
    assert!((v["computed"]["sr_a_hat"].as_f64().unwrap() - 4.0).abs() < 1e-12);
    assert!(dir.path().join("deletion.json").exists());

    let a = dir.path().join("deletion_A.mtx");
    let out = srlab(&["compute", s(&a), "--format", "text"]);
    let sr: f64 = String::from_utf8_lossy(&out.stdout).trim().parse().unwrap();
    assert!((sr - 2.0).abs() < 1e-12);
}

#[test]
fn gallery_other_families() {
    let v = json_of(&srlab(&["gallery", "product_violation_family", "--n", "3", "--alpha", "1"]));
    assert_eq!(v["threshold_met"], false);
    assert_eq!(v["violations"]["sr"], false);

    let v = json_of(&srlab(&["gallery", "geometric_decay", "--n", "10", "--ratio", "0.5"]));
    assert!(v["computed"]["sr_a"].as_f64().unwrap() <= 4.0 / 3.0);
    assert!(!v["notes"].as_array().unwrap().is_empty());

    let out = srlab(&["gallery", "sum_violation", "--n", "3"]);
    assert_eq!(out.status.code(), Some(2));
    let out = srlab(&["gallery", "sum_violation", "--n", "5", "--alpha", "-4", "--rotate", "3"]);
    assert_eq!(json_of(&out)["threshold_met"], true);

    for fam in ["maximizer_multiplier", "minimizer_multiplier", "congruence_maximizer", "congruence_minimizer"] {
        let out = srlab(&["gallery", fam, "--n", "6", "--r", "4", "--seed", "9"]);
        assert_eq!(out.status.code(), Some(0), "{fam}");
        assert!(json_of(&out)["max_relative_error"].as_f64().unwrap() < 1e-10, "{fam}");
    }
    let out = srlab(&["gallery", "equality_cases", "--kind", "flat_spectrum(2)", "-p", "10", "--format", "text"]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("sr_p: predicted 2"));
}

#[test]
fn verify_checks() {
    let dir = tempfile::tempdir().unwrap();
    let id3 = write(dir.path(), "i3.mtx", &identity_mtx(3));
    let out = srlab(&["verify", "weyl", s(&id3), s(&id3)]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["reports"][0]["outcome"], "holds");

    srlab(&["gallery", "sum_violation", "--out-dir", s(dir.path())]);
    let a = dir.path().join("sum_violation_A.mtx");
    let b = dir.path().join("sum_violation_B.mtx");
    let out = srlab(&["verify", "check_sum_subadditivity_proot", s(&a), s(&b), "-p", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["reports"][0]["outcome"], "not-applicable");
    assert!(v["reports"][0]["reason"].as_str().unwrap().contains("B"));

    let out = srlab(&["verify", "cross_product", s(&a), "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 7);

    let out = srlab(&["verify", "weyl", s(&id3)]);
    assert_eq!(out.status.code(), Some(2));
    let out = srlab(&["verify", "deletion", s(&a), "--col", "1", "--format", "text"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn condition_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.csv", "4,1,0\n1,3,0\n0,0,1\n");
    let out = srlab(&["condition", s(&a), "--perturbation", "psd", "--epsilons", "0,0.1,1.5", "-p", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows[0]["lower"], rows[0]["actual"]);
    assert_eq!(rows[0]["upper"], rows[0]["actual"]);
    assert!(rows[1]["lower_psd"].as_f64().unwrap() >= rows[1]["lower"].as_f64().unwrap());
    assert_eq!(rows[2]["outcome"], "not-applicable");

    let out = srlab(&["condition", s(&a), "--format", "csv"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 6);
}

#[test]
fn fuzz_is_reproducible_and_clean() {
    let args = ["fuzz", "--trials", "30", "--seed", "11", "--dims-max", "6"];
    let a = json_of(&srlab(&args));
    let mut b_args = args.to_vec();
    b_args.extend(["--parallelism", "2"]);
    let out = srlab(&b_args);
    assert_eq!(out.status.code(), Some(0));
    let b = json_of(&out);
    let strip = |mut v: Value| {
        v.as_object_mut().unwrap().remove("wall_time_s");
        v
    };
    assert_eq!(strip(a.clone()), strip(b));
    assert_eq!(a["total_failures"], 0);
    assert_eq!(a["config"]["p_grid"][5], "inf");

    let out = srlab(&["fuzz", "--trials", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = srlab(&["fuzz", "--trials", "2", "--distributions", "orthogonal_projector", "--checks", "cross_product", "--format", "text"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("0 failures"));
}
