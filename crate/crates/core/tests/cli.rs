use std::fs;

use moyal_gp::cli::{run, EXIT_IO, EXIT_OK, EXIT_USAGE, EXIT_VERIFY_FAILED};

fn invoke(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("moyal-gp").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(text: &str) -> serde_json::Value {
    serde_json::from_str(text).unwrap()
}

#[test]
fn solve_linear_limit() {
    let (code, out, _) = invoke(&["solve", "--n", "1", "--L", "1", "--m", "0"]);
    assert_eq!(code, EXIT_OK);
    let v = json(&out);
    assert_eq!(v["k"].as_f64().unwrap(), std::f64::consts::PI);
    assert_eq!(v["A2"].as_f64().unwrap(), 0.0);
    let e = v["E"].as_f64().unwrap();
    assert!((e - std::f64::consts::PI.powi(2) / 2.0).abs() < 1e-12);
}

#[test]
fn solve_reports_matched_constants() {
    let (code, out, _) = invoke(&["solve", "--n", "1", "--L", "1", "--m", "0.5", "--g", "1"]);
    assert_eq!(code, EXIT_OK);
    let v = json(&out);
    let k = v["k"].as_f64().unwrap();
    // 2K(0.5) from the Maclaurin series
    let mut sum = 0.0;
    let mut c = 1.0_f64;
    let mut mj = 1.0;
    for j in 0..200 {
        sum += c * c * mj;
        c *= (2.0 * j as f64 + 1.0) / (2.0 * j as f64 + 2.0);
        mj *= 0.5;
    }
    let k_oracle = 2.0 * std::f64::consts::FRAC_PI_2 * sum;
    assert!((k - k_oracle).abs() < 1e-12, "{k} vs {k_oracle}");
    let e = v["E_matched"].as_f64().unwrap();
    let a2 = v["A2_matched"].as_f64().unwrap();
    assert!((e - k * k * 1.5 / 8.0).abs() < 1e-12);
    assert!((a2 - k * k * 0.5 / 4.0).abs() < 1e-12);
}

#[test]
fn solve_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    let (code, out, _) = invoke(&["solve", "--m", "0.3", "--out", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(out.is_empty());
    assert_eq!(json(&fs::read_to_string(path).unwrap())["m"].as_f64(), Some(0.3));
}

#[test]
fn domain_errors_name_the_field() {
    for (args, field) in [
        (vec!["solve", "--n", "0", "--L", "1", "--m", "0.5"], "n must be ≥ 1"),
        (vec!["solve", "--n", "-3"], "n must be ≥ 1"),
        (vec!["solve", "--L", "-1"], "L"),
        (vec!["solve", "--g", "-0.5"], "g"),
        (vec!["solve", "--m", "1"], "m"),
        (vec!["solve", "--series-order", "7"], "order"),
        (vec!["wigner", "--p-span", "0", "--out", "/tmp/unused"], "p-span"),
    ] {
        let (code, _, err) = invoke(&args);
        assert_eq!(code, EXIT_USAGE, "{args:?}");
        assert!(err.contains(field), "{args:?}: {err}");
    }
}

#[test]
fn wigner_row_counts_and_mask() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("w");
    let (code, stdout, _) = invoke(&[
        "wigner", "--n", "1", "--m", "0.2", "--nq", "17", "--np", "9", "--p-span", "1.5",
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK);
    let wigner = fs::read_to_string(out.join("wigner.csv")).unwrap();
    let mut lines = wigner.lines();
    assert_eq!(lines.next(), Some("q,p,f"));
    assert_eq!(lines.count(), 17 * 9);
    assert_eq!(fs::read_to_string(out.join("psi.csv")).unwrap().lines().count(), 17 * 9 + 1);
    assert_eq!(fs::read_to_string(out.join("marginal_q.csv")).unwrap().lines().count(), 18);
    assert_eq!(fs::read_to_string(out.join("marginal_p.csv")).unwrap().lines().count(), 10);
    let report = json(&fs::read_to_string(out.join("report.json")).unwrap());
    assert_eq!(report, json(&stdout));
    // |p| ≥ k on the outer columns of a 1.5k window
    let masked = report["masked_fraction"].as_f64().unwrap();
    assert!(masked > 0.0 && masked < 1.0, "{masked}");
}

#[test]
fn wigner_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let (code, _, err) = invoke(&[
        "wigner", "--nq", "9", "--np", "9", "--out", blocker.join("sub").to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_IO, "{err}");
}

#[test]
fn wigner_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let (code, _, _) = invoke(&[
            "wigner", "--n", "2", "--m", "0.4", "--nq", "33", "--np", "17", "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, EXIT_OK);
    }
    for name in ["wigner.csv", "psi.csv", "marginal_q.csv", "marginal_p.csv", "report.json"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
}

#[test]
fn verify_default_passes() {
    let (code, out, _) = invoke(&["verify"]);
    assert_eq!(code, EXIT_OK, "{out}");
    let status: Vec<&str> = out.lines().filter(|l| !l.starts_with(' ')).collect();
    assert_eq!(status.len(), 8);
    assert!(status.iter().all(|l| l.contains(": pass (")), "{out}");
}

#[test]
fn verify_zero_tolerance_fails_every_check() {
    let (code, out, _) = invoke(&["verify", "--tol-all", "0"]);
    assert_eq!(code, EXIT_VERIFY_FAILED);
    let fails = out.lines().filter(|l| l.contains(": fail (")).count();
    // box-limit and marginals can be exactly representable but never zero
    assert!(fails >= 6, "{out}");
}

#[test]
fn verify_box_limit_prints_slope() {
    let (code, out, _) = invoke(&["verify", "--check", "box-limit", "--n", "1", "--m", "1e-4"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("box-limit: pass ("));
    assert!(out.contains("gap = ") && out.contains("slope 2.0"), "{out}");
}

#[test]
fn limit_csv() {
    let (code, out, _) = invoke(&["limit", "--n", "1", "--m", "0,1e-3,5e-4,2.5e-4"]);
    assert_eq!(code, EXIT_OK);
    let rows: Vec<Vec<f64>> = out
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(out.lines().next(), Some("m,E,E_expansion,gap"));
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0][3], 0.0);
    for w in rows[1..].windows(2) {
        assert!((w[0][3] / w[1][3] - 4.0).abs() < 0.3);
    }
}

#[test]
fn limit_flags_the_limit_scale() {
    let m = 1.0 / (100.0 * std::f64::consts::PI).powi(2);
    let (code, out, err) = invoke(&["limit", "--n", "100", "--m", &format!("{m:e}")]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.lines().count(), 2);
    assert!(err.contains("limit scale"), "{err}");
}

#[test]
fn limit_rejects_out_of_window() {
    let (code, _, err) = invoke(&["limit", "--m", "0.01,0.5"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("0.5"));
}
