use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_qblaschke"));
    c.env_remove("QBLASCHKE_ORDER");
    c
}

fn run(args: &[&str]) -> (i32, Value, Vec<u8>) {
    let out: Output = bin().args(args).output().expect("binary runs");
    let code = out.status.code().expect("exit code");
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (code, v, out.stdout)
}

fn quat(v: &Value) -> [f64; 4] {
    let a = v.as_array().expect("quaternion array");
    [0, 1, 2, 3].map(|i| a[i].as_f64().unwrap())
}

fn close(a: [f64; 4], b: [f64; 4], tol: f64) -> bool {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
        <= tol
}

fn temp(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("qblaschke-cli-{}-{name}", std::process::id()))
}

const PRODUCT_IJ: &str = r#"{"nodes":[[0,1,0,0],[0,0,1,0]],"phi":[1,0,0,0]}"#;

#[test]
fn eval_right_at_j_vanishes() {
    let (code, v, _) = run(&[
        "eval",
        "--product",
        PRODUCT_IJ,
        "--point",
        "[0,0,1,0]",
        "--side",
        "right",
    ]);
    assert_eq!(code, 0);
    assert!(close(quat(&v["value"]), [0.0; 4], 1e-12));
}

#[test]
fn eval_left_at_j_is_half_k() {
    let (code, v, _) = run(&[
        "eval",
        "--product",
        PRODUCT_IJ,
        "--point",
        "[0,0,1,0]",
        "--side",
        "left",
    ]);
    assert_eq!(code, 0);
    assert!(close(quat(&v["value"]), [0.0, 0.0, 0.0, 0.5], 1e-12));
}

#[test]
fn eval_polynomial_and_series() {
    let (code, v, _) = run(&[
        "eval",
        "--poly",
        "[[0,0,-1,0],[1,0,0,0]]",
        "--point",
        "[0,0,1,0]",
    ]);
    assert_eq!(code, 0);
    assert!(close(quat(&v["value"]), [0.0; 4], 1e-15));
    let series = r#"{"coeffs":[[1,0,0,0],[0.5,0,0,0],[0.25,0,0,0]],"order":2,"tail_ratio":0.5}"#;
    let (code, v, _) = run(&["eval", "--series", series, "--point", "[0.5,0,0,0]"]);
    assert_eq!(code, 0);
    assert!(close(quat(&v["value"]), [1.3125, 0.0, 0.0, 0.0], 1e-15));
    assert!(v["err_bound"].as_f64().unwrap() > 0.0);
}

#[test]
fn eval_node_outside_ball_is_domain_error() {
    let (code, v, _) = run(&[
        "eval",
        "--product",
        r#"{"nodes":[[2,0,0,0]]}"#,
        "--point",
        "[0,0,0,0]",
    ]);
    assert_eq!(code, 2);
    assert_eq!(v["error"], "NodeOutsideBall");
}

#[test]
fn synth_scalar_case_gives_factor() {
    let (code, v, _) = run(&[
        "synth",
        "--poly",
        "[[-0.5,0,0,0],[1,0,0,0]]",
        "--order",
        "20",
    ]);
    assert_eq!(code, 0);
    let theta = v["Theta"]["series"]["coeffs"].as_array().unwrap();
    assert_eq!(theta.len(), 21);
    assert!(close(quat(&theta[0]), [-0.5, 0.0, 0.0, 0.0], 1e-12));
    for (k, c) in theta.iter().enumerate().skip(1) {
        let expect = 0.75 * 0.5f64.powi(k as i32 - 1);
        assert!(
            close(quat(c), [expect, 0.0, 0.0, 0.0], 1e-12),
            "coefficient {k}"
        );
    }
    let p = v["P"]["entries"][0].clone();
    assert!(close(quat(&p), [4.0 / 3.0, 0.0, 0.0, 0.0], 1e-12));
    assert!((v["r_norm_sq"].as_f64().unwrap() - 4.0 / 3.0).abs() <= 1e-12);
    for key in ["p", "g", "R", "Ginv", "checks"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn synth_from_pair_matches_polynomial() {
    let pair = r#"{"A":{"rows":1,"cols":1,"entries":[[0.5,0,0,0]]},"v":{"rows":1,"cols":1,"entries":[[1,0,0,0]]}}"#;
    let (code, a, _) = run(&["synth", "--pair", pair, "--order", "16"]);
    assert_eq!(code, 0);
    let (_, b, _) = run(&[
        "synth",
        "--poly",
        "[[-0.5,0,0,0],[1,0,0,0]]",
        "--order",
        "16",
    ]);
    assert_eq!(a["Theta"]["series"], b["Theta"]["series"]);
}

#[test]
fn synth_unstable_polynomial_is_domain_error() {
    let (code, v, _) = run(&["synth", "--poly", "[[-2,0,0,0],[1,0,0,0]]"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"], "NotStable");
}

#[test]
fn schur_test_rejects_large_prefix() {
    let (code, v, _) = run(&["schur-test", "--prefix", "[[2,0,0,0],[0,0,0,0]]"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"], "NotSchur");
    let (code, v, _) = run(&["schur-test", "--prefix", "[[0,0,0,0],[1,0,0,0]]"]);
    assert_eq!(code, 0);
    assert_eq!(v["schur"], true);
    assert_eq!(v["rank_profile"], serde_json::json!([1, 1]));
}

#[test]
fn recover_fixture_and_rank_failure() {
    let (code, v, _) = run(&[
        "recover",
        "--prefix",
        "[[-0.5,0,0,0],[0.75,0,0,0]]",
        "--order",
        "8",
        "--seed",
        "3",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["degree"], 1);
    let c = v["series"]["coeffs"].as_array().unwrap();
    assert!(close(quat(&c[3]), [0.1875, 0.0, 0.0, 0.0], 1e-12));
    assert!(v["self_check"]["max_error"].as_f64().unwrap() <= 1e-12);
    let (code, v, _) = run(&["recover", "--prefix", "[[0.5,0,0,0],[0,0,0,0]]"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"], "RankConditionFailed");
}

#[test]
fn realize_with_self_check() {
    let (code, v, _) = run(&["realize", "--product", PRODUCT_IJ]);
    assert_eq!(code, 2);
    assert_eq!(v["error"], "NodeOutsideBall");
    let product = r#"{"nodes":[[0,0.5,0,0],[0.1,0,0.3,0]],"phi":[0,0,0,1]}"#;
    let (code, v, _) = run(&["realize", "--product", product, "--seed", "5"]);
    assert_eq!(code, 0);
    assert_eq!(v["degree"], 2);
    assert!(v["unitarity_defect"].as_f64().unwrap() <= 1e-12);
    assert!(v["self_check"]["max_error"].as_f64().unwrap() <= 1e-12);
    assert_eq!(v["realization"]["A"]["rows"], 2);
}

#[test]
fn zeros_of_product_by_class() {
    let product = r#"{"nodes":[[0.1,0.4,0,0],[0.1,-0.4,0,0],[0,0,0,0.5]]}"#;
    let (code, v, _) = run(&["zeros", "--product", product]);
    assert_eq!(code, 0);
    let reports = v.as_array().unwrap();
    assert_eq!(reports.len(), 2);
    let sph = reports
        .iter()
        .find(|r| r["kind"] == "spherical")
        .expect("spherical class");
    assert_eq!(sph["kappa"], 1);
    let pt = reports
        .iter()
        .find(|r| r["kind"] == "point")
        .expect("point class");
    assert!(close(quat(&pt["left_zero"]), [0.0, 0.0, 0.0, 0.5], 1e-9));
}

#[test]
fn zeros_of_polynomial_in_given_class() {
    let poly = r#"[[0,0,0,1],[0,-1,-1,0],[1,0,0,0]]"#;
    let (code, v, _) = run(&["zeros", "--poly", poly, "--class", "[0,1,0,0]"]);
    assert_eq!(code, 0);
    let r = &v[0];
    assert_eq!(r["kind"], "point");
    assert!(close(quat(&r["left_zero"]), [0.0, 1.0, 0.0, 0.0], 1e-12));
    assert!(close(quat(&r["right_zero"]), [0.0, 0.0, 1.0, 0.0], 1e-12));
}

#[test]
fn zeros_absent_in_class_is_domain_error() {
    let (code, v, _) = run(&[
        "zeros",
        "--poly",
        "[[-0.5,0,0,0],[1,0,0,0]]",
        "--class",
        r#"{"re":0,"im_norm":0.5}"#,
    ]);
    assert_eq!(code, 2);
    assert_eq!(v["error"], "NoZeroInClass");
}

#[test]
fn divisors_do_not_depend_on_representative() {
    let product = r#"{"nodes":[[0.2,0,0.5,0],[0.2,0,-0.5,0],[0,0.3,0,0]]}"#;
    let class = r#"{"re":0.2,"im_norm":0.5}"#;
    let (code, a, _) = run(&["divisors", "--product", product, "--class", class]);
    assert_eq!(code, 0);
    assert!(a["residual"].as_f64().unwrap() <= 1e-9);
    let (code, b, _) = run(&[
        "divisors",
        "--product",
        product,
        "--class",
        class,
        "--representative",
        "[0.2,0.3,0.4,0]",
    ]);
    assert_eq!(code, 0);
    let nodes = |v: &Value| v["left"]["blaschke"]["nodes"].as_array().unwrap().len();
    assert_eq!(nodes(&a), 2);
    assert_eq!(nodes(&b), 2);
}

#[test]
fn lrcm_and_similar_inputs() {
    let (code, v, _) = run(&["lrcm", "--alpha", "[0,0.5,0,0]", "--beta", "[0,0,0.3,0]"]);
    assert_eq!(code, 0);
    assert_eq!(v["polynomial"].as_array().unwrap().len(), 5);
    let (code, v, _) = run(&["lrcm", "--alpha", "[0,0.5,0,0]", "--beta", "[0,0,0.5,0]"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"], "SimilarInputs");
    let (code, v, _) = run(&["lrcm", "--alpha", "[0.5,0,0,0]", "--beta", "[0,0,0.5,0]"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"], "RealInput");
}

#[test]
fn prescribe_hits_points() {
    let (code, v, _) = run(&[
        "prescribe",
        "--points",
        "[[0,0.5,0,0],[0.1,0,0.2,0.3],[-0.3,0,0,0]]",
    ]);
    assert_eq!(code, 0);
    assert!(v["residual"].as_f64().unwrap() <= 1e-12);
    let (code, v, _) = run(&["prescribe", "--points", "[[0,0.5,0,0],[0,0,0.5,0]]"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"], "SimilarPointsUnsupported");
}

#[test]
fn output_is_byte_identical_across_runs() {
    let args = [
        "synth",
        "--poly",
        "[[0.1,0.2,0,0],[0.3,0,0.1,0],[1,0,0,0]]",
        "--order",
        "12",
    ];
    let (_, _, a) = run(&args);
    let (_, _, b) = run(&args);
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn input_and_output_files() {
    let input = temp("in.json");
    let output = temp("out.json");
    std::fs::write(&input, "[[-0.5,0,0,0],[0.75,0,0,0]]").unwrap();
    let out = bin()
        .args(["recover", "--order", "4", "--input"])
        .arg(&input)
        .arg("--output")
        .arg(&output)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&output).unwrap()).unwrap();
    assert_eq!(v["degree"], 1);
    let _ = std::fs::remove_file(&input);
    let _ = std::fs::remove_file(&output);
}

#[test]
fn order_from_environment() {
    let out = bin()
        .env("QBLASCHKE_ORDER", "5")
        .args(["synth", "--poly", "[[-0.5,0,0,0],[1,0,0,0]]"])
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["R"]["coeffs"].as_array().unwrap().len(), 6);
}

#[test]
fn parse_and_io_failures_exit_one() {
    let (code, v, _) = run(&["eval", "--product", "{nodes", "--point", "[0,0,0,0]"]);
    assert_eq!(code, 1);
    assert_eq!(v["error"], "ParseError");
    let (code, v, _) = run(&["realize", "--input", "/nonexistent/qblaschke.json"]);
    assert_eq!(code, 1);
    assert_eq!(v["error"], "IoError");
    let (code, _, _) = run(&["no-such-command"]);
    assert_eq!(code, 1);
}
