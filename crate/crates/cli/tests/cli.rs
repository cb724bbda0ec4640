use std::fs;
use std::process::Command;

use dsbs_cli::report::{canonical_json, to_json, validate};
use dsbs_cli::*;
use dsbs_core::binary::DsbsParams;
use dsbs_core::envelopes::{phi_q, QParam};
use dsbs_core::hulls::PairMode;
use dsbs_core::mre::dd2;
use dsbs_core::verify::{verify_all, VerifyConfig};
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dsbs"))
}

fn p9() -> DsbsParams {
    DsbsParams::new(0.9).unwrap()
}

#[test]
fn eval_json_is_bit_exact() {
    let params = p9();
    let pt = Point { a: Some(0.13), b: Some(0.71), ..Point::default() };
    let text = cmd_eval(EvalFn::Dd2, &pt, &params, true).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    let r = dd2(0.13, 0.71, &params).unwrap();
    assert_eq!(v["value"].as_f64().unwrap().to_bits(), r.value.to_bits());
    assert_eq!(v["p_star"].as_f64().unwrap().to_bits(), r.p_star.to_bits());

    let pt = Point { s: Some(0.4), q: Some(-2.0), ..Point::default() };
    let v: Value = serde_json::from_str(&cmd_eval(EvalFn::PhiQ, &pt, &params, true).unwrap()).unwrap();
    let e = phi_q(0.4, &QParam::with_q(-2.0).unwrap(), &params);
    assert_eq!(v["value"].as_f64().unwrap().to_bits(), e.value.to_bits());
    assert_eq!(v["t_opt"].as_f64().unwrap().to_bits(), e.arg.to_bits());
}

#[test]
fn eval_text_uses_twelve_digits() {
    let pt = Point { s: Some(1.0), t: Some(1.0), ..Point::default() };
    let text = cmd_eval(EvalFn::Phi, &pt, &p9(), false).unwrap();
    assert_eq!(text, "value = 1.07400058144\n");
}

#[test]
fn eval_usage_errors() {
    let params = p9();
    let err = evaluate(EvalFn::PhiQ, &Point { s: Some(0.5), ..Point::default() }, &params).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    let err = evaluate(EvalFn::H2, &Point { a: Some(1.5), ..Point::default() }, &params).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert!(check_rho(1.0).is_err());
    assert!(check_grid(50).is_err() && check_grid(2002).is_err());
}

fn rows(path: &std::path::Path) -> Vec<String> {
    fs::read_to_string(path).unwrap().lines().map(str::to_string).collect()
}

#[test]
fn figure_files_have_the_expected_shape() {
    let dir = tempfile::tempdir().unwrap();
    let n = 51;
    let out = cmd_figure(&p9(), n, dir.path(), true).unwrap();
    assert_eq!(out.files.len(), 8);
    for name in ["phi.csv", "phi_tilde.csv", "psi.csv"] {
        let lines = rows(&dir.path().join(name));
        assert_eq!(lines[0], "s,t,value");
        assert_eq!(lines.len(), 1 + n * n, "{name}");
    }
    let q = rows(&dir.path().join("q_family.csv"));
    assert_eq!(q[0], "q_conj,s,value,family");
    assert_eq!(q.len(), 1 + 9 * n);
    // the row (s, t) = (0, 0.3) of phi_tilde equals t
    let tilde = rows(&dir.path().join("phi_tilde.csv"));
    let row = &tilde[1 + 15];
    let f: Vec<f64> = row.split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!((f[0], f[1]), (0.0, 0.3));
    assert!((f[2] - 0.3).abs() < 1e-11);
    assert!(out.min_gap > -1e-12 && out.min_gap < 1e-12);
    assert!(out.max_gap > 0.01);
    let svg = fs::read_to_string(dir.path().join("q_family.svg")).unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
}

fn small_config() -> VerifyConfig {
    let mut cfg = VerifyConfig::new(51);
    cfg.pair_mode = PairMode::Sampled { pairs: 5000, seed: 1 };
    cfg.grid_1d = 201;
    cfg.p_samples = 100;
    cfg.root_samples = 10;
    cfg.gamma_n = 101;
    cfg
}

#[test]
fn report_schema_round_trip() {
    let params = p9();
    let rep = verify_all(&params, &small_config()).unwrap();
    let v = to_json(&rep);
    validate(&v).unwrap();
    let text = serde_json::to_string_pretty(&v).unwrap();
    let back: Value = serde_json::from_str(&text).unwrap();
    validate(&back).unwrap();
    assert_eq!(canonical_json(&back), canonical_json(&v));

    let again = to_json(&verify_all(&params, &small_config()).unwrap());
    assert_eq!(canonical_json(&again), canonical_json(&v));

    let mut broken = v.clone();
    broken["claims"][0].as_object_mut().unwrap().remove("anchor");
    assert!(validate(&broken).is_err());
    let mut broken = v.clone();
    broken["claims"].as_array_mut().unwrap().swap(0, 1);
    assert!(validate(&broken).is_err());
    let mut broken = v;
    broken["meta"]["extra"] = Value::Null;
    assert!(validate(&broken).is_err());
}

#[test]
fn binary_exit_codes() {
    let ok = bin().args(["eval", "dd2", "--a", "0.5", "--b", "0.5"]).output().unwrap();
    assert!(ok.status.success());
    assert!(String::from_utf8(ok.stdout).unwrap().starts_with("value = "));

    let missing = bin().args(["eval", "phi_q", "--s", "0.5"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(2));
    let unknown = bin().args(["eval", "nope"]).output().unwrap();
    assert_eq!(unknown.status.code(), Some(2));
    let bad_rho = bin().args(["eval", "h2", "--a", "0.2", "--rho", "1.5"]).output().unwrap();
    assert_eq!(bad_rho.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let io = bin()
        .args(["figure", "--grid", "51", "--out-dir"])
        .arg(blocker.join("sub"))
        .output()
        .unwrap();
    assert_eq!(io.status.code(), Some(3));
}

#[test]
fn binary_roots() {
    let out = bin().args(["roots", "--p", "1.5", "--q", "1.5", "--scan-n", "100000"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("case = Forward"));
    assert!(text.contains("scan_count = 1"), "{text}");

    let none = bin().args(["roots", "--p", "2", "--q", "2"]).output().unwrap();
    assert!(none.status.success());
    assert!(String::from_utf8(none.stdout).unwrap().contains("no root"));

    let mixed = bin().args(["roots", "--p", "2", "--theta", "0.1"]).output().unwrap();
    assert_eq!(mixed.status.code(), Some(2));
}

#[test]
fn binary_verify_with_fault_fails() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let out = bin()
        .args(["verify", "--grid", "51", "--inject-fault", "C", "--out"])
        .arg(&report)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("C ") && l.contains("FAIL")));
    let v: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    validate(&v).unwrap();

    let bad = bin().args(["verify", "--inject-fault", "Q7"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
