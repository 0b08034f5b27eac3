use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;
use wkstab_core::poly::{format_rational, rat, Polynomial};

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn wkstab(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_wkstab")).args(args).output().unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn json(args: &[&str]) -> (i32, Value) {
    let r = wkstab(args);
    assert!(!r.stdout.is_empty(), "{args:?}: {}", r.stderr);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    // Output is canonical: re-emitting the parsed value reproduces it byte for byte.
    assert_eq!(serde_json::to_string_pretty(&v).unwrap() + "\n", r.stdout, "{args:?}");
    (r.code, v)
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    dir.join(format!("{}-{name}", std::process::id()))
}

fn texts(density: &Value) -> Vec<String> {
    density["pieces"].as_array().unwrap().iter().map(|p| p["text"].as_str().unwrap().to_string()).collect()
}

fn coefficients(p: &Polynomial) -> Value {
    Value::Array(p.coeffs().iter().map(|c| Value::String(format_rational(c))).collect())
}

#[test]
fn catalog_listing() {
    let (code, v) = json(&["catalog"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["count"], 12);
    assert_eq!(v["schema_version"], "1");

    let (_, v) = json(&["catalog", "--id", "3-2-19"]);
    let cases = v["results"]["cases"].as_array().unwrap();
    assert_eq!(cases.len(), 1);
    let vertices: Value = serde_json::from_str(r#"[["0","3"],["4","1"],["4","-1"],["0","-3"]]"#).unwrap();
    assert_eq!(cases[0]["vertices"], vertices);
    assert_eq!(cases[0]["mori_mukai"], "2-29");

    let (_, v) = json(&["catalog", "--mm", "1-16"]);
    let ids: Vec<&str> =
        v["results"]["cases"].as_array().unwrap().iter().map(|c| c["dm_id"].as_str().unwrap()).collect();
    assert_eq!(ids, ["3-2-4", "3-2-18"]);

    assert_eq!(wkstab(&["catalog", "--id", "9-9-9"]).code, 2);
}

#[test]
fn measures_payloads() {
    let (code, v) = json(&["measures", "3-2-17"]);
    assert_eq!(code, 0);
    let mu = &v["results"]["mu"];
    assert_eq!(mu["pieces"][0]["coefficients"], serde_json::json!(["36"]));
    let tail = (Polynomial::from_i64(&[3, -2]).pow(2) * Polynomial::from_i64(&[3, -4])).scale(&rat(4, 3));
    assert_eq!(mu["pieces"][1]["coefficients"], coefficients(&tail));
    assert_eq!(mu["pieces"][1]["lo"], "0");
    assert_eq!(mu["pieces"][1]["hi"], "1");

    let (_, lp) = json(&["measures", "--logpair", "0"]);
    let (_, c19) = json(&["measures", "3-2-19"]);
    assert_eq!(lp["results"], c19["results"]);

    let (_, q) = json(&["measures", "--quadric", "6"]);
    let folded = (Polynomial::from_i64(&[8, -2]).pow(3) * Polynomial::from_i64(&[4, -3])).scale(&rat(1, 3));
    let piece = &q["results"]["mu_folded"]["pieces"][0];
    assert_eq!(piece["coefficients"], coefficients(&folded));
    assert_eq!((piece["lo"].as_str(), piece["hi"].as_str()), (Some("0"), Some("4")));
    assert_eq!(q["results"]["mu_folded"]["total"], "4096/15");

    let bad = wkstab(&["measures", "3-2-99"]);
    assert_eq!(bad.code, 2);
    assert!(bad.stderr.contains("unknown case id"));
    assert_eq!(wkstab(&["measures", "--logpair", "1"]).code, 2);
    assert_eq!(wkstab(&["measures"]).code, 2);
}

#[test]
fn plot_csv() {
    let path = scratch("plot.csv");
    let p = path.to_str().unwrap();
    let (code, _) = json(&["measures", "3-2-18", "--plot-csv", p, "--samples", "7"]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.split('\n').collect();
    assert_eq!(lines[0], "y,density_mu,density_nu");
    assert_eq!(lines.len(), 7 + 2);
    assert_eq!(lines[8], "");
    assert!(!text.contains('\r'));
    // y = -3, 0, 3 are samples 0, 3, 6.
    assert_eq!(lines[1], "-3,0,0");
    assert_eq!(lines[4], "0,36,0");
    let cols: Vec<f64> = lines[2].split(',').map(|c| c.parse().unwrap()).collect();
    assert_eq!(cols.len(), 3);
    std::fs::remove_file(path).unwrap();
}

#[test]
fn check_exit_codes() {
    let (code, v) = json(&["check", "3-2-18", "--weight", "cosh:a=3"]);
    assert_eq!((code, v["results"]["classification"].as_str()), (4, Some("unstable")));

    let (code, v) = json(&["check", "3-2-18", "--weight", "const:1"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["margin"]["exact"], "36");
    assert_eq!(v["results"]["futaki"]["exact"], "0");

    // ν(1) = 8 on 3-2-21, so the trivial weight fails Futaki vanishing.
    let (code, v) = json(&["check", "3-2-21", "--weight", "poly:1"]);
    assert_eq!(code, 5);
    assert_eq!(v["results"]["futaki"]["exact"], "8");

    let (code, _) =
        json(&["check", "--quadric", "6", "--weight", "bump:lo=1.3333333333333333,hi=4,eps=0.01,sym=true"]);
    assert_eq!(code, 4);

    assert_eq!(wkstab(&["check", "3-2-18", "--weight", "poly:0,1"]).code, 2);
    assert_eq!(wkstab(&["check", "3-2-18", "--weight", "nonsense"]).code, 2);
}

#[test]
fn exit_code_ignores_backend() {
    // cosh goes through the closed form, the equal exponential sum too, and
    // a mollified plateau through quadrature; the verdict decides the code.
    for w in ["cosh:a=1", "expsum:(0.5,1);(0.5,-1)", "sech"] {
        assert_eq!(wkstab(&["check", "3-2-18", "--weight", w]).code, 0, "{w}");
    }
    for w in ["cosh:a=2.5", "expsum:(0.5,2.5);(0.5,-2.5)", "bump:lo=1.5,hi=3,eps=0.01,sym=true"] {
        assert_eq!(wkstab(&["check", "3-2-18", "--weight", w]).code, 4, "{w}");
    }
}

#[test]
fn thresholds() {
    let (code, v) = json(&["threshold", "3-2-18"]);
    assert_eq!(code, 0);
    let a0 = v["results"]["a0"].as_f64().unwrap();
    assert!((a0 - 1.81037).abs() < 5e-5);
    assert!(v["results"]["quadrature_cross_check"].as_f64().unwrap().abs() < 1e-8);

    let (_, v) = json(&["threshold", "3-2-19", "--tol", "1e-12"]);
    assert!((v["results"]["a0"].as_f64().unwrap() - 1.3176).abs() < 5e-4);

    let r = wkstab(&["threshold", "3-2-18", "--bracket", "0.1,1"]);
    assert_eq!(r.code, 6);
    assert!(r.stdout.is_empty());
    assert_eq!(wkstab(&["threshold", "3-2-5"]).code, 2);
    assert_eq!(wkstab(&["threshold", "3-2-18", "--family", "sech"]).code, 2);
}

#[test]
fn certificates() {
    let (code, v) = json(&["certify", "3-2-17"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["lambda"], "2");
    assert_eq!(texts(&v["results"]["combined_density"]).len(), 2);

    let (_, v) = json(&["certify", "3-2-23"]);
    assert_eq!(v["results"]["lambda"], "0");

    let (code, v) = json(&["certify", "3-2-19"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["found"], false);
    assert_eq!(v["results"]["message"], "no certificate found on search set");

    let (_, v) = json(&["certify", "3-2-3", "--lambda-range", "-1/2,1/2", "--grid", "4"]);
    assert_eq!(v["results"]["lambda"], "2/3");
    assert_eq!(v["inputs"]["lambda_range"], serde_json::json!(["-1/2", "1/2"]));
}

#[test]
fn logpair_report() {
    let (code, v) = json(&["logpair"]);
    assert_eq!(code, 0);
    let t0 = v["results"]["t0"].as_f64().unwrap();
    assert!((t0 - (10f64.sqrt() - 2.0) / 3.0).abs() < 1e-9);
    assert_eq!(v["results"]["verdicts"]["const:1"]["classification"], "strictly_semistable");
    assert_eq!(v["results"]["verdicts"]["sech"]["classification"], "polystable");
}

#[test]
fn quadric_report() {
    let (code, v) = json(&["quadric", "5"]);
    assert_eq!(code, 0);
    let w = v["results"]["destabilizing_weight"].as_str().unwrap();
    assert!(w.starts_with("bump:lo=1.5,hi=3,"), "{w}");
    assert_eq!(v["results"]["verdict"]["classification"], "unstable");
    assert_eq!(v["results"]["negative_region"], serde_json::json!(["3/2", "3"]));
    let r = wkstab(&["quadric", "4"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("n >= 5"));
}

#[test]
fn custom_polytope_file() {
    let path = scratch("q3.json");
    std::fs::write(
        &path,
        r#"{"vertices": [["0","-3"], ["6","0"], ["0","3"]], "kappa": ["2","0"], "dh_exponent": 1}"#,
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let (_, custom) = json(&["measures", "--polytope-file", p]);
    let (_, builtin) = json(&["measures", "3-2-18"]);
    assert_eq!(custom["results"], builtin["results"]);
    let (code, _) = json(&["check", "--polytope-file", p, "--weight", "cosh:a=3"]);
    assert_eq!(code, 4);

    std::fs::write(
        &path,
        r#"{"vertices": [["0","0"], ["1","0"], ["0","1"]], "kappa": ["2","0"], "dh_exponent": 1}"#,
    )
    .unwrap();
    let r = wkstab(&["measures", "--polytope-file", p]);
    assert_eq!(r.code, 2);
    std::fs::remove_file(path).unwrap();
    assert_eq!(wkstab(&["measures", "--polytope-file", "/nonexistent/file.json"]).code, 2);
}
