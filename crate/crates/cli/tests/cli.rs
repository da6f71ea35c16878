use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hthick")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json output")
}

fn text(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn cross_build_counts_squares() {
    let v = json(&["cross", "build", "--m", "4"]);
    assert_eq!(v["p"], 204);
    assert_eq!(v["squares"].as_array().unwrap().len(), 204);
    assert_eq!(v["squares"][0], serde_json::json!([0, 0]));
}

#[test]
fn cross_transition_examples() {
    let v = json(&["cross", "transition", "--m", "4", "--L", "16", "--alpha", "0.9"]);
    assert_eq!(v["feasible"], true);
    assert!((v["alpha1"].as_f64().unwrap() - 0.79248).abs() < 1e-5);
    assert!(v["dStarLower"].as_f64().unwrap() > 0.25);
    let v = json(&["cross", "transition", "--m", "4", "--L", "8", "--alpha", "0.9"]);
    assert_eq!(v["feasible"], false);
    assert_eq!(v["betaRange"], Value::Null);
    assert!(!run(&["cross", "transition", "--m", "4", "--L", "16", "--alpha", "1.5"]).status.success());
}

#[test]
fn cross_classify_and_phi() {
    let csv = text(&["cross", "classify", "--m", "3", "--L", "4"]);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("level,square,path,class,depth,kappa"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 44);
    assert!(rows[0].starts_with("1,0:0,0,") && rows[0].ends_with(",1"));
    assert_eq!(text(&["cross", "classify", "--m", "2", "--L", "4", "--levels", "2"]).lines().count(), 1 + 12 + 144);
    let v = json(&["cross", "phi", "--m", "3", "--x", "3 4 (4)"]);
    assert_eq!(v["value"], "1/2");
    assert_eq!(json(&["cross", "phi", "--m", "2", "--x", "(2)"])["value"], "1");
}

#[test]
fn cross_audit_is_clean_and_repeatable() {
    let args = ["cross", "audit", "--m", "3", "--L", "4", "--trials", "40", "--seed", "3"];
    let a = run(&args);
    assert!(a.status.success());
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["report"]["violations"].as_array().unwrap().len(), 0);
    assert_eq!(run(&args).stdout, a.stdout);
}

#[test]
fn phi_build_eval_audit() {
    let v = json(&["phi", "build", "--kstar", "3", "--w", "1"]);
    assert_eq!(v["size"], "7");
    assert_eq!(v["blocks"][0], "033");
    let v = json(&["phi", "eval", "--blocks", "333|333|333|333"]);
    assert_eq!(v["interval"][1], "2401/2401");
    assert_eq!(json(&["phi", "eval", "--blocks", "233"])["interval"], serde_json::json!(["1/7", "2/7"]));
    let v = json(&["phi", "audit", "--levels", "--depth", "4", "--samples", "20"]);
    for row in v.as_array().unwrap() {
        assert!(row["maxCount"].as_u64().unwrap() <= row["bound"].as_u64().unwrap());
    }
    // asking for more than the blocks support is a breach
    let out = run(&["phi", "build", "--kstar", "3", "--w", "1", "--alpha", "0.9"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("#I = 7"));
    let v = json(&["phi", "build", "--alpha", "0.5"]);
    assert!(v["alphaMax"].as_f64().unwrap() >= 0.5);
}

#[test]
fn sier_scheme_histogram_and_verify() {
    let csv = text(&["sier", "scheme", "--depth", "3", "--histogram"]);
    let last: Vec<&str> = csv.lines().filter(|l| l.starts_with("3,")).collect();
    assert_eq!(last, ["3,0,1", "3,1,12", "3,2,36"]);
    assert!(run(&["sier", "scheme", "--depth", "6", "--verify"]).status.success());
    let nodes = text(&["sier", "scheme", "--depth", "2"]);
    assert_eq!(nodes.lines().count(), 3 + 21);
}

#[test]
fn sier_levelset_front() {
    let out = text(&["sier", "levelset", "--fn", "xcoord", "--r", "0.4", "--depth", "1"]);
    let last: Value = serde_json::from_str(out.lines().last().unwrap()).unwrap();
    assert_eq!(last["level"], 1);
    assert_eq!(last["frontSize"], 2);
    let stats = text(&["sier", "levelset", "--fn", "xcoord", "--r", "0.4", "--depth", "4", "--d1", "0.3"]);
    assert!(stats.starts_with("n,front_size,max_kappa,highcond_mass,image_mass_bound,cert_lowbox\n"));
}

#[test]
fn sier_verify_suites() {
    for suite in ["cover", "mu", "front"] {
        let args = ["sier", "verify", "--suite", suite, "--trials", "30", "--depth", "5", "--seed", "7"];
        let out = run(&args);
        assert!(out.status.success(), "{suite}");
        let v: Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(v["violations"].as_array().unwrap().len(), 0);
        assert_eq!(run(&args).stdout, out.stdout);
    }
}

#[test]
fn bounds_curve_table_and_usage_errors() {
    let csv = text(&["bounds", "curve", "--alpha-min", "0.01", "--alpha-max", "0.99", "--steps", "100"]);
    assert_eq!(csv.lines().count(), 101);
    let bad = run(&["bounds", "curve", "--alpha-min", "0.5", "--alpha-max", "0.5"]);
    assert_eq!(bad.status.code(), Some(2));
    let log = text(&["bounds", "curve", "--alpha-min", "1e-6", "--alpha-max", "0.1", "--steps", "6", "--log-grid"]);
    assert_eq!(log.lines().count(), 7);
}

#[test]
fn output_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("hthick-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("model.json");
    let out = run(&["cross", "build", "--m", "3", "--output", path.to_str().unwrap()]);
    assert!(out.status.success() && out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["p"], 44);
    std::fs::remove_dir_all(&dir).unwrap();
}
