use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn isodec(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isodec"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_stdout(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

fn error_kind(out: &Output) -> String {
    let v: Value = serde_json::from_slice(&out.stderr).expect("error is JSON");
    v["error"].as_str().unwrap().to_string()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn omega0_files(dir: &Path, n: &str, big_n: &str) {
    let out = isodec(
        dir,
        &["catalog", "omega0", "--n", n, "--N", big_n, "-o", "w.json", "--L-out", "l.json", "--V-out", "v.json"],
    );
    json_stdout(&out);
}

#[test]
fn catalog_complement_canonical_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    omega0_files(d, "2", "2");
    let comp = json_stdout(&isodec(
        d,
        &["complement", "--form", "w.json", "--L", "l.json", "--V", "v.json", "--r", "2", "-o", "f.json"],
    ));
    assert_eq!(comp["results"]["complement"]["certified"], true);
    let canon = json_stdout(&isodec(d, &["canonical", "--form", "w.json", "--L", "l.json", "--F", "f.json"]));
    let c = &canon["results"]["canonical"];
    assert_eq!(c["certified"], true);
    assert_eq!(c["hat_forms"].as_array().unwrap().len(), 5);
    assert_eq!(c["length"], 5);
    let nl = json_stdout(&isodec(d, &["nl", "--form", "w.json", "--L", "l.json", "--F", "f.json"]));
    assert_eq!(nl["results"]["nl"]["value_upper"], 0);
}

#[test]
fn analyze_reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    json_stdout(&isodec(d, &["catalog", "r11", "-o", "w.json", "--L-out", "l.json"]));
    let run = || json_stdout(&isodec(d, &["analyze", "--form", "w.json", "--L", "l.json", "--seed", "3"]));
    let (a, b) = (run(), run());
    assert_eq!(a["payload_sha256"], b["payload_sha256"]);
    assert_eq!(a["tool"], "isodec");
    assert_eq!(a["seed"], 3);
    let inputs = a["inputs"].as_array().unwrap();
    assert_eq!(inputs.len(), 2);
    assert_eq!(inputs[0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn report_flag_writes_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    omega0_files(d, "1", "1");
    let out = isodec(d, &["isotropy", "--form", "w.json", "--L", "l.json", "--k", "1", "--report", "r.json"]);
    assert!(out.status.success());
    let r: Value = serde_json::from_slice(&std::fs::read(d.join("r.json")).unwrap()).unwrap();
    assert_eq!(r["command"], "isotropy");
}

#[test]
fn malformed_input_exits_with_parse_code() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "bad.json", r#"{"dimension": 3, "degree": 2, "terms": [{"indices": [2, 1], "coeff": "1"}]}"#);
    let out = isodec(d, &["analyze", "--form", "bad.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_kind(&out), "parse");
    let out = isodec(d, &["analyze"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn index_and_degree_errors_exit_with_code_3() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "oob.json", r#"{"dimension": 3, "degree": 2, "terms": [{"indices": [1, 4], "coeff": "1"}]}"#);
    assert_eq!(isodec(d, &["analyze", "--form", "oob.json"]).status.code(), Some(3));
    omega0_files(d, "1", "1");
    let out = isodec(d, &["isotropy", "--form", "w.json", "--L", "l.json", "--k", "2"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn missing_file_exits_with_io_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = isodec(dir.path(), &["analyze", "--form", "absent.json"]);
    assert_eq!(out.status.code(), Some(8));
    assert!(String::from_utf8_lossy(&out.stderr).contains("absent.json"));
}

#[test]
fn flatten_passes_on_a_sheared_planar_form() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    // dq∧dp (1 + x) + dx∧dp¹ + q dx∧dp, closed with no pure dx∧dq part
    write(
        d,
        "w.json",
        r#"{"dimension":4,"degree":2,"terms":[
 {"indices":[2,3],"monomials":[{"exponents":[0,0,0,0],"coeff":"1"},{"exponents":[1,0,0,0],"coeff":"1"}]},
 {"indices":[1,4],"monomials":[{"exponents":[0,0,0,0],"coeff":"1"}]},
 {"indices":[1,3],"monomials":[{"exponents":[0,1,0,0],"coeff":"1"}]}]}"#,
    );
    let r = json_stdout(&isodec(
        d,
        &["flatten", "--form", "w.json", "--split", "x=1,2", "y=3,4", "--samples", "8"],
    ));
    let f = &r["results"]["flatten"];
    assert_eq!(f["passed"], true);
    assert!(f["max_error"].as_f64().unwrap() < 1e-6);
    assert_eq!(f["samples"].as_array().unwrap().len(), 8);
}

#[test]
fn flatten_rejects_a_non_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(
        d,
        "w.json",
        r#"{"dimension":2,"degree":1,"terms":[{"indices":[2],"monomials":[{"exponents":[1,0],"coeff":"1"}]}]}"#,
    );
    let out = isodec(d, &["flatten", "--form", "w.json", "--split", "x=1", "y=2"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn involutive_reports_a_bracket_witness() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(
        d,
        "dist.json",
        r#"{"dimension":2,"fields":[
 {"dimension":2,"components":[{"monomials":[{"exponents":[0,0],"coeff":"1"}]},{"monomials":[]}]},
 {"dimension":2,"components":[{"monomials":[]},{"monomials":[{"exponents":[1,0],"coeff":"1"}]}]}]}"#,
    );
    let r = json_stdout(&isodec(d, &["involutive", "--fields", "dist.json"]));
    let inv = &r["results"]["involutive"];
    assert_eq!(inv["involutive"], false);
    assert_eq!(inv["witness"]["pair"], serde_json::json!([1, 2]));
}

#[test]
fn catalog_verify_certifies_entries() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["omega0", "r11", "max_dim"] {
        let mut args = vec!["catalog", name, "-o", "w.json", "--verify"];
        if name != "r11" {
            args.extend(["--n", "1", "--N", "2"]);
        }
        let r = json_stdout(&isodec(dir.path(), &args));
        assert_eq!(r["results"]["catalog"]["certified"], true, "{name}");
    }
}
