use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn golden(name: &str) -> Value {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    serde_json::from_slice(&std::fs::read(p).unwrap()).unwrap()
}

fn emitted(args: &[&str]) -> Value {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_isodec"))
        .current_dir(dir.path())
        .args(args)
        .args(["-o", "w.json"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&std::fs::read(dir.path().join("w.json")).unwrap()).unwrap()
}

#[test]
fn planar_omega0_matches_golden() {
    assert_eq!(emitted(&["catalog", "omega0", "--n", "1", "--N", "1"]), golden("omega0_1_1.json"));
}

#[test]
fn omega0_with_two_base_dimensions_matches_golden() {
    assert_eq!(emitted(&["catalog", "omega0", "--n", "2", "--N", "1"]), golden("omega0_2_1.json"));
}

#[test]
fn r11_example_matches_golden() {
    assert_eq!(emitted(&["catalog", "r11"]), golden("r11.json"));
}

#[test]
fn golden_forms_round_trip_through_the_parser() {
    for name in ["omega0_1_1.json", "omega0_2_1.json", "r11.json"] {
        let raw = serde_json::to_string(&golden(name)).unwrap();
        let form = isodec::io::form_from_json(&isodec::io::parse_json(&raw).unwrap()).unwrap();
        assert_eq!(serde_json::to_value(isodec::io::form_to_json(&form)).unwrap(), golden(name));
    }
}
