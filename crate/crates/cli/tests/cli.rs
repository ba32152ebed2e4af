use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn heckelab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heckelab")).args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn temp_path(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("heckelab-cli-{}-{name}", std::process::id()))
}

#[test]
fn verify_all_passes_for_sl2() {
    let out = heckelab(&["verify-all", "--group", "SL2", "--q", "2", "--m", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json_of(&out);
    assert_eq!(doc["schema"], "heckelab/1");
    assert_eq!(doc["ok"], true);
    let suites = doc["suites"].as_array().unwrap();
    assert!(suites.len() >= 9);
    for s in suites {
        if s["skipped"] != true {
            assert!(s["total"].as_u64().unwrap() > 0, "{s}");
            assert_eq!(s["passed"], s["total"], "{s}");
        }
    }
}

#[test]
fn volume_of_a_simple_reflection() {
    let out = heckelab(&["hecke", "--group", "GL2", "--q", "3", "--m", "1", "volume", "--weyl", "s0"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json_of(&out);
    assert_eq!(doc["volume"], "3");
    assert_eq!(doc["schema"], "heckelab/1");
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(heckelab(&["verify-all", "--bogus"]).status.code(), Some(2));
    assert_eq!(heckelab(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(heckelab(&["hecke", "--q", "6", "volume", "--weyl", "s0"]).status.code(), Some(2));
    assert_eq!(heckelab(&["hecke", "volume", "--weyl", "s9"]).status.code(), Some(2));
    assert_eq!(heckelab(&["whittaker", "--group", "Sp4", "verify"]).status.code(), Some(2));
}

#[test]
fn reports_are_deterministic() {
    let args = ["transfer", "--group", "GL2", "--q", "3", "zeta", "--element", "s0 rho1"];
    assert_eq!(heckelab(&args).stdout, heckelab(&args).stdout);
}

#[test]
fn out_file_gets_the_report() {
    let path = temp_path("depth.json");
    let out = heckelab(&["depth", "from-conductor", "--n", "2", "--c", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("depth 1/2"));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["depth"], "1/2");
    std::fs::remove_file(path).unwrap();
}

#[test]
fn products_round_trip_through_files() {
    let path = temp_path("square.json");
    let out = heckelab(&["hecke", "mul", "--left", "s0", "--right", "s0", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let square: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let terms = square["product"]["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 2);
    let again = json_of(&heckelab(&["hecke", "mul", "--left", path.to_str().unwrap(), "--right", "1"]));
    assert_eq!(again["product"], square["product"]);
    std::fs::remove_file(path).unwrap();
}

#[test]
fn weyl_words_and_elements() {
    let doc = json_of(&heckelab(&["weyl", "--group", "GL2", "--op", "decompose", "--weyl", "s0 s1 rho1"]));
    assert_eq!(doc["letters"], serde_json::json!(["s0", "s1"]));
    assert_eq!(doc["omega"]["free"], serde_json::json!([1]));
    let doc = json_of(&heckelab(&["weyl", "--group", "SL2", "--weyl", r#"{"lambda": [-2], "weyl": []}"#]));
    assert_eq!(doc["length"], 4);
}

#[test]
fn kazhdan_map_through_the_cli() {
    let out = heckelab(&["transfer", "--group", "GL2", "--q", "3", "kaz", "--km=-1,0"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["agrees_with_zeta"], true);
    let lambda = temp_path("lambda.json");
    std::fs::write(&lambda, r#"{"uniformizer_image": {"valuation": 1, "digits": [1, 1]}, "residue_gen_image": 1, "level": 2}"#).unwrap();
    let out = heckelab(&["transfer", "--group", "SL2", "--q", "2", "--lambda", lambda.to_str().unwrap(), "verify"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    std::fs::remove_file(lambda).unwrap();
}

#[test]
fn whittaker_verification_with_a_character_file() {
    let chi = temp_path("chi.json");
    std::fs::write(&chi, r#"{"units": [2], "conductors": [0]}"#).unwrap();
    let out = heckelab(&["whittaker", "--group", "SL2", "--q", "3", "--char", chi.to_str().unwrap(), "verify"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json_of(&out);
    assert!(doc["families"]["whittaker-equivariance"]["total"].as_u64().unwrap() > 0);
    std::fs::remove_file(chi).unwrap();
}
