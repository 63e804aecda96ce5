use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use pamlab::exactnum::parse_rational;

const THREE_HALVES: &str = r#"{
  "domain": ["0", "1"],
  "pieces": [
    { "interval": ["0", "2/3"], "a": "3/2", "b": "0" },
    { "interval": ["2/3", "1"], "a": "3", "b": "-2" }
  ],
  "label": "three halves"
}"#;

fn pamlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pamlab")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_map(dir: &Path, text: &str) -> String {
    let path = dir.join("map.json");
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn reach_names_the_weight_decider() {
    let dir = tempfile::tempdir().unwrap();
    let map = write_map(dir.path(), THREE_HALVES);
    let out = pamlab(&["reach", "--pam", &map, "--x", "1/2", "--y", "3/4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("decider: weight"), "{text}");
    assert!(text.contains("outcome: Reached(1)"), "{text}");
}

#[test]
fn theorem5_writes_full_scan() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("scan.csv");
    let out = pamlab(&["theorem5", "--n", "2059", "--out", csv_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("passed: 2060/2060"));
    let mut rdr = csv::Reader::from_path(&csv_path).unwrap();
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 2060);
    assert!(rows.iter().all(|r| &r[3] == "true"));
    // exact column re-parses to the same value
    let v = parse_rational(&rows[4][1]).unwrap();
    assert_eq!(pamlab::exactnum::format_rational(&v), &rows[4][1]);
}

#[test]
fn tds_answers() {
    let out = pamlab(&["tds", "--beta", "5/2", "--x", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).lines().next(), Some("No"));

    let out = pamlab(&["tds", "--beta", "5/2", "--x", "2/3"]);
    assert_eq!(stdout(&out).lines().next(), Some("Yes"));

    let out = pamlab(&["tds", "--beta", "5/2", "--x", "1/64", "--depth", "3"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn exit_codes_are_distinct() {
    let dir = tempfile::tempdir().unwrap();
    let bad = THREE_HALVES.replace(r#""b": "-2""#, r#""b": "0""#);
    let map = write_map(dir.path(), &bad);
    assert_eq!(pamlab(&["validate", "--pam", &map]).status.code(), Some(4));
    assert_eq!(pamlab(&["orbit", "--pam", &map, "--x", "0"]).status.code(), Some(4));
    assert_eq!(pamlab(&["tds", "--x", "1"]).status.code(), Some(2));
    assert_eq!(pamlab(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(pamlab(&["tds", "--beta", "3", "--x", "1"]).status.code(), Some(1));
    let out = pamlab(&["orbit", "--pam", "/nonexistent/map.json", "--x", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn orbit_and_validate() {
    let dir = tempfile::tempdir().unwrap();
    let map = write_map(dir.path(), THREE_HALVES);
    let out = pamlab(&["validate", "--pam", &map]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("validation: valid"));

    let json_path = dir.path().join("orbit.json");
    let out = pamlab(&["orbit", "--pam", &map, "--x", "2/3", "--format", "json", "--out", json_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("verdict: Cycle(1, 1)"));
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json_path).unwrap()).unwrap();
    assert_eq!(doc["rows"][0]["point"], "2/3");
    assert_eq!(doc["rows"][1]["point"], "0/1");
    assert_eq!(doc["rows"][0]["piece"], "1");

    let out = pamlab(&["orbit", "--pam", &map, "--x", "1/3", "--cap", "5"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn beta_commands() {
    let out = pamlab(&["beta-build", "--beta", "5/2", "--variant", "nondet"]);
    assert_eq!(out.status.code(), Some(0));
    let map = pamlab::cli::parse_pam_file(&stdout(&out)).unwrap();
    assert_eq!(map.pieces.len(), 3);
    assert!(!map.deterministic);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("digits.csv");
    let out = pamlab(&["beta-digits", "--beta", "5/2", "--x", "1", "--depth", "6", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let digits: Vec<String> = csv::Reader::from_path(&path)
        .unwrap()
        .records()
        .map(|r| r.unwrap()[1].to_string())
        .collect();
    assert_eq!(digits.join(""), "210111");
}

#[test]
fn density_mahler_hitfreq() {
    let out = pamlab(&["density", "--beta", "5/2", "--steps", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("mass: 1/1"), "{text}");
    assert!(text.contains("kmin: 3/10  kmax: 9/10"), "{text}");

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mahler.csv");
    let out = pamlab(&["mahler", "--n", "200", "--bins", "8", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("mahler.hist.csv").exists());
    let first = csv::Reader::from_path(&path).unwrap().records().next().unwrap().unwrap();
    assert_eq!(&first[1], "1/2");

    let out = pamlab(&["hitfreq", "--generator", "mahler", "--interval", "0,1/2", "--schedule", "n-1", "--n", "300"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("equal: true"));
}
