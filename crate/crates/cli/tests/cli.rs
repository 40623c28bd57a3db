//! End-to-end checks of the binary: exit codes, JSON round trips, and the
//! documented input schemas.

use std::path::Path;
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_freefactor")
}

fn write(dir: &Path, name: &str, contents: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn scan_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let refuted = write(
        dir.path(),
        "refuted.json",
        r#"{"presentation": {"generators": ["x", "y"], "relators": []},
            "subgroup_generators": ["x x"]}"#,
    );
    let out = Command::new(bin())
        .args(["scan", "--json", "--input"])
        .arg(&refuted)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["verdict"]["outcome"]["outcome"], "not_free_factor");
    assert_eq!(doc["verdict"]["outcome"]["witness"], "cyclic-2");

    let clean = write(
        dir.path(),
        "clean.json",
        r#"{"presentation": {"generators": ["x", "y"], "relators": []},
            "subgroup_generators": ["x y"]}"#,
    );
    let out = Command::new(bin())
        .args(["scan", "--json", "--input"])
        .arg(&clean)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["verdict"]["outcome"]["outcome"], "no_witness_up_to");

    let out = Command::new(bin())
        .args(["scan", "--json", "--input", "/nonexistent.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(doc["error"].is_string());
}

#[test]
fn malformed_input_is_exit_two_with_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"presentation": {"generators": ["x"]}}"#);
    let out = Command::new(bin())
        .args(["scan", "--json", "--input"])
        .arg(&bad)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(doc["error"].is_string());

    // unknown generator in a relator
    let bad = write(
        dir.path(),
        "badgen.json",
        r#"{"presentation": {"generators": ["x"], "relators": ["z z"]},
            "group": {"kind": "cyclic", "n": 2}}"#,
    );
    let out = Command::new(bin())
        .args(["homcount", "--json", "--input"])
        .arg(&bad)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn homcount_epi_and_constraints() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        dir.path(),
        "epi.json",
        r#"{"presentation": {"generators": ["x", "y"], "relators": []},
            "group": {"kind": "product", "factors": [{"kind": "cyclic", "n": 2}, {"kind": "cyclic", "n": 2}]},
            "epi": true}"#,
    );
    let out = Command::new(bin())
        .args(["homcount", "--json", "--input"])
        .arg(&input)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["total"], 6);
    assert_eq!(doc["codomain"], "cyclic-2xcyclic-2");

    let input = write(
        dir.path(),
        "constrained.json",
        r#"{"presentation": {"generators": ["x", "y"], "relators": []},
            "group": {"kind": "cyclic", "n": 2},
            "constraints": [{"word": "x x", "target": 1}]}"#,
    );
    let out = Command::new(bin())
        .args(["homcount", "--json", "--input"])
        .arg(&input)
        .output()
        .unwrap();
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["total"], 0);
}

#[test]
fn constancy_report_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        dir.path(),
        "constancy.json",
        r#"{"presentation": {"generators": ["a", "b"], "relators": ["a a", "b b"]},
            "group": {"kind": "symmetric", "n": 3},
            "subgroup": {"presentation": {"generators": ["h1"], "relators": []},
                         "embedding": {"h1": "a b"}}}"#,
    );
    let out = Command::new(bin())
        .args(["constancy", "--json", "--input"])
        .arg(&input)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["report"]["constant"], false);
    assert_eq!(doc["report"]["gamma_count"], 6);
    assert_eq!(doc["report"]["total_homs"], 16);
    // emitted JSON re-parses and the counts are the documented ones
    let counts: Vec<u64> = doc["report"]["counts"]
        .as_array()
        .unwrap()
        .iter()
        .map(|row| row["h"].as_u64().unwrap())
        .collect();
    let mut sorted = counts.clone();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    assert_eq!(sorted, vec![4, 3, 3, 2, 2, 2]);
}

#[test]
fn gog_presents_c2_star_c3() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        dir.path(),
        "gog.json",
        r#"{"graph": {
              "vertices": {"a": {"kind": "cyclic", "n": 2}, "b": {"kind": "cyclic", "n": 3}},
              "edges": [{"id": "e1", "from": "a", "to": "b",
                         "group": {"kind": "cyclic", "n": 1}, "iota": [0], "tau": [0]}]}}"#,
    );
    let out = Command::new(bin())
        .args(["gog", "--json", "--input"])
        .arg(&input)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["display"], "<a, b | a a, b b b>");
    assert_eq!(doc["presentation"]["generators"][0], "a");
    assert_eq!(doc["presentation"]["relators"][1], "b b b");

    // invalid graph: non-injective edge map
    let invalid = write(
        dir.path(),
        "invalid.json",
        r#"{"graph": {
              "vertices": {"a": {"kind": "cyclic", "n": 2}, "b": {"kind": "cyclic", "n": 2}},
              "edges": [{"id": "e1", "from": "a", "to": "b",
                         "group": {"kind": "cyclic", "n": 2}, "iota": [0, 0], "tau": [0, 1]}]}}"#,
    );
    let out = Command::new(bin())
        .args(["gog", "--json", "--input"])
        .arg(&invalid)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(doc["error"].as_str().unwrap().contains("not injective"));
}

#[test]
fn gog_normalize_contracts_onto_edges() {
    // C2 -(C2)- C6 -(C3)- C3 collapses to a single C6 vertex
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        dir.path(),
        "chain.json",
        r#"{"graph": {
              "vertices": {"l": {"kind": "cyclic", "n": 2},
                           "m": {"kind": "cyclic", "n": 6},
                           "r": {"kind": "cyclic", "n": 3}},
              "edges": [
                {"id": "e1", "from": "l", "to": "m",
                 "group": {"kind": "cyclic", "n": 2}, "iota": [0, 1], "tau": [0, 3]},
                {"id": "e2", "from": "m", "to": "r",
                 "group": {"kind": "cyclic", "n": 3}, "iota": [0, 2, 4], "tau": [0, 1, 2]}]},
            "normalize": true}"#,
    );
    let out = Command::new(bin())
        .args(["gog", "--json", "--input"])
        .arg(&input)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["display"], "<m | m m m m m m>");
    assert_eq!(doc["tree_edges"].as_array().unwrap().len(), 0);
}

#[test]
fn primitive_cross_report() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "prim.json", r#"{"word": "x y", "rank": 2}"#);
    let out = Command::new(bin())
        .args(["primitive", "--json", "--input"])
        .arg(&input)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["primitive"], true);
    assert_eq!(doc["scan"]["outcome"]["outcome"], "no_witness_up_to");

    let input = write(dir.path(), "nonprim.json", r#"{"word": "x x", "rank": 2}"#);
    let out = Command::new(bin())
        .args(["primitive", "--json", "--input"])
        .arg(&input)
        .output()
        .unwrap();
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["primitive"], false);
    assert_eq!(doc["scan"]["outcome"]["witness"], "cyclic-2");
}

#[test]
fn measure_reports_exact_rationals() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        dir.path(),
        "measure.json",
        r#"{"word": "x x", "rank": 1, "group": {"kind": "symmetric", "n": 3}}"#,
    );
    let out = Command::new(bin())
        .args(["measure", "--json", "--input"])
        .arg(&input)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["total"], 6);
    assert_eq!(doc["expected_fixed_points"]["num"], 2);
    assert_eq!(doc["expected_fixed_points"]["den"], 1);
    assert_eq!(doc["uniform"], false);
}

#[test]
fn catalog_flags() {
    let dir = tempfile::tempdir().unwrap();
    // x^2 y^3 abelianizes to a basis-extendable vector, so every abelian
    // witness sees a uniform table; symmetric-3 refutes it
    let input = write(
        dir.path(),
        "xxyyy.json",
        r#"{"presentation": {"generators": ["x", "y"], "relators": []},
            "subgroup_generators": ["x x y y y"]}"#,
    );
    let out = Command::new(bin())
        .args(["scan", "--json", "--catalog", "cyclic-2,cyclic-3", "--input"])
        .arg(&input)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "abelian witnesses cannot see it");
    let out = Command::new(bin())
        .args(["scan", "--json", "--max-order", "6", "--input"])
        .arg(&input)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1), "symmetric-3 is in the order-6 catalog");
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["verdict"]["outcome"]["witness"], "symmetric-3");
}

#[test]
fn selftest_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(bin())
        .args(["selftest", "--json", "--cache"])
        .arg(dir.path().join("cache"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["ok"], true);
    assert!(doc["checks"].as_array().unwrap().len() >= 6);
}
