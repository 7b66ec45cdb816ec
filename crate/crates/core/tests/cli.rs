mod common;

use std::process::{Command, Output};

use common::fixture_path;

fn esets(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_esets"))
        .args(args)
        .env("NO_COLOR", "1")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

#[test]
fn verify_figure_two() {
    let path = fixture_path("figure2.json");
    let out = esets(&["verify", "--tree", "3,2", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["alpha"], "5/6");
    assert_eq!(report["uniform"], true);
    assert!(!String::from_utf8_lossy(&out.stderr).contains('\u{1b}'));
}

#[test]
fn search_eset_small() {
    let out = esets(&["search", "eset", "--tree", "2,2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["status"], "none_exhaustive");
}

#[test]
fn tables_tsv() {
    let out = esets(&["tables", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 7);
    assert_eq!(lines[2], "3\t8,12\t20\t8,8\t16\t4/5");
    assert_eq!(lines[6], "7\t128,1344,1680,280\t3432\t128,384,480,80\t1072\t134/429");
    let out = esets(&["tables", "3", "--format", "json"]);
    assert_eq!(json(&out)[1]["sigma_prime"], "16/1");
}

#[test]
fn construct_then_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("x.json");
    let out = esets(&["construct", "xprime", "3", "-o", cert.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let written = std::fs::read_to_string(&cert).unwrap();
    let parsed = esets::certificate::PackingCertificate::from_json(&written).unwrap();
    assert_eq!(format!("{}\n", parsed.to_json()), written);
    let out = esets(&["verify", cert.to_str().unwrap(), "--subgraph", "123,126,135,156,234,246,345,456"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["covered_count"], 288);

    let structure = fixture_path("nest_a.json");
    let out = esets(&["construct", "uniform", "--tree", "3,2", "--structure", structure.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let emitted = dir.path().join("u.json");
    std::fs::write(&emitted, &out.stdout).unwrap();
    let out = esets(&["verify", emitted.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["alpha"], "5/6");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let overlapping = dir.path().join("bad.json");
    std::fs::write(
        &overlapping,
        r#"{"n":4,"r":2,"t":2,"numbering":"original","kind":"one_sphere","centers":["1234","2134"]}"#,
    )
    .unwrap();
    assert_eq!(esets(&["verify", overlapping.to_str().unwrap()]).status.code(), Some(1));

    let malformed = dir.path().join("broken.json");
    std::fs::write(&malformed, "{").unwrap();
    assert_eq!(esets(&["verify", malformed.to_str().unwrap()]).status.code(), Some(2));

    let wrong_degree = dir.path().join("degree.json");
    std::fs::write(
        &wrong_degree,
        r#"{"n":4,"r":2,"t":2,"numbering":"original","kind":"one_sphere","centers":["12345"]}"#,
    )
    .unwrap();
    let out = esets(&["verify", wrong_degree.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("degree"));

    let fig = fixture_path("figure2.json");
    assert_eq!(esets(&["verify", "--tree", "2,2", fig.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(esets(&["verify", "missing.json"]).status.code(), Some(2));
    assert_eq!(esets(&["search"]).status.code(), Some(2));
    assert_eq!(esets(&["build-tree", "--tree", "1,3"]).status.code(), Some(2));
}

#[test]
fn johnson_commands() {
    let out = esets(&["johnson", "expand-cc", "12345", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["vertices"].as_array().unwrap().len(), 5);

    let out = esets(&["johnson", "expand-cop", "1213", "7"]);
    assert_eq!(json(&out).as_array().unwrap().len(), 7);

    let out = esets(&["johnson", "alternate", "1123", "2113", "7"]);
    assert_eq!(json(&out)["vertices"].as_array().unwrap().len(), 14);

    let out = esets(&["johnson", "exact-2factor", "6", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["factor"].is_null());

    let good = fixture_path("nest_a.json");
    assert_eq!(esets(&["johnson", "validate-nest", good.to_str().unwrap()]).status.code(), Some(0));
    let printed = fixture_path("nest_b_printed.json");
    assert_eq!(esets(&["johnson", "validate-nest", printed.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn build_tree_edges() {
    let out = esets(&["build-tree", "--tree", "3,3", "--numbering", "renumbered"]);
    let tree = json(&out);
    assert_eq!(tree["epsilon"], "(14)");
    assert_eq!(tree["edges"].as_array().unwrap().len(), 5);
}
