mod common;

use common::*;
use esets::cayley::ComponentId;
use esets::certificate::PackingCertificate;
use esets::verify::verify_on_subgraph;

fn table_components() -> Vec<ComponentId> {
    ["123", "124", "236", "135", "246", "145", "356", "456"]
        .iter()
        .map(|c| ComponentId(subset(c)))
        .collect()
}

#[test]
fn table_one_packs_its_subgraph() {
    let cert = certificate("table1.json");
    let report = verify_on_subgraph(&cert.tree().unwrap(), &cert, &table_components()).unwrap();
    assert!(report.valid);
    assert_eq!((report.covered_count, report.universe), (288, 288));
    assert!(report.per_component_profile.values().all(|&k| k == 6));
}

#[test]
fn table_one_as_printed_fails() {
    // two entries as printed: 563421 appears as 563142 and 654312 as 645312
    let mut cert = certificate("table1.json");
    let mut centers: Vec<esets::Permutation> = cert.center_list().into_iter().cloned().collect();
    for (fixed, printed) in [("563421", "563142"), ("654312", "645312")] {
        let k = centers.iter().position(|g| *g == perm(fixed)).unwrap();
        centers[k] = perm(printed);
    }
    cert = PackingCertificate::one_sphere(&cert.tree().unwrap(), centers);
    let report = verify_on_subgraph(&cert.tree().unwrap(), &cert, &table_components()).unwrap();
    assert!(!report.valid);
    assert!(report.covered_count < 288);
}

#[test]
fn fixtures_round_trip() {
    for name in ["figure1_left.json", "figure1_right.json", "figure2.json", "table1.json"] {
        let text = std::fs::read_to_string(fixture_path(name)).unwrap();
        let cert = PackingCertificate::from_json(&text).unwrap();
        let again = PackingCertificate::from_json(&cert.to_json()).unwrap();
        assert_eq!(cert, again, "{name}");
    }
}
