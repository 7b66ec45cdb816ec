#![allow(dead_code)]

use std::path::PathBuf;

use esets::cayley::{component_of, components, CayleyGraph, ComponentId};
use esets::certificate::PackingCertificate;
use esets::johnson::ExactSubgraph;
use esets::tree::{DiameterThreeTree, Numbering, TranspositionTree};
use esets::verify::Verifier;
use esets::{Permutation, Subset};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn certificate(name: &str) -> PackingCertificate {
    PackingCertificate::load(&fixture_path(name)).expect("fixture certificate")
}

pub fn structure(name: &str) -> ExactSubgraph {
    let text = std::fs::read_to_string(fixture_path(name)).expect("fixture structure");
    serde_json::from_str(&text).expect("structure JSON")
}

pub fn d3(r: usize, t: usize) -> DiameterThreeTree {
    DiameterThreeTree::build(r, t, Numbering::Original).unwrap()
}

pub fn subset(s: &str) -> Subset {
    s.parse().unwrap()
}

pub fn perm(s: &str) -> Permutation {
    s.parse().unwrap()
}

/// For every pair of vertices: distance at least 3 exactly when the closed
/// spheres are disjoint. Returns the number of pairs checked.
pub fn distance_sphere_equivalence(tree: &TranspositionTree) -> Result<usize, String> {
    let graph = CayleyGraph::new(tree).map_err(|e| e.to_string())?;
    let mut checked = 0;
    for u in 0..graph.order() {
        let dist = graph.distances_from(u);
        let mut mark = vec![false; graph.order()];
        for w in graph.closed_sphere(u) {
            mark[w] = true;
        }
        for v in 0..graph.order() {
            let disjoint = graph.closed_sphere(v).all(|w| !mark[w]);
            if (dist[v] >= 3) != disjoint {
                return Err(format!("{} and {} at distance {}", graph.vertex(u), graph.vertex(v), dist[v]));
            }
            checked += 1;
        }
    }
    Ok(checked)
}

/// Greedy packing taking vertices in the order given by `keys`.
pub fn greedy_packing(graph: &CayleyGraph, keys: &[u64]) -> Vec<Permutation> {
    let mut order: Vec<usize> = (0..graph.order()).collect();
    order.sort_by_key(|&v| keys[v % keys.len()].wrapping_mul(v as u64 + 1));
    let mut used = vec![false; graph.order()];
    let mut out = Vec::new();
    for v in order {
        if graph.closed_sphere(v).all(|w| !used[w]) {
            for w in graph.closed_sphere(v) {
                used[w] = true;
            }
            out.push(graph.vertex(v));
        }
    }
    out
}

/// Verifying `x ∘ C` gives the same validity and coverage as verifying `C`.
pub fn translation_invariant(tree: &DiameterThreeTree, cert: &PackingCertificate, x: &Permutation) -> Result<(), String> {
    let verifier = Verifier::new(tree).map_err(|e| e.to_string())?;
    let before = verifier.verify_packing(cert).map_err(|e| e.to_string())?;
    let moved: Vec<Permutation> = cert.center_list().into_iter().map(|g| x.compose(g).unwrap()).collect();
    let moved = PackingCertificate::one_sphere(tree, moved);
    let after = verifier.verify_packing(&moved).map_err(|e| e.to_string())?;
    if (before.valid, before.covered_count) != (after.valid, after.covered_count) {
        return Err(format!(
            "translating by {x} changed ({}, {}) to ({}, {})",
            before.valid, before.covered_count, after.valid, after.covered_count
        ));
    }
    Ok(())
}

/// Component structure after deleting the ε-edges: `C(n,r)` components of
/// size `r!t!` matching the left-value sets, and for `r = t` every ε-edge
/// joins components whose types differ by at most one.
pub fn component_structure(tree: &DiameterThreeTree) -> Result<usize, String> {
    let graph = CayleyGraph::new(tree.tree()).map_err(|e| e.to_string())?;
    let eps = tree.tree().color_index(tree.epsilon()).ok_or("epsilon is not a tree edge")?;
    let mut label = vec![usize::MAX; graph.order()];
    let mut sizes = Vec::new();
    for s in 0..graph.order() {
        if label[s] != usize::MAX {
            continue;
        }
        let id = sizes.len();
        let mut stack = vec![s];
        label[s] = id;
        let mut size = 0;
        while let Some(u) = stack.pop() {
            size += 1;
            for (k, &w) in graph.neighbors(u).iter().enumerate() {
                if k != eps && label[w as usize] == usize::MAX {
                    label[w as usize] = id;
                    stack.push(w as usize);
                }
            }
        }
        sizes.push(size);
    }
    let f = |k: usize| (1..=k).product::<usize>();
    let expected = f(tree.r()) * f(tree.t());
    if sizes.len() != components(tree).len() || sizes.iter().any(|&s| s != expected) {
        return Err(format!("found {} components, sizes {:?}", sizes.len(), sizes));
    }
    let mut rep: Vec<Option<ComponentId>> = vec![None; sizes.len()];
    for v in 0..graph.order() {
        let c = component_of(tree, &graph.vertex(v));
        match rep[label[v]] {
            None => rep[label[v]] = Some(c),
            Some(prev) if prev != c => return Err(format!("component mixes {prev} and {c}")),
            _ => {}
        }
    }
    if tree.r() == tree.t() {
        for v in 0..graph.order() {
            let w = graph.neighbors(v)[eps] as usize;
            let a = esets::cayley::component_type(tree, rep[label[v]].unwrap()).unwrap();
            let b = esets::cayley::component_type(tree, rep[label[w]].unwrap()).unwrap();
            if a.abs_diff(b) > 1 {
                return Err(format!("ε joins types {a} and {b}"));
            }
        }
    }
    Ok(sizes.len())
}
