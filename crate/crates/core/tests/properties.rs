mod common;

use proptest::prelude::*;

use common::*;
use esets::cayley::{components, CayleyGraph};
use esets::certificate::PackingCertificate;
use esets::constructions::product_eset;
use esets::johnson::{expand_cc, is_exact, CondensedCycle, ExactSubgraph};
use esets::tree::TranspositionTree;
use esets::{Permutation, Subset};

fn shuffled(n: usize, keys: &[u32]) -> Vec<usize> {
    let mut items: Vec<usize> = (1..=n).collect();
    items.sort_by_key(|&v| (keys[v - 1], v));
    items
}

fn map_subset(s: Subset, f: impl Fn(usize) -> usize) -> Subset {
    s.iter().map(f).collect()
}

fn map_structure(sub: &ExactSubgraph, r: usize, f: impl Fn(Subset) -> Subset) -> ExactSubgraph {
    ExactSubgraph {
        n: sub.n,
        r,
        kind: sub.kind,
        vertices: sub.vertices.iter().map(|&v| f(v)).collect(),
        edges: sub.edges.iter().map(|&(a, b)| (f(a), f(b))).collect(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn condensed_cycles_are_exact(n in 5usize..=9, r_off in 0usize..4, keys in prop::collection::vec(any::<u32>(), 9), len_cut in 0usize..3) {
        let r = 3 + r_off % (n - 4);
        prop_assume!(r + 2 <= n);
        let mut elements = shuffled(n, &keys);
        let keep = (n - len_cut).max(r + 2);
        elements.truncate(keep);
        let cycle = expand_cc(&CondensedCycle::new(elements), r, n).unwrap();
        prop_assert!(is_exact(&cycle));
    }

    #[test]
    fn exactness_survives_relabeling_and_complement(keys in prop::collection::vec(any::<u32>(), 7), cc_keys in prop::collection::vec(any::<u32>(), 7), drop in any::<bool>()) {
        let n = 7;
        let mut elements = shuffled(n, &cc_keys);
        if drop {
            elements.pop();
        }
        let cycle = expand_cc(&CondensedCycle::new(elements), 4, n).unwrap();
        prop_assert!(is_exact(&cycle));
        let sigma = shuffled(n, &keys);
        let relabeled = map_structure(&cycle, 4, |s| map_subset(s, |v| sigma[v - 1]));
        prop_assert!(is_exact(&relabeled));
        let complement = map_structure(&cycle, 3, |s| s.complement(n));
        prop_assert!(is_exact(&complement));

        // a second edge at v dropping the same element breaks the color condition
        let (u, v) = (cycle.vertices[0], cycle.vertices[1]);
        let gone = v.difference(u).single().unwrap();
        let z = v.union(u).complement(n).iter().next().unwrap();
        let w = v.without(gone).with(z);
        let mut bent = cycle.clone();
        bent.kind = esets::johnson::StructureKind::Path;
        bent.vertices = vec![u, v, w];
        bent.edges = vec![(u, v), (v, w)];
        prop_assert!(!is_exact(&bent));
    }

    #[test]
    fn verification_is_translation_invariant(shape in 0usize..3, keys in prop::collection::vec(any::<u64>(), 12), rank in any::<u64>(), overlap in any::<bool>()) {
        let (r, t) = [(2, 2), (3, 2), (2, 3)][shape];
        let tree = d3(r, t);
        let graph = CayleyGraph::new(tree.tree()).unwrap();
        let mut centers = greedy_packing(&graph, &keys);
        if overlap {
            let neighbor = centers[0].swap_positions(tree.left_hub(), tree.right_hub());
            centers.push(neighbor);
        }
        let cert = PackingCertificate::one_sphere(&tree, centers);
        let n = tree.n();
        let x = Permutation::lex_unrank(rank % esets::perm::factorial(n), n).unwrap();
        prop_assert_eq!(translation_invariant(&tree, &cert, &x), Ok(()));
    }
}

#[test]
fn distance_three_iff_disjoint_spheres() {
    for (r, t) in [(2, 2), (3, 2), (2, 3)] {
        distance_sphere_equivalence(d3(r, t).tree()).unwrap();
    }
    for n in 3..=5 {
        distance_sphere_equivalence(&TranspositionTree::star(n)).unwrap();
    }
}

#[test]
fn product_esets_are_stable_at_distance_three() {
    for (r, t) in [(2, 2), (3, 2), (2, 3), (3, 3), (4, 2), (2, 4)] {
        let tree = d3(r, t);
        let graph = CayleyGraph::new(tree.tree()).unwrap();
        let n = tree.n();
        for c in components(&tree) {
            for i in c.0.iter() {
                for j in c.0.complement(n).iter() {
                    let centers = product_eset(&tree, c, (tree.left_hub(), i), (tree.right_hub(), j)).unwrap();
                    let f = |k: usize| (1..k).product::<usize>();
                    assert_eq!(centers.len(), f(r) * f(t));
                    for (a, g) in centers.iter().enumerate() {
                        let dist = graph.distances_from(graph.index_of(g).unwrap());
                        for h in &centers[a + 1..] {
                            assert!(dist[graph.index_of(h).unwrap()] >= 3, "{g} and {h} in X3({r},{t})");
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn component_structure_small_trees() {
    for (r, t) in [(2, 2), (3, 2), (2, 3), (3, 3), (4, 2), (2, 4)] {
        let tree = d3(r, t);
        assert_eq!(component_structure(&tree).unwrap(), components(&tree).len());
    }
}
