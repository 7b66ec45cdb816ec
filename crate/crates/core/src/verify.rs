//! Independent checking of sphere packings.
//!
//! Everything here works on the materialized graph and exact counts; no
//! construction code is consulted.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use num_rational::Ratio;
use serde::Serialize;

use crate::cayley::{component_of, component_type, components, CayleyGraph, ComponentId};
use crate::certificate::{fraction_serde, Center, Fraction, PackingCertificate, SphereKind};
use crate::error::{Error, Result};
use crate::perm::{factorial, Permutation};
use crate::tree::DiameterThreeTree;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum Violation {
    DuplicateCenter { center: String },
    /// Two spheres share `vertex`.
    Overlap { first: String, second: String, vertex: String },
    PairNotAdjacent { first: String, second: String },
    CenterOutsideSubgraph { center: String },
    AlphaMismatch { declared: String, actual: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateCenter { center } => write!(f, "center {center} listed twice"),
            Violation::Overlap { first, second, vertex } => {
                write!(f, "spheres of {first} and {second} share {vertex}")
            }
            Violation::PairNotAdjacent { first, second } => {
                write!(f, "double-sphere centers {first} and {second} are not adjacent")
            }
            Violation::CenterOutsideSubgraph { center } => write!(f, "center {center} lies outside the subgraph"),
            Violation::AlphaMismatch { declared, actual } => {
                write!(f, "declared alpha {declared} but the packing covers {actual}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub valid: bool,
    pub covered_count: u64,
    /// Size of the vertex set the packing is measured in (`n!`, or the subgraph order).
    pub universe: u64,
    /// `covered_count / n!`.
    #[serde(with = "fraction_serde")]
    pub alpha: Fraction,
    pub is_eset: bool,
    #[serde(serialize_with = "serialize_profile")]
    pub per_component_profile: BTreeMap<ComponentId, usize>,
    pub violations: Vec<Violation>,
}

fn serialize_profile<S: serde::Serializer>(
    profile: &BTreeMap<ComponentId, usize>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_map(profile.iter().map(|(c, k)| (c.to_string(), k)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UniformityReport {
    pub uniform: bool,
    /// Two components whose center patterns are inequivalent.
    pub witness: Option<(ComponentId, ComponentId)>,
}

/// A diameter-3 graph, materialized once and reused across checks.
pub struct Verifier {
    tree: DiameterThreeTree,
    graph: CayleyGraph,
}

impl Verifier {
    pub fn new(tree: &DiameterThreeTree) -> Result<Self> {
        Ok(Verifier {
            tree: tree.clone(),
            graph: CayleyGraph::new(tree.tree())?,
        })
    }

    pub fn tree(&self) -> &DiameterThreeTree {
        &self.tree
    }

    pub fn graph(&self) -> &CayleyGraph {
        &self.graph
    }

    fn check_tree(&self, cert: &PackingCertificate) -> Result<()> {
        cert.check_shape()?;
        let tree = cert.tree()?;
        if tree != self.tree {
            return Err(Error::Certificate(format!(
                "certificate is for {tree}, verifier for {}",
                self.tree
            )));
        }
        Ok(())
    }

    fn index_of(&self, g: &Permutation) -> usize {
        self.graph.index_of(g).expect("degree checked")
    }

    fn vertex_set(&self, comps: &[ComponentId]) -> Vec<bool> {
        let wanted: HashSet<ComponentId> = comps.iter().copied().collect();
        (0..self.graph.order())
            .map(|v| {
                let c = ComponentId(self.tree.left_positions().map(|k| self.graph.word(v)[k - 1] as usize).collect());
                wanted.contains(&c)
            })
            .collect()
    }

    /// Disjointness of the declared sphere kind, measured in the whole graph.
    pub fn verify_packing(&self, cert: &PackingCertificate) -> Result<VerificationReport> {
        self.check_tree(cert)?;
        let inside = cert.base_subgraph.as_ref().map(|b| self.vertex_set(b));
        let mut violations = Vec::new();
        let mut spheres = Vec::with_capacity(cert.centers.len());
        for entry in &cert.centers {
            let label = match entry {
                Center::Single(g) => g.to_string(),
                Center::Pair(a, b) => format!("{a}+{b}"),
            };
            let sphere: Vec<usize> = match (cert.kind, entry) {
                (SphereKind::OneSphere, Center::Single(g)) => self.graph.closed_sphere(self.index_of(g)).collect(),
                (SphereKind::DoubleSphere, Center::Pair(a, b)) => {
                    let (x, y) = (self.index_of(a), self.index_of(b));
                    if !self.graph.neighbors(x).contains(&(y as u32)) {
                        violations.push(Violation::PairNotAdjacent {
                            first: a.to_string(),
                            second: b.to_string(),
                        });
                    }
                    let mut s: Vec<usize> = self.graph.closed_sphere(x).chain(self.graph.closed_sphere(y)).collect();
                    s.sort_unstable();
                    s.dedup();
                    s
                }
                (SphereKind::SSphere, Center::Single(g)) => {
                    let inside = inside.as_ref().expect("shape checked");
                    let x = self.index_of(g);
                    if !inside[x] {
                        violations.push(Violation::CenterOutsideSubgraph { center: g.to_string() });
                    }
                    let core: Vec<usize> = self.graph.closed_sphere(x).filter(|&v| inside[v]).collect();
                    let mut s = core.clone();
                    for &v in &core {
                        s.extend(self.graph.neighbors(v).iter().map(|&w| w as usize).filter(|&w| !inside[w]));
                    }
                    s.sort_unstable();
                    s.dedup();
                    s
                }
                _ => unreachable!("shape checked"),
            };
            spheres.push((label, sphere));
        }
        Ok(self.assemble(cert, spheres, violations, self.graph.order() as u64))
    }

    fn assemble(
        &self,
        cert: &PackingCertificate,
        spheres: Vec<(String, Vec<usize>)>,
        mut violations: Vec<Violation>,
        universe: u64,
    ) -> VerificationReport {
        let mut seen = HashSet::new();
        for g in cert.center_list() {
            if !seen.insert(g) {
                violations.push(Violation::DuplicateCenter { center: g.to_string() });
            }
        }
        let mut owner: HashMap<usize, usize> = HashMap::new();
        for (k, (_, sphere)) in spheres.iter().enumerate() {
            for &v in sphere {
                if let Some(&prev) = owner.get(&v) {
                    if prev != k {
                        violations.push(Violation::Overlap {
                            first: spheres[prev].0.clone(),
                            second: spheres[k].0.clone(),
                            vertex: self.graph.vertex(v).to_string(),
                        });
                    }
                } else {
                    owner.insert(v, k);
                }
            }
        }
        let covered_count = owner.len() as u64;
        let alpha = Ratio::new(covered_count, factorial(self.tree.n()));
        if let Some(declared) = cert.declared_alpha {
            if declared != alpha {
                violations.push(Violation::AlphaMismatch {
                    declared: crate::certificate::format_fraction(&declared),
                    actual: crate::certificate::format_fraction(&alpha),
                });
            }
        }
        let mut per_component_profile = BTreeMap::new();
        for g in cert.center_list() {
            *per_component_profile.entry(component_of(&self.tree, g)).or_insert(0) += 1;
        }
        let valid = violations.is_empty();
        VerificationReport {
            valid,
            covered_count,
            universe,
            alpha,
            is_eset: valid && cert.kind == SphereKind::OneSphere && covered_count == universe,
            per_component_profile,
            violations,
        }
    }

    /// A 1-sphere packing is an E-set when it also covers every vertex.
    pub fn verify_eset(&self, cert: &PackingCertificate) -> Result<VerificationReport> {
        if cert.kind != SphereKind::OneSphere {
            return Err(Error::Certificate(format!("E-set check needs one_sphere, got {}", cert.kind)));
        }
        self.verify_packing(cert)
    }

    /// 1-spheres measured inside the subgraph induced by `comps`.
    pub fn verify_on_subgraph(&self, cert: &PackingCertificate, comps: &[ComponentId]) -> Result<VerificationReport> {
        self.check_tree(cert)?;
        if cert.kind != SphereKind::OneSphere {
            return Err(Error::Certificate(format!("subgraph check needs one_sphere, got {}", cert.kind)));
        }
        let inside = self.vertex_set(comps);
        let mut violations = Vec::new();
        let mut spheres = Vec::new();
        for g in cert.center_list() {
            let x = self.index_of(g);
            if !inside[x] {
                violations.push(Violation::CenterOutsideSubgraph { center: g.to_string() });
            }
            let sphere = self.graph.closed_sphere(x).filter(|&v| inside[v]).collect();
            spheres.push((g.to_string(), sphere));
        }
        let universe = inside.iter().filter(|&&b| b).count() as u64;
        Ok(self.assemble(cert, spheres, violations, universe))
    }

    /// Whether every component's centers are carried onto every other
    /// component's centers by some value relabeling `g ↦ x ∘ g`.
    pub fn uniformity_check(&self, cert: &PackingCertificate) -> Result<UniformityReport> {
        self.check_tree(cert)?;
        let mut by_component: BTreeMap<ComponentId, Vec<&Permutation>> =
            components(&self.tree).into_iter().map(|c| (c, Vec::new())).collect();
        for g in cert.center_list() {
            by_component.get_mut(&component_of(&self.tree, g)).expect("valid component").push(g);
        }
        let stabilizer = side_preserving_relabelings(self.tree.r(), self.tree.t());
        let mut first: Option<(ComponentId, Vec<Vec<u8>>)> = None;
        for (c, centers) in by_component {
            let form = canonical_pattern(&self.tree, c, &centers, &stabilizer);
            match &first {
                None => first = Some((c, form)),
                Some((c0, form0)) if *form0 != form => {
                    return Ok(UniformityReport {
                        uniform: false,
                        witness: Some((*c0, c)),
                    })
                }
                _ => {}
            }
        }
        Ok(UniformityReport {
            uniform: true,
            witness: None,
        })
    }

    /// Covered vertices per component type, divided by `(r!)²`.
    pub fn profile_by_type(&self, cert: &PackingCertificate) -> Result<BTreeMap<usize, Fraction>> {
        let (r, t) = (self.tree.r(), self.tree.t());
        if r != t {
            return Err(Error::UnbalancedTree { r, t });
        }
        let report = self.verify_packing(cert)?;
        if !report.valid {
            return Err(Error::Certificate(format!(
                "profile needs a valid packing: {}",
                report.violations[0]
            )));
        }
        let mut covered = vec![false; self.graph.order()];
        for g in cert.center_list() {
            for v in self.graph.closed_sphere(self.index_of(g)) {
                covered[v] = true;
            }
        }
        let scale = factorial(r).pow(2);
        let mut profile: BTreeMap<usize, u64> = (0..=r / 2).map(|k| (k, 0)).collect();
        for (v, _) in covered.iter().enumerate().filter(|(_, &c)| c) {
            let g = self.graph.vertex(v);
            let k = component_type(&self.tree, component_of(&self.tree, &g))?;
            *profile.get_mut(&k).expect("type in range") += 1;
        }
        Ok(profile.into_iter().map(|(k, count)| (k, Ratio::new(count, scale))).collect())
    }
}

/// Relabelings of values that fix `{1..r}` and `{r+1..n}` setwise, as words.
fn side_preserving_relabelings(r: usize, t: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    for a in Permutation::all(r) {
        for b in Permutation::all(t) {
            let mut word: Vec<u8> = a.word().to_vec();
            word.extend(b.word().iter().map(|&v| v + r as u8));
            out.push(word);
        }
    }
    out
}

/// Pulls a component's centers back to the base component `{1..r}` and
/// returns the lexicographically least image under side-preserving relabelings.
fn canonical_pattern(
    tree: &DiameterThreeTree,
    c: ComponentId,
    centers: &[&Permutation],
    stabilizer: &[Vec<u8>],
) -> Vec<Vec<u8>> {
    let n = tree.n();
    // pull[v] = label of value v in the base component
    let mut pull = vec![0u8; n + 1];
    for (k, v) in c.0.iter().chain(c.0.complement(n).iter()).enumerate() {
        pull[v] = (k + 1) as u8;
    }
    let base: Vec<Vec<u8>> = centers
        .iter()
        .map(|g| g.word().iter().map(|&v| pull[v as usize]).collect())
        .collect();
    stabilizer
        .iter()
        .map(|y| {
            let mut image: Vec<Vec<u8>> = base
                .iter()
                .map(|w| w.iter().map(|&v| y[v as usize - 1]).collect())
                .collect();
            image.sort_unstable();
            image
        })
        .min()
        .unwrap_or_default()
}

pub fn verify_packing(tree: &DiameterThreeTree, cert: &PackingCertificate) -> Result<VerificationReport> {
    Verifier::new(tree)?.verify_packing(cert)
}

pub fn verify_eset(tree: &DiameterThreeTree, cert: &PackingCertificate) -> Result<VerificationReport> {
    Verifier::new(tree)?.verify_eset(cert)
}

pub fn verify_on_subgraph(
    tree: &DiameterThreeTree,
    cert: &PackingCertificate,
    comps: &[ComponentId],
) -> Result<VerificationReport> {
    Verifier::new(tree)?.verify_on_subgraph(cert, comps)
}

pub fn uniformity_check(tree: &DiameterThreeTree, cert: &PackingCertificate) -> Result<UniformityReport> {
    Verifier::new(tree)?.uniformity_check(cert)
}

pub fn profile_by_type(tree: &DiameterThreeTree, cert: &PackingCertificate) -> Result<BTreeMap<usize, Fraction>> {
    Verifier::new(tree)?.profile_by_type(cert)
}

/// Checks that `centers` form a perfect code of an arbitrary transposition-tree graph.
pub fn is_perfect_code(graph: &CayleyGraph, centers: &[Permutation]) -> Result<bool> {
    let mut hit = vec![false; graph.order()];
    for g in centers {
        for v in graph.closed_sphere(graph.index_of(g)?) {
            if hit[v] {
                return Ok(false);
            }
            hit[v] = true;
        }
    }
    Ok(hit.into_iter().all(|b| b))
}
