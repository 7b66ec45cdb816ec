//! Explicit packings: star slices, product E-sets, the perfect code of
//! `X′(r,r)`, uniform packings from exact subgraphs, nonuniform extensions
//! and the Table III numbers.

use std::fmt;

use num_rational::Ratio;
use serde::Serialize;

use crate::cayley::{component_of, component_type, components, enumerate_component, CayleyGraph, ComponentId};
use crate::certificate::{Fraction, PackingCertificate};
use crate::error::{Error, Result};
use crate::johnson::{orientation_choices, ExactSubgraph, Orientation};
use crate::perm::{Parity, Permutation};
use crate::search::{extend_packing, SearchOptions};
use crate::subset::Subset;
use crate::tree::{DiameterThreeTree, Numbering};
use crate::verify::{UniformityReport, VerificationReport, Verifier};

/// `ξʲᵢ`: the permutations of `1..n` with value `i` at position `j`.
/// It is an E-set of the star Cayley graph whose hub is position `j`.
pub fn star_eset(n: usize, j: usize, i: usize) -> Result<Vec<Permutation>> {
    if !(1..=n).contains(&j) || !(1..=n).contains(&i) {
        return Err(Error::Construction(format!("slice ({j},{i}) outside 1..{n}")));
    }
    Ok(Permutation::all(n).filter(|p| p.at(j) as usize == i).collect())
}

/// `ξ^hubL_i × ξ^hubR_j` inside component `c`: `(r−1)!(t−1)!` centers.
pub fn product_eset(
    tree: &DiameterThreeTree,
    c: ComponentId,
    left: (usize, usize),
    right: (usize, usize),
) -> Result<Vec<Permutation>> {
    if left.0 != tree.left_hub() || right.0 != tree.right_hub() {
        return Err(Error::Construction(format!(
            "slices must sit at the hubs {} and {}",
            tree.left_hub(),
            tree.right_hub()
        )));
    }
    if c.0.len() != tree.r() || !c.0.is_subset_of(Subset::full(tree.n())) {
        return Err(Error::Construction(format!("{c:?} is not a component of {tree}")));
    }
    if !c.0.contains(left.1) || c.0.contains(right.1) || right.1 == 0 || right.1 > tree.n() {
        return Err(Error::Construction(format!(
            "value {} must lie in {c:?} and value {} outside it",
            left.1, right.1
        )));
    }
    Ok(enumerate_component(tree, c)
        .filter(|x| x.at(left.0) as usize == left.1 && x.at(right.0) as usize == right.1)
        .collect())
}

/// How the values `1..2r` are matched into the pairs defining `X′`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Pairing {
    /// `{i, r + i}`.
    Shift,
    /// `{i, 2r + 1 − i}`.
    Mirror,
}

impl Pairing {
    pub fn partner(self, r: usize, v: usize) -> usize {
        match self {
            Pairing::Shift if v <= r => v + r,
            Pairing::Shift => v - r,
            Pairing::Mirror => 2 * r + 1 - v,
        }
    }

    /// The default for each numbering.
    pub fn for_numbering(numbering: Numbering) -> Self {
        match numbering {
            Numbering::Renumbered => Pairing::Shift,
            Numbering::Original => Pairing::Mirror,
        }
    }
}

/// The `2^r` components taking exactly one value from each pair `{i, r+i}`.
pub fn xprime_components(r: usize) -> Vec<ComponentId> {
    xprime_components_with(r, Pairing::Shift)
}

pub fn xprime_components_with(r: usize, pairing: Pairing) -> Vec<ComponentId> {
    Subset::combinations(2 * r, r)
        .into_iter()
        .filter(|c| c.iter().all(|v| !c.contains(pairing.partner(r, v))))
        .map(ComponentId)
        .collect()
}

/// Marks the vertices lying in the given components.
pub fn component_mask(tree: &DiameterThreeTree, graph: &CayleyGraph, comps: &[ComponentId]) -> Vec<bool> {
    let wanted: std::collections::HashSet<ComponentId> = comps.iter().copied().collect();
    (0..graph.order())
        .map(|v| wanted.contains(&component_of(tree, &graph.vertex(v))))
        .collect()
}

fn word_parity(values: &[u8]) -> Parity {
    let mut inversions = 0;
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            if values[i] > values[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        Parity::Even
    } else {
        Parity::Odd
    }
}

/// Backtracking over variables whose options are sets of centers; an option
/// is admissible when its closed spheres avoid everything already covered.
struct BlockPacker<'a> {
    graph: &'a CayleyGraph,
    covered: Vec<bool>,
    nodes: u64,
    max_nodes: u64,
    require_full: bool,
}

impl BlockPacker<'_> {
    fn spheres(&self, centers: &[usize]) -> Option<Vec<usize>> {
        let mut cells = Vec::new();
        for &c in centers {
            for w in self.graph.closed_sphere(c) {
                if self.covered[w] || cells.contains(&w) {
                    return None;
                }
                cells.push(w);
            }
        }
        Some(cells)
    }

    fn solve(&mut self, vars: &[Vec<Vec<usize>>], picks: &mut Vec<usize>) -> Option<bool> {
        let k = picks.len();
        if k == vars.len() {
            return Some(!self.require_full || self.covered.iter().all(|&c| c));
        }
        for (choice, centers) in vars[k].iter().enumerate() {
            self.nodes += 1;
            if self.nodes > self.max_nodes {
                return None;
            }
            let Some(cells) = self.spheres(centers) else {
                continue;
            };
            for &w in &cells {
                self.covered[w] = true;
            }
            picks.push(choice);
            let done = self.solve(vars, picks);
            if done != Some(false) {
                return done;
            }
            picks.pop();
            for &w in &cells {
                self.covered[w] = false;
            }
        }
        Some(false)
    }
}

const BLOCK_NODE_LIMIT: u64 = 50_000_000;

/// A perfect code of `X′(r,r)` with the default pairing of the tree's numbering.
pub fn xprime_perfect_code(r: usize) -> Result<PackingCertificate> {
    xprime_perfect_code_with(r, Numbering::Renumbered, Pairing::Shift)
}

/// Perfect code of the subgraph `X′(r,r)` induced by [`xprime_components_with`].
///
/// Every center has partner values on the two hubs, so its ε-neighbor stays
/// in `X′`. For each component and each left hub value `a`, the centers are
/// `ξ^hub_a` on the left times the right arrangements with `partner(a)` on
/// the right hub whose remaining values form an even (or odd) arrangement.
/// The even/odd bits are settled by backtracking on sphere overlaps.
pub fn xprime_perfect_code_with(r: usize, numbering: Numbering, pairing: Pairing) -> Result<PackingCertificate> {
    let tree = DiameterThreeTree::build(r, r, numbering)?;
    let graph = CayleyGraph::new(tree.tree())?;
    let (lh, rh) = (tree.left_hub(), tree.right_hub());
    let comps = xprime_components_with(r, pairing);
    let mut vars = Vec::new();
    for &c in &comps {
        for a in c.0.iter() {
            let b = pairing.partner(r, a);
            let mut classes = [Vec::new(), Vec::new()];
            for x in enumerate_component(&tree, c) {
                if x.at(lh) as usize != a || x.at(rh) as usize != b {
                    continue;
                }
                let tail: Vec<u8> = tree.right_positions().filter(|&k| k != rh).map(|k| x.at(k)).collect();
                let slot = usize::from(word_parity(&tail) == Parity::Odd);
                classes[slot].push(graph.index_of(&x)?);
            }
            vars.push(classes.to_vec());
        }
    }
    let inside = component_mask(&tree, &graph, &comps);
    let mut packer = BlockPacker {
        graph: &graph,
        covered: inside.iter().map(|&b| !b).collect(),
        nodes: 0,
        max_nodes: BLOCK_NODE_LIMIT,
        require_full: true,
    };
    let mut picks = Vec::new();
    match packer.solve(&vars, &mut picks) {
        Some(true) => {}
        Some(false) => {
            return Err(Error::Construction(format!(
                "no parity assignment packs X′({r},{r}) perfectly"
            )))
        }
        None => return Err(Error::Construction(format!("X′({r},{r}) search exceeded its node limit"))),
    }
    let mut centers: Vec<Permutation> = vars
        .iter()
        .zip(&picks)
        .flat_map(|(var, &k)| var[k].iter().map(|&v| graph.vertex(v)))
        .collect();
    centers.sort();
    Ok(PackingCertificate::one_sphere(&tree, centers))
}

/// Result of [`uniform_from_exact`].
#[derive(Clone, Debug, Serialize)]
pub struct UniformConstruction {
    pub certificate: PackingCertificate,
    pub orientation: Orientation,
    pub report: VerificationReport,
    pub uniformity: UniformityReport,
}

/// Centers of component `c` sending their ε-neighbors into `next`.
fn arc_centers(tree: &DiameterThreeTree, c: Subset, next: Subset) -> Result<Vec<Permutation>> {
    let i = c.difference(next).single();
    let j = next.difference(c).single();
    match (i, j) {
        (Some(i), Some(j)) => product_eset(tree, ComponentId(c), (tree.left_hub(), i), (tree.right_hub(), j)),
        _ => Err(Error::Construction(format!("{c} and {next} are not adjacent"))),
    }
}

/// Chooses an orientation per structure component so that the product
/// centers pack, avoiding the vertices already marked in `covered`.
fn pack_structure(
    tree: &DiameterThreeTree,
    graph: &CayleyGraph,
    structure: &ExactSubgraph,
    covered: Vec<bool>,
) -> Result<Option<(Vec<Permutation>, Orientation)>> {
    let choices = orientation_choices(structure)?.ok_or_else(|| {
        Error::Construction("every component must be a cycle or a unicyclic caterpillar".into())
    })?;
    let mut per_comp: Vec<[Vec<Permutation>; 2]> = Vec::new();
    for pair in &choices {
        let mut sides = [Vec::new(), Vec::new()];
        for (k, orientation) in pair.iter().enumerate() {
            for &(c, next) in orientation {
                sides[k].extend(arc_centers(tree, c, next)?);
            }
        }
        per_comp.push(sides);
    }
    let vars: Vec<Vec<Vec<usize>>> = per_comp
        .iter()
        .map(|sides| {
            sides
                .iter()
                .map(|cs| cs.iter().map(|g| graph.index_of(g).expect("same degree")).collect())
                .collect()
        })
        .collect();
    let mut packer = BlockPacker {
        graph,
        covered,
        nodes: 0,
        max_nodes: BLOCK_NODE_LIMIT,
        require_full: false,
    };
    let mut picks = Vec::new();
    if packer.solve(&vars, &mut picks) != Some(true) {
        return Ok(None);
    }
    let mut centers = Vec::new();
    let mut orientation = Vec::new();
    for (k, &pick) in picks.iter().enumerate() {
        centers.extend(per_comp[k][pick].iter().cloned());
        orientation.extend(choices[k][pick].iter().copied());
    }
    Ok(Some((centers, orientation)))
}

/// Product E-sets along an orientation of an exact subgraph of the
/// component graph `Γʳₙ`; each component's centers send their ε-neighbors
/// to its successor. Orientations are tried component by component (cycle
/// forward first) and the verifier accepts the first packing.
pub fn uniform_from_exact(tree: &DiameterThreeTree, structure: &ExactSubgraph) -> Result<UniformConstruction> {
    if structure.n != tree.n() || structure.r != tree.r() {
        return Err(Error::Construction(format!(
            "structure lives in Γ^{}_{}, tree needs Γ^{}_{}",
            structure.r,
            structure.n,
            tree.r(),
            tree.n()
        )));
    }
    let verifier = Verifier::new(tree)?;
    let graph = verifier.graph();
    let (mut centers, orientation) = pack_structure(tree, graph, structure, vec![false; graph.order()])?
        .ok_or_else(|| Error::Construction("no orientation of the structure gives a packing".into()))?;
    centers.sort();
    let certificate = PackingCertificate::one_sphere(tree, centers);
    let report = verifier.verify_packing(&certificate)?;
    let uniformity = verifier.uniformity_check(&certificate)?;
    Ok(UniformConstruction {
        certificate,
        orientation,
        report,
        uniformity,
    })
}

/// One step of [`nonuniform_extension`]: centers placed so far and what they cover.
#[derive(Clone, Debug, Serialize)]
pub struct Stage {
    pub centers: usize,
    pub covered: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct NonuniformConstruction {
    pub certificate: PackingCertificate,
    pub report: VerificationReport,
    /// `Σ′_r · (r!)²`.
    pub target_covered: u64,
    pub reached_target: bool,
    pub stages: Vec<Stage>,
    /// Exact 2-factor of the component graph on the extended components.
    pub structure: Option<ExactSubgraph>,
}

/// Components of type `0 < k`, leaving out type `r/2` when `r` is even.
pub fn extension_components(tree: &DiameterThreeTree) -> Result<Vec<ComponentId>> {
    let r = tree.r();
    let mut out = Vec::new();
    for c in components(tree) {
        let k = component_type(tree, c)?;
        if k > 0 && !(r % 2 == 0 && 2 * k == r) {
            out.push(c);
        }
    }
    Ok(out)
}

/// Extends the `X′(r,r)` perfect code to a 1-sphere packing of `X³(r,r)`.
///
/// The extended components get product E-sets along an exact 2-factor of
/// the component graph restricted to them, so each receives
/// `2r((r−1)!)²` covered vertices. When no such 2-factor exists within the
/// search, free spheres are added by branch and bound instead and any
/// shortfall is reported.
pub fn nonuniform_extension(r: usize, opts: &SearchOptions) -> Result<NonuniformConstruction> {
    let base = xprime_perfect_code(r)?;
    let tree = base.tree()?;
    let verifier = Verifier::new(&tree)?;
    let graph = verifier.graph();
    let mut covered = vec![false; graph.order()];
    let mut centers: Vec<Permutation> = base.center_list().into_iter().cloned().collect();
    for g in &centers {
        for w in graph.closed_sphere(graph.index_of(g)?) {
            covered[w] = true;
        }
    }
    let n = tree.n() as u64;
    let mut stages = vec![Stage {
        centers: centers.len(),
        covered: centers.len() as u64 * n,
    }];
    let row = table_row(r)?;
    let square = crate::perm::factorial(r) * crate::perm::factorial(r);
    let target = (row.sigma_prime * Ratio::from_integer(square)).to_integer();

    let region = extension_components(&tree)?;
    let vertices: Vec<Subset> = region.iter().map(|c| c.0).collect();
    let mut structure = None;
    if !vertices.is_empty() {
        let factor = crate::johnson::search_exact_2factor_on(2 * r, r, &vertices)?.factor;
        let packed = match &factor {
            Some(f) => pack_structure(&tree, graph, f, covered.clone())?,
            None => None,
        };
        match packed {
            Some((extra, orientation)) => {
                let mut order: Vec<Subset> = Vec::new();
                for &(c, _) in &orientation {
                    order.push(c);
                }
                let half: Vec<Subset> = order[..order.len() / 2].to_vec();
                let early = extra
                    .iter()
                    .filter(|g| half.contains(&component_of(&tree, g).0))
                    .count();
                stages.push(Stage {
                    centers: centers.len() + early,
                    covered: (centers.len() + early) as u64 * n,
                });
                centers.extend(extra);
                structure = factor;
            }
            None => {
                let outside = component_mask(&tree, graph, &region);
                let blocked: Vec<bool> = covered.iter().zip(&outside).map(|(&c, &o)| c || !o).collect();
                let want = ((target - centers.len() as u64 * n) / n) as usize;
                let found = extend_packing(graph, &blocked, Some(want), opts);
                centers.extend(found.centers);
            }
        }
    }
    centers.sort();
    stages.push(Stage {
        centers: centers.len(),
        covered: centers.len() as u64 * n,
    });
    stages.dedup_by_key(|s| s.centers);
    let certificate = PackingCertificate::one_sphere(&tree, centers);
    let report = verifier.verify_packing(&certificate)?;
    Ok(NonuniformConstruction {
        reached_target: report.valid && report.covered_count == target,
        target_covered: target,
        certificate,
        report,
        stages,
        structure,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PunctureReport {
    pub certificate: PackingCertificate,
    pub report: VerificationReport,
    /// `n/(rt)`, the uniform ceiling.
    #[serde(serialize_with = "crate::certificate::fraction_serde::serialize")]
    pub window_low: Fraction,
    /// `Σ′_t / Σ_r`.
    #[serde(serialize_with = "crate::certificate::fraction_serde::serialize")]
    pub window_high: Fraction,
    pub window_empty: bool,
    /// Achieved α lies in `(window_low, window_high]`.
    pub inside_window: bool,
    pub structure: Option<ExactSubgraph>,
}

/// Best-effort 1-sphere packing of `X³(r,t)` for `r > t`: product E-sets
/// along an exact 2-factor of `Γʳₙ` when one is found, then free spheres
/// added by bounded branch and bound. The achieved α is compared with the
/// window `n/(rt) < α ≤ Σ′_t/Σ_r` only as a report.
pub fn puncture_attempt(r: usize, t: usize, opts: &SearchOptions) -> Result<PunctureReport> {
    if r <= t || t < 2 {
        return Err(Error::Construction(format!("puncturing needs r > t > 1, got r = {r}, t = {t}")));
    }
    let tree = DiameterThreeTree::build(r, t, Numbering::Original)?;
    let verifier = Verifier::new(&tree)?;
    let graph = verifier.graph();
    let n = tree.n();
    let mut centers = Vec::new();
    let mut structure = None;
    if n > r + 1 && r > 2 {
        let all = Subset::combinations(n, r);
        if all.len() <= 2 * crate::johnson::MAX_TWO_FACTOR_VERTICES {
            let factor = crate::johnson::search_exact_2factor_on(n, r, &all)?.factor;
            if let Some(f) = &factor {
                if let Some((found, _)) = pack_structure(&tree, graph, f, vec![false; graph.order()])? {
                    centers = found;
                    structure = factor;
                }
            }
        }
    }
    let mut covered = vec![false; graph.order()];
    for g in &centers {
        for w in graph.closed_sphere(graph.index_of(g)?) {
            covered[w] = true;
        }
    }
    centers.extend(extend_packing(graph, &covered, None, opts).centers);
    centers.sort();
    let certificate = PackingCertificate::one_sphere(&tree, centers);
    let report = verifier.verify_packing(&certificate)?;
    let window_low = Ratio::new(n as u64, (r * t) as u64);
    let window_high = table_row(t)?.sigma_prime / Ratio::from_integer(table_row(r)?.sigma);
    Ok(PunctureReport {
        window_empty: window_high <= window_low,
        inside_window: report.valid && report.alpha > window_low && report.alpha <= window_high,
        certificate,
        report,
        window_low,
        window_high,
        structure,
    })
}

/// One row of Table III.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub r: usize,
    /// Components of type `k`, `k = 0..=⌊r/2⌋`.
    pub t: Vec<u64>,
    /// Covered vertices per type, in units of `(r!)²`.
    #[serde(serialize_with = "fraction_list")]
    pub s: Vec<Fraction>,
    pub sigma: u64,
    #[serde(serialize_with = "crate::certificate::fraction_serde::serialize")]
    pub sigma_prime: Fraction,
    pub p: u64,
    #[serde(serialize_with = "crate::certificate::fraction_serde::serialize")]
    pub alpha: Fraction,
    /// `n / r² = 2/r`, the uniform ceiling.
    #[serde(serialize_with = "crate::certificate::fraction_serde::serialize")]
    pub uniform_bound: Fraction,
}

fn fraction_list<S: serde::Serializer>(xs: &[Fraction], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(crate::certificate::format_fraction))
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// `T(r,k) = C(r,2k) · 2^(r−2k) · C(2k,k)`.
pub fn type_count(r: usize, k: usize) -> u64 {
    let (r, k) = (r as u64, k as u64);
    binomial(r, 2 * k) * (1 << (r - 2 * k)) * binomial(2 * k, k)
}

pub fn table_row(r: usize) -> Result<TableRow> {
    if !(2..=30).contains(&r) {
        return Err(Error::Construction(format!("table rows need 2 ≤ r ≤ 30, got {r}")));
    }
    let t: Vec<u64> = (0..=r / 2).map(|k| type_count(r, k)).collect();
    let two_over_r = Ratio::new(2, r as u64);
    let s: Vec<Fraction> = t
        .iter()
        .enumerate()
        .map(|(k, &tk)| match k {
            0 => Ratio::from_integer(tk),
            _ if r % 2 == 0 && 2 * k == r => Ratio::from_integer(0),
            _ => two_over_r * tk,
        })
        .collect();
    let sigma = binomial(2 * r as u64, r as u64);
    let mut p = sigma - (1 << r);
    if r % 2 == 0 {
        p -= binomial(r as u64, r as u64 / 2);
    }
    let sigma_prime = Ratio::from_integer(1u64 << r) + two_over_r * p;
    Ok(TableRow {
        r,
        alpha: sigma_prime / sigma,
        t,
        s,
        sigma,
        sigma_prime,
        p,
        uniform_bound: two_over_r,
    })
}

/// Integers without a denominator, everything else as `p/q`.
fn plain(x: &Fraction) -> String {
    if x.is_integer() {
        x.to_integer().to_string()
    } else {
        crate::certificate::format_fraction(x)
    }
}

impl fmt::Display for TableRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |xs: Vec<String>| xs.join(",");
        write!(
            f,
            "{}\t{}\t{}\t{}\t{}\t{}",
            self.r,
            join(self.t.iter().map(u64::to_string).collect()),
            self.sigma,
            join(self.s.iter().map(plain).collect()),
            plain(&self.sigma_prime),
            crate::certificate::format_fraction(&self.alpha),
        )
    }
}
