//! Johnson graphs `Γʳₙ = J(n, r, r−1)` and their exact subgraphs.
//!
//! Vertices are `r`-subsets of `{1..n}`; two are adjacent when they share
//! `r − 1` elements, and that shared set is the edge's color. At a vertex
//! `v`, an edge to `u` removes one element of `v` and adds one element from
//! outside. Two edges at `v` satisfy the color condition when they remove
//! different elements, and the path condition `|u ∪ v ∪ w| = r + 2` when they
//! add different elements.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::subset::Subset;

/// Largest vertex count accepted by [`search_exact_2factor`].
pub const MAX_TWO_FACTOR_VERTICES: usize = 40;

fn check_shape(n: usize, r: usize) -> Result<()> {
    if !(2 < r && r + 1 < n && n <= 32) {
        return Err(Error::Johnson(format!("need 2 < r < n - 1, got n = {n}, r = {r}")));
    }
    Ok(())
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

pub fn adjacent(r: usize, u: Subset, v: Subset) -> bool {
    u.len() == r && v.len() == r && u.intersection(v).len() == r - 1
}

/// Neighbors of `u` with the colors of the joining edges.
pub fn johnson_neighbors(n: usize, r: usize, u: Subset) -> Result<Vec<(Subset, Subset)>> {
    check_shape(n, r)?;
    if u.len() != r || !u.is_subset_of(Subset::full(n)) {
        return Err(Error::Johnson(format!("{u} is not a {r}-subset of 1..{n}")));
    }
    let mut out = Vec::with_capacity(r * (n - r));
    for drop in u.iter() {
        for add in u.complement(n).iter() {
            let color = u.without(drop);
            out.push((color, color.with(add)));
        }
    }
    Ok(out)
}

/// Whether the two edges `v–u` and `v–w` at `v` meet both conditions.
pub fn compatible_at(v: Subset, u: Subset, w: Subset) -> bool {
    v.difference(u) != v.difference(w) && u.difference(v) != w.difference(v)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StructureKind {
    Cycle,
    TwoFactor,
    Nest,
    Path,
    General,
}

/// A subgraph of `Γʳₙ`. Cycles list their vertices in cyclic order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactSubgraph {
    pub n: usize,
    pub r: usize,
    pub kind: StructureKind,
    pub vertices: Vec<Subset>,
    pub edges: Vec<(Subset, Subset)>,
}

impl ExactSubgraph {
    /// A cycle through `order`, closing back to the first vertex.
    pub fn cycle(n: usize, r: usize, order: Vec<Subset>) -> Self {
        let m = order.len();
        let edges = (0..m).map(|i| (order[i], order[(i + 1) % m])).collect();
        ExactSubgraph {
            n,
            r,
            kind: StructureKind::Cycle,
            vertices: order,
            edges,
        }
    }

    /// The union of several subgraphs of the same `Γʳₙ`.
    pub fn union(kind: StructureKind, parts: &[ExactSubgraph]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::Johnson("empty union".into()))?;
        let mut vertices = Vec::new();
        let mut edges = Vec::new();
        for p in parts {
            if (p.n, p.r) != (first.n, first.r) {
                return Err(Error::Johnson("union of subgraphs of different Johnson graphs".into()));
            }
            vertices.extend(p.vertices.iter().copied());
            edges.extend(p.edges.iter().copied());
        }
        let mut seen = BTreeSet::new();
        vertices.retain(|v| seen.insert(*v));
        Ok(ExactSubgraph {
            n: first.n,
            r: first.r,
            kind,
            vertices,
            edges,
        })
    }

    /// Adds edges, and any endpoints not yet present.
    pub fn with_edges(mut self, kind: StructureKind, extra: &[(Subset, Subset)]) -> Self {
        for &(a, b) in extra {
            for v in [a, b] {
                if !self.vertices.contains(&v) {
                    self.vertices.push(v);
                }
            }
            self.edges.push((a, b));
        }
        self.kind = kind;
        self
    }

    pub fn adjacency(&self) -> BTreeMap<Subset, Vec<Subset>> {
        let mut adj: BTreeMap<Subset, Vec<Subset>> = self.vertices.iter().map(|&v| (v, Vec::new())).collect();
        for &(a, b) in &self.edges {
            adj.entry(a).or_default().push(b);
            adj.entry(b).or_default().push(a);
        }
        adj
    }

    /// Listed vertices together with every edge endpoint.
    pub fn vertex_set(&self) -> BTreeSet<Subset> {
        let mut set: BTreeSet<Subset> = self.vertices.iter().copied().collect();
        for &(a, b) in &self.edges {
            set.insert(a);
            set.insert(b);
        }
        set
    }

    pub fn is_spanning(&self) -> bool {
        self.vertex_set().len() == binomial(self.n, self.r)
    }

    /// Vertex sets of the connected components, in order of first vertex.
    pub fn components(&self) -> Vec<Vec<Subset>> {
        let adj = self.adjacency();
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for &start in adj.keys() {
            if !seen.insert(start) {
                continue;
            }
            let mut comp = vec![start];
            let mut k = 0;
            while k < comp.len() {
                for &w in &adj[&comp[k]] {
                    if seen.insert(w) {
                        comp.push(w);
                    }
                }
                k += 1;
            }
            out.push(comp);
        }
        out
    }

    /// Splits a 2-regular subgraph into cycles, each starting at its least vertex.
    pub fn cycles(&self) -> Option<Vec<Vec<Subset>>> {
        let adj = self.adjacency();
        if adj.values().any(|nb| nb.len() != 2) {
            return None;
        }
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for &start in adj.keys() {
            if seen.contains(&start) {
                continue;
            }
            let mut cycle = vec![start];
            seen.insert(start);
            let mut prev = start;
            let mut cur = *adj[&start].iter().min().expect("degree 2");
            while cur != start {
                seen.insert(cur);
                cycle.push(cur);
                let next = adj[&cur].iter().copied().find(|&w| w != prev).unwrap_or(prev);
                prev = cur;
                cur = next;
            }
            out.push(cycle);
        }
        Some(out)
    }
}

impl fmt::Display for ExactSubgraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.vertices.iter().map(Subset::to_string).collect();
        write!(f, "({})", items.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum ExactnessViolation {
    BadVertex { vertex: Subset },
    NotAnEdge { first: Subset, second: Subset },
    /// Two edges at `vertex` carry the same color.
    RepeatedColor { vertex: Subset, first: Subset, second: Subset },
    /// The path `first–vertex–second` spans fewer than `r + 2` elements.
    SmallPath { vertex: Subset, first: Subset, second: Subset, size: usize },
}

impl fmt::Display for ExactnessViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactnessViolation::BadVertex { vertex } => write!(f, "{vertex} is not a vertex of the graph"),
            ExactnessViolation::NotAnEdge { first, second } => write!(f, "{first}-{second} is not an edge"),
            ExactnessViolation::RepeatedColor { vertex, first, second } => {
                write!(f, "edges {vertex}-{first} and {vertex}-{second} share a color")
            }
            ExactnessViolation::SmallPath {
                vertex,
                first,
                second,
                size,
            } => write!(f, "path {first}-{vertex}-{second} spans only {size} elements"),
        }
    }
}

fn pair_violation(r: usize, v: Subset, u: Subset, w: Subset) -> Option<ExactnessViolation> {
    if v.difference(u) == v.difference(w) {
        return Some(ExactnessViolation::RepeatedColor {
            vertex: v,
            first: u,
            second: w,
        });
    }
    let size = u.union(v).union(w).len();
    (size != r + 2).then_some(ExactnessViolation::SmallPath {
        vertex: v,
        first: u,
        second: w,
        size,
    })
}

fn check_edges(sub: &ExactSubgraph) -> Result<Option<ExactnessViolation>> {
    check_shape(sub.n, sub.r)?;
    let full = Subset::full(sub.n);
    for v in sub.vertex_set() {
        if v.len() != sub.r || !v.is_subset_of(full) {
            return Ok(Some(ExactnessViolation::BadVertex { vertex: v }));
        }
    }
    for &(a, b) in &sub.edges {
        if !adjacent(sub.r, a, b) {
            return Ok(Some(ExactnessViolation::NotAnEdge { first: a, second: b }));
        }
    }
    Ok(None)
}

/// Checks the color and path conditions on every pair of edges sharing a vertex.
pub fn exactness(sub: &ExactSubgraph) -> Result<std::result::Result<(), ExactnessViolation>> {
    if let Some(v) = check_edges(sub)? {
        return Ok(Err(v));
    }
    for (v, nb) in sub.adjacency() {
        for (i, &u) in nb.iter().enumerate() {
            for &w in &nb[i + 1..] {
                if let Some(bad) = pair_violation(sub.r, v, u, w) {
                    return Ok(Err(bad));
                }
            }
        }
    }
    Ok(Ok(()))
}

pub fn is_exact(sub: &ExactSubgraph) -> bool {
    matches!(exactness(sub), Ok(Ok(())))
}

/// A cyclic sequence of distinct elements whose width-`r` windows form a cycle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CondensedCycle {
    pub elements: Vec<usize>,
}

impl CondensedCycle {
    pub fn new(elements: Vec<usize>) -> Self {
        CondensedCycle { elements }
    }

    /// `(54321)` for `(12345)`.
    pub fn reversed(&self) -> Self {
        CondensedCycle {
            elements: self.elements.iter().rev().copied().collect(),
        }
    }
}

impl FromStr for CondensedCycle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        let bad = || Error::Johnson(format!("not a condensed cycle: {s:?}"));
        let elements = if s.contains(',') {
            s.split(',').map(|p| p.trim().parse().map_err(|_| bad())).collect::<Result<_>>()?
        } else {
            s.chars()
                .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(bad))
                .collect::<Result<_>>()?
        };
        Ok(CondensedCycle { elements })
    }
}

impl fmt::Display for CondensedCycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.elements.iter().map(usize::to_string).collect();
        let sep = if self.elements.iter().all(|&v| v <= 9) { "" } else { "," };
        write!(f, "({})", parts.join(sep))
    }
}

/// The cycle of consecutive width-`r` windows of `cc`, read cyclically.
pub fn expand_cc(cc: &CondensedCycle, r: usize, n: usize) -> Result<ExactSubgraph> {
    check_shape(n, r)?;
    let m = cc.elements.len();
    if m < r + 2 {
        return Err(Error::Johnson(format!("{cc} is shorter than r + 2 = {}", r + 2)));
    }
    if cc.elements.iter().any(|&a| a == 0 || a > n) {
        return Err(Error::Johnson(format!("{cc} has elements outside 1..{n}")));
    }
    let as_set: Subset = cc.elements.iter().copied().collect();
    if as_set.len() != m {
        return Err(Error::Johnson(format!("{cc} repeats an element")));
    }
    let windows: Vec<Subset> = (0..m)
        .map(|i| (0..r).map(|k| cc.elements[(i + k) % m]).collect())
        .collect();
    let distinct: BTreeSet<Subset> = windows.iter().copied().collect();
    if distinct.len() != m {
        return Err(Error::Johnson(format!("{cc} repeats a window")));
    }
    Ok(ExactSubgraph::cycle(n, r, windows))
}

/// A cyclic ordered partition `d₁d₂…d_r` of `n`.
#[derive(Clone, Debug)]
pub struct Cop {
    pub parts: Vec<usize>,
}

impl Cop {
    pub fn new(parts: Vec<usize>) -> Self {
        Cop { parts }
    }

    /// The least rotation, used for comparison.
    pub fn canonical(&self) -> Vec<usize> {
        (0..self.parts.len().max(1))
            .map(|k| {
                let mut p = self.parts.clone();
                p.rotate_left(k);
                p
            })
            .min()
            .unwrap_or_default()
    }
}

impl PartialEq for Cop {
    fn eq(&self, other: &Self) -> bool {
        self.canonical() == other.canonical()
    }
}

impl Eq for Cop {}

impl FromStr for Cop {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Johnson(format!("not a COP: {s:?}"));
        let parts: Vec<usize> = if s.contains(',') {
            s.split(',').map(|p| p.trim().parse().map_err(|_| bad())).collect::<Result<_>>()?
        } else {
            s.trim()
                .chars()
                .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(bad))
                .collect::<Result<_>>()?
        };
        if parts.is_empty() || parts.contains(&0) {
            return Err(bad());
        }
        Ok(Cop { parts })
    }
}

impl fmt::Display for Cop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(usize::to_string).collect();
        let sep = if self.parts.iter().all(|&d| d <= 9) { "" } else { "," };
        f.write_str(&parts.join(sep))
    }
}

/// The subsets `{i, i+d₁, i+d₁+d₂, …}` (mod `n`) for `i = 1..n`, first occurrences only.
pub fn expand_cop(cop: &Cop, n: usize) -> Result<Vec<Subset>> {
    if cop.parts.iter().sum::<usize>() != n || n > 32 {
        return Err(Error::Johnson(format!("COP {cop} does not partition {n}")));
    }
    let mut out = Vec::new();
    for start in 1..=n {
        let mut pos = start - 1;
        let mut set = Subset::EMPTY.with(start);
        for &d in &cop.parts[..cop.parts.len() - 1] {
            pos = (pos + d) % n;
            set = set.with(pos + 1);
        }
        if !out.contains(&set) {
            out.push(set);
        }
    }
    Ok(out)
}

/// An exact cycle alternating between the families of two COPs and using
/// every member of both, or `None` when no such cycle exists.
///
/// The cycle starts at the first member of `a`; candidates are tried in
/// family order, so the answer is deterministic.
pub fn alternate_cops(a: &Cop, b: &Cop, n: usize) -> Result<Option<ExactSubgraph>> {
    let r = a.parts.len();
    if b.parts.len() != r {
        return Err(Error::Johnson(format!("COPs {a} and {b} have different lengths")));
    }
    check_shape(n, r)?;
    let fa = expand_cop(a, n)?;
    let fb = expand_cop(b, n)?;
    if fa.len() != fb.len() || fa.iter().any(|x| fb.contains(x)) {
        return Ok(None);
    }
    let families = [fa, fb];
    let m = families[0].len();
    let mut used = [vec![false; m], vec![false; m]];
    used[0][0] = true;
    let mut path = vec![families[0][0]];

    fn extend(r: usize, families: &[Vec<Subset>; 2], used: &mut [Vec<bool>; 2], path: &mut Vec<Subset>) -> bool {
        let total = families[0].len() * 2;
        let cur = *path.last().expect("non-empty");
        if path.len() == total {
            let first = path[0];
            return adjacent(r, cur, first)
                && compatible_at(cur, path[path.len() - 2], first)
                && compatible_at(first, cur, path[1]);
        }
        let side = path.len() % 2;
        for k in 0..families[side].len() {
            if used[side][k] {
                continue;
            }
            let next = families[side][k];
            if !adjacent(r, cur, next) {
                continue;
            }
            if path.len() >= 2 && !compatible_at(cur, path[path.len() - 2], next) {
                continue;
            }
            used[side][k] = true;
            path.push(next);
            if extend(r, families, used, path) {
                return true;
            }
            path.pop();
            used[side][k] = false;
        }
        false
    }

    if extend(r, &families, &mut used, &mut path) {
        Ok(Some(ExactSubgraph::cycle(n, r, path)))
    } else {
        Ok(None)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TwoFactorOutcome {
    pub n: usize,
    pub r: usize,
    /// `None` means the search space was exhausted without finding one.
    pub factor: Option<ExactSubgraph>,
    pub nodes: u64,
}

struct TwoFactorSearch {
    r: usize,
    verts: Vec<Subset>,
    adj: Vec<Vec<usize>>,
    chosen: Vec<Vec<usize>>,
    forbidden: Vec<Vec<bool>>,
    nodes: u64,
}

impl TwoFactorSearch {
    fn edge_ok(&self, v: usize, u: usize) -> bool {
        if self.forbidden[v][u] || self.chosen[u].len() >= 2 || self.chosen[v].contains(&u) {
            return false;
        }
        let at_v = self.chosen[v]
            .iter()
            .all(|&w| compatible_at(self.verts[v], self.verts[w], self.verts[u]));
        let at_u = self.chosen[u]
            .iter()
            .all(|&w| compatible_at(self.verts[u], self.verts[w], self.verts[v]));
        at_v && at_u
    }

    fn candidates(&self, v: usize) -> Vec<usize> {
        self.adj[v].iter().copied().filter(|&u| self.edge_ok(v, u)).collect()
    }

    fn solve(&mut self) -> bool {
        let mut best: Option<(usize, Vec<usize>)> = None;
        for v in 0..self.verts.len() {
            if self.chosen[v].len() >= 2 {
                continue;
            }
            let cands = self.candidates(v);
            let need = 2 - self.chosen[v].len();
            if cands.len() < need {
                return false;
            }
            if best.as_ref().map_or(true, |(_, b)| cands.len() < b.len()) {
                best = Some((v, cands));
            }
        }
        let Some((v, cands)) = best else {
            return true;
        };
        let mut excluded = Vec::new();
        for &u in &cands {
            self.nodes += 1;
            if self.edge_ok(v, u) {
                self.chosen[v].push(u);
                self.chosen[u].push(v);
                if self.solve() {
                    return true;
                }
                self.chosen[v].pop();
                self.chosen[u].pop();
            }
            self.forbidden[v][u] = true;
            self.forbidden[u][v] = true;
            excluded.push(u);
        }
        for u in excluded {
            self.forbidden[v][u] = false;
            self.forbidden[u][v] = false;
        }
        false
    }
}

/// Exhaustive search for an exact spanning 2-regular subgraph of `Γʳₙ`.
///
/// Branches on the unsaturated vertex with the fewest admissible edges; each
/// branch either takes the next candidate edge or forbids it, so every
/// 2-factor is reached at most once and absence is a complete refutation.
pub fn search_exact_2factor(n: usize, r: usize) -> Result<TwoFactorOutcome> {
    check_shape(n, r)?;
    let order = binomial(n, r);
    if order > MAX_TWO_FACTOR_VERTICES {
        return Err(Error::TooLarge(format!(
            "Γ^{r}_{n} has {order} vertices; the 2-factor search stops at {MAX_TWO_FACTOR_VERTICES}"
        )));
    }
    search_exact_2factor_on(n, r, &Subset::combinations(n, r))
}

/// [`search_exact_2factor`] on the subgraph induced by `vertices`, without a size cap.
pub fn search_exact_2factor_on(n: usize, r: usize, vertices: &[Subset]) -> Result<TwoFactorOutcome> {
    check_shape(n, r)?;
    let mut verts = vertices.to_vec();
    verts.sort();
    verts.dedup();
    if let Some(bad) = verts.iter().find(|v| v.len() != r || !v.is_subset_of(Subset::full(n))) {
        return Err(Error::Johnson(format!("{bad} is not a {r}-subset of 1..{n}")));
    }
    let index: HashMap<Subset, usize> = verts.iter().enumerate().map(|(k, &v)| (v, k)).collect();
    let adj: Vec<Vec<usize>> = verts
        .iter()
        .map(|&v| {
            let mut nb: Vec<usize> = johnson_neighbors(n, r, v)
                .expect("shape checked")
                .into_iter()
                .filter_map(|(_, u)| index.get(&u).copied())
                .collect();
            nb.sort_unstable();
            nb
        })
        .collect();
    let mut search = TwoFactorSearch {
        r,
        chosen: vec![Vec::new(); verts.len()],
        forbidden: vec![vec![false; verts.len()]; verts.len()],
        verts,
        adj,
        nodes: 0,
    };
    let found = search.solve();
    let factor = found.then(|| {
        let mut edges = Vec::new();
        for (v, nb) in search.chosen.iter().enumerate() {
            for &u in nb {
                if v < u {
                    edges.push((search.verts[v], search.verts[u]));
                }
            }
        }
        ExactSubgraph {
            n,
            r: search.r,
            kind: StructureKind::TwoFactor,
            vertices: search.verts.clone(),
            edges,
        }
    });
    Ok(TwoFactorOutcome {
        n,
        r,
        factor,
        nodes: search.nodes,
    })
}

/// Arcs `c → c'` giving every vertex at most one successor.
pub type Orientation = Vec<(Subset, Subset)>;

/// The two candidate orientations of each component: the cycle run one way
/// or the other, pendants always pointing at the cycle. `None` when some
/// component is not a cycle or unicyclic caterpillar.
pub fn orientation_choices(sub: &ExactSubgraph) -> Result<Option<Vec<[Orientation; 2]>>> {
    if check_edges(sub)?.is_some() {
        return Ok(None);
    }
    let adj = sub.adjacency();
    let mut out = Vec::new();
    for comp in sub.components() {
        let Some((cycle, pendants)) = caterpillar_parts(&adj, &comp) else {
            return Ok(None);
        };
        let orient = |order: &[Subset]| -> Orientation {
            let m = order.len();
            let mut arcs: Orientation = (0..m).map(|i| (order[i], order[(i + 1) % m])).collect();
            arcs.extend(pendants.iter().copied());
            arcs
        };
        let mut reversed = cycle.clone();
        reversed.reverse();
        out.push([orient(&cycle), orient(&reversed)]);
    }
    Ok(Some(out))
}

/// Orients a subgraph whose components are cycles or unicyclic caterpillars
/// so that each vertex has one outgoing arc, and every pair made of the
/// outgoing arc and an incoming arc at a vertex meets both exactness
/// conditions. Pairs of incoming arcs are not constrained.
pub fn packing_orientation(sub: &ExactSubgraph) -> Result<Option<Orientation>> {
    let Some(choices) = orientation_choices(sub)? else {
        return Ok(None);
    };
    let mut arcs = Vec::new();
    for pair in choices {
        match pair.into_iter().find(|o| orientation_ok(sub.r, o)) {
            Some(o) => arcs.extend(o),
            None => return Ok(None),
        }
    }
    Ok(Some(arcs))
}

fn orientation_ok(r: usize, arcs: &[(Subset, Subset)]) -> bool {
    let out: HashMap<Subset, Subset> = arcs.iter().copied().collect();
    arcs.iter().all(|&(from, to)| {
        let Some(&next) = out.get(&to) else {
            return true;
        };
        pair_violation(r, to, from, next).is_none()
    })
}

/// The cycle (in traversal order) and the pendant arcs `leaf → cycle vertex`
/// of a unicyclic caterpillar component.
fn caterpillar_parts(
    adj: &BTreeMap<Subset, Vec<Subset>>,
    comp: &[Subset],
) -> Option<(Vec<Subset>, Vec<(Subset, Subset)>)> {
    let edge_count: usize = comp.iter().map(|v| adj[v].len()).sum::<usize>() / 2;
    if edge_count != comp.len() {
        return None;
    }
    let pendants: Vec<Subset> = comp.iter().copied().filter(|v| adj[v].len() == 1).collect();
    let core: Vec<Subset> = comp.iter().copied().filter(|v| adj[v].len() != 1).collect();
    let is_core = |v: &Subset| core.contains(v);
    if core.len() < 3 {
        return None;
    }
    for v in &core {
        if adj[v].iter().filter(|w| is_core(w)).count() != 2 {
            return None;
        }
    }
    let mut pendant_arcs = Vec::new();
    for p in &pendants {
        let target = adj[p][0];
        if !is_core(&target) {
            return None;
        }
        pendant_arcs.push((*p, target));
    }
    let start = *core.iter().min()?;
    let mut cycle = vec![start];
    let mut prev = start;
    let mut cur = adj[&start].iter().copied().filter(|w| is_core(w)).min()?;
    while cur != start {
        cycle.push(cur);
        let next = adj[&cur].iter().copied().find(|&w| is_core(&w) && w != prev)?;
        prev = cur;
        cur = next;
    }
    (cycle.len() == core.len()).then_some((cycle, pendant_arcs))
}

/// Attaches each vertex of `pendants` by one edge to a distinct cycle vertex
/// of the 2-regular subgraph `cycles`, so the result is a nest exact along
/// its packing orientation. Cycle directions are tried forward first; each
/// pendant takes the first admissible cycle vertex in order.
pub fn attach_pendants(cycles: &ExactSubgraph, pendants: &[Subset]) -> Result<Option<ExactSubgraph>> {
    if check_edges(cycles)?.is_some() || !is_exact(cycles) {
        return Ok(None);
    }
    let Some(orders) = cycles.cycles() else {
        return Ok(None);
    };
    let r = cycles.r;
    for mask in 0..1u64 << orders.len().min(20) {
        let mut succ: BTreeMap<Subset, Subset> = BTreeMap::new();
        for (k, order) in orders.iter().enumerate() {
            let mut o = order.clone();
            if mask >> k & 1 == 1 {
                o.reverse();
            }
            for i in 0..o.len() {
                succ.insert(o[i], o[(i + 1) % o.len()]);
            }
        }
        let mut taken = BTreeSet::new();
        let mut picks = Vec::new();
        if place_pendants(r, &succ, pendants, &mut taken, &mut picks) {
            let edges: Vec<(Subset, Subset)> = pendants.iter().copied().zip(picks).collect();
            return Ok(Some(cycles.clone().with_edges(StructureKind::Nest, &edges)));
        }
    }
    Ok(None)
}

fn place_pendants(
    r: usize,
    succ: &BTreeMap<Subset, Subset>,
    pendants: &[Subset],
    taken: &mut BTreeSet<Subset>,
    picks: &mut Vec<Subset>,
) -> bool {
    let Some(&p) = pendants.get(picks.len()) else {
        return true;
    };
    for (&v, &w) in succ {
        if taken.contains(&v) || !adjacent(r, p, v) || pair_violation(r, v, p, w).is_some() {
            continue;
        }
        taken.insert(v);
        picks.push(v);
        if place_pendants(r, succ, pendants, taken, picks) {
            return true;
        }
        picks.pop();
        taken.remove(&v);
    }
    false
}

#[derive(Clone, Debug, Serialize)]
pub struct NestReport {
    pub valid: bool,
    pub spanning: bool,
    pub max_degree: usize,
    pub unicyclic_caterpillars: bool,
    /// Exact in the undirected sense: every pair of edges at a vertex qualifies.
    pub strictly_exact: bool,
    /// Exact along the packing orientation (see [`packing_orientation`]).
    pub orientation_exact: bool,
    pub problems: Vec<String>,
}

/// Checks that `sub` is a nest: spanning, maximum degree 3, every component
/// a unicyclic caterpillar, and exact along its packing orientation.
pub fn validate_nest(sub: &ExactSubgraph) -> Result<NestReport> {
    check_shape(sub.n, sub.r)?;
    let mut problems = Vec::new();
    let spanning = sub.is_spanning();
    if !spanning {
        problems.push(format!(
            "not spanning: {} of {} vertices",
            sub.vertex_set().len(),
            binomial(sub.n, sub.r)
        ));
    }
    let adj = sub.adjacency();
    let max_degree = adj.values().map(Vec::len).max().unwrap_or(0);
    if max_degree > 3 {
        problems.push(format!("maximum degree {max_degree} exceeds 3"));
    }
    let unicyclic_caterpillars = sub
        .components()
        .iter()
        .all(|comp| caterpillar_parts(&adj, comp).is_some());
    if !unicyclic_caterpillars {
        problems.push("a component is not a unicyclic caterpillar".into());
    }
    let strict = exactness(sub)?;
    let strictly_exact = strict.is_ok();
    let orientation_exact = unicyclic_caterpillars && packing_orientation(sub)?.is_some();
    if !orientation_exact {
        match strict {
            Err(v) => problems.push(format!("not exact: {v}")),
            Ok(()) => problems.push("no exact packing orientation".into()),
        }
    }
    Ok(NestReport {
        valid: spanning && max_degree <= 3 && unicyclic_caterpillars && orientation_exact,
        spanning,
        max_degree,
        unicyclic_caterpillars,
        strictly_exact,
        orientation_exact,
        problems,
    })
}
