//! Exhaustive searches: perfect codes by exact cover, maximum 1-sphere
//! packings by branch and bound.

use std::sync::atomic::{AtomicBool, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::cayley::CayleyGraph;
use crate::certificate::PackingCertificate;
use crate::dlx::{Budget, Dlx};
use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::tree::{DiameterThreeTree, TranspositionTree};
use crate::verify::is_perfect_code;

/// Largest degree the searches accept without the explicit large-instance flag.
pub const DEFAULT_MAX_DEGREE: usize = 6;
/// Largest degree the searches accept at all.
pub const HARD_MAX_DEGREE: usize = 7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchStatus {
    Found,
    NoneExhaustive,
    BestEffort,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchOutcome {
    pub status: SearchStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<PackingCertificate>,
    pub nodes_explored: u64,
    pub wall_budget_exceeded: bool,
    /// `true` when the search only explored codes containing the identity.
    pub symmetry_reduced: bool,
    pub wall_time_ms: u128,
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    /// Fix the identity as a center (valid because value relabelings are automorphisms).
    pub symmetry: bool,
    /// Worker threads for the first branching level; 1 keeps the run fully deterministic.
    pub threads: usize,
    pub time_budget: Option<Duration>,
    pub node_budget: Option<u64>,
    /// Permit degree 7.
    pub allow_large: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            symmetry: true,
            threads: 1,
            time_budget: None,
            node_budget: None,
            allow_large: false,
        }
    }
}

fn check_size(n: usize, opts: &SearchOptions) -> Result<()> {
    let limit = if opts.allow_large { HARD_MAX_DEGREE } else { DEFAULT_MAX_DEGREE };
    if n > limit {
        return Err(Error::TooLarge(format!(
            "degree {n} has {} vertices; searches stop at degree {limit}{}",
            crate::perm::factorial(n),
            if opts.allow_large { "" } else { " unless large instances are enabled" }
        )));
    }
    Ok(())
}

/// Exact-cover instance: one column per vertex, one row per closed sphere
/// (row `v` is `N[v]`).
fn sphere_cover(graph: &CayleyGraph) -> Dlx {
    let mut dlx = Dlx::new(graph.order());
    for v in 0..graph.order() {
        let row: Vec<usize> = graph.closed_sphere(v).collect();
        dlx.add_row(&row);
    }
    dlx
}

/// Result of a perfect-code search on a bare Cayley graph.
#[derive(Clone, Debug)]
pub struct CodeSearch {
    pub code: Option<Vec<Permutation>>,
    pub nodes: u64,
    pub budget_exceeded: bool,
}

/// Looks for one perfect code (E-set) of the Cayley graph of `tree`.
pub fn find_perfect_code(tree: &TranspositionTree, opts: &SearchOptions) -> Result<CodeSearch> {
    check_size(tree.degree(), opts)?;
    let graph = CayleyGraph::new(tree)?;
    let mut dlx = sphere_cover(&graph);
    if opts.symmetry {
        // the identity has rank 0
        dlx.select_row(0);
    }
    let deadline = opts.time_budget.map(|d| Instant::now() + d);
    let prefix: Vec<usize> = if opts.symmetry { vec![0] } else { vec![] };
    let finish = |rows: &[usize]| -> Vec<Permutation> {
        let mut code: Vec<Permutation> = prefix.iter().chain(rows).map(|&v| graph.vertex(v)).collect();
        code.sort();
        code
    };

    if opts.threads <= 1 {
        let budget = Budget {
            max_nodes: opts.node_budget,
            deadline,
            cancel: None,
        };
        let mut code = None;
        let stats = dlx.search(&budget, |rows| {
            code = Some(finish(rows));
            false
        });
        return Ok(CodeSearch {
            code,
            nodes: stats.nodes,
            budget_exceeded: stats.budget_exceeded,
        });
    }

    // Split on the first branching column; each worker owns a copy of the matrix.
    let Some(first_rows) = dlx.branching_rows() else {
        return Ok(CodeSearch {
            code: Some(finish(&[])),
            nodes: 0,
            budget_exceeded: false,
        });
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads)
        .build()
        .map_err(|e| Error::TooLarge(format!("thread pool: {e}")))?;
    let stop = AtomicBool::new(false);
    let results: Vec<(usize, CodeSearch)> = pool.install(|| {
        first_rows
            .par_iter()
            .enumerate()
            .map(|(k, &row)| {
                let mut local = dlx.clone();
                let committed = local.select_row(row);
                debug_assert!(committed);
                let budget = Budget {
                    max_nodes: opts.node_budget,
                    deadline,
                    cancel: Some(&stop),
                };
                let mut code = None;
                let stats = local.search(&budget, |rows| {
                    let mut all = vec![row];
                    all.extend_from_slice(rows);
                    code = Some(finish(&all));
                    false
                });
                if code.is_some() {
                    stop.store(true, Ordering::Relaxed);
                }
                (
                    k,
                    CodeSearch {
                        code,
                        nodes: stats.nodes + 1,
                        budget_exceeded: stats.budget_exceeded && !stop.load(Ordering::Relaxed),
                    },
                )
            })
            .collect()
    });
    let nodes = results.iter().map(|(_, r)| r.nodes).sum();
    let budget_exceeded = results.iter().any(|(_, r)| r.budget_exceeded);
    // lowest branch index wins, matching the sequential order
    let code = results.into_iter().find_map(|(_, r)| r.code);
    Ok(CodeSearch {
        budget_exceeded: budget_exceeded && code.is_none(),
        code,
        nodes,
    })
}

/// Counts every perfect code of the Cayley graph of `tree` (no symmetry reduction).
pub fn count_perfect_codes(tree: &TranspositionTree) -> Result<u64> {
    check_size(tree.degree(), &SearchOptions::default())?;
    if tree.degree() > 5 {
        return Err(Error::TooLarge(format!(
            "counting is limited to degree 5, got {}",
            tree.degree()
        )));
    }
    let graph = CayleyGraph::new(tree)?;
    let mut dlx = sphere_cover(&graph);
    let stats = dlx.search(&Budget::default(), |_| true);
    Ok(stats.solutions)
}

pub fn find_eset(tree: &DiameterThreeTree, opts: &SearchOptions) -> Result<SearchOutcome> {
    let started = Instant::now();
    let found = find_perfect_code(tree.tree(), opts)?;
    let graph_check = |code: &[Permutation]| -> Result<bool> {
        is_perfect_code(&CayleyGraph::new(tree.tree())?, code)
    };
    let (status, certificate) = match found.code {
        Some(code) => {
            if !graph_check(&code)? {
                return Err(Error::Construction("exact cover returned a non-code".into()));
            }
            (SearchStatus::Found, Some(PackingCertificate::one_sphere(tree, code)))
        }
        None if found.budget_exceeded => (SearchStatus::BestEffort, None),
        None => (SearchStatus::NoneExhaustive, None),
    };
    Ok(SearchOutcome {
        status,
        certificate,
        nodes_explored: found.nodes,
        wall_budget_exceeded: found.budget_exceeded,
        symmetry_reduced: opts.symmetry,
        wall_time_ms: started.elapsed().as_millis(),
    })
}

pub fn count_esets(tree: &TranspositionTree) -> Result<u64> {
    count_perfect_codes(tree)
}

/// Best packing found by [`max_packing_graph`].
#[derive(Clone, Debug)]
pub struct PackingSearch {
    pub centers: Vec<Permutation>,
    pub covered: usize,
    /// The search tree was exhausted, so no larger packing exists.
    pub optimal: bool,
    pub nodes: u64,
}

struct PackingState<'a> {
    graph: &'a CayleyGraph,
    // 0 free, 1 covered, 2 left uncovered for good
    state: Vec<u8>,
    chosen: Vec<usize>,
    best: Vec<usize>,
    nodes: u64,
    max_nodes: Option<u64>,
    deadline: Option<Instant>,
    aborted: bool,
    target: usize,
}

impl PackingState<'_> {
    fn sphere_free(&self, u: usize) -> bool {
        self.graph.closed_sphere(u).all(|w| self.state[w] == 0)
    }

    fn coverable_free(&self) -> usize {
        (0..self.graph.order())
            .filter(|&v| self.state[v] == 0 && self.graph.closed_sphere(v).any(|u| self.sphere_free(u)))
            .count()
    }

    fn out_of_budget(&mut self) -> bool {
        if self.max_nodes.is_some_and(|m| self.nodes >= m)
            || (self.nodes % 256 == 0 && self.deadline.is_some_and(|d| Instant::now() >= d))
        {
            self.aborted = true;
        }
        self.aborted
    }

    fn recurse(&mut self, start: usize) {
        let deg = self.graph.degree();
        let Some(v) = (start..self.graph.order()).find(|&v| self.state[v] == 0) else {
            if self.chosen.len() > self.best.len() {
                self.best = self.chosen.clone();
            }
            return;
        };
        if self.best.len() >= self.target {
            return;
        }
        if self.chosen.len() + self.coverable_free() / deg <= self.best.len() {
            return;
        }
        let options: Vec<usize> = self.graph.closed_sphere(v).filter(|&u| self.sphere_free(u)).collect();
        for u in options {
            self.nodes += 1;
            if self.out_of_budget() {
                return;
            }
            let sphere: Vec<usize> = self.graph.closed_sphere(u).collect();
            for &w in &sphere {
                self.state[w] = 1;
            }
            self.chosen.push(u);
            self.recurse(v + 1);
            self.chosen.pop();
            for &w in &sphere {
                self.state[w] = 0;
            }
            if self.aborted || self.best.len() >= self.target {
                return;
            }
        }
        self.nodes += 1;
        if self.out_of_budget() {
            return;
        }
        self.state[v] = 2;
        self.recurse(v + 1);
        self.state[v] = 0;
    }
}

/// Branch and bound for a largest set of pairwise disjoint closed spheres.
///
/// Vertices are decided in rank order: the first undecided vertex is either
/// covered by one of the spheres through it or left uncovered for good. A node
/// is cut when `chosen + ⌊coverable / n⌋` cannot beat the incumbent.
pub fn max_packing_graph(tree: &TranspositionTree, opts: &SearchOptions) -> Result<PackingSearch> {
    check_size(tree.degree(), opts)?;
    let graph = CayleyGraph::new(tree)?;
    let mut search = PackingState {
        graph: &graph,
        state: vec![0; graph.order()],
        chosen: Vec::new(),
        best: Vec::new(),
        nodes: 0,
        max_nodes: opts.node_budget,
        deadline: opts.time_budget.map(|d| Instant::now() + d),
        aborted: false,
        target: usize::MAX,
    };
    search.recurse(0);
    let mut centers: Vec<Permutation> = search.best.iter().map(|&v| graph.vertex(v)).collect();
    centers.sort();
    Ok(PackingSearch {
        covered: centers.len() * tree.degree(),
        centers,
        optimal: !search.aborted,
        nodes: search.nodes,
    })
}

pub fn max_packing(tree: &DiameterThreeTree, opts: &SearchOptions) -> Result<SearchOutcome> {
    let started = Instant::now();
    let found = max_packing_graph(tree.tree(), opts)?;
    let status = if found.optimal {
        SearchStatus::Found
    } else {
        SearchStatus::BestEffort
    };
    Ok(SearchOutcome {
        status,
        certificate: Some(PackingCertificate::one_sphere(tree, found.centers)),
        nodes_explored: found.nodes,
        wall_budget_exceeded: !found.optimal,
        symmetry_reduced: false,
        wall_time_ms: started.elapsed().as_millis(),
    })
}

/// Adds as many disjoint closed spheres as possible to a partial packing
/// whose covered vertices are marked in `covered`, stopping early once
/// `target` new spheres are placed. `optimal` means the search was exhausted.
pub fn extend_packing(
    graph: &CayleyGraph,
    covered: &[bool],
    target: Option<usize>,
    opts: &SearchOptions,
) -> PackingSearch {
    let mut search = PackingState {
        graph,
        state: covered.iter().map(|&c| u8::from(c)).collect(),
        chosen: Vec::new(),
        best: Vec::new(),
        nodes: 0,
        max_nodes: opts.node_budget,
        deadline: opts.time_budget.map(|d| Instant::now() + d),
        aborted: false,
        target: target.unwrap_or(usize::MAX),
    };
    search.recurse(0);
    let reached = search.best.len() >= search.target;
    let mut centers: Vec<Permutation> = search.best.iter().map(|&v| graph.vertex(v)).collect();
    centers.sort();
    PackingSearch {
        covered: centers.len() * graph.degree(),
        centers,
        optimal: !search.aborted && !reached,
        nodes: search.nodes,
    }
}

/// Perfect code of the subgraph induced by `inside`, spheres clipped to it.
pub fn perfect_code_on_subgraph(graph: &CayleyGraph, inside: &[bool]) -> Option<Vec<Permutation>> {
    let index: Vec<Option<usize>> = {
        let mut next = 0;
        inside
            .iter()
            .map(|&b| {
                b.then(|| {
                    next += 1;
                    next - 1
                })
            })
            .collect()
    };
    let members: Vec<usize> = (0..graph.order()).filter(|&v| inside[v]).collect();
    let mut dlx = Dlx::new(members.len());
    for &v in &members {
        let row: Vec<usize> = graph.closed_sphere(v).filter_map(|w| index[w]).collect();
        dlx.add_row(&row);
    }
    let mut code = None;
    dlx.search(&Budget::default(), |rows| {
        let mut c: Vec<Permutation> = rows.iter().map(|&k| graph.vertex(members[k])).collect();
        c.sort();
        code = Some(c);
        false
    });
    code
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::Numbering;

    fn d3(r: usize, t: usize) -> DiameterThreeTree {
        DiameterThreeTree::build(r, t, Numbering::Original).unwrap()
    }

    #[test]
    fn no_esets_at_small_degree() {
        for (r, t) in [(2, 2), (3, 2), (3, 3), (4, 2)] {
            let out = find_eset(&d3(r, t), &SearchOptions::default()).unwrap();
            assert_eq!(out.status, SearchStatus::NoneExhaustive, "X3({r},{t})");
            assert!(out.certificate.is_none() && out.symmetry_reduced);
        }
    }

    #[test]
    fn symmetry_reduction_agrees() {
        let plain = SearchOptions {
            symmetry: false,
            ..Default::default()
        };
        for (r, t) in [(2, 2), (3, 2)] {
            let a = find_eset(&d3(r, t), &SearchOptions::default()).unwrap();
            let b = find_eset(&d3(r, t), &plain).unwrap();
            assert_eq!(a.status, b.status);
        }
        for n in [4, 5] {
            let star = TranspositionTree::star(n);
            let a = find_perfect_code(&star, &SearchOptions::default()).unwrap();
            let b = find_perfect_code(&star, &plain).unwrap();
            assert!(a.code.is_some() && b.code.is_some());
        }
    }

    #[test]
    fn parallel_matches_serial() {
        let threads = SearchOptions {
            threads: 4,
            ..Default::default()
        };
        let a = find_eset(&d3(3, 2), &threads).unwrap();
        assert_eq!(a.status, SearchStatus::NoneExhaustive);
        let star = TranspositionTree::star(5);
        let serial = find_perfect_code(&star, &SearchOptions::default()).unwrap();
        let parallel = find_perfect_code(&star, &threads).unwrap();
        assert_eq!(serial.code, parallel.code);
    }

    #[test]
    fn star_codes() {
        let star = TranspositionTree::star(4);
        let code = find_perfect_code(&star, &SearchOptions::default()).unwrap().code.unwrap();
        assert_eq!(code.len(), 6);
        let graph = CayleyGraph::new(&star).unwrap();
        assert!(crate::verify::is_perfect_code(&graph, &code).unwrap());
        assert_eq!(count_esets(&TranspositionTree::star(3)).unwrap(), 3);
    }

    #[test]
    fn size_limits() {
        let big = d3(4, 4);
        assert!(matches!(find_eset(&big, &SearchOptions::default()), Err(Error::TooLarge(_))));
    }

    #[test]
    fn max_packing_small() {
        let out = max_packing(&d3(2, 2), &SearchOptions::default()).unwrap();
        assert_eq!(out.status, SearchStatus::Found);
        let cert = out.certificate.unwrap();
        assert_eq!(cert.centers.len(), 5);
        let report = crate::verify::verify_packing(&d3(2, 2), &cert).unwrap();
        assert!(report.valid && report.covered_count == 20);
    }

    #[test]
    fn max_packing_monotone_in_budget() {
        let tree = d3(3, 2);
        let mut last = 0;
        for budget in [100, 1_000, 10_000] {
            let found = max_packing_graph(
                tree.tree(),
                &SearchOptions {
                    node_budget: Some(budget),
                    ..Default::default()
                },
            )
            .unwrap();
            assert!(found.centers.len() >= last);
            last = found.centers.len();
        }
        assert!(last >= 18);
    }

    #[test]
    fn subgraph_code() {
        let tree = d3(2, 2);
        let graph = CayleyGraph::new(tree.tree()).unwrap();
        let comps: Vec<crate::cayley::ComponentId> = ["12", "14", "23", "34"]
            .iter()
            .map(|c| crate::cayley::ComponentId(c.parse().unwrap()))
            .collect();
        let inside = crate::constructions::component_mask(&tree, &graph, &comps);
        let code = perfect_code_on_subgraph(&graph, &inside).unwrap();
        assert_eq!(code.len(), 4);
    }
}
