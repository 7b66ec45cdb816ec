//! Cayley graphs of `S_n` generated by transposition trees.
//!
//! Adjacency swaps the contents of two positions: `g` and `g ∘ (i j)` are
//! joined by an edge of color `(i j)` whenever `ij` is a tree edge. Under
//! this convention every value relabeling `g ↦ x ∘ g` is a color-preserving
//! automorphism, which is what the symmetry arguments below rely on.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::{factorial, Permutation};
use crate::subset::Subset;
use crate::tree::{DiameterThreeTree, Transposition, TranspositionTree};

/// Largest degree that [`CayleyGraph`] will materialize.
pub const MAX_MATERIALIZED_DEGREE: usize = 9;

pub fn neighbors(tree: &TranspositionTree, g: &Permutation) -> Vec<(Transposition, Permutation)> {
    tree.edges()
        .iter()
        .map(|&c| (c, g.swap_positions(c.0, c.1)))
        .collect()
}

/// The 1-sphere `N[g]`: `g` followed by its neighbors in color order.
pub fn closed_sphere(tree: &TranspositionTree, g: &Permutation) -> Vec<Permutation> {
    std::iter::once(g.clone())
        .chain(neighbors(tree, g).into_iter().map(|(_, h)| h))
        .collect()
}

/// Breadth-first distance on the implicit graph.
pub fn graph_distance(tree: &TranspositionTree, g: &Permutation, h: &Permutation) -> Result<usize> {
    let n = tree.degree();
    if g.degree() != n {
        return Err(Error::DegreeMismatch(g.degree(), n));
    }
    if h.degree() != n {
        return Err(Error::DegreeMismatch(h.degree(), n));
    }
    let mut dist = HashMap::from([(g.clone(), 0usize)]);
    let mut queue = VecDeque::from([g.clone()]);
    while let Some(u) = queue.pop_front() {
        let d = dist[&u];
        if &u == h {
            return Ok(d);
        }
        for (_, w) in neighbors(tree, &u) {
            if !dist.contains_key(&w) {
                dist.insert(w.clone(), d + 1);
                queue.push_back(w);
            }
        }
    }
    unreachable!("transposition trees generate S_n")
}

/// Value relabeling `g ↦ x ∘ g`, an automorphism of every graph here.
pub fn translate(x: &Permutation, g: &Permutation) -> Permutation {
    x.compose(g).expect("equal degrees")
}

/// One copy of `Π(r,t)`: the values sitting on the first hub's side.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ComponentId(pub Subset);

impl ComponentId {
    pub fn left_values(self) -> Subset {
        self.0
    }
}

impl fmt::Display for ComponentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for ComponentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X({})", self.0)
    }
}

pub fn component_of(tree: &DiameterThreeTree, g: &Permutation) -> ComponentId {
    ComponentId(tree.left_positions().map(|k| g.at(k) as usize).collect())
}

/// All `C(n, r)` components in lexicographic order of their left values.
pub fn components(tree: &DiameterThreeTree) -> Vec<ComponentId> {
    Subset::combinations(tree.n(), tree.r())
        .into_iter()
        .map(ComponentId)
        .collect()
}

/// Number of pairs `{i, r + i}` contained in the component's left values.
pub fn component_type(tree: &DiameterThreeTree, c: ComponentId) -> Result<usize> {
    let (r, t) = (tree.r(), tree.t());
    if r != t {
        return Err(Error::UnbalancedTree { r, t });
    }
    Ok((1..=r)
        .filter(|&i| c.0.contains(i) && c.0.contains(r + i))
        .count())
}

fn arrangements(values: &[u8]) -> Vec<Vec<u8>> {
    let k = values.len();
    Permutation::all(k)
        .map(|p| p.word().iter().map(|&i| values[i as usize - 1]).collect())
        .collect()
}

/// Every vertex of a component, left arrangement major, both sides in lexicographic order.
pub fn enumerate_component(tree: &DiameterThreeTree, c: ComponentId) -> impl Iterator<Item = Permutation> {
    let left: Vec<u8> = c.0.iter().map(|v| v as u8).collect();
    let right: Vec<u8> = c.0.complement(tree.n()).iter().map(|v| v as u8).collect();
    let lefts = arrangements(&left);
    let rights = arrangements(&right);
    lefts.into_iter().flat_map(move |l| {
        rights.clone().into_iter().map(move |r| {
            let mut word = l.clone();
            word.extend(r);
            Permutation::from_word_unchecked(word)
        })
    })
}

/// A Cayley graph with every vertex indexed by its lexicographic rank.
#[derive(Clone, Debug)]
pub struct CayleyGraph {
    tree: TranspositionTree,
    n: usize,
    order: usize,
    words: Vec<u8>,
    adj: Vec<u32>,
}

impl CayleyGraph {
    pub fn new(tree: &TranspositionTree) -> Result<Self> {
        let n = tree.degree();
        if n > MAX_MATERIALIZED_DEGREE {
            return Err(Error::TooLarge(format!(
                "{n}! vertices; graphs are materialized only up to degree {MAX_MATERIALIZED_DEGREE}"
            )));
        }
        let order = factorial(n) as usize;
        let mut words = Vec::with_capacity(order * n);
        for p in Permutation::all(n) {
            words.extend_from_slice(p.word());
        }
        let deg = n - 1;
        let mut adj = vec![0u32; order * deg];
        let mut scratch = vec![0u8; n];
        for v in 0..order {
            for (c, e) in tree.edges().iter().enumerate() {
                scratch.copy_from_slice(&words[v * n..(v + 1) * n]);
                scratch.swap(e.0 - 1, e.1 - 1);
                adj[v * deg + c] = rank_word(&scratch) as u32;
            }
        }
        Ok(CayleyGraph {
            tree: tree.clone(),
            n,
            order,
            words,
            adj,
        })
    }

    pub fn tree(&self) -> &TranspositionTree {
        &self.tree
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    /// Number of vertices, `n!`.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn word(&self, v: usize) -> &[u8] {
        &self.words[v * self.n..(v + 1) * self.n]
    }

    pub fn vertex(&self, v: usize) -> Permutation {
        Permutation::from_word_unchecked(self.word(v).to_vec())
    }

    pub fn index_of(&self, g: &Permutation) -> Result<usize> {
        if g.degree() != self.n {
            return Err(Error::DegreeMismatch(g.degree(), self.n));
        }
        Ok(g.lex_rank() as usize)
    }

    /// Neighbor ranks in color order.
    pub fn neighbors(&self, v: usize) -> &[u32] {
        let deg = self.n - 1;
        &self.adj[v * deg..(v + 1) * deg]
    }

    pub fn closed_sphere(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        std::iter::once(v).chain(self.neighbors(v).iter().map(|&w| w as usize))
    }

    /// BFS distances from `source` to every vertex.
    pub fn distances_from(&self, source: usize) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.order];
        dist[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            for &w in self.neighbors(u) {
                if dist[w as usize] == u32::MAX {
                    dist[w as usize] = dist[u] + 1;
                    queue.push_back(w as usize);
                }
            }
        }
        dist
    }
}

fn rank_word(word: &[u8]) -> u64 {
    let n = word.len();
    let mut rank = 0u64;
    for i in 0..n {
        let smaller = word[i + 1..].iter().filter(|&&v| v < word[i]).count() as u64;
        rank = rank * (n - i) as u64 + smaller;
    }
    rank
}
