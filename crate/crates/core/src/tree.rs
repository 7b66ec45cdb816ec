//! Transposition trees: the generator sets of the Cayley graphs.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A transposition `(i j)` of positions, stored with `i < j` (1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transposition(pub usize, pub usize);

impl Transposition {
    pub fn new(i: usize, j: usize) -> Self {
        assert_ne!(i, j, "transposition needs two distinct points");
        Transposition(i.min(j), i.max(j))
    }

    pub fn contains(&self, k: usize) -> bool {
        self.0 == k || self.1 == k
    }
}

impl fmt::Display for Transposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.1 <= 9 {
            write!(f, "({}{})", self.0, self.1)
        } else {
            write!(f, "({},{})", self.0, self.1)
        }
    }
}

/// A tree on `{1, ..., n}` whose edges, read as transpositions, generate `S_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TranspositionTree {
    n: usize,
    edges: Vec<Transposition>,
}

impl TranspositionTree {
    pub fn new(n: usize, mut edges: Vec<Transposition>) -> Result<Self> {
        edges.sort();
        edges.dedup();
        let tree = TranspositionTree { n, edges };
        if n == 0 || tree.edges.len() + 1 != n || tree.edges.iter().any(|e| e.1 > n) {
            return Err(Error::Certificate(format!("edge list is not a tree on {n} points")));
        }
        if tree.eccentricities().iter().any(|&e| e == usize::MAX) {
            return Err(Error::Certificate(format!("edge list is not a tree on {n} points")));
        }
        Ok(tree)
    }

    /// The star `K_{1,n-1}` with hub at position 1.
    pub fn star(n: usize) -> Self {
        let edges = (2..=n).map(|j| Transposition::new(1, j)).collect();
        TranspositionTree::new(n, edges).expect("star is a tree")
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    /// Edges in lexicographic order; this order indexes the edge colors.
    pub fn edges(&self) -> &[Transposition] {
        &self.edges
    }

    pub fn color_index(&self, color: Transposition) -> Option<usize> {
        self.edges.iter().position(|&e| e == color)
    }

    fn eccentricities(&self) -> Vec<usize> {
        let mut adj = vec![Vec::new(); self.n + 1];
        for e in &self.edges {
            adj[e.0].push(e.1);
            adj[e.1].push(e.0);
        }
        (1..=self.n)
            .map(|s| {
                let mut dist = vec![usize::MAX; self.n + 1];
                dist[s] = 0;
                let mut queue = VecDeque::from([s]);
                while let Some(u) = queue.pop_front() {
                    for &w in &adj[u] {
                        if dist[w] == usize::MAX {
                            dist[w] = dist[u] + 1;
                            queue.push_back(w);
                        }
                    }
                }
                dist[1..].iter().copied().max().unwrap_or(0)
            })
            .collect()
    }

    pub fn diameter(&self) -> usize {
        self.eccentricities().into_iter().max().unwrap_or(0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Numbering {
    /// Hubs `r` and `r + 1`; leaves `1..r-1` on the first hub.
    Original,
    /// Hubs `1` and `r + 1`; leaves `2..=r` on the first hub.
    Renumbered,
}

impl fmt::Display for Numbering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Numbering::Original => "original",
            Numbering::Renumbered => "renumbered",
        })
    }
}

impl FromStr for Numbering {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "original" => Ok(Numbering::Original),
            "renumbered" => Ok(Numbering::Renumbered),
            other => Err(Error::Certificate(format!("unknown numbering {other:?}"))),
        }
    }
}

/// The diameter-3 tree with hub degrees `r` and `t` joined by the edge `ε`.
///
/// Under both numberings the first hub's side occupies positions `1..=r`
/// and the second hub's side occupies `r+1..=n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiameterThreeTree {
    r: usize,
    t: usize,
    numbering: Numbering,
    tree: TranspositionTree,
    left_hub: usize,
    right_hub: usize,
}

impl DiameterThreeTree {
    pub fn build(r: usize, t: usize, numbering: Numbering) -> Result<Self> {
        if r < 2 || t < 2 {
            return Err(Error::BadTreeShape { r, t });
        }
        let n = r + t;
        let right_hub = r + 1;
        let left_hub = match numbering {
            Numbering::Original => r,
            Numbering::Renumbered => 1,
        };
        let mut edges = vec![Transposition::new(left_hub, right_hub)];
        edges.extend((1..=r).filter(|&k| k != left_hub).map(|k| Transposition::new(k, left_hub)));
        edges.extend((r + 2..=n).map(|k| Transposition::new(right_hub, k)));
        let tree = TranspositionTree::new(n, edges)?;
        debug_assert_eq!(tree.diameter(), 3);
        Ok(DiameterThreeTree {
            r,
            t,
            numbering,
            tree,
            left_hub,
            right_hub,
        })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn n(&self) -> usize {
        self.r + self.t
    }

    pub fn numbering(&self) -> Numbering {
        self.numbering
    }

    pub fn tree(&self) -> &TranspositionTree {
        &self.tree
    }

    pub fn epsilon(&self) -> Transposition {
        Transposition::new(self.left_hub, self.right_hub)
    }

    pub fn left_hub(&self) -> usize {
        self.left_hub
    }

    pub fn right_hub(&self) -> usize {
        self.right_hub
    }

    pub fn left_positions(&self) -> std::ops::RangeInclusive<usize> {
        1..=self.r
    }

    pub fn right_positions(&self) -> std::ops::RangeInclusive<usize> {
        self.r + 1..=self.n()
    }

    /// Leaves attached to the first hub.
    pub fn left_leaves(&self) -> Vec<usize> {
        self.left_positions().filter(|&k| k != self.left_hub).collect()
    }

    pub fn right_leaves(&self) -> Vec<usize> {
        self.right_positions().filter(|&k| k != self.right_hub).collect()
    }
}

impl fmt::Display for DiameterThreeTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X3({},{}) [{}]", self.r, self.t, self.numbering)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edge_string(tree: &DiameterThreeTree) -> Vec<String> {
        tree.tree()
            .edges()
            .iter()
            .map(|e| format!("{}{}", e.0, e.1))
            .collect()
    }

    #[test]
    fn original_numbering() {
        let t22 = DiameterThreeTree::build(2, 2, Numbering::Original).unwrap();
        assert_eq!(edge_string(&t22), ["12", "23", "34"]);
        assert_eq!(t22.epsilon(), Transposition(2, 3));

        let t32 = DiameterThreeTree::build(3, 2, Numbering::Original).unwrap();
        assert_eq!(edge_string(&t32), ["13", "23", "34", "45"]);
        assert_eq!(t32.epsilon(), Transposition(3, 4));
    }

    #[test]
    fn renumbered_numbering() {
        let t33 = DiameterThreeTree::build(3, 3, Numbering::Renumbered).unwrap();
        assert_eq!(edge_string(&t33), ["12", "13", "14", "45", "46"]);
        assert_eq!(t33.epsilon(), Transposition(1, 4));
    }

    #[test]
    fn diameter_is_three() {
        for r in 2..=5 {
            for t in 2..=5 {
                for numbering in [Numbering::Original, Numbering::Renumbered] {
                    let tree = DiameterThreeTree::build(r, t, numbering).unwrap();
                    assert_eq!(tree.tree().diameter(), 3);
                    assert_eq!(tree.tree().edges().len(), r + t - 1);
                }
            }
        }
    }

    #[test]
    fn rejects_small_hubs() {
        assert!(DiameterThreeTree::build(1, 3, Numbering::Original).is_err());
        assert!(DiameterThreeTree::build(3, 1, Numbering::Renumbered).is_err());
    }

    #[test]
    fn star_and_validation() {
        let star = TranspositionTree::star(4);
        assert_eq!(star.diameter(), 2);
        assert!(TranspositionTree::new(4, vec![Transposition::new(1, 2), Transposition::new(3, 4)]).is_err());
    }
}
