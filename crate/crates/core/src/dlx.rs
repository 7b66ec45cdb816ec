//! Dancing-links exact cover (Knuth's Algorithm X) over primary columns.
//!
//! Column choice uses the minimum-remaining-values rule with ties broken by
//! the lowest column index, so the search order is fully deterministic.

use std::sync::atomic::{AtomicBool, Ordering};
use std::time::Instant;

const ROOT: usize = 0;

#[derive(Clone, Debug)]
pub struct Dlx {
    left: Vec<usize>,
    right: Vec<usize>,
    up: Vec<usize>,
    down: Vec<usize>,
    column: Vec<usize>,
    row_of: Vec<usize>,
    size: Vec<usize>,
    row_start: Vec<usize>,
    columns: usize,
}

/// Limits for one search; the first limit hit aborts the search.
#[derive(Default)]
pub struct Budget<'a> {
    pub max_nodes: Option<u64>,
    pub deadline: Option<Instant>,
    pub cancel: Option<&'a AtomicBool>,
}

impl Budget<'_> {
    fn exhausted(&self, nodes: u64) -> bool {
        if self.max_nodes.is_some_and(|m| nodes >= m) {
            return true;
        }
        if nodes % 1024 == 0 {
            if self.deadline.is_some_and(|d| Instant::now() >= d) {
                return true;
            }
            if self.cancel.is_some_and(|c| c.load(Ordering::Relaxed)) {
                return true;
            }
        }
        false
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Rows tried, i.e. nodes of the search tree below the root.
    pub nodes: u64,
    pub solutions: u64,
    /// The search stopped early, either on the budget or because the callback asked it to.
    pub stopped: bool,
    pub budget_exceeded: bool,
}

impl Dlx {
    pub fn new(columns: usize) -> Self {
        let count = columns + 1;
        let mut dlx = Dlx {
            left: (0..count).map(|i| (i + count - 1) % count).collect(),
            right: (0..count).map(|i| (i + 1) % count).collect(),
            up: (0..count).collect(),
            down: (0..count).collect(),
            column: (0..count).collect(),
            row_of: vec![usize::MAX; count],
            size: vec![0; count],
            row_start: Vec::new(),
            columns,
        };
        dlx.row_of[ROOT] = usize::MAX;
        dlx
    }

    pub fn columns(&self) -> usize {
        self.columns
    }

    pub fn rows(&self) -> usize {
        self.row_start.len()
    }

    /// Adds a row covering the given (0-based, distinct) columns; returns its id.
    pub fn add_row(&mut self, cols: &[usize]) -> usize {
        let row = self.row_start.len();
        let first = self.left.len();
        self.row_start.push(first);
        for (k, &c) in cols.iter().enumerate() {
            let header = c + 1;
            let node = self.left.len();
            let prev = if k == 0 { node } else { node - 1 };
            self.left.push(prev);
            self.right.push(first);
            if k > 0 {
                self.right[prev] = node;
                self.left[first] = node;
            }
            let above = self.up[header];
            self.up.push(above);
            self.down.push(header);
            self.down[above] = node;
            self.up[header] = node;
            self.column.push(header);
            self.row_of.push(row);
            self.size[header] += 1;
        }
        row
    }

    fn cover(&mut self, header: usize) {
        let (l, r) = (self.left[header], self.right[header]);
        self.right[l] = r;
        self.left[r] = l;
        let mut i = self.down[header];
        while i != header {
            let mut j = self.right[i];
            while j != i {
                let (u, d) = (self.up[j], self.down[j]);
                self.down[u] = d;
                self.up[d] = u;
                self.size[self.column[j]] -= 1;
                j = self.right[j];
            }
            i = self.down[i];
        }
    }

    fn uncover(&mut self, header: usize) {
        let mut i = self.up[header];
        while i != header {
            let mut j = self.left[i];
            while j != i {
                self.size[self.column[j]] += 1;
                let (u, d) = (self.up[j], self.down[j]);
                self.down[u] = j;
                self.up[d] = j;
                j = self.left[j];
            }
            i = self.up[i];
        }
        let (l, r) = (self.left[header], self.right[header]);
        self.right[l] = header;
        self.left[r] = header;
    }

    fn column_active(&self, header: usize) -> bool {
        self.right[self.left[header]] == header
    }

    /// Commits a row before searching. Returns false when one of its columns is
    /// already covered or removed, in which case nothing changes.
    pub fn select_row(&mut self, row: usize) -> bool {
        let start = self.row_start[row];
        let mut node = start;
        loop {
            let header = self.column[node];
            if !self.column_active(header) {
                return false;
            }
            // The row itself must still be linked into its column.
            let mut present = false;
            let mut i = self.down[header];
            while i != header {
                if i == node {
                    present = true;
                    break;
                }
                i = self.down[i];
            }
            if !present {
                return false;
            }
            node = self.right[node];
            if node == start {
                break;
            }
        }
        let mut node = start;
        loop {
            self.cover(self.column[node]);
            node = self.right[node];
            if node == start {
                break;
            }
        }
        true
    }

    /// Rows that still cover the first active column with fewest options.
    pub fn branching_rows(&self) -> Option<Vec<usize>> {
        let header = self.choose_column()?;
        let mut rows = Vec::new();
        let mut i = self.down[header];
        while i != header {
            rows.push(self.row_of[i]);
            i = self.down[i];
        }
        Some(rows)
    }

    fn choose_column(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        let mut c = self.right[ROOT];
        while c != ROOT {
            if best.map_or(true, |b| self.size[c] < self.size[b]) {
                best = Some(c);
                if self.size[c] == 0 {
                    break;
                }
            }
            c = self.right[c];
        }
        best
    }

    /// Enumerates exact covers. `on_solution` receives the chosen rows (in
    /// search order, excluding rows committed with [`Dlx::select_row`]) and
    /// returns whether to keep searching.
    pub fn search<F>(&mut self, budget: &Budget<'_>, mut on_solution: F) -> SearchStats
    where
        F: FnMut(&[usize]) -> bool,
    {
        let mut stats = SearchStats::default();
        let mut partial = Vec::new();
        self.recurse(budget, &mut on_solution, &mut partial, &mut stats);
        stats
    }

    fn recurse<F>(&mut self, budget: &Budget<'_>, on_solution: &mut F, partial: &mut Vec<usize>, stats: &mut SearchStats)
    where
        F: FnMut(&[usize]) -> bool,
    {
        let Some(header) = self.choose_column() else {
            stats.solutions += 1;
            if !on_solution(partial) {
                stats.stopped = true;
            }
            return;
        };
        if self.size[header] == 0 {
            return;
        }
        self.cover(header);
        let mut r = self.down[header];
        while r != header {
            stats.nodes += 1;
            if budget.exhausted(stats.nodes) {
                stats.stopped = true;
                stats.budget_exceeded = true;
                break;
            }
            partial.push(self.row_of[r]);
            let mut j = self.right[r];
            while j != r {
                self.cover(self.column[j]);
                j = self.right[j];
            }
            self.recurse(budget, on_solution, partial, stats);
            let mut j = self.left[r];
            while j != r {
                self.uncover(self.column[j]);
                j = self.left[j];
            }
            partial.pop();
            if stats.stopped {
                break;
            }
            r = self.down[r];
        }
        self.uncover(header);
    }
}
