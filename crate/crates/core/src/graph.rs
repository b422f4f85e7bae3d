//! Sparse weighted parity-check matrix viewed as a Tanner graph.

use crate::error::{Error, Result};
use crate::gf::Symbol;

/// A nonzero entry of a parity-check matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub check: usize,
    pub var: usize,
    pub weight: Symbol,
}

/// Sparse matrix stored as a coordinate list sorted by `(check, var)`, with
/// adjacency indices in both directions. Rows are check nodes, columns are
/// variable nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TannerGraph {
    n_checks: usize,
    n_vars: usize,
    edges: Vec<Edge>,
    check_ptr: Vec<usize>,
    var_edges: Vec<Vec<usize>>,
}

impl TannerGraph {
    /// Builds a graph from an arbitrary list of entries. Duplicate coordinates
    /// are rejected.
    pub fn from_edges(n_checks: usize, n_vars: usize, mut edges: Vec<Edge>) -> Result<Self> {
        edges.sort_unstable_by_key(|e| (e.check, e.var));
        for w in edges.windows(2) {
            if (w[0].check, w[0].var) == (w[1].check, w[1].var) {
                return Err(Error::Construction(format!(
                    "duplicate entry at ({}, {})",
                    w[0].check, w[0].var
                )));
            }
        }
        if let Some(e) = edges.iter().find(|e| e.check >= n_checks || e.var >= n_vars) {
            return Err(Error::Construction(format!(
                "entry ({}, {}) outside {}x{} matrix",
                e.check, e.var, n_checks, n_vars
            )));
        }
        let mut check_ptr = vec![0; n_checks + 1];
        for e in &edges {
            check_ptr[e.check + 1] += 1;
        }
        for c in 0..n_checks {
            check_ptr[c + 1] += check_ptr[c];
        }
        let mut var_edges = vec![Vec::new(); n_vars];
        for (k, e) in edges.iter().enumerate() {
            var_edges[e.var].push(k);
        }
        Ok(Self {
            n_checks,
            n_vars,
            edges,
            check_ptr,
            var_edges,
        })
    }

    /// Binary matrix from per-row column lists; all weights are 1.
    pub fn from_rows(n_vars: usize, rows: &[Vec<usize>]) -> Result<Self> {
        let edges = rows
            .iter()
            .enumerate()
            .flat_map(|(c, cols)| {
                cols.iter().map(move |&v| Edge {
                    check: c,
                    var: v,
                    weight: 1,
                })
            })
            .collect();
        Self::from_edges(rows.len(), n_vars, edges)
    }

    pub fn n_checks(&self) -> usize {
        self.n_checks
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// All entries in `(check, var)` order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Entries of one check node, sorted by variable index.
    pub fn check_edges(&self, check: usize) -> &[Edge] {
        &self.edges[self.check_ptr[check]..self.check_ptr[check + 1]]
    }

    /// Indices into [`edges`](Self::edges) of one variable node, sorted by check.
    pub fn var_edge_ids(&self, var: usize) -> &[usize] {
        &self.var_edges[var]
    }

    pub fn var_checks(&self, var: usize) -> impl Iterator<Item = usize> + '_ {
        self.var_edges[var].iter().map(|&k| self.edges[k].check)
    }

    pub fn check_vars(&self, check: usize) -> impl Iterator<Item = usize> + '_ {
        self.check_edges(check).iter().map(|e| e.var)
    }

    pub fn check_degree(&self, check: usize) -> usize {
        self.check_ptr[check + 1] - self.check_ptr[check]
    }

    pub fn var_degree(&self, var: usize) -> usize {
        self.var_edges[var].len()
    }

    /// Index of the entry at `(check, var)`, if nonzero.
    pub fn find_edge(&self, check: usize, var: usize) -> Option<usize> {
        if check >= self.n_checks {
            return None;
        }
        let lo = self.check_ptr[check];
        self.check_edges(check)
            .binary_search_by_key(&var, |e| e.var)
            .ok()
            .map(|k| lo + k)
    }

    pub fn weight(&self, check: usize, var: usize) -> Option<Symbol> {
        self.find_edge(check, var).map(|k| self.edges[k].weight)
    }

    /// Overwrites the weight of an existing entry.
    pub(crate) fn set_weight(&mut self, edge: usize, weight: Symbol) {
        self.edges[edge].weight = weight;
    }

    /// Copy with all weights replaced by `f(edge_index, edge)`.
    pub(crate) fn map_weights(&self, mut f: impl FnMut(usize, &Edge) -> Symbol) -> Self {
        let mut out = self.clone();
        for (k, e) in out.edges.iter_mut().enumerate() {
            e.weight = f(k, &self.edges[k]);
        }
        out
    }

    /// Same topology, all weights set to 1.
    pub fn unlabeled(&self) -> Self {
        self.map_weights(|_, _| 1)
    }

    /// Dense 0/1 rows; intended for small matrices only.
    pub fn to_dense(&self) -> Result<Vec<Vec<u8>>> {
        if self.n_checks.saturating_mul(self.n_vars) > crate::qc_codes::DENSE_LIMIT {
            return Err(Error::Capacity(format!(
                "dense view of {}x{} matrix",
                self.n_checks, self.n_vars
            )));
        }
        let mut rows = vec![vec![0u8; self.n_vars]; self.n_checks];
        for e in &self.edges {
            rows[e.check][e.var] = 1;
        }
        Ok(rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adjacency() {
        let g = TannerGraph::from_rows(4, &[vec![0, 2], vec![1, 2, 3], vec![]]).unwrap();
        assert_eq!(g.n_edges(), 5);
        assert_eq!(g.check_degree(1), 3);
        assert_eq!(g.check_degree(2), 0);
        assert_eq!(g.var_checks(2).collect::<Vec<_>>(), vec![0, 1]);
        assert_eq!(g.find_edge(1, 3), Some(4));
        assert_eq!(g.find_edge(0, 1), None);
    }

    #[test]
    fn rejects_duplicates() {
        assert!(TannerGraph::from_rows(3, &[vec![1, 1]]).is_err());
        assert!(TannerGraph::from_rows(3, &[vec![3]]).is_err());
    }
}
