use std::collections::VecDeque;

use crate::sparse::CsrMatrix;

/// Directed graph with an edge `i -> k` for every nonzero off-diagonal
/// entry `(i, k)`.
#[derive(Debug, Clone)]
pub struct ConnectivityGraph {
    n: usize,
    /// Reverse adjacency: `rev[k]` lists every `i` with an edge `i -> k`.
    rev: Vec<Vec<usize>>,
    edges: usize,
}

impl ConnectivityGraph {
    pub fn from_matrix(a: &CsrMatrix) -> Self {
        let n = a.dim();
        let mut rev = vec![Vec::new(); n];
        let mut edges = 0;
        for (i, k, _) in a.triplets() {
            if i != k {
                rev[k].push(i);
                edges += 1;
            }
        }
        ConnectivityGraph { n, rev, edges }
    }

    /// Builds from the union of the off-diagonal patterns of several
    /// matrices.
    pub fn from_union(parts: &[&CsrMatrix]) -> Self {
        let n = parts.first().map_or(0, |m| m.dim());
        let rows = (0..n)
            .map(|i| parts.iter().flat_map(|m| m.row(i)).map(|(j, v)| (j, v.abs())).collect())
            .collect();
        Self::from_matrix(&CsrMatrix::from_rows(n, rows))
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    /// Marks every vertex that has a directed path into `targets`
    /// (targets included).
    pub fn reaches(&self, targets: &[usize]) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::new();
        for &t in targets {
            if !seen[t] {
                seen[t] = true;
                queue.push_back(t);
            }
        }
        while let Some(k) = queue.pop_front() {
            for &i in &self.rev[k] {
                if !seen[i] {
                    seen[i] = true;
                    queue.push_back(i);
                }
            }
        }
        seen
    }
}

/// True iff every vertex of `n0` has a directed path to some vertex of
/// `nplus`. An empty `n0` is always connected.
pub fn connects(graph: &ConnectivityGraph, n0: &[usize], nplus: &[usize]) -> bool {
    if n0.is_empty() {
        return true;
    }
    let seen = graph.reaches(nplus);
    n0.iter().all(|&i| seen[i])
}

/// Vertices of `n0` that cannot reach `nplus`.
pub fn unconnected(graph: &ConnectivityGraph, n0: &[usize], nplus: &[usize]) -> Vec<usize> {
    let seen = graph.reaches(nplus);
    n0.iter().copied().filter(|&i| !seen[i]).collect()
}
