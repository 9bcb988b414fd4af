use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::state::ProbabilityMatrix;

/// Undirected interaction graph; edges are stored as `(i, j)` with `i < j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteractionGraph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl InteractionGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let edges = edges
            .into_iter()
            .filter(|(i, j)| i != j)
            .map(|(i, j)| (i.min(j), i.max(j)))
            .collect();
        Self { n, edges }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&(i.min(j), i.max(j)))
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors(v).len()
    }

    /// Connected components, each sorted, in order of smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            let mut comp = vec![start];
            seen[start] = true;
            let mut k = 0;
            while k < comp.len() {
                for u in self.neighbors(comp[k]) {
                    if !seen[u] {
                        seen[u] = true;
                        comp.push(u);
                    }
                }
                k += 1;
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}

/// Edge `{i, j}` is present when either `p[i][j]` or `p[j][i]` exceeds
/// `eps`. Requires `0 < eps < 1/(2n)`.
pub fn extract_graph(p: &ProbabilityMatrix, eps: f64) -> Result<InteractionGraph> {
    let n = p.n();
    if !(eps > 0.0 && eps < 1.0 / (2.0 * n as f64)) {
        return Err(Error::out_of_range("graph_eps", eps, "(0, 1/(2n))"));
    }
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if p.get(i, j) > eps || p.get(j, i) > eps {
                edges.push((i, j));
            }
        }
    }
    Ok(InteractionGraph::new(n, edges))
}
