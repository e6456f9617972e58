//! Finite simple undirected graphs and the graph families used throughout the
//! crate.
//!
//! A [`Graph`] stores sorted adjacency lists and a per-vertex [`VertexLabel`]
//! (component id, tree level, truncation boundary flag). Construction always
//! validates simplicity and symmetry, so every `Graph` value satisfies them.

mod generators;
mod plan;

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use generators::{
    complement, complete_bipartite, complete_graph, cycle_graph, disjoint_union, path_graph,
    random_regular, random_regular_bipartite, rooted_tree, star_graph, TreeSpec,
};
pub use plan::{
    chain_connectors, check_edge_addition, plan_edge_addition, ConnectorChoice, PhasePlan,
};

/// An undirected edge with `0 <= .0 < .1`.
pub type Edge = (usize, usize);

/// Optional metadata attached to a vertex by the generators.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexLabel {
    pub component: Option<usize>,
    pub level: Option<usize>,
    /// Leaf created by truncating an infinite tree; its degree is an artifact.
    pub boundary: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    labels: Vec<VertexLabel>,
}

pub(crate) fn normalize_edge(u: usize, v: usize) -> Edge {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

impl Graph {
    /// Graph with `n` vertices and no edges.
    pub fn empty(n: usize) -> Self {
        Graph {
            adjacency: vec![Vec::new(); n],
            labels: vec![VertexLabel::default(); n],
        }
    }

    /// Builds a graph from an edge list. Edges may be given in either
    /// orientation but must not repeat.
    pub fn from_edges(n: usize, edges: &[Edge]) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::VertexOutOfRange {
                        vertex: x,
                        vertex_count: n,
                    });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for (v, list) in adjacency.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|p| p[0] == p[1]) {
                let (a, b) = normalize_edge(v, w[0]);
                return Err(Error::DuplicateEdge(a, b));
            }
        }
        Ok(Graph {
            labels: vec![VertexLabel::default(); n],
            adjacency,
        })
    }

    /// Builds a graph from explicit adjacency lists, checking every invariant.
    pub fn from_adjacency(mut adjacency: Vec<Vec<usize>>) -> Result<Self> {
        let n = adjacency.len();
        for (v, list) in adjacency.iter_mut().enumerate() {
            list.sort_unstable();
            for (i, &w) in list.iter().enumerate() {
                if w >= n {
                    return Err(Error::VertexOutOfRange {
                        vertex: w,
                        vertex_count: n,
                    });
                }
                if w == v {
                    return Err(Error::SelfLoop(v));
                }
                if i > 0 && list[i - 1] == w {
                    let (a, b) = normalize_edge(v, w);
                    return Err(Error::DuplicateEdge(a, b));
                }
            }
        }
        for v in 0..n {
            for &w in &adjacency[v] {
                if adjacency[w].binary_search(&v).is_err() {
                    return Err(Error::Asymmetric(v, w));
                }
            }
        }
        Ok(Graph {
            labels: vec![VertexLabel::default(); n],
            adjacency,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn is_adjacent(&self, v: usize, w: usize) -> bool {
        self.adjacency[v].binary_search(&w).is_ok()
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn label(&self, v: usize) -> &VertexLabel {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[VertexLabel] {
        &self.labels
    }

    pub fn level(&self, v: usize) -> Option<usize> {
        self.labels[v].level
    }

    pub fn has_labels(&self) -> bool {
        self.labels.iter().any(|l| *l != VertexLabel::default())
    }

    pub fn with_labels(mut self, labels: Vec<VertexLabel>) -> Result<Self> {
        if labels.len() != self.vertex_count() {
            return Err(Error::param(
                "labels",
                format!(
                    "{} labels for {} vertices",
                    labels.len(),
                    self.vertex_count()
                ),
            ));
        }
        self.labels = labels;
        Ok(self)
    }

    /// Same vertex set and edge set; labels are ignored.
    pub fn same_edges(&self, other: &Graph) -> bool {
        self.adjacency == other.adjacency
    }

    /// First isolated vertex, if any.
    pub fn isolated_vertex(&self) -> Option<usize> {
        self.adjacency.iter().position(Vec::is_empty)
    }

    /// Connected component id per vertex, numbered by smallest member.
    pub fn component_ids(&self) -> Vec<usize> {
        let n = self.vertex_count();
        let mut ids = vec![usize::MAX; n];
        let mut next = 0;
        let mut queue = VecDeque::new();
        for start in 0..n {
            if ids[start] != usize::MAX {
                continue;
            }
            ids[start] = next;
            queue.push_back(start);
            while let Some(v) = queue.pop_front() {
                for &w in &self.adjacency[v] {
                    if ids[w] == usize::MAX {
                        ids[w] = next;
                        queue.push_back(w);
                    }
                }
            }
            next += 1;
        }
        ids
    }

    /// Vertex lists of the connected components, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let ids = self.component_ids();
        let count = ids.iter().copied().max().map_or(0, |m| m + 1);
        let mut out = vec![Vec::new(); count];
        for (v, id) in ids.into_iter().enumerate() {
            out[id].push(v);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.vertex_count() <= 1 || self.component_ids().iter().all(|&c| c == 0)
    }

    /// Vertices at distance at most 2 from `v`, including `v`.
    pub fn ball2(&self, v: usize) -> Vec<usize> {
        let mut out = vec![v];
        for &w in &self.adjacency[v] {
            out.push(w);
            out.extend_from_slice(&self.adjacency[w]);
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Adds edges, failing on loops, duplicates or edges already present.
    pub fn with_added_edges(&self, edges: &[Edge]) -> Result<Graph> {
        let mut all: Vec<Edge> = self.edges().collect();
        all.extend(edges.iter().map(|&(u, v)| normalize_edge(u, v)));
        let mut g = Graph::from_edges(self.vertex_count(), &all)?;
        g.labels = self.labels.clone();
        Ok(g)
    }

    /// Checks the structural invariants. Always true for values built through
    /// the public constructors; exposed for tests and external inputs.
    pub fn validate(&self) -> Result<()> {
        Graph::from_adjacency(self.adjacency.clone()).map(|_| ())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_edges_rejects_loops_and_duplicates() {
        assert_eq!(Graph::from_edges(3, &[(1, 1)]), Err(Error::SelfLoop(1)));
        assert_eq!(
            Graph::from_edges(3, &[(0, 1), (1, 0)]),
            Err(Error::DuplicateEdge(0, 1))
        );
        assert!(matches!(
            Graph::from_edges(2, &[(0, 2)]),
            Err(Error::VertexOutOfRange { vertex: 2, .. })
        ));
    }

    #[test]
    fn from_adjacency_checks_symmetry() {
        assert_eq!(
            Graph::from_adjacency(vec![vec![1], vec![]]),
            Err(Error::Asymmetric(0, 1))
        );
        let g = Graph::from_adjacency(vec![vec![2, 1], vec![0], vec![0]]).unwrap();
        assert_eq!(g.neighbors(0), &[1, 2]);
    }

    #[test]
    fn components_and_balls() {
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (4, 5)]).unwrap();
        assert_eq!(g.components(), vec![vec![0, 1, 2, 3], vec![4, 5]]);
        assert!(!g.is_connected());
        assert_eq!(g.ball2(0), vec![0, 1, 2]);
        assert_eq!(g.ball2(2), vec![0, 1, 2, 3]);
    }

    #[test]
    fn with_added_edges_rejects_existing() {
        let g = Graph::from_edges(3, &[(0, 1)]).unwrap();
        assert_eq!(
            g.with_added_edges(&[(1, 0)]),
            Err(Error::DuplicateEdge(0, 1))
        );
        assert_eq!(g.with_added_edges(&[(1, 2)]).unwrap().edge_count(), 2);
    }
}
