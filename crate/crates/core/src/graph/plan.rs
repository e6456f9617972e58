//! Staging edge additions so that every stage keeps the normalized Laplacian
//! change block-structured.
//!
//! A stage adding edges to `g` is admissible when, with `d` and `d'` the
//! degrees before and after:
//!
//! * (i)   every vertex gains at most one edge;
//! * (ii)  no two vertices adjacent in `g` both gain;
//! * (iii) among `u ~ v ~ w` (`u != w`) in `g`, at most one gains.
//!
//! Equivalently the endpoints touched by a stage are pairwise at distance at
//! least 3 in `g`.

use super::{normalize_edge, Edge, Graph};
use crate::error::{Error, Result};

/// Which vertex of each component the connecting edges attach to.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum ConnectorChoice {
    /// Entry and exit are both the lowest-index vertex of the component.
    #[default]
    LowestIndex,
    /// `(entry, exit)` per component, in component order.
    Explicit(Vec<(usize, usize)>),
}

/// Ordered edge sets, each admissible for the graph accumulated before it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhasePlan {
    pub base: Graph,
    pub phases: Vec<Vec<Edge>>,
}

impl PhasePlan {
    /// Cumulative graphs: `base`, then `base` plus phase 1, and so on.
    pub fn stages(&self) -> Result<Vec<Graph>> {
        let mut out = vec![self.base.clone()];
        for phase in &self.phases {
            let next = out.last().expect("nonempty").with_added_edges(phase)?;
            out.push(next);
        }
        Ok(out)
    }

    pub fn result(&self) -> Result<Graph> {
        Ok(self.stages()?.pop().expect("nonempty"))
    }

    pub fn added_edges(&self) -> Vec<Edge> {
        self.phases.iter().flatten().copied().collect()
    }
}

/// Checks conditions (i)-(iii) for passing from `g` to `g_prime` in one step.
pub fn check_edge_addition(g: &Graph, g_prime: &Graph) -> Result<()> {
    let n = g.vertex_count();
    if g_prime.vertex_count() != n {
        return Err(Error::param(
            "g_prime",
            format!("{} vertices, expected {n}", g_prime.vertex_count()),
        ));
    }
    if let Some((u, v)) = g.edges().find(|&(u, v)| !g_prime.is_adjacent(u, v)) {
        return Err(Error::NotSupergraph(u, v));
    }
    let gain: Vec<usize> = (0..n).map(|v| g_prime.degree(v) - g.degree(v)).collect();
    if let Some(v) = gain.iter().position(|&x| x > 1) {
        return Err(Error::ConditionViolation {
            condition: "i",
            vertices: vec![v],
        });
    }
    if let Some((v, w)) = g.edges().find(|&(v, w)| gain[v] + gain[w] > 1) {
        return Err(Error::ConditionViolation {
            condition: "ii",
            vertices: vec![v, w],
        });
    }
    for v in 0..n {
        let nbrs = g.neighbors(v);
        for (i, &u) in nbrs.iter().enumerate() {
            for &w in &nbrs[i + 1..] {
                if gain[u] + gain[v] + gain[w] > 1 {
                    return Err(Error::ConditionViolation {
                        condition: "iii",
                        vertices: vec![u, v, w],
                    });
                }
            }
        }
    }
    Ok(())
}

fn validate_new_edges(g: &Graph, new_edges: &[Edge]) -> Result<Vec<Edge>> {
    let n = g.vertex_count();
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::with_capacity(new_edges.len());
    for &(u, v) in new_edges {
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
        let e = normalize_edge(u, v);
        if g.is_adjacent(u, v) || !seen.insert(e) {
            return Err(Error::DuplicateEdge(e.0, e.1));
        }
        out.push(e);
    }
    Ok(out)
}

/// Splits `new_edges` into admissible phases by greedy first-fit.
///
/// Two edges conflict when they share an endpoint or some pair of their
/// endpoints is within distance 2 in the graph accumulated so far. Edges are
/// scanned in the given order. An edge whose own endpoints are already at
/// distance 2 can never be added admissibly and is reported as
/// [`Error::EdgeNotAddable`].
pub fn plan_edge_addition(g: &Graph, new_edges: &[Edge]) -> Result<PhasePlan> {
    let mut remaining = validate_new_edges(g, new_edges)?;
    let n = g.vertex_count();
    let mut current = g.clone();
    let mut phases = Vec::new();
    while !remaining.is_empty() {
        let mut blocked = vec![false; n];
        let mut phase = Vec::new();
        let mut deferred = Vec::new();
        for (a, b) in remaining {
            if blocked[a] || blocked[b] {
                deferred.push((a, b));
                continue;
            }
            let ball_a = current.ball2(a);
            if ball_a.binary_search(&b).is_ok() {
                deferred.push((a, b));
                continue;
            }
            for x in ball_a.into_iter().chain(current.ball2(b)) {
                blocked[x] = true;
            }
            phase.push((a, b));
        }
        if phase.is_empty() {
            let (a, b) = deferred[0];
            return Err(Error::EdgeNotAddable(a, b));
        }
        current = current.with_added_edges(&phase)?;
        phases.push(phase);
        remaining = deferred;
    }
    Ok(PhasePlan {
        base: g.clone(),
        phases,
    })
}

/// Edges joining component `n` to component `n + 1` (components ordered by
/// smallest vertex), from the exit vertex of the first to the entry vertex
/// of the second.
pub fn chain_connectors(g: &Graph, choice: &ConnectorChoice) -> Result<Vec<Edge>> {
    let components = g.components();
    let ends: Vec<(usize, usize)> = match choice {
        ConnectorChoice::LowestIndex => components.iter().map(|c| (c[0], c[0])).collect(),
        ConnectorChoice::Explicit(ends) => {
            if ends.len() != components.len() {
                return Err(Error::param(
                    "connectors",
                    format!(
                        "{} (entry, exit) pairs for {} components",
                        ends.len(),
                        components.len()
                    ),
                ));
            }
            for (c, &(entry, exit)) in components.iter().zip(ends) {
                if c.binary_search(&entry).is_err() || c.binary_search(&exit).is_err() {
                    return Err(Error::param(
                        "connectors",
                        format!(
                            "({entry}, {exit}) not inside component starting at {}",
                            c[0]
                        ),
                    ));
                }
            }
            ends.clone()
        }
    };
    Ok(ends
        .windows(2)
        .map(|w| normalize_edge(w[0].1, w[1].0))
        .collect())
}
