use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{normalize_edge, Edge, Graph, VertexLabel};
use crate::error::{Error, Result};

const MAX_RESTARTS: usize = 1000;

pub fn complete_graph(n: usize) -> Result<Graph> {
    if n == 0 {
        return Err(Error::param(
            "n",
            "complete graph needs at least one vertex",
        ));
    }
    let adjacency = (0..n)
        .map(|v| (0..n).filter(|&w| w != v).collect())
        .collect();
    Graph::from_adjacency(adjacency)
}

/// `K_{k,l}` with the `k` left vertices first.
pub fn complete_bipartite(k: usize, l: usize) -> Result<Graph> {
    if k == 0 || l == 0 {
        return Err(Error::param("k, l", "both parts must be nonempty"));
    }
    if k > l {
        return Err(Error::param(
            "k",
            format!("left part ({k}) larger than right part ({l}); swap the arguments"),
        ));
    }
    let edges: Vec<Edge> = (0..k)
        .flat_map(|i| (0..l).map(move |j| (i, k + j)))
        .collect();
    Graph::from_edges(k + l, &edges)
}

/// `K_{1,l}` with the center at index 0.
pub fn star_graph(l: usize) -> Result<Graph> {
    complete_bipartite(1, l)
}

pub fn path_graph(n: usize) -> Result<Graph> {
    let edges: Vec<Edge> = (1..n).map(|v| (v - 1, v)).collect();
    Graph::from_edges(n, &edges)
}

pub fn cycle_graph(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::param(
            "n",
            "a simple cycle needs at least 3 vertices",
        ));
    }
    let edges: Vec<Edge> = (0..n).map(|v| normalize_edge(v, (v + 1) % n)).collect();
    Graph::from_edges(n, &edges)
}

/// Block union; vertex indices of part `i` are shifted by the sizes of the
/// earlier parts and labeled with component id `i`. Level and boundary
/// labels are carried over.
pub fn disjoint_union(parts: &[Graph]) -> Result<Graph> {
    if parts.is_empty() {
        return Err(Error::param("parts", "need at least one graph"));
    }
    let mut adjacency = Vec::new();
    let mut labels = Vec::new();
    for (id, part) in parts.iter().enumerate() {
        let offset = adjacency.len();
        for v in 0..part.vertex_count() {
            adjacency.push(part.neighbors(v).iter().map(|w| w + offset).collect());
            labels.push(VertexLabel {
                component: Some(id),
                ..*part.label(v)
            });
        }
    }
    Graph::from_adjacency(adjacency)?.with_labels(labels)
}

/// Same vertices; `v ~ w` in the result iff `v != w` and `v !~ w` in `g`.
pub fn complement(g: &Graph) -> Graph {
    let n = g.vertex_count();
    let adjacency = (0..n)
        .map(|v| (0..n).filter(|&w| w != v && !g.is_adjacent(v, w)).collect())
        .collect();
    Graph {
        adjacency,
        labels: g.labels().to_vec(),
    }
}

/// Finite prefix of the rooted tree `T(kappa)`: level `n < depth` vertices
/// have `kappa[n]` children each. Entries of `kappa` past `depth - 1` are not
/// realized by the truncated graph but are kept so callers can reason about
/// the untruncated tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeSpec {
    pub kappa: Vec<usize>,
    pub depth: usize,
}

impl TreeSpec {
    pub fn new(kappa: Vec<usize>, depth: usize) -> Result<Self> {
        let spec = TreeSpec { kappa, depth };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(pos) = self.kappa.iter().position(|&k| k == 0) {
            return Err(Error::param(
                "kappa",
                format!("entry {pos} is zero; all branching numbers must be >= 1"),
            ));
        }
        if self.kappa.len() < self.depth {
            return Err(Error::param(
                "kappa",
                format!(
                    "{} entries given but depth {} needs at least that many",
                    self.kappa.len(),
                    self.depth
                ),
            ));
        }
        Ok(())
    }

    /// `|V_0| = 1`, `|V_{n+1}| = |V_n| * k_n`.
    pub fn level_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![1];
        for n in 0..self.depth {
            sizes.push(sizes[n] * self.kappa[n]);
        }
        sizes
    }

    pub fn vertex_count(&self) -> usize {
        self.level_sizes().iter().sum()
    }
}

/// Builds the truncated tree in level order (root is vertex 0, each level
/// occupies a contiguous index range, children of a vertex are contiguous).
pub fn rooted_tree(spec: &TreeSpec) -> Result<Graph> {
    spec.validate()?;
    let sizes = spec.level_sizes();
    let total: usize = sizes.iter().sum();
    let mut edges = Vec::with_capacity(total.saturating_sub(1));
    let mut labels = Vec::with_capacity(total);
    labels.push(VertexLabel {
        level: Some(0),
        boundary: spec.depth == 0,
        ..Default::default()
    });
    let mut level_start = 0;
    for n in 0..spec.depth {
        let next_start = level_start + sizes[n];
        for (i, parent) in (level_start..next_start).enumerate() {
            for c in 0..spec.kappa[n] {
                let child = next_start + i * spec.kappa[n] + c;
                edges.push((parent, child));
                labels.push(VertexLabel {
                    level: Some(n + 1),
                    boundary: n + 1 == spec.depth,
                    ..Default::default()
                });
            }
        }
        level_start = next_start;
    }
    Graph::from_edges(total, &edges)?.with_labels(labels)
}

fn check_regular_params(n: usize, d: usize) -> Result<()> {
    if n == 0 || d == 0 {
        return Err(Error::InfeasibleRegular {
            n,
            d,
            reason: "n and d must be positive".into(),
        });
    }
    if d >= n {
        return Err(Error::InfeasibleRegular {
            n,
            d,
            reason: "degree must be smaller than the vertex count".into(),
        });
    }
    if (n * d) % 2 == 1 {
        return Err(Error::InfeasibleRegular {
            n,
            d,
            reason: "n * d is odd".into(),
        });
    }
    Ok(())
}

/// Random simple `d`-regular graph from the pairing (configuration) model.
///
/// Points are paired one random pair at a time; pairs that would create a
/// loop or a multi-edge are redrawn, and the whole pairing restarts when no
/// admissible pair is left. Deterministic for a fixed seed.
pub fn random_regular(n: usize, d: usize, seed: u64) -> Result<Graph> {
    check_regular_params(n, d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_RESTARTS {
        let mut points: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
        if let Some(edges) = pair_points(n, &mut rng, &mut points) {
            return Graph::from_edges(n, &edges);
        }
    }
    Err(Error::RejectionBudgetExceeded {
        attempts: MAX_RESTARTS,
    })
}

/// Random simple `d`-regular bipartite graph with parts `0..m` and `m..2m`,
/// drawn from the bipartite pairing model with the same rejection scheme as
/// [`random_regular`].
pub fn random_regular_bipartite(m: usize, d: usize, seed: u64) -> Result<Graph> {
    if m == 0 || d == 0 || d > m {
        return Err(Error::InfeasibleRegular {
            n: 2 * m,
            d,
            reason: "bipartite regular graph needs 1 <= d <= m".into(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_RESTARTS {
        // Left points first, right points second; draws pick one of each.
        let mut left: Vec<usize> = (0..m).flat_map(|v| std::iter::repeat_n(v, d)).collect();
        let mut right: Vec<usize> = (m..2 * m).flat_map(|v| std::iter::repeat_n(v, d)).collect();
        if let Some(edges) = pair_bipartite(2 * m, &mut rng, &mut left, &mut right) {
            return Graph::from_edges(2 * m, &edges);
        }
    }
    Err(Error::RejectionBudgetExceeded {
        attempts: MAX_RESTARTS,
    })
}

fn admissible(adj: &[Vec<usize>], u: usize, v: usize) -> bool {
    u != v && !adj[u].contains(&v)
}

fn pair_points<R: Rng>(n: usize, rng: &mut R, points: &mut Vec<usize>) -> Option<Vec<Edge>> {
    let mut adj = vec![Vec::new(); n];
    let mut edges = Vec::with_capacity(points.len() / 2);
    while !points.is_empty() {
        let len = points.len();
        let mut chosen = None;
        for _ in 0..(32 + len) {
            let i = rng.gen_range(0..len);
            let j = rng.gen_range(0..len);
            if i != j && admissible(&adj, points[i], points[j]) {
                chosen = Some((i, j));
                break;
            }
        }
        let (i, j) = match chosen {
            Some(p) => p,
            None => {
                let candidates: Vec<(usize, usize)> = (0..len)
                    .flat_map(|i| ((i + 1)..len).map(move |j| (i, j)))
                    .filter(|&(i, j)| admissible(&adj, points[i], points[j]))
                    .collect();
                if candidates.is_empty() {
                    return None;
                }
                candidates[rng.gen_range(0..candidates.len())]
            }
        };
        let (u, v) = (points[i], points[j]);
        adj[u].push(v);
        adj[v].push(u);
        edges.push(normalize_edge(u, v));
        let (hi, lo) = if i > j { (i, j) } else { (j, i) };
        points.swap_remove(hi);
        points.swap_remove(lo);
    }
    Some(edges)
}

fn pair_bipartite<R: Rng>(
    n: usize,
    rng: &mut R,
    left: &mut Vec<usize>,
    right: &mut Vec<usize>,
) -> Option<Vec<Edge>> {
    let mut adj = vec![Vec::new(); n];
    let mut edges = Vec::with_capacity(left.len());
    while !left.is_empty() {
        let len = left.len();
        let mut chosen = None;
        for _ in 0..(32 + len) {
            let i = rng.gen_range(0..len);
            let j = rng.gen_range(0..len);
            if admissible(&adj, left[i], right[j]) {
                chosen = Some((i, j));
                break;
            }
        }
        let (i, j) = match chosen {
            Some(p) => p,
            None => {
                let candidates: Vec<(usize, usize)> = (0..len)
                    .flat_map(|i| (0..len).map(move |j| (i, j)))
                    .filter(|&(i, j)| admissible(&adj, left[i], right[j]))
                    .collect();
                if candidates.is_empty() {
                    return None;
                }
                candidates[rng.gen_range(0..candidates.len())]
            }
        };
        let (u, v) = (left[i], right[j]);
        adj[u].push(v);
        adj[v].push(u);
        edges.push((u, v));
        left.swap_remove(i);
        right.swap_remove(j);
    }
    Some(edges)
}
