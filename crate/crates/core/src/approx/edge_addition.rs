//! Approximating `L' - L` when edges are added under conditions (i)-(iii).
//!
//! `L' - L = B + C + D` with `C` the new-edge entries, `D` the diagonal change
//! and `B` the change on old edges. Conditions (ii) and (iii) force `B` to be a
//! direct sum of star-shaped blocks `B_v = P_v + P_v^T`, one per vertex `v`
//! that gains an edge, supported on `v` and its old neighbors. Each block has
//! norm at most `1/d(v)`, so dropping the blocks of high-degree vertices costs
//! little.

use crate::certificate::{ApproximationCertificate, Method};
use crate::error::{Error, Result};
use crate::graph::{check_edge_addition, Graph};
use crate::operator::{normalized_laplacian, SparseOperator};

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeAdditionSplit {
    /// Change on old edges.
    pub b: SparseOperator,
    /// Entries of the added edges.
    pub c: SparseOperator,
    /// Diagonal change.
    pub d: SparseOperator,
    /// Vertices whose degree grows by one, ascending.
    pub v1: Vec<usize>,
}

/// The block `B_v` restricted to `H_v = {v} + N(v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeBlock {
    pub vertex: usize,
    /// Degree of `vertex` before the addition.
    pub degree: usize,
    /// `vertex` followed by its old neighbors.
    pub support: Vec<usize>,
    /// `|support| x |support|` matrix of `B` on the support.
    pub block: SparseOperator,
    /// Exact norm: the block is `[[0, p^T], [p, 0]]`, whose norm is `||p||`.
    pub norm: f64,
    /// The cruder estimate `2 ||P_v||`, itself at most `1/d(v)`.
    pub estimate: f64,
}

pub fn edge_addition_split(g: &Graph, g_prime: &Graph) -> Result<EdgeAdditionSplit> {
    check_edge_addition(g, g_prime)?;
    let l = normalized_laplacian(g)?;
    let n = g.vertex_count();
    let deg = |v: usize| g.degree(v) as f64;
    let deg2 = |v: usize| g_prime.degree(v) as f64;

    // Both Laplacians have unit diagonal, so this is the zero matrix whenever
    // L is defined.
    let d = SparseOperator::from_triplets(
        n,
        n,
        (0..n).map(|v| (v, v, normalized_laplacian_diag(g_prime, v) - l.get(v, v))),
    )?;
    let mut b_entries = Vec::new();
    let mut c_entries = Vec::new();
    for v in 0..n {
        for &w in g_prime.neighbors(v) {
            if g.is_adjacent(v, w) {
                let val = 1.0 / (deg(v) * deg(w)).sqrt() - 1.0 / (deg2(v) * deg2(w)).sqrt();
                b_entries.push((v, w, val));
            } else {
                c_entries.push((v, w, -1.0 / (deg2(v) * deg2(w)).sqrt()));
            }
        }
    }
    let v1 = (0..n)
        .filter(|&v| g_prime.degree(v) == g.degree(v) + 1)
        .collect();
    Ok(EdgeAdditionSplit {
        b: SparseOperator::from_triplets(n, n, b_entries)?,
        c: SparseOperator::from_triplets(n, n, c_entries)?,
        d,
        v1,
    })
}

fn normalized_laplacian_diag(g: &Graph, v: usize) -> f64 {
    if g.degree(v) == 0 {
        0.0
    } else {
        1.0
    }
}

fn support(g: &Graph, v: usize) -> Vec<usize> {
    std::iter::once(v)
        .chain(g.neighbors(v).iter().copied())
        .collect()
}

/// Blocks of `B` on `H_v` for each `v` in `V1`.
pub fn edge_blocks(split: &EdgeAdditionSplit, g: &Graph) -> Result<Vec<EdgeBlock>> {
    split
        .v1
        .iter()
        .map(|&v| {
            let support = support(g, v);
            let block = split.b.restrict(&support, &support)?;
            let row_norm = (1..support.len())
                .map(|j| block.get(0, j).powi(2))
                .sum::<f64>()
                .sqrt();
            Ok(EdgeBlock {
                vertex: v,
                degree: g.degree(v),
                support,
                block,
                norm: row_norm,
                estimate: 2.0 * row_norm,
            })
        })
        .collect()
}

/// Row `v` of `P_v` from its closed form,
/// `1/sqrt(d d(w)) - 1/sqrt((d+1) d'(w))` for each old neighbor `w`.
pub fn p_row(g: &Graph, g_prime: &Graph, v: usize) -> Vec<(usize, f64)> {
    let d = g.degree(v) as f64;
    g.neighbors(v)
        .iter()
        .map(|&w| {
            let dw = g.degree(w) as f64;
            let dw2 = g_prime.degree(w) as f64;
            (w, 1.0 / (d * dw).sqrt() - 1.0 / ((d + 1.0) * dw2).sqrt())
        })
        .collect()
}

/// True iff the supports `H_v` (v in V1) are pairwise disjoint and `B` is
/// exactly the sum of its blocks on them.
pub fn block_orthogonality_check(split: &EdgeAdditionSplit, g: &Graph) -> bool {
    let n = g.vertex_count();
    let mut owner = vec![None; n];
    for &v in &split.v1 {
        for x in support(g, v) {
            if owner[x].replace(v).is_some() {
                return false;
            }
        }
    }
    let Ok(blocks) = edge_blocks(split, g) else {
        return false;
    };
    let mut sum = SparseOperator::zeros(n, n);
    for blk in &blocks {
        let Ok(embedded) = blk.block.embed(n, n, &blk.support, &blk.support) else {
            return false;
        };
        sum = match sum.add(&embedded) {
            Ok(s) => s,
            Err(_) => return false,
        };
    }
    sum == split.b
}

/// Keeps the blocks of vertices with `d(v) <= 1/eps` and drops the rest.
///
/// The target is `L' - L`; the approximant is `B~ + C + D`. Since the blocks
/// act on orthogonal subspaces the error is the largest dropped block norm.
pub fn approximate_edge_addition(
    split: &EdgeAdditionSplit,
    g: &Graph,
    g_prime: &Graph,
    eps: f64,
) -> Result<ApproximationCertificate> {
    if !(eps > 0.0) {
        return Err(Error::param("eps", format!("must be positive, got {eps}")));
    }
    let n = g.vertex_count();
    let threshold = 1.0 / eps;
    let mut kept = Vec::new();
    let mut bound: f64 = 0.0;
    let mut dropped = 0usize;
    for blk in edge_blocks(split, g)? {
        if blk.degree as f64 <= threshold {
            kept.extend(
                blk.block
                    .entries()
                    .map(|(r, c, v)| (blk.support[r], blk.support[c], v)),
            );
        } else {
            bound = bound.max(blk.norm);
            dropped += 1;
        }
    }
    let b_tilde = SparseOperator::from_triplets(n, n, kept)?;
    let approximant = b_tilde.add(&split.c)?.add(&split.d)?;
    let target = normalized_laplacian(g_prime)?.sub(&normalized_laplacian(g)?)?;
    let theoretical = ((1.0 / eps).ceil() as usize + 1).max(2);
    Ok(ApproximationCertificate::new(
        Method::EdgeAddition,
        target,
        approximant,
        theoretical,
        bound,
    )
    .with_param("eps", eps)
    .with_param("vertices", n)
    .with_param("gaining_vertices", split.v1.len())
    .with_param("dropped_blocks", dropped))
}
