//! Rooted trees `T(kappa)` and truncation of their adjacency operators.
//!
//! Ordering vertices by level, `A = B + B^T` with `B` lower-triangular: column
//! `v` of `B` holds the edges from `v` to its children. Distinct columns have
//! disjoint supports, so `||B|| = sup_v ||B e_v||`, and dropping whole columns
//! costs exactly the largest dropped column norm. A level-`n` column has
//! squared norm `k_n / ((k_n + 1)(k_{n+1} + 1))` (`1/(k_1 + 1)` at the root),
//! which is below `eps^2` as soon as `k_{n+1} >= 1/eps^2`.

use serde::{Deserialize, Serialize};

use crate::certificate::{ApproximationCertificate, Method};
use crate::error::{Error, Result};
use crate::graph::{Graph, TreeSpec};
use crate::operator::{normalized_adjacency, SparseOperator};

fn levels(t: &Graph) -> Result<Vec<usize>> {
    (0..t.vertex_count())
        .map(|v| t.level(v).ok_or(Error::MissingLevel(v)))
        .collect()
}

/// The part of the normalized adjacency below the level order.
pub fn tree_triangular_split(t: &Graph) -> Result<SparseOperator> {
    let lv = levels(t)?;
    let a = normalized_adjacency(t)?;
    SparseOperator::from_triplets(
        a.rows(),
        a.cols(),
        a.entries().filter(|&(r, c, _)| lv[r] > lv[c]),
    )
}

/// Euclidean norm of every column.
pub fn column_norms(m: &SparseOperator) -> Vec<f64> {
    let mut sq = vec![0.0; m.cols()];
    for (_, c, v) in m.entries() {
        sq[c] += v * v;
    }
    sq.into_iter().map(f64::sqrt).collect()
}

/// Branching number of the children of a level-`n` vertex (0 past the depth).
fn grandchildren(spec: &TreeSpec, n: usize) -> usize {
    if n + 1 < spec.depth {
        spec.kappa[n + 1]
    } else {
        0
    }
}

/// Closed-form squared norm of a level-`n` column of `B`.
pub fn column_norm_sq(spec: &TreeSpec, n: usize) -> f64 {
    if n >= spec.depth {
        return 0.0;
    }
    let next = grandchildren(spec, n) as f64 + 1.0;
    if n == 0 {
        1.0 / next
    } else {
        let k = spec.kappa[n] as f64;
        k / ((k + 1.0) * next)
    }
}

/// Levels whose columns are kept: `k_{n+1} < 1/eps^2`.
pub fn kept_levels(spec: &TreeSpec, eps: f64) -> Vec<usize> {
    let threshold = 1.0 / (eps * eps);
    (0..=spec.depth)
        .filter(|&n| (grandchildren(spec, n) as f64) < threshold)
        .collect()
}

#[derive(Debug, Clone)]
pub struct TreeTruncation {
    pub certificate: ApproximationCertificate,
    pub b: SparseOperator,
    pub b_truncated: SparseOperator,
    pub kept_levels: Vec<usize>,
    /// Largest norm among dropped columns; equals `||B - B^U||`.
    pub dropped_sup: f64,
    /// `max k_n / k_{n+1}` over consecutive levels of the tree.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSummary {
    pub level: usize,
    pub kept: bool,
    pub column_norm: f64,
}

impl TreeTruncation {
    pub fn levels(&self, spec: &TreeSpec) -> Vec<LevelSummary> {
        (0..=spec.depth)
            .map(|n| LevelSummary {
                level: n,
                kept: self.kept_levels.contains(&n),
                column_norm: column_norm_sq(spec, n).sqrt(),
            })
            .collect()
    }
}

pub fn tree_truncation_approx(t: &Graph, spec: &TreeSpec, eps: f64) -> Result<TreeTruncation> {
    if !(eps > 0.0) {
        return Err(Error::param("eps", format!("must be positive, got {eps}")));
    }
    spec.validate()?;
    if spec.vertex_count() != t.vertex_count() {
        return Err(Error::param(
            "spec",
            format!(
                "describes {} vertices but the tree has {}",
                spec.vertex_count(),
                t.vertex_count()
            ),
        ));
    }
    let lv = levels(t)?;
    let b = tree_triangular_split(t)?;
    let kept = kept_levels(spec, eps);
    let mut keep_col = vec![false; b.cols()];
    for (v, &n) in lv.iter().enumerate() {
        keep_col[v] = kept.contains(&n);
    }
    let b_truncated = SparseOperator::from_triplets(
        b.rows(),
        b.cols(),
        b.entries().filter(|&(_, c, _)| keep_col[c]),
    )?;
    let dropped_sup = column_norms(&b)
        .into_iter()
        .enumerate()
        .filter(|&(v, _)| !keep_col[v])
        .map(|(_, x)| x)
        .fold(0.0, f64::max);

    let ratio = (0..spec.depth.saturating_sub(1))
        .map(|n| spec.kappa[n] as f64 / spec.kappa[n + 1] as f64)
        .fold(1.0, f64::max);
    let s = (ratio / (eps * eps)).floor() as usize + 1;
    let approximant = b_truncated.add(&b_truncated.transpose())?;
    let certificate = ApproximationCertificate::new(
        Method::TreeTruncation,
        normalized_adjacency(t)?,
        approximant,
        2 * s,
        2.0 * dropped_sup,
    )
    .with_param("kappa", spec.kappa[..spec.depth].to_vec())
    .with_param("depth", spec.depth)
    .with_param("eps", eps)
    .with_param("kept_levels", kept.clone())
    .with_param("s", s);
    Ok(TreeTruncation {
        certificate,
        b,
        b_truncated,
        kept_levels: kept,
        dropped_sup,
        ratio,
    })
}
