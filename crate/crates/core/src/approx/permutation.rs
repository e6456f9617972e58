//! Splitting a `d`-regular 0/1 matrix into `d` permutation matrices.
//!
//! The matrix is the biadjacency of a `d`-regular bipartite graph, which has
//! a perfect matching. Removing it leaves a `(d-1)`-regular graph, so `d`
//! rounds of maximum matching exhaust the matrix.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::operator::SparseOperator;

const FREE: usize = usize::MAX;

/// Maximum bipartite matching by Hopcroft-Karp.
///
/// `adj[u]` lists the right vertices reachable from left vertex `u`. Returns
/// `mate[u]`, the right partner of `u`, or `None` where unmatched.
pub fn hopcroft_karp(adj: &[Vec<usize>], right: usize) -> Vec<Option<usize>> {
    let left = adj.len();
    let mut mate_l = vec![FREE; left];
    let mut mate_r = vec![FREE; right];
    let mut dist = vec![0usize; left];
    loop {
        // BFS layers from free left vertices.
        let mut queue = VecDeque::new();
        for u in 0..left {
            if mate_l[u] == FREE {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                let w = mate_r[v];
                if w == FREE {
                    found = true;
                } else if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            break;
        }
        let mut next = vec![0usize; left];
        for u in 0..left {
            if mate_l[u] == FREE {
                augment(u, adj, &mut mate_l, &mut mate_r, &mut dist, &mut next);
            }
        }
    }
    mate_l
        .into_iter()
        .map(|v| (v != FREE).then_some(v))
        .collect()
}

/// Iterative layered DFS so large inputs cannot overflow the stack.
fn augment(
    root: usize,
    adj: &[Vec<usize>],
    mate_l: &mut [usize],
    mate_r: &mut [usize],
    dist: &mut [usize],
    next: &mut [usize],
) -> bool {
    let mut path: Vec<usize> = vec![root];
    while let Some(&u) = path.last() {
        if next[u] == adj[u].len() {
            dist[u] = usize::MAX;
            path.pop();
            continue;
        }
        let v = adj[u][next[u]];
        let w = mate_r[v];
        if w == FREE {
            // Flip the path.
            for &x in &path {
                let y = adj[x][next[x]];
                mate_l[x] = y;
                mate_r[y] = x;
            }
            return true;
        }
        if dist[w] != usize::MAX && dist[w] == dist[u] + 1 {
            path.push(w);
        } else {
            next[u] += 1;
        }
    }
    false
}

fn validate_regular_01(a: &SparseOperator, d: usize) -> Result<()> {
    let bad = |reason: String| Err(Error::NotRegularZeroOne { d, reason });
    if a.rows() != a.cols() {
        return bad(format!("matrix is {}x{}, not square", a.rows(), a.cols()));
    }
    if d == 0 {
        return bad("d must be at least 1".into());
    }
    let mut col_counts = vec![0usize; a.cols()];
    for r in 0..a.rows() {
        let (cols, vals) = a.row(r);
        if cols.len() != d {
            return bad(format!("row {r} has {} nonzeros", cols.len()));
        }
        for (&c, &v) in cols.iter().zip(vals) {
            if v != 1.0 {
                return bad(format!("entry ({r}, {c}) is {v}"));
            }
            col_counts[c] += 1;
        }
    }
    if let Some(c) = col_counts.iter().position(|&k| k != d) {
        return bad(format!("column {c} has {} nonzeros", col_counts[c]));
    }
    Ok(())
}

/// Returns `d` permutations `sigma` (as `sigma[row] = col`) whose matrices
/// sum to `a`.
pub fn permutation_decomposition(a: &SparseOperator, d: usize) -> Result<Vec<Vec<usize>>> {
    validate_regular_01(a, d)?;
    let n = a.rows();
    let mut adj: Vec<Vec<usize>> = (0..n).map(|r| a.row(r).0.to_vec()).collect();
    let mut perms = Vec::with_capacity(d);
    for round in 0..d {
        let mate = hopcroft_karp(&adj, n);
        let sigma: Vec<usize> = mate
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or(Error::MatchingNotFound { round })?;
        for (r, &c) in sigma.iter().enumerate() {
            adj[r].retain(|&x| x != c);
        }
        perms.push(sigma);
    }
    Ok(perms)
}

/// The matrix with ones at `(r, sigma[r])`.
pub fn permutation_matrix(sigma: &[usize]) -> Result<SparseOperator> {
    let n = sigma.len();
    SparseOperator::from_triplets(n, n, sigma.iter().enumerate().map(|(r, &c)| (r, c, 1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::random_regular_bipartite;
    use crate::operator::{adjacency_matrix, band_profile};

    fn sum(perms: &[Vec<usize>], n: usize) -> SparseOperator {
        perms.iter().fold(SparseOperator::zeros(n, n), |acc, p| {
            acc.add(&permutation_matrix(p).unwrap()).unwrap()
        })
    }

    #[test]
    fn single_permutation_returned() {
        let sigma = vec![2, 0, 1, 3];
        let a = permutation_matrix(&sigma).unwrap();
        assert_eq!(permutation_decomposition(&a, 1).unwrap(), vec![sigma]);
    }

    #[test]
    fn all_ones_three() {
        let a = SparseOperator::constant(3, 3, 1.0);
        let perms = permutation_decomposition(&a, 3).unwrap();
        assert_eq!(perms.len(), 3);
        assert_eq!(sum(&perms, 3), a);
    }

    #[test]
    fn random_six_regular_fifty() {
        let g = random_regular_bipartite(50, 6, 4).unwrap();
        let full = adjacency_matrix(&g);
        let rows: Vec<usize> = (0..50).collect();
        let cols: Vec<usize> = (50..100).collect();
        let a = full.restrict(&rows, &cols).unwrap();
        let perms = permutation_decomposition(&a, 6).unwrap();
        assert_eq!(perms.len(), 6);
        assert_eq!(sum(&perms, 50), a);
        for p in &perms {
            let bp = band_profile(&permutation_matrix(p).unwrap());
            assert_eq!((bp.max_row_nonzeros, bp.max_col_nonzeros), (1, 1));
        }
    }

    #[test]
    fn matching_on_unbalanced_graph() {
        // Left 0 and 1 both only see right 0.
        let mate = hopcroft_karp(&[vec![0], vec![0], vec![0, 1]], 2);
        assert_eq!(mate.iter().filter(|m| m.is_some()).count(), 2);
        assert_eq!(mate[2], Some(1));
    }

    #[test]
    fn invalid_inputs() {
        let a = SparseOperator::from_dense(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(
            permutation_decomposition(&a, 1),
            Err(Error::NotRegularZeroOne { .. })
        ));
        let a = SparseOperator::from_dense(&[vec![2.0, 0.0], vec![0.0, 2.0]]).unwrap();
        assert!(permutation_decomposition(&a, 1).is_err());
        assert!(permutation_decomposition(&SparseOperator::zeros(2, 3), 1).is_err());
    }
}
