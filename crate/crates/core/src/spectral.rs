//! Operator-norm (largest singular value) estimates.
//!
//! [`operator_norm`] runs restarted Lanczos on `m^T m` and reports an interval:
//! the lower end is `||m x||` for an explicit unit witness `x` and is always a
//! valid lower bound. The upper end is the smaller of the Schur test
//! `sqrt(||m||_1 ||m||_inf)`, which is always valid, and the eigenvalue
//! residual bound `sqrt(theta + ||m^T m x - theta x||)` of the final Ritz vector,
//! which bounds the singular value the iteration has locked onto.
//!
//! [`exact_norm_small`] is a dense one-sided Jacobi SVD for matrices up to
//! 64x64 and serves as the brute-force reference.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::SparseOperator;

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_ITER: usize = 10_000;
pub const DENSE_LIMIT: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub lower: f64,
    pub upper: f64,
    /// Unit vector with `||m witness|| == lower`.
    pub witness: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl NormEstimate {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, value: f64, slack: f64) -> bool {
        self.lower - slack <= value && value <= self.upper + slack
    }
}

fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Schur test: `||m|| <= sqrt(max column abs-sum * max row abs-sum)`.
pub fn schur_bound(m: &SparseOperator) -> f64 {
    (m.max_abs_col_sum() * m.max_abs_row_sum()).sqrt()
}

pub fn operator_norm(
    m: &SparseOperator,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<NormEstimate> {
    if !(tol > 0.0) {
        return Err(Error::param("tol", format!("must be positive, got {tol}")));
    }
    let n = m.cols();
    if m.is_zero() {
        let mut witness = vec![0.0; n];
        if let Some(w) = witness.first_mut() {
            *w = 1.0;
        }
        return Ok(NormEstimate {
            lower: 0.0,
            upper: 0.0,
            witness,
            iterations: 0,
            converged: true,
        });
    }
    let schur = schur_bound(m);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    normalize(&mut x);

    let mut best = NormEstimate {
        lower: 0.0,
        upper: schur,
        witness: x.clone(),
        iterations: 0,
        converged: false,
    };
    let dim = n.min(KRYLOV_DIM);
    while best.iterations < max_iter {
        let (ritz, steps) = lanczos_ritz(m, &x, dim.min(max_iter - best.iterations));
        best.iterations += steps;
        let u = match ritz {
            Some(u) => u,
            None => heaviest_column(m),
        };
        let y = m.mul_vec(&u);
        let sigma = norm2(&y);
        if sigma > best.lower {
            best.lower = sigma;
            best.witness = u.clone();
        }
        let z = m.mul_transpose_vec(&y);
        let theta = sigma * sigma;
        let residual = norm2(
            &z.iter()
                .zip(&u)
                .map(|(a, b)| a - theta * b)
                .collect::<Vec<_>>(),
        );
        best.upper = schur.min((theta + residual).sqrt()).max(best.lower);
        if best.upper - best.lower <= tol {
            best.converged = true;
            break;
        }
        x = u;
    }
    Ok(best)
}

/// Krylov dimension before each restart.
const KRYLOV_DIM: usize = 64;

fn normalize(x: &mut [f64]) {
    let nx = norm2(x);
    x.iter_mut().for_each(|v| *v /= nx);
}

fn heaviest_column(m: &SparseOperator) -> Vec<f64> {
    let heavy = (0..m.cols())
        .max_by(|&a, &b| norm2(&m.column(a)).total_cmp(&norm2(&m.column(b))))
        .expect("nonzero matrix has columns");
    let mut x = vec![0.0; m.cols()];
    x[heavy] = 1.0;
    x
}

/// Lanczos on `m^T m` from the unit vector `start`, with full
/// reorthogonalization. Returns the top Ritz vector (`None` when `start` lies
/// in the kernel) and the number of products taken.
fn lanczos_ritz(m: &SparseOperator, start: &[f64], dim: usize) -> (Option<Vec<f64>>, usize) {
    let mut basis: Vec<Vec<f64>> = vec![start.to_vec()];
    let mut alpha = Vec::new();
    let mut beta = Vec::new();
    let mut steps = 0;
    while steps < dim.max(1) {
        let v = basis.last().expect("nonempty");
        let mut w = m.mul_transpose_vec(&m.mul_vec(v));
        steps += 1;
        alpha.push(dot(&w, v));
        // Two passes of Gram-Schmidt keep the basis orthogonal to rounding.
        for _ in 0..2 {
            for q in &basis {
                let c = dot(&w, q);
                w.iter_mut().zip(q).for_each(|(a, b)| *a -= c * b);
            }
        }
        let b = norm2(&w);
        if steps == dim || b <= 1e-14 * alpha[0].abs().max(f64::MIN_POSITIVE) {
            break;
        }
        beta.push(b);
        w.iter_mut().for_each(|a| *a /= b);
        basis.push(w);
    }
    if alpha.len() == 1 && alpha[0] == 0.0 {
        return (None, steps);
    }
    let k = alpha.len();
    let t = DMatrix::from_fn(k, k, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(t);
    let top = eig.eigenvalues.imax();
    let s = eig.eigenvectors.column(top);
    let mut u = vec![0.0; start.len()];
    for (q, &c) in basis.iter().zip(s.iter()) {
        u.iter_mut().zip(q).for_each(|(a, b)| *a += c * b);
    }
    normalize(&mut u);
    (Some(u), steps)
}

/// [`operator_norm`] with the default tolerance and iteration budget.
pub fn operator_norm_default(m: &SparseOperator, seed: u64) -> Result<NormEstimate> {
    operator_norm(m, DEFAULT_TOL, DEFAULT_MAX_ITER, seed)
}

/// Singular values of a dense matrix (rows of equal length), descending.
pub fn singular_values_dense(a: &[Vec<f64>]) -> Vec<f64> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return Vec::new();
    }
    // Orthogonalize the shorter side: columns of `work` are the vectors.
    let (len, count) = if cols <= rows {
        (rows, cols)
    } else {
        (cols, rows)
    };
    let mut work: Vec<Vec<f64>> = (0..count)
        .map(|j| {
            (0..len)
                .map(|i| if cols <= rows { a[i][j] } else { a[j][i] })
                .collect()
        })
        .collect();
    const EPS: f64 = 1e-15;
    for _sweep in 0..100 {
        let mut rotated = false;
        for p in 0..count {
            for q in (p + 1)..count {
                let alpha = dot(&work[p], &work[p]);
                let beta = dot(&work[q], &work[q]);
                let gamma = dot(&work[p], &work[q]);
                if gamma == 0.0 || gamma.abs() <= EPS * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (lo, hi) = work.split_at_mut(q);
                for (vp, vq) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
                    let (xp, xq) = (*vp, *vq);
                    *vp = c * xp - s * xq;
                    *vq = s * xp + c * xq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = work.iter().map(|v| norm2(v)).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Largest singular value by dense one-sided Jacobi SVD.
pub fn exact_norm_small(m: &SparseOperator) -> Result<f64> {
    if m.rows() > DENSE_LIMIT || m.cols() > DENSE_LIMIT {
        return Err(Error::TooLarge {
            rows: m.rows(),
            cols: m.cols(),
            limit: DENSE_LIMIT,
        });
    }
    Ok(singular_values_dense(&m.to_dense())
        .first()
        .copied()
        .unwrap_or(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::complete_graph;
    use crate::operator::normalized_laplacian;
    use approx::assert_abs_diff_eq;

    #[test]
    fn identity_and_permutation() {
        let est = operator_norm_default(&SparseOperator::identity(5), 1).unwrap();
        assert_abs_diff_eq!(est.lower, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(est.upper, 1.0, epsilon = 1e-12);
        assert!(est.converged);

        let perm = SparseOperator::from_triplets(
            4,
            4,
            [(0, 2, 1.0), (1, 0, 1.0), (2, 3, 1.0), (3, 1, 1.0)],
        )
        .unwrap();
        let est = operator_norm_default(&perm, 2).unwrap();
        assert!(est.contains(1.0, 1e-12));
        assert_abs_diff_eq!(exact_norm_small(&perm).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn constant_block_is_rank_one() {
        // c * sqrt(a b) for an a x b block of c's.
        let m = SparseOperator::constant(8, 3, 0.25);
        let expected = 0.25 * 24f64.sqrt();
        let est = operator_norm_default(&m, 3).unwrap();
        assert!(est.contains(expected, 1e-12));
        assert_abs_diff_eq!(exact_norm_small(&m).unwrap(), expected, epsilon = 1e-13);
    }

    #[test]
    fn exact_norm_examples() {
        let swap = SparseOperator::from_dense(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_abs_diff_eq!(exact_norm_small(&swap).unwrap(), 1.0, epsilon = 1e-15);
        let l = normalized_laplacian(&complete_graph(2).unwrap()).unwrap();
        assert_abs_diff_eq!(exact_norm_small(&l).unwrap(), 2.0, epsilon = 1e-14);
        // B' block: 8x2 matrix of 1/sqrt(24).
        let b = SparseOperator::constant(8, 2, 1.0 / 24f64.sqrt());
        assert_abs_diff_eq!(
            exact_norm_small(&b).unwrap(),
            (2.0f64 / 3.0).sqrt(),
            epsilon = 1e-14
        );
        assert!(matches!(
            exact_norm_small(&SparseOperator::identity(65)),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn zero_matrix_and_bad_tol() {
        let est = operator_norm_default(&SparseOperator::zeros(3, 2), 0).unwrap();
        assert_eq!((est.lower, est.upper), (0.0, 0.0));
        assert!(operator_norm(&SparseOperator::identity(2), 0.0, 10, 0).is_err());
    }

    #[test]
    fn non_convergence_is_reported_not_raised() {
        let m = SparseOperator::from_dense(&[vec![1.0, 0.9], vec![0.9, -1.0]]).unwrap();
        let est = operator_norm(&m, 1e-14, 1, 0).unwrap();
        assert_eq!(est.iterations, 1);
        assert!(est.lower <= est.upper);
    }
}
