//! Real sparse matrices indexed by vertex pairs, the graph operators built on
//! them, and band-profile accounting.
//!
//! [`SparseOperator`] is an immutable CSR matrix. Explicit zeros are never
//! stored: construction and every arithmetic operation drop entries that are
//! exactly `0.0` (no tolerance).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

/// Maximum number of nonzeros in any row and in any column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct BandProfile {
    pub max_row_nonzeros: usize,
    pub max_col_nonzeros: usize,
}

impl BandProfile {
    /// Smallest `d` with the operator in `B^(d)`.
    pub fn band(&self) -> usize {
        self.max_row_nonzeros.max(self.max_col_nonzeros)
    }

    pub fn fits(&self, d: usize) -> bool {
        self.band() <= d
    }
}

impl SparseOperator {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseOperator {
            rows,
            cols,
            row_ptr: vec![0; rows + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1.0; n])
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_triplets(n, n, values.iter().enumerate().map(|(i, &v)| (i, i, v)))
            .expect("diagonal indices are in range")
    }

    /// `rows x cols` matrix with every entry equal to `value`.
    pub fn constant(rows: usize, cols: usize, value: f64) -> Self {
        Self::from_triplets(
            rows,
            cols,
            (0..rows).flat_map(|r| (0..cols).map(move |c| (r, c, value))),
        )
        .expect("indices are in range")
    }

    /// Builds a matrix from `(row, col, value)` triplets. Repeated positions
    /// are summed; entries that end up exactly zero are dropped.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut per_row: Vec<Vec<(usize, f64)>> = vec![Vec::new(); rows];
        for (r, c, v) in triplets {
            if r >= rows || c >= cols {
                return Err(Error::IndexOutOfBounds {
                    row: r,
                    col: c,
                    rows,
                    cols,
                });
            }
            per_row[r].push((c, v));
        }
        let mut out = SparseOperator::zeros(rows, cols);
        for (r, mut list) in per_row.into_iter().enumerate() {
            list.sort_by_key(|&(c, _)| c);
            let mut i = 0;
            while i < list.len() {
                let c = list[i].0;
                let mut sum = 0.0;
                while i < list.len() && list[i].0 == c {
                    sum += list[i].1;
                    i += 1;
                }
                if sum != 0.0 {
                    out.col_idx.push(c);
                    out.values.push(sum);
                }
            }
            out.row_ptr[r + 1] = out.col_idx.len();
        }
        Ok(out)
    }

    pub fn from_dense(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != cols) {
            return Err(Error::param(
                "rows",
                format!("row {bad} has {} entries, expected {cols}", rows[bad].len()),
            ));
        }
        Self::from_triplets(
            rows.len(),
            cols,
            rows.iter()
                .enumerate()
                .flat_map(|(r, row)| row.iter().enumerate().map(move |(c, &v)| (r, c, v))),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        if row >= self.rows {
            return 0.0;
        }
        let (cols, vals) = self.row(row);
        cols.binary_search(&col).map_or(0.0, |i| vals[i])
    }

    /// Column indices and values of one row.
    pub fn row(&self, row: usize) -> (&[usize], &[f64]) {
        let range = self.row_ptr[row]..self.row_ptr[row + 1];
        (&self.col_idx[range.clone()], &self.values[range])
    }

    /// All stored entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.rows).flat_map(move |r| {
            let (cols, vals) = self.row(r);
            cols.iter().zip(vals).map(move |(&c, &v)| (r, c, v))
        })
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.cols]; self.rows];
        for (r, c, v) in self.entries() {
            out[r][c] = v;
        }
        out
    }

    fn check_same_shape(&self, other: &Self, op: &'static str) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch {
                op,
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other, "add")?;
        Self::from_triplets(self.rows, self.cols, self.entries().chain(other.entries()))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other, "sub")?;
        Self::from_triplets(
            self.rows,
            self.cols,
            self.entries()
                .chain(other.entries().map(|(r, c, v)| (r, c, -v))),
        )
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self::from_triplets(
            self.rows,
            self.cols,
            self.entries().map(|(r, c, v)| (r, c, factor * v)),
        )
        .expect("same indices")
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(
            self.cols,
            self.rows,
            self.entries().map(|(r, c, v)| (c, r, v)),
        )
        .expect("same indices")
    }

    /// Matrix product `self * other`.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                op: "multiply",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut out = SparseOperator::zeros(self.rows, other.cols);
        let mut acc = vec![0.0; other.cols];
        let mut touched = vec![false; other.cols];
        let mut touched_list = Vec::new();
        for r in 0..self.rows {
            let (cols, vals) = self.row(r);
            for (&k, &a) in cols.iter().zip(vals) {
                let (ocols, ovals) = other.row(k);
                for (&c, &b) in ocols.iter().zip(ovals) {
                    if !touched[c] {
                        touched[c] = true;
                        touched_list.push(c);
                    }
                    acc[c] += a * b;
                }
            }
            touched_list.sort_unstable();
            for &c in &touched_list {
                if acc[c] != 0.0 {
                    out.col_idx.push(c);
                    out.values.push(acc[c]);
                }
                acc[c] = 0.0;
                touched[c] = false;
            }
            touched_list.clear();
            out.row_ptr[r + 1] = out.col_idx.len();
        }
        Ok(out)
    }

    /// Submatrix on the given rows and columns, in the given order. The result
    /// is `row_set.len() x col_set.len()`.
    pub fn restrict(&self, row_set: &[usize], col_set: &[usize]) -> Result<Self> {
        let mut col_pos = vec![None; self.cols];
        for (j, &c) in col_set.iter().enumerate() {
            if c >= self.cols {
                return Err(Error::IndexOutOfBounds {
                    row: 0,
                    col: c,
                    rows: self.rows,
                    cols: self.cols,
                });
            }
            if col_pos[c].replace(j).is_some() {
                return Err(Error::param("col_set", format!("column {c} repeated")));
            }
        }
        let mut triplets = Vec::new();
        for (i, &r) in row_set.iter().enumerate() {
            if r >= self.rows {
                return Err(Error::IndexOutOfBounds {
                    row: r,
                    col: 0,
                    rows: self.rows,
                    cols: self.cols,
                });
            }
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                if let Some(j) = col_pos[c] {
                    triplets.push((i, j, v));
                }
            }
        }
        Self::from_triplets(row_set.len(), col_set.len(), triplets)
    }

    /// Places `self` into a larger zero matrix at the given row and column
    /// indices; the inverse of [`SparseOperator::restrict`].
    pub fn embed(
        &self,
        rows: usize,
        cols: usize,
        row_map: &[usize],
        col_map: &[usize],
    ) -> Result<Self> {
        if row_map.len() != self.rows || col_map.len() != self.cols {
            return Err(Error::param(
                "row_map/col_map",
                "length must match the block shape",
            ));
        }
        Self::from_triplets(
            rows,
            cols,
            self.entries().map(|(r, c, v)| (row_map[r], col_map[c], v)),
        )
    }

    /// Block-diagonal matrix with the given blocks in order.
    pub fn block_diagonal(blocks: &[SparseOperator]) -> Self {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut triplets = Vec::new();
        let (mut ro, mut co) = (0, 0);
        for b in blocks {
            triplets.extend(b.entries().map(|(r, c, v)| (r + ro, c + co, v)));
            ro += b.rows;
            co += b.cols;
        }
        Self::from_triplets(rows, cols, triplets).expect("offsets are in range")
    }

    /// Blocks stacked vertically; all must have the same column count.
    pub fn vstack(blocks: &[SparseOperator]) -> Result<Self> {
        let cols = blocks.first().map_or(0, |b| b.cols);
        let mut triplets = Vec::new();
        let mut ro = 0;
        for b in blocks {
            if b.cols != cols {
                return Err(Error::DimensionMismatch {
                    op: "vstack",
                    left: (ro, cols),
                    right: b.shape(),
                });
            }
            triplets.extend(b.entries().map(|(r, c, v)| (r + ro, c, v)));
            ro += b.rows;
        }
        Self::from_triplets(ro, cols, triplets)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "vector length must equal column count");
        (0..self.rows)
            .map(|r| {
                let (cols, vals) = self.row(r);
                cols.iter().zip(vals).map(|(&c, &v)| v * x[c]).sum()
            })
            .collect()
    }

    /// `self^T * y` without forming the transpose.
    pub fn mul_transpose_vec(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.rows, "vector length must equal row count");
        let mut out = vec![0.0; self.cols];
        for (r, c, v) in self.entries() {
            out[c] += v * y[r];
        }
        out
    }

    /// Column `c` as a dense vector, i.e. `self * delta_c`.
    pub fn column(&self, c: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    /// Largest absolute row sum (the induced infinity-norm).
    pub fn max_abs_row_sum(&self) -> f64 {
        (0..self.rows)
            .map(|r| self.row(r).1.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest absolute column sum (the induced 1-norm).
    pub fn max_abs_col_sum(&self) -> f64 {
        let mut sums = vec![0.0; self.cols];
        for (_, c, v) in self.entries() {
            sums[c] += v.abs();
        }
        sums.into_iter().fold(0.0, f64::max)
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest entrywise difference; infinite on a shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.sub(other).map_or(f64::INFINITY, |d| d.max_abs_entry())
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols && self.entries().all(|(r, c, v)| self.get(c, r) == v)
    }

    pub fn is_diagonal(&self) -> bool {
        self.entries().all(|(r, c, _)| r == c)
    }
}

pub fn band_profile(m: &SparseOperator) -> BandProfile {
    let max_row_nonzeros = (0..m.rows()).map(|r| m.row(r).0.len()).max().unwrap_or(0);
    let mut col_counts = vec![0usize; m.cols()];
    for (_, c, _) in m.entries() {
        col_counts[c] += 1;
    }
    BandProfile {
        max_row_nonzeros,
        max_col_nonzeros: col_counts.into_iter().max().unwrap_or(0),
    }
}

fn require_no_isolated(g: &Graph) -> Result<()> {
    match g.isolated_vertex() {
        Some(v) => Err(Error::IsolatedVertex(v)),
        None => Ok(()),
    }
}

/// Off-diagonal weight `1/sqrt(d(v) d(w))`.
fn edge_weight(g: &Graph, v: usize, w: usize) -> f64 {
    1.0 / ((g.degree(v) * g.degree(w)) as f64).sqrt()
}

/// `L = I - D^{-1/2} A D^{-1/2}`.
pub fn normalized_laplacian(g: &Graph) -> Result<SparseOperator> {
    require_no_isolated(g)?;
    let n = g.vertex_count();
    let triplets = (0..n).flat_map(|v| {
        std::iter::once((v, v, 1.0)).chain(
            g.neighbors(v)
                .iter()
                .map(move |&w| (v, w, -edge_weight(g, v, w))),
        )
    });
    SparseOperator::from_triplets(n, n, triplets)
}

/// `A = D^{-1/2} A D^{-1/2}`.
pub fn normalized_adjacency(g: &Graph) -> Result<SparseOperator> {
    require_no_isolated(g)?;
    let n = g.vertex_count();
    let triplets = (0..n).flat_map(|v| {
        g.neighbors(v)
            .iter()
            .map(move |&w| (v, w, edge_weight(g, v, w)))
    });
    SparseOperator::from_triplets(n, n, triplets)
}

/// 0/1 adjacency matrix.
pub fn adjacency_matrix(g: &Graph) -> SparseOperator {
    let n = g.vertex_count();
    SparseOperator::from_triplets(
        n,
        n,
        (0..n).flat_map(|v| g.neighbors(v).iter().map(move |&w| (v, w, 1.0))),
    )
    .expect("graph indices are in range")
}

/// `D - A`; defined for every graph.
pub fn combinatorial_laplacian(g: &Graph) -> SparseOperator {
    let n = g.vertex_count();
    SparseOperator::from_triplets(
        n,
        n,
        (0..n).flat_map(|v| {
            std::iter::once((v, v, g.degree(v) as f64))
                .chain(g.neighbors(v).iter().map(move |&w| (v, w, -1.0)))
        }),
    )
    .expect("graph indices are in range")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_bipartite, complete_graph, star_graph, Graph};
    use approx::assert_abs_diff_eq;

    #[test]
    fn zeros_are_never_stored() {
        let m =
            SparseOperator::from_triplets(2, 2, [(0, 0, 1.0), (0, 0, -1.0), (1, 1, 0.0)]).unwrap();
        assert_eq!(m.nnz(), 0);
        let a = SparseOperator::from_dense(&[vec![1.0, 2.0], vec![0.0, -3.0]]).unwrap();
        assert!(a.add(&a.scale(-1.0)).unwrap().is_zero());
        assert!(matches!(
            SparseOperator::from_triplets(2, 2, [(2, 0, 1.0)]),
            Err(Error::IndexOutOfBounds { .. })
        ));
    }

    #[test]
    fn laplacian_examples() {
        let k2 = normalized_laplacian(&complete_graph(2).unwrap()).unwrap();
        assert_eq!(k2.to_dense(), vec![vec![1.0, -1.0], vec![-1.0, 1.0]]);

        let k3 = normalized_laplacian(&complete_graph(3).unwrap()).unwrap();
        for r in 0..3 {
            for c in 0..3 {
                let expected = if r == c { 1.0 } else { -0.5 };
                assert_abs_diff_eq!(k3.get(r, c), expected, epsilon = 1e-15);
            }
        }

        let star = normalized_laplacian(&star_graph(3).unwrap()).unwrap();
        for leaf in 1..4 {
            assert_abs_diff_eq!(star.get(0, leaf), -1.0 / 3f64.sqrt(), epsilon = 1e-15);
        }
    }

    #[test]
    fn adjacency_examples() {
        let k2 = normalized_adjacency(&complete_graph(2).unwrap()).unwrap();
        assert_eq!(k2.to_dense(), vec![vec![0.0, 1.0], vec![1.0, 0.0]]);

        let g = complete_bipartite(2, 3).unwrap();
        let a = normalized_adjacency(&g).unwrap();
        for (u, v) in g.edges() {
            assert_abs_diff_eq!(a.get(u, v), 1.0 / 6f64.sqrt(), epsilon = 1e-15);
        }
        let l = normalized_laplacian(&g).unwrap();
        assert!(
            l.add(&a)
                .unwrap()
                .max_abs_diff(&SparseOperator::identity(5))
                == 0.0
        );
    }

    #[test]
    fn isolated_vertex_is_an_error() {
        let g = Graph::from_edges(3, &[(0, 1)]).unwrap();
        assert_eq!(normalized_laplacian(&g), Err(Error::IsolatedVertex(2)));
        assert_eq!(normalized_adjacency(&g), Err(Error::IsolatedVertex(2)));
        assert_eq!(combinatorial_laplacian(&g).get(2, 2), 0.0);
    }

    #[test]
    fn combinatorial_laplacian_examples() {
        let k2 = combinatorial_laplacian(&complete_graph(2).unwrap());
        assert_eq!(k2.to_dense(), vec![vec![1.0, -1.0], vec![-1.0, 1.0]]);
        let k3 = combinatorial_laplacian(&complete_graph(3).unwrap());
        assert_eq!(k3.get(1, 1), 2.0);
        assert!(k3.mul_vec(&[1.0; 3]).iter().all(|&s| s == 0.0));
    }

    #[test]
    fn band_profile_examples() {
        let p = band_profile(&SparseOperator::identity(6));
        assert_eq!((p.max_row_nonzeros, p.max_col_nonzeros), (1, 1));
        let l = normalized_laplacian(&complete_graph(7).unwrap()).unwrap();
        assert_eq!(band_profile(&l).band(), 7);
        assert_eq!(
            band_profile(&SparseOperator::zeros(3, 4)),
            BandProfile::default()
        );
        let tall = SparseOperator::constant(5, 2, 1.0);
        let p = band_profile(&tall);
        assert_eq!((p.max_row_nonzeros, p.max_col_nonzeros), (2, 5));
    }

    #[test]
    fn restrict_example() {
        let a = normalized_adjacency(&complete_graph(3).unwrap()).unwrap();
        let r = a.restrict(&[0], &[1, 2]).unwrap();
        assert_eq!(r.shape(), (1, 2));
        assert_abs_diff_eq!(r.get(0, 0), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(r.get(0, 1), 0.5, epsilon = 1e-15);
        let back = r.embed(3, 3, &[0], &[1, 2]).unwrap();
        assert_eq!(back.get(0, 2), a.get(0, 2));
    }

    #[test]
    fn multiply_and_dimension_checks() {
        let a = SparseOperator::from_dense(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let b = SparseOperator::from_dense(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(
            a.multiply(&b).unwrap().to_dense(),
            vec![vec![2.0, 1.0], vec![4.0, 3.0]]
        );
        let c = SparseOperator::zeros(3, 1);
        assert!(matches!(
            a.multiply(&c),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(a.add(&c), Err(Error::DimensionMismatch { .. })));
        // Cancellation drops the entry.
        let d = SparseOperator::from_dense(&[vec![1.0, -1.0]]).unwrap();
        let e = SparseOperator::from_dense(&[vec![1.0], vec![1.0]]).unwrap();
        assert!(d.multiply(&e).unwrap().is_zero());
    }

    #[test]
    fn stacking() {
        let a = SparseOperator::identity(2);
        let s = SparseOperator::vstack(&[a.clone(), a.clone()]).unwrap();
        assert_eq!(s.shape(), (4, 2));
        let d = SparseOperator::block_diagonal(&[a.clone(), SparseOperator::constant(1, 1, 3.0)]);
        assert_eq!(d.get(2, 2), 3.0);
        assert!(SparseOperator::vstack(&[a, SparseOperator::zeros(1, 3)]).is_err());
    }
}
