//! Lower bounds on the distance from a normalized Laplacian to `B^(r)`, and a
//! truncation oracle that produces matching upper bounds.
//!
//! If `v` has `s` neighbors of degree at most `k`, then `L e_v` has `s`
//! coordinates of magnitude at least `1/sqrt(d(v) k)`. An operator with at
//! most `r` nonzeros in column `v` can cancel at most `r` of them, so
//! `||(L - X) e_v||^2 >= (s - r)/(d(v) k)`. A family of graphs whose vertices
//! keep `s/d` bounded below while degrees grow cannot be approximated; that
//! last step is asymptotic and left to the caller reading the reports.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::operator::{band_profile, SparseOperator};
use crate::spectral::{
    exact_norm_small, operator_norm, NormEstimate, DEFAULT_MAX_ITER, DEFAULT_TOL,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObstructionWitness {
    pub vertex: usize,
    pub k: usize,
    /// Neighbors of `vertex` with degree at most `k`.
    pub s: usize,
    pub deg: usize,
    /// Column budget `r` of the competing operators.
    pub band: usize,
    pub bound: f64,
}

impl ObstructionWitness {
    /// `s / d(v)`.
    pub fn ratio(&self) -> f64 {
        self.s as f64 / self.deg as f64
    }

    /// `s / (d(v) k)`.
    pub fn ratio_k(&self) -> f64 {
        self.ratio() / self.k as f64
    }
}

fn check_vertex(g: &Graph, v: usize) -> Result<()> {
    if v >= g.vertex_count() {
        return Err(Error::VertexOutOfRange {
            vertex: v,
            vertex_count: g.vertex_count(),
        });
    }
    Ok(())
}

pub fn s_profile(g: &Graph, v: usize, k: usize) -> Result<usize> {
    check_vertex(g, v)?;
    Ok(g.neighbors(v).iter().filter(|&&w| g.degree(w) <= k).count())
}

pub fn t1_lower_bound(g: &Graph, v: usize, k: usize, r: usize) -> Result<ObstructionWitness> {
    check_vertex(g, v)?;
    if k == 0 {
        return Err(Error::param("k", "degree threshold must be at least 1"));
    }
    if r == 0 {
        return Err(Error::param("r", "band must be at least 1"));
    }
    let deg = g.degree(v);
    if deg == 0 {
        return Err(Error::IsolatedVertex(v));
    }
    let s = s_profile(g, v, k)?;
    let bound = (s.saturating_sub(r) as f64 / (deg as f64 * k as f64)).sqrt();
    Ok(ObstructionWitness {
        vertex: v,
        k,
        s,
        deg,
        band: r,
        bound,
    })
}

/// One witness per `(vertex, r)`, ordered by vertex list position then `r`.
pub fn family_obstruction_report(
    g: &Graph,
    vertices: &[usize],
    k: usize,
    r_grid: &[usize],
) -> Result<Vec<ObstructionWitness>> {
    let mut out = Vec::with_capacity(vertices.len() * r_grid.len());
    for &v in vertices {
        for &r in r_grid {
            out.push(t1_lower_bound(g, v, k, r)?);
        }
    }
    Ok(out)
}

pub const REPORT_CSV_HEADER: &str = "vertex,degree,k,s,r,bound,ratio";

pub fn report_csv(rows: &[ObstructionWitness]) -> String {
    let mut out = String::from(REPORT_CSV_HEADER);
    out.push('\n');
    for w in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{:.17e},{:.17e}\n",
            w.vertex,
            w.deg,
            w.k,
            w.s,
            w.band,
            w.bound,
            w.ratio()
        ));
    }
    out
}

/// Parses [`report_csv`] output; lines starting with `#` are skipped.
pub fn read_report_csv(text: &str) -> Result<Vec<ObstructionWitness>> {
    let mut rows = Vec::new();
    let mut seen_header = false;
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !seen_header {
            if line != REPORT_CSV_HEADER {
                return Err(Error::Parse {
                    line: line_no,
                    reason: format!("expected header `{REPORT_CSV_HEADER}`"),
                });
            }
            seen_header = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(Error::Parse {
                line: line_no,
                reason: format!("expected 7 fields, found {}", fields.len()),
            });
        }
        let int = |j: usize| {
            fields[j].parse::<usize>().map_err(|e| Error::Parse {
                line: line_no,
                reason: format!("field {j}: {e}"),
            })
        };
        let bound = fields[5].parse::<f64>().map_err(|e| Error::Parse {
            line: line_no,
            reason: format!("field 5: {e}"),
        })?;
        rows.push(ObstructionWitness {
            vertex: int(0)?,
            deg: int(1)?,
            k: int(2)?,
            s: int(3)?,
            band: int(4)?,
            bound,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TruncationStrategy {
    TopMagnitude,
    Exhaustive,
}

/// Largest dimension accepted by the exhaustive search.
pub const EXHAUSTIVE_LIMIT: usize = 8;
const NODE_BUDGET: usize = 2_000_000;

#[derive(Debug, Clone)]
pub struct Truncation {
    /// Entries of the input on a support with at most `d` per row and column.
    pub approximant: SparseOperator,
    /// Norm of `m - approximant`; exact (`lower == upper`) for exhaustive.
    pub residual: NormEstimate,
}

impl Truncation {
    /// Certified upper end of the residual norm.
    pub fn distance(&self) -> f64 {
        self.residual.upper
    }
}

pub fn truncation_oracle(
    m: &SparseOperator,
    d: usize,
    strategy: TruncationStrategy,
    seed: u64,
) -> Result<Truncation> {
    if d == 0 {
        return Err(Error::param("d", "band must be at least 1"));
    }
    match strategy {
        TruncationStrategy::TopMagnitude => {
            let approximant = greedy_truncation(m, d)?;
            let residual =
                operator_norm(&m.sub(&approximant)?, DEFAULT_TOL, DEFAULT_MAX_ITER, seed)?;
            Ok(Truncation {
                approximant,
                residual,
            })
        }
        TruncationStrategy::Exhaustive => exhaustive_truncation(m, d),
    }
}

/// Keeps entries in order of decreasing magnitude, then row, then column,
/// while the row and column budgets allow.
pub fn greedy_truncation(m: &SparseOperator, d: usize) -> Result<SparseOperator> {
    let mut entries: Vec<(usize, usize, f64)> = m.entries().collect();
    entries.sort_by(|a, b| {
        b.2.abs()
            .total_cmp(&a.2.abs())
            .then(a.0.cmp(&b.0))
            .then(a.1.cmp(&b.1))
    });
    let mut row_used = vec![0usize; m.rows()];
    let mut col_used = vec![0usize; m.cols()];
    let mut kept = Vec::new();
    for (r, c, v) in entries {
        if row_used[r] < d && col_used[c] < d {
            row_used[r] += 1;
            col_used[c] += 1;
            kept.push((r, c, v));
        }
    }
    SparseOperator::from_triplets(m.rows(), m.cols(), kept)
}

/// Subsets of `0..len` with at most `max` elements, largest first.
fn subsets(len: usize, max: usize) -> Vec<Vec<usize>> {
    let mut all: Vec<Vec<usize>> = (0u32..(1u32 << len))
        .filter(|mask| (mask.count_ones() as usize) <= max)
        .map(|mask| (0..len).filter(|&i| mask & (1 << i) != 0).collect())
        .collect();
    all.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
    all
}

struct Search<'a> {
    rows: Vec<Vec<(usize, f64)>>,
    dense: &'a [Vec<f64>],
    d: usize,
    col_used: Vec<usize>,
    /// Residual rows decided so far.
    residual: Vec<Vec<f64>>,
    choice: Vec<Vec<usize>>,
    best: f64,
    best_choice: Vec<Vec<usize>>,
    nodes: usize,
}

impl Search<'_> {
    fn partial_norm(&self) -> f64 {
        crate::spectral::singular_values_dense(&self.residual)
            .first()
            .copied()
            .unwrap_or(0.0)
    }

    fn run(&mut self, row: usize) -> Result<()> {
        self.nodes += 1;
        if self.nodes > NODE_BUDGET {
            return Err(Error::SearchTooLarge(format!(
                "exhaustive truncation exceeded {NODE_BUDGET} search nodes"
            )));
        }
        let partial = self.partial_norm();
        if partial >= self.best {
            return Ok(());
        }
        if row == self.rows.len() {
            self.best = partial;
            self.best_choice = self.choice.clone();
            return Ok(());
        }
        let nz = self.rows[row].clone();
        for subset in subsets(nz.len(), self.d) {
            if subset.iter().any(|&i| self.col_used[nz[i].0] >= self.d) {
                continue;
            }
            let mut res = self.dense[row].clone();
            for &i in &subset {
                res[nz[i].0] = 0.0;
                self.col_used[nz[i].0] += 1;
            }
            self.residual.push(res);
            self.choice.push(subset.iter().map(|&i| nz[i].0).collect());
            let out = self.run(row + 1);
            self.choice.pop();
            self.residual.pop();
            for &i in &subset {
                self.col_used[nz[i].0] -= 1;
            }
            out?;
        }
        Ok(())
    }
}

fn exhaustive_truncation(m: &SparseOperator, d: usize) -> Result<Truncation> {
    if m.rows() > EXHAUSTIVE_LIMIT || m.cols() > EXHAUSTIVE_LIMIT {
        return Err(Error::TooLarge {
            rows: m.rows(),
            cols: m.cols(),
            limit: EXHAUSTIVE_LIMIT,
        });
    }
    // Seed the bound with the greedy answer so pruning starts early.
    let greedy = greedy_truncation(m, d)?;
    let greedy_norm = exact_norm_small(&m.sub(&greedy)?)?;
    let dense = m.to_dense();
    let mut search = Search {
        rows: (0..m.rows())
            .map(|r| {
                let (c, v) = m.row(r);
                c.iter().copied().zip(v.iter().copied()).collect()
            })
            .collect(),
        dense: &dense,
        d,
        col_used: vec![0; m.cols()],
        residual: Vec::new(),
        choice: Vec::new(),
        // Nudged up so the greedy support itself is reachable.
        best: greedy_norm * (1.0 + 1e-12) + f64::MIN_POSITIVE,
        best_choice: Vec::new(),
        nodes: 0,
    };
    search.run(0)?;
    let approximant = if search.best_choice.len() == m.rows() {
        let dense = &dense;
        SparseOperator::from_triplets(
            m.rows(),
            m.cols(),
            search
                .best_choice
                .iter()
                .enumerate()
                .flat_map(|(r, cols)| cols.iter().map(move |&c| (r, c, dense[r][c]))),
        )?
    } else {
        greedy
    };
    debug_assert!(band_profile(&approximant).fits(d));
    let exact = exact_norm_small(&m.sub(&approximant)?)?;
    Ok(Truncation {
        approximant,
        residual: NormEstimate {
            lower: exact,
            upper: exact,
            witness: Vec::new(),
            iterations: 0,
            converged: true,
        },
    })
}

/// `||(m - x) e_v||`.
pub fn column_residual(m: &SparseOperator, x: &SparseOperator, v: usize) -> Result<f64> {
    let diff = m.sub(x)?;
    Ok(diff.column(v).iter().map(|a| a * a).sum::<f64>().sqrt())
}
