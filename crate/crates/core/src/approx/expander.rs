//! Band-sparse approximations of the rank-one projection onto constants.
//!
//! `P_n = J/n` is dense, but for an expander on `n` vertices the lazy walk
//! `W = (I + A)/2` satisfies `||W^k - P_n|| = lambda^k`, where `lambda` is the
//! second-largest eigenvalue of `W`. `W^k` has at most `(d+1)^k` nonzeros per
//! row, independently of `n`. Random regular graphs stand in for explicit
//! expander families; `lambda` is measured, so certificates never rely on an
//! unproven expansion property.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::certificate::{ApproximationCertificate, Method};
use crate::error::{Error, Result};
use crate::graph::{random_regular, Graph};
use crate::operator::{normalized_adjacency, normalized_laplacian, SparseOperator};

/// Largest expander for which the gap is measured by dense eigensolve.
pub const MAX_EXPANDER_SIZE: usize = 2000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpanderSpec {
    pub n: usize,
    pub d: usize,
    pub seed: u64,
    /// Second-largest eigenvalue of the lazy walk; equals `||W - P_n||`.
    pub lambda: f64,
}

#[derive(Debug, Clone)]
pub struct Expander {
    pub spec: ExpanderSpec,
    pub graph: Graph,
}

impl Expander {
    /// Draws `random_regular(n, d, seed)` and measures its gap.
    pub fn new(n: usize, d: usize, seed: u64) -> Result<Self> {
        Self::from_graph(random_regular(n, d, seed)?, seed)
    }

    /// Uses a given connected regular graph (e.g. `K_n`).
    pub fn from_graph(graph: Graph, seed: u64) -> Result<Self> {
        let n = graph.vertex_count();
        let d = graph.degree(0);
        if let Some(v) = (0..n).find(|&v| graph.degree(v) != d) {
            return Err(Error::NotRegular {
                vertex: v,
                degree: graph.degree(v),
                expected: d,
            });
        }
        if !graph.is_connected() {
            return Err(Error::Disconnected);
        }
        if n > MAX_EXPANDER_SIZE {
            return Err(Error::TooLarge {
                rows: n,
                cols: n,
                limit: MAX_EXPANDER_SIZE,
            });
        }
        let walk = lazy_walk(&graph)?;
        let lambda = second_eigenvalue(&walk);
        Ok(Expander {
            spec: ExpanderSpec { n, d, seed, lambda },
            graph,
        })
    }

    pub fn walk(&self) -> Result<SparseOperator> {
        lazy_walk(&self.graph)
    }
}

/// `(I + A)/2` for the normalized adjacency `A`.
pub fn lazy_walk(g: &Graph) -> Result<SparseOperator> {
    if g.vertex_count() == 1 {
        return Ok(SparseOperator::identity(1));
    }
    let a = normalized_adjacency(g)?;
    Ok(SparseOperator::identity(g.vertex_count())
        .add(&a)?
        .scale(0.5))
}

/// Second-largest eigenvalue of a symmetric PSD matrix with top eigenvalue 1.
fn second_eigenvalue(w: &SparseOperator) -> f64 {
    let n = w.rows();
    if n < 2 {
        return 0.0;
    }
    let mut dense = DMatrix::<f64>::zeros(n, n);
    for (r, c, v) in w.entries() {
        dense[(r, c)] = v;
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(dense)
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev[1].abs().max(ev[n - 1].abs()).min(1.0)
}

/// `P_n`: every entry `1/n`.
pub fn constant_projection(n: usize) -> SparseOperator {
    SparseOperator::constant(n, n, 1.0 / n as f64)
}

pub fn matrix_power(m: &SparseOperator, k: usize) -> Result<SparseOperator> {
    let mut out = SparseOperator::identity(m.rows());
    for _ in 0..k {
        out = out.multiply(m)?;
    }
    Ok(out)
}

/// `W^k` as an approximant of `P_n` with bound `lambda^k`.
pub fn expander_projection(expander: &Expander, k: usize) -> Result<ApproximationCertificate> {
    if k == 0 {
        return Err(Error::param("k", "walk power must be at least 1"));
    }
    let spec = &expander.spec;
    let approximant = matrix_power(&expander.walk()?, k)?;
    let theoretical = theoretical_walk_band(spec.d, k, spec.n);
    Ok(ApproximationCertificate::new(
        Method::ExpanderProjection,
        constant_projection(spec.n),
        approximant,
        theoretical,
        spec.lambda.powi(k as i32),
    )
    .with_param("n", spec.n)
    .with_param("degree", spec.d)
    .with_param("power", k)
    .with_param("lambda", spec.lambda)
    .with_seed(spec.seed))
}

fn theoretical_walk_band(d: usize, k: usize, n: usize) -> usize {
    let mut band: usize = 1;
    for _ in 0..k {
        band = band.saturating_mul(d + 1);
        if band >= n {
            return n;
        }
    }
    band
}

/// How family blocks are built: blocks smaller than `cutoff` are represented
/// exactly; larger ones use a connected random `degree`-regular expander.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectionSchedule {
    pub degree: usize,
    pub seed: u64,
    pub cutoff: usize,
}

impl Default for ProjectionSchedule {
    fn default() -> Self {
        ProjectionSchedule {
            degree: 6,
            seed: 0,
            cutoff: 8,
        }
    }
}

impl ProjectionSchedule {
    pub fn validate(&self) -> Result<()> {
        if self.degree < 2 || self.degree % 2 == 1 {
            return Err(Error::param(
                "degree",
                format!("expander degree must be even and >= 2, got {}", self.degree),
            ));
        }
        if self.cutoff <= self.degree {
            return Err(Error::param(
                "cutoff",
                format!(
                    "cutoff {} must exceed the expander degree {}",
                    self.cutoff, self.degree
                ),
            ));
        }
        Ok(())
    }

    fn block_seed(&self, n: usize, attempt: u64) -> u64 {
        self.seed
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add((n as u64).wrapping_mul(1_000_003))
            .wrapping_add(attempt)
    }
}

const CONNECT_ATTEMPTS: u64 = 64;

/// One block `C_n` approximating `P_n`.
#[derive(Debug, Clone)]
pub struct ProjectionBlock {
    pub n: usize,
    pub approximant: SparseOperator,
    pub bound: f64,
    /// `None` for blocks represented exactly.
    pub expander: Option<ExpanderSpec>,
    pub power: usize,
}

impl ProjectionBlock {
    pub fn is_exact(&self) -> bool {
        self.expander.is_none()
    }
}

fn connected_expander(n: usize, schedule: &ProjectionSchedule) -> Result<Expander> {
    for attempt in 0..CONNECT_ATTEMPTS {
        match Expander::new(n, schedule.degree, schedule.block_seed(n, attempt)) {
            Ok(e) if e.spec.lambda < 1.0 => return Ok(e),
            Ok(_) | Err(Error::Disconnected) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::SearchTooLarge(format!(
        "no connected {}-regular expander on {n} vertices after {CONNECT_ATTEMPTS} seeds",
        schedule.degree
    )))
}

fn power_for(lambda: f64, eps: f64) -> usize {
    if lambda <= eps {
        return 1;
    }
    let mut k = (eps.ln() / lambda.ln()).ceil().max(1.0) as usize;
    // Guard the rounding in the logarithms.
    while lambda.powi(k as i32) > eps {
        k += 1;
    }
    k
}

/// Builds `C_n` with `||P_n - C_n|| <= eps`, choosing the walk power.
pub fn projection_block(
    n: usize,
    eps: f64,
    schedule: &ProjectionSchedule,
) -> Result<ProjectionBlock> {
    build_blocks(&[n], eps, schedule, false).map(|mut v| v.remove(0))
}

fn build_blocks(
    sizes: &[usize],
    eps: f64,
    schedule: &ProjectionSchedule,
    uniform_power: bool,
) -> Result<Vec<ProjectionBlock>> {
    if !(eps > 0.0) {
        return Err(Error::param("eps", format!("must be positive, got {eps}")));
    }
    schedule.validate()?;
    if let Some(pos) = sizes.iter().position(|&n| n == 0) {
        return Err(Error::param("sizes", format!("entry {pos} is zero")));
    }
    let mut expanders = Vec::new();
    for &n in sizes {
        expanders.push(if n >= schedule.cutoff {
            Some(connected_expander(n, schedule)?)
        } else {
            None
        });
    }
    let powers: Vec<usize> = expanders
        .iter()
        .map(|e| e.as_ref().map_or(0, |e| power_for(e.spec.lambda, eps)))
        .collect();
    let shared = powers.iter().copied().max().unwrap_or(0);
    sizes
        .iter()
        .zip(expanders)
        .zip(powers)
        .map(|((&n, e), own)| match e {
            None => Ok(ProjectionBlock {
                n,
                approximant: constant_projection(n),
                bound: 0.0,
                expander: None,
                power: 0,
            }),
            Some(e) => {
                let k = if uniform_power { shared } else { own };
                Ok(ProjectionBlock {
                    n,
                    approximant: matrix_power(&e.walk()?, k)?,
                    bound: e.spec.lambda.powi(k as i32),
                    expander: Some(e.spec),
                    power: k,
                })
            }
        })
        .collect()
}

/// Certificates for a finite family of complete graphs.
#[derive(Debug, Clone)]
pub struct FamilyProjection {
    /// `(+) C_n` against `(+) P_n`.
    pub projection: ApproximationCertificate,
    /// `(+) n/(n-1) (I - C_n)` against `(+) L(K_n)`; absent if some `n == 1`.
    pub laplacian: Option<ApproximationCertificate>,
    pub blocks: Vec<ProjectionBlock>,
    /// Walk power shared by every expander block (0 if all blocks are exact).
    pub power: usize,
    /// Size-independent band guarantee: `max(cutoff - 1, (degree+1)^power)`.
    pub uniform_band: usize,
}

/// Uniform-in-`n` approximation of the projections `P_n` for `n` in `sizes`.
///
/// Every expander block uses the same degree and the same walk power, so the
/// band guarantee does not depend on `n`; blocks below the cutoff are exact
/// and have band below the cutoff. The Laplacian of `K_n` is recovered from
/// `A(K_n) = (n P_n - I)/(n - 1)` and `L = I - A`.
pub fn complete_family_projection(
    sizes: &[usize],
    eps: f64,
    schedule: &ProjectionSchedule,
) -> Result<FamilyProjection> {
    if sizes.is_empty() {
        return Err(Error::param("sizes", "need at least one size"));
    }
    let blocks = build_blocks(sizes, eps, schedule, true)?;
    let power = blocks.iter().map(|b| b.power).max().unwrap_or(0);
    let uniform_band = if power == 0 {
        schedule.cutoff - 1
    } else {
        (schedule.cutoff - 1).max(
            (schedule.degree + 1)
                .checked_pow(power as u32)
                .unwrap_or(usize::MAX),
        )
    };
    let max_n = sizes.iter().copied().max().unwrap_or(1);
    let bound = blocks.iter().map(|b| b.bound).fold(0.0, f64::max);
    let target = SparseOperator::block_diagonal(
        &sizes
            .iter()
            .map(|&n| constant_projection(n))
            .collect::<Vec<_>>(),
    );
    let approx = SparseOperator::block_diagonal(
        &blocks
            .iter()
            .map(|b| b.approximant.clone())
            .collect::<Vec<_>>(),
    );
    let sizes_json: Vec<usize> = sizes.to_vec();
    let projection = ApproximationCertificate::new(
        Method::ExpanderProjection,
        target,
        approx,
        uniform_band.min(max_n),
        bound,
    )
    .with_param("sizes", sizes_json.clone())
    .with_param("eps", eps)
    .with_param("degree", schedule.degree)
    .with_param("cutoff", schedule.cutoff)
    .with_param("power", power)
    .with_seed(schedule.seed);

    let laplacian = if sizes.iter().all(|&n| n >= 2) {
        let mut targets = Vec::new();
        let mut approxs = Vec::new();
        let mut lbound: f64 = 0.0;
        for b in &blocks {
            let n = b.n as f64;
            let factor = n / (n - 1.0);
            targets.push(normalized_laplacian(&crate::graph::complete_graph(b.n)?)?);
            approxs.push(
                SparseOperator::identity(b.n)
                    .sub(&b.approximant)?
                    .scale(factor),
            );
            lbound = lbound.max(factor * b.bound);
        }
        Some(
            ApproximationCertificate::new(
                Method::ExpanderProjection,
                SparseOperator::block_diagonal(&targets),
                SparseOperator::block_diagonal(&approxs),
                (uniform_band.saturating_add(1)).min(max_n),
                lbound,
            )
            .with_param("sizes", sizes_json)
            .with_param("eps", eps)
            .with_param("degree", schedule.degree)
            .with_param("cutoff", schedule.cutoff)
            .with_param("power", power)
            .with_param("operator", "laplacian")
            .with_seed(schedule.seed),
        )
    } else {
        None
    };
    Ok(FamilyProjection {
        projection,
        laplacian,
        blocks,
        power,
        uniform_band,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::complete_graph;
    use crate::operator::band_profile;
    use crate::spectral::exact_norm_small;
    use approx::assert_abs_diff_eq;

    #[test]
    fn k4_walk_error_is_one_third() {
        // Nontrivial eigenvalues of A(K_4) are -1/3, so W has 1/3 there.
        let e = Expander::from_graph(complete_graph(4).unwrap(), 0).unwrap();
        assert_abs_diff_eq!(e.spec.lambda, 1.0 / 3.0, epsilon = 1e-14);
        let cert = expander_projection(&e, 1).unwrap();
        let err = cert.error_operator().unwrap();
        assert_abs_diff_eq!(exact_norm_small(&err).unwrap(), 1.0 / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(cert.bound, 1.0 / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn walk_powers_fix_constants_and_decrease_bound() {
        let e = Expander::new(60, 4, 3).unwrap();
        assert!(e.spec.lambda < 1.0);
        let mut last = f64::INFINITY;
        for k in 1..5 {
            let cert = expander_projection(&e, k).unwrap();
            let ones = cert.approximant.mul_vec(&vec![1.0; 60]);
            assert!(ones.iter().all(|v| (v - 1.0).abs() <= 1e-12));
            assert!(cert.bound < last);
            last = cert.bound;
            assert!(band_profile(&cert.approximant).fits(cert.band));
        }
    }

    #[test]
    fn disconnected_graph_rejected() {
        let g =
            crate::graph::disjoint_union(&[complete_graph(3).unwrap(), complete_graph(3).unwrap()])
                .unwrap();
        assert!(matches!(
            Expander::from_graph(g, 0),
            Err(Error::Disconnected)
        ));
    }

    #[test]
    fn single_vertex_family_is_exact() {
        let fam = complete_family_projection(&[1], 0.1, &ProjectionSchedule::default()).unwrap();
        assert_eq!(fam.projection.bound, 0.0);
        assert_eq!(fam.projection.approximant.to_dense(), vec![vec![1.0]]);
        assert!(fam.laplacian.is_none());
    }

    #[test]
    fn adjacency_identity_for_k3() {
        // A(K_n) = (n P_n - I)/(n - 1).
        let n = 3;
        let a = normalized_adjacency(&complete_graph(n).unwrap()).unwrap();
        let rhs = constant_projection(n)
            .scale(n as f64)
            .sub(&SparseOperator::identity(n))
            .unwrap()
            .scale(1.0 / (n as f64 - 1.0));
        assert!(a.max_abs_diff(&rhs) <= 1e-15);
        assert_abs_diff_eq!(rhs.get(0, 1), 0.5, epsilon = 1e-15);
        assert_eq!(rhs.get(1, 1), 0.0);
    }

    #[test]
    fn family_uses_one_power() {
        let schedule = ProjectionSchedule {
            degree: 4,
            seed: 9,
            cutoff: 6,
        };
        let sizes: Vec<usize> = (2..20).collect();
        let fam = complete_family_projection(&sizes, 0.25, &schedule).unwrap();
        assert!(fam.power >= 1);
        for b in &fam.blocks {
            assert!(b.bound <= 0.25);
            if b.n >= 6 {
                assert_eq!(b.power, fam.power);
            } else {
                assert!(b.is_exact());
            }
        }
        let lap = fam.laplacian.unwrap().with_measurement(1).unwrap();
        assert!(lap.is_consistent(1e-9));
        let proj = fam.projection.with_measurement(2).unwrap();
        assert!(proj.is_consistent(1e-9));
    }

    #[test]
    fn schedule_validation() {
        let bad = ProjectionSchedule {
            degree: 3,
            ..Default::default()
        };
        assert!(projection_block(10, 0.1, &bad).is_err());
        let bad = ProjectionSchedule {
            degree: 4,
            cutoff: 4,
            seed: 0,
        };
        assert!(bad.validate().is_err());
        assert!(projection_block(10, -1.0, &ProjectionSchedule::default()).is_err());
    }
}
