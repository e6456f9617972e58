//! Regular graphs through their complements.
//!
//! For an `n`-regular graph on `m` vertices with complement `G'`,
//! `n A_G = (m-1) A_{K_m} - (m-n-1) A_{G'}`, and `(m-1) A_{K_m} = m P_m - I`.
//! Approximating `P_m` and dropping the complement term costs at most
//! `(m-n-1)/n`, which is small for nearly complete graphs.

use serde::{Deserialize, Serialize};

use crate::approx::expander::{projection_block, ProjectionSchedule};
use crate::certificate::{ApproximationCertificate, Method};
use crate::error::{Error, Result};
use crate::graph::{complement, complete_graph, Graph};
use crate::operator::{band_profile, normalized_adjacency, SparseOperator};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularIdentityReport {
    /// Common degree.
    pub n: usize,
    /// Vertex count.
    pub m: usize,
    /// Largest entrywise gap between the two sides of the identity.
    pub max_residual: f64,
}

fn regular_degree(g: &Graph) -> Result<usize> {
    let m = g.vertex_count();
    if m == 0 {
        return Err(Error::param("g", "graph has no vertices"));
    }
    let n = g.degree(0);
    if let Some(v) = (0..m).find(|&v| g.degree(v) != n) {
        return Err(Error::NotRegular {
            vertex: v,
            degree: g.degree(v),
            expected: n,
        });
    }
    if n == 0 {
        return Err(Error::IsolatedVertex(0));
    }
    Ok(n)
}

/// Checks `n A_G = (m-1) A_{K_m} - (m-n-1) A_{G'}` entrywise.
pub fn regular_identity(g: &Graph) -> Result<RegularIdentityReport> {
    let n = regular_degree(g)?;
    let m = g.vertex_count();
    let lhs = normalized_adjacency(g)?.scale(n as f64);
    let mut rhs = normalized_adjacency(&complete_graph(m)?)?.scale((m - 1) as f64);
    let weight = m - n - 1;
    if weight > 0 {
        rhs = rhs.sub(&normalized_adjacency(&complement(g))?.scale(weight as f64))?;
    }
    Ok(RegularIdentityReport {
        n,
        m,
        max_residual: lhs.max_abs_diff(&rhs),
    })
}

/// Approximates `A_G` by `(m C_m - I)/n`, with `C_m` chosen so the `K_m`
/// part of the error is at most `eps`.
pub fn regular_complement_decomposition(
    g: &Graph,
    eps: f64,
    schedule: &ProjectionSchedule,
) -> Result<(RegularIdentityReport, ApproximationCertificate)> {
    if !(eps > 0.0) {
        return Err(Error::param("eps", format!("must be positive, got {eps}")));
    }
    let report = regular_identity(g)?;
    let (n, m) = (report.n as f64, report.m as f64);
    let block = projection_block(report.m, eps * n / m, schedule)?;
    let approximant = block
        .approximant
        .scale(m)
        .sub(&SparseOperator::identity(report.m))?
        .scale(1.0 / n);
    let k_part = m / n * block.bound;
    let complement_part = (m - n - 1.0) / n;
    let block_band = band_profile(&block.approximant).band();
    let mut cert = ApproximationCertificate::new(
        Method::RegularComplement,
        normalized_adjacency(g)?,
        approximant,
        block_band + 1,
        k_part + complement_part,
    )
    .with_param("degree", report.n)
    .with_param("vertices", report.m)
    .with_param("eps", eps)
    .with_param("complete_part", k_part)
    .with_param("complement_part", complement_part);
    if let Some(spec) = &block.expander {
        cert = cert
            .with_param("expander_degree", spec.d)
            .with_param("power", block.power)
            .with_seed(spec.seed);
    }
    Ok((report, cert))
}
