//! The off-diagonal block of `A(K_{k,l})` and its band-sparse approximations.
//!
//! The `l x k` block has every entry `1/sqrt(kl)`. Writing `l = (m-1)k + r`
//! with `m = ceil(l/k)`, it equals `sqrt(k/l)` times `m - 1` stacked copies of
//! `P_k` followed by the first `r` rows of `P_k`. Replacing each `P_k` by a
//! sparse `C_k` gives the approximant. Conversely any `l x k` matrix with at
//! most `d` nonzeros per column has at least `l - kd` zero rows, which bounds
//! its distance from the block below.

use crate::approx::expander::{projection_block, ProjectionSchedule};
use crate::certificate::{ApproximationCertificate, Method};
use crate::error::{Error, Result};
use crate::operator::SparseOperator;

/// The `l x k` matrix with entries `1/sqrt(kl)`.
pub fn bipartite_block(k: usize, l: usize) -> Result<SparseOperator> {
    check_sizes(k, l)?;
    Ok(SparseOperator::constant(
        l,
        k,
        1.0 / ((k * l) as f64).sqrt(),
    ))
}

fn check_sizes(k: usize, l: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::param("k", "must be at least 1"));
    }
    if k > l {
        return Err(Error::param("l", format!("need k <= l, got k={k}, l={l}")));
    }
    Ok(())
}

pub fn bipartite_stack_approx(
    k: usize,
    l: usize,
    eps: f64,
    schedule: &ProjectionSchedule,
) -> Result<ApproximationCertificate> {
    check_sizes(k, l)?;
    if !(eps > 0.0) {
        return Err(Error::param("eps", format!("must be positive, got {eps}")));
    }
    let m = l.div_ceil(k);
    let remainder = l - (m - 1) * k;
    let scale = (k as f64 / l as f64).sqrt();
    // ||stack of m copies of E|| <= sqrt(m) ||E||.
    let factor = scale * (m as f64).sqrt();
    let block = projection_block(k, eps / factor, schedule)?;

    let rows: Vec<usize> = (0..remainder).collect();
    let cols: Vec<usize> = (0..k).collect();
    let mut parts = vec![block.approximant.clone(); m - 1];
    parts.push(block.approximant.restrict(&rows, &cols)?);
    let approximant = SparseOperator::vstack(&parts)?.scale(scale);

    let block_band = crate::operator::band_profile(&block.approximant).band();
    let mut cert = ApproximationCertificate::new(
        Method::BipartiteStack,
        bipartite_block(k, l)?,
        approximant,
        m * block_band,
        factor * block.bound,
    )
    .with_param("k", k)
    .with_param("l", l)
    .with_param("eps", eps)
    .with_param("copies", m)
    .with_param("block_bound", block.bound)
    .with_param("block_power", block.power);
    if let Some(spec) = &block.expander {
        cert = cert
            .with_param("degree", spec.d)
            .with_param("lambda", spec.lambda)
            .with_seed(spec.seed);
    }
    Ok(cert)
}

/// `sqrt(max(0, l - kd)/l)`: no `l x k` matrix with at most `d` nonzeros per
/// column comes closer to [`bipartite_block`] in operator norm.
pub fn bipartite_lower_bound(k: usize, l: usize, d: usize) -> Result<f64> {
    if k == 0 || l == 0 || d == 0 {
        return Err(Error::param("k, l, d", "all must be at least 1"));
    }
    let zero_rows = l.saturating_sub(k.saturating_mul(d));
    Ok((zero_rows as f64 / l as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::band_profile;
    use crate::spectral::exact_norm_small;
    use approx::assert_abs_diff_eq;

    #[test]
    fn lower_bound_values() {
        assert_abs_diff_eq!(
            bipartite_lower_bound(2, 12, 2).unwrap(),
            (2.0f64 / 3.0).sqrt(),
            epsilon = 1e-15
        );
        assert_eq!(bipartite_lower_bound(4, 8, 2).unwrap(), 0.0);
        let far = bipartite_lower_bound(2, 1_000_000, 2).unwrap();
        assert!(far > 0.999);
        assert!(bipartite_lower_bound(0, 1, 1).is_err());
    }

    #[test]
    fn projection_onto_zero_rows_matches_bound() {
        // Rows 4.. of the 12x2 block form B'.
        let b = bipartite_block(2, 12).unwrap();
        let rows: Vec<usize> = (4..12).collect();
        let b_prime = b.restrict(&rows, &[0, 1]).unwrap();
        assert_abs_diff_eq!(
            exact_norm_small(&b_prime).unwrap(),
            bipartite_lower_bound(2, 12, 2).unwrap(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn square_case_is_one_block() {
        let s = ProjectionSchedule::default();
        let cert = bipartite_stack_approx(12, 12, 0.3, &s).unwrap();
        let single = projection_block(12, 0.3, &s).unwrap();
        assert_eq!(cert.bound, single.bound);
        assert_eq!(cert.params["copies"], 1);
    }

    #[test]
    fn star_column_is_exact() {
        let cert = bipartite_stack_approx(1, 7, 0.1, &ProjectionSchedule::default()).unwrap();
        assert_eq!(cert.bound, 0.0);
        assert!(cert.error_operator().unwrap().is_zero());
        // A single column with l entries.
        assert_eq!(band_profile(&cert.approximant).max_col_nonzeros, 7);
    }

    #[test]
    fn measured_error_within_bound() {
        let s = ProjectionSchedule {
            degree: 4,
            seed: 5,
            cutoff: 5,
        };
        let cert = bipartite_stack_approx(5, 12, 0.3, &s)
            .unwrap()
            .with_measurement(0)
            .unwrap();
        assert!(cert.bound <= 0.3);
        assert!(cert.is_consistent(1e-9));
        let exact = exact_norm_small(&cert.error_operator().unwrap()).unwrap();
        assert!(exact <= cert.bound + 1e-9);
    }
}
