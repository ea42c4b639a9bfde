use super::{DomainGeometry, SamplingError};
use crate::numerics::RandomSource;
use crate::scalar::Scalar;

/// Latin hypercube sample of `n` points over a d-dimensional box.
///
/// Per dimension, the `n` values occupy `n` distinct equal-width strata
/// (one jittered sample each) with stratum order shuffled. Draw order is
/// fixed — jitters first, then the permutation — so a seed pins the exact
/// point set.
pub fn lhs_points<S: Scalar>(
    rs: &mut RandomSource,
    n: usize,
    box_bounds: &[(S, S)],
) -> Result<Vec<Vec<S>>, SamplingError> {
    if n < 1 {
        return Err(SamplingError::InvalidInput("lhs_points requires n >= 1"));
    }
    let d = box_bounds.len();
    let mut pts = vec![vec![S::zero(); d]; n];
    let inv_n = S::from_f64(1.0 / n as f64);
    for (j, &(lo, hi)) in box_bounds.iter().enumerate() {
        let jitter: Vec<S> = (0..n).map(|_| rs.draw_uniform(S::zero(), S::one())).collect();
        let mut perm: Vec<usize> = (0..n).collect();
        rs.shuffle(&mut perm);
        let width = hi - lo;
        for i in 0..n {
            let u = (S::from_f64(perm[i] as f64) + jitter[i]) * inv_n;
            pts[i][j] = lo + width * u;
        }
    }
    Ok(pts)
}

/// `n` points strictly inside the domain and outside all holes, by
/// Latin-hypercube candidates over the bounding box with rejection. A plain
/// rectangle accepts its first batch unchanged, so the holes-free case
/// coincides with [`lhs_points`]. Errors out if the acceptance ratio falls
/// below 1e-3.
pub fn interior_points<S: Scalar>(
    geometry: &DomainGeometry,
    n: usize,
    rs: &mut RandomSource,
) -> Result<Vec<Vec<S>>, SamplingError> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let bbox = geometry.bounding_box();
    let bounds: Vec<(S, S)> = bbox
        .iter()
        .map(|&(lo, hi)| (S::from_f64(lo), S::from_f64(hi)))
        .collect();
    let mut accepted: Vec<Vec<S>> = Vec::with_capacity(n);
    let mut attempted = 0usize;
    while accepted.len() < n {
        let want = n - accepted.len();
        let batch = lhs_points(rs, want.max(16).min(4 * n), &bounds)?;
        attempted += batch.len();
        for p in batch {
            if geometry.strictly_inside([p[0].value(), p[1].value()]) {
                accepted.push(p);
                if accepted.len() == n {
                    break;
                }
            }
        }
        if attempted >= 1000.max(4 * n) && (accepted.len() as f64) < 1e-3 * attempted as f64 {
            return Err(SamplingError::GeometryDegenerate {
                accepted: accepted.len(),
                attempted,
            });
        }
    }
    Ok(accepted)
}
