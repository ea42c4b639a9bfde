use super::{DenseMatrix, NumericsError};
use crate::scalar::Scalar;

const MAX_SWEEPS: usize = 100;
const EIGEN_REL_TOL: f64 = 1e-12;
const SYMMETRY_TOL: f64 = 1e-10;

/// All eigenvalues of a symmetric matrix, sorted descending.
///
/// Cyclic Jacobi rotations, run until the off-diagonal Frobenius norm drops
/// below `1e-12` times its initial value (at most 100 sweeps, reported as an
/// error rather than returning a half-converged spectrum).
pub fn symmetric_eigenvalues<S: Scalar>(m: &DenseMatrix<S>) -> Result<Vec<S>, NumericsError> {
    if m.rows() != m.cols() {
        return Err(NumericsError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    m.ensure_finite()?;
    let scale = m
        .as_slice()
        .iter()
        .fold(0.0f64, |acc, v| acc.max(v.abs().value()));
    let max_dev = m.max_asymmetry();
    if max_dev > SYMMETRY_TOL * scale.max(1.0) {
        return Err(NumericsError::Asymmetric { max_deviation: max_dev });
    }

    let n = m.rows();
    let mut a = m.clone();
    // Symmetrize exactly so rotations stay consistent.
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = (a.get(i, j) + a.get(j, i)) * S::from_f64(0.5);
            a.set(i, j, avg);
            a.set(j, i, avg);
        }
    }

    let initial_off = off_diagonal_norm(&a);
    if initial_off.value() == 0.0 || n < 2 {
        return Ok(sorted_descending(diagonal(&a)));
    }
    let target = initial_off * S::from_f64(EIGEN_REL_TOL);

    for _sweep in 0..MAX_SWEEPS {
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq.abs().value() == 0.0 {
                    continue;
                }
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                // Classic stable rotation: t = sign(theta)/(|theta| + sqrt(theta^2+1))
                let theta = (aqq - app) / (S::from_f64(2.0) * apq);
                let t = {
                    let denom = theta.abs() + (theta * theta + S::one()).sqrt();
                    let mag = S::one() / denom;
                    if theta < S::zero() {
                        -mag
                    } else {
                        mag
                    }
                };
                let c = S::one() / (t * t + S::one()).sqrt();
                let s = t * c;

                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
            }
        }
        if off_diagonal_norm(&a) <= target {
            return Ok(sorted_descending(diagonal(&a)));
        }
    }
    Err(NumericsError::NoConvergence {
        sweeps: MAX_SWEEPS,
        off_norm: off_diagonal_norm(&a).value(),
    })
}

/// Singular values of a rectangular matrix, sorted descending.
///
/// Wide matrices (rows <= cols) go through the eigendecomposition of the
/// Gram matrix `m m^T`, which keeps the workspace at `rows x rows`; tall
/// matrices use one-sided Jacobi on the columns. Returns
/// `min(rows, cols)` values with negatives clipped at zero before the
/// square root.
pub fn singular_values<S: Scalar>(m: &DenseMatrix<S>) -> Result<Vec<S>, NumericsError> {
    m.ensure_finite()?;
    if m.rows() == 0 || m.cols() == 0 {
        return Ok(Vec::new());
    }
    if m.rows() <= m.cols() {
        let eigs = symmetric_eigenvalues(&m.gram())?;
        Ok(eigs
            .into_iter()
            .map(|l| l.max(S::zero()).sqrt())
            .collect())
    } else {
        one_sided_jacobi(m)
    }
}

/// One-sided Jacobi: rotate column pairs of a working copy until all pairs
/// are numerically orthogonal; singular values are the column norms.
fn one_sided_jacobi<S: Scalar>(m: &DenseMatrix<S>) -> Result<Vec<S>, NumericsError> {
    let rows = m.rows();
    let cols = m.cols();
    // Column-major working copy for contiguous column access.
    let mut col: Vec<Vec<S>> = (0..cols)
        .map(|j| (0..rows).map(|i| m.get(i, j)).collect())
        .collect();

    let tol = S::from_f64(EIGEN_REL_TOL);
    for sweep in 0..MAX_SWEEPS {
        let mut converged = true;
        for p in 0..cols - 1 {
            for q in (p + 1)..cols {
                let mut app = S::zero();
                let mut aqq = S::zero();
                let mut apq = S::zero();
                for i in 0..rows {
                    let x = col[p][i];
                    let y = col[q][i];
                    app = app + x * x;
                    aqq = aqq + y * y;
                    apq = apq + x * y;
                }
                if apq.abs() <= tol * (app * aqq).sqrt() {
                    continue;
                }
                converged = false;
                let theta = (aqq - app) / (S::from_f64(2.0) * apq);
                let t = {
                    let denom = theta.abs() + (theta * theta + S::one()).sqrt();
                    let mag = S::one() / denom;
                    if theta < S::zero() {
                        -mag
                    } else {
                        mag
                    }
                };
                let c = S::one() / (t * t + S::one()).sqrt();
                let s = t * c;
                for i in 0..rows {
                    let x = col[p][i];
                    let y = col[q][i];
                    col[p][i] = c * x - s * y;
                    col[q][i] = s * x + c * y;
                }
            }
        }
        if converged {
            let mut sv: Vec<S> = col
                .iter()
                .map(|cv| {
                    let mut acc = S::zero();
                    for &x in cv {
                        acc = acc + x * x;
                    }
                    acc.sqrt()
                })
                .collect();
            sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
            return Ok(sv);
        }
        let _ = sweep;
    }
    Err(NumericsError::NoConvergence {
        sweeps: MAX_SWEEPS,
        off_norm: f64::NAN,
    })
}

fn diagonal<S: Scalar>(a: &DenseMatrix<S>) -> Vec<S> {
    (0..a.rows()).map(|i| a.get(i, i)).collect()
}

fn sorted_descending<S: Scalar>(mut v: Vec<S>) -> Vec<S> {
    v.sort_by(|a, b| b.partial_cmp(a).unwrap());
    v
}

fn off_diagonal_norm<S: Scalar>(a: &DenseMatrix<S>) -> S {
    let n = a.rows();
    let mut acc = S::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let v = a.get(i, j);
                acc = acc + v * v;
            }
        }
    }
    acc.sqrt()
}
