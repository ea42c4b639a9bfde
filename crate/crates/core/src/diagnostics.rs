//! Training-dynamics analysis: constraint-wise Jacobian assembly, singular
//! spectra, effective rank, parameter-space-collapse detection, the kernel
//! eigenvalue relation, and linearized residual decay.
//!
//! For a constraint family with residuals `r_i(theta)`, the Jacobian row `i`
//! is the parameter gradient of `r_i`. Its singular spectrum determines how
//! many directions gradient descent can actually use: the effective rank at
//! energy threshold `eta` is the smallest number of leading directions
//! holding an `eta` fraction of the squared singular values. The kernel
//! matrix `K = J J^T` has eigenvalues equal to squared singular values, so
//! its condition number is the square of the Jacobian's, and the linearized
//! residual in each eigen-direction decays like `exp(-lambda_i t)`.

use crate::model::{PointModel, Query};
use crate::numerics::{singular_values, symmetric_eigenvalues, DenseMatrix, NumericsError};
use crate::problems::{Constraint, PdeProblem};
use crate::scalar::Scalar;
use crate::training::ConstraintSet;
use rayon::prelude::*;
use serde::Serialize;
use std::fmt;

/// Default energy threshold for effective-rank reports.
pub const DEFAULT_ETA: f64 = 0.99;
/// Algebraic-rank cutoff: singular values above `1e-10 * sigma_1` count.
pub const RANK_CUTOFF: f64 = 1e-10;
/// Collapse flag threshold: effective rank below this fraction of
/// `min(rows, params)` marks a collapsed parameter space.
pub const COLLAPSE_FRACTION: f64 = 0.05;
/// Diagnostic row cap per operator, keeping the Gram matrix desk-scale.
pub const MAX_ROWS: usize = 512;

#[derive(Debug, Clone, PartialEq)]
pub enum DiagnosticsError {
    /// Effective rank of an all-zero spectrum is undefined.
    ZeroSpectrum,
    /// Eta must lie strictly between 0 and 1.
    InvalidEta(f64),
    /// A Jacobian row came out non-finite at the named point index.
    NonFiniteRow { row: usize },
    Numerics(NumericsError),
}

impl fmt::Display for DiagnosticsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiagnosticsError::ZeroSpectrum => write!(f, "effective rank undefined: zero spectrum"),
            DiagnosticsError::InvalidEta(e) => write!(f, "eta {e} outside (0, 1)"),
            DiagnosticsError::NonFiniteRow { row } => {
                write!(f, "non-finite Jacobian row at point {row}")
            }
            DiagnosticsError::Numerics(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for DiagnosticsError {}

impl From<NumericsError> for DiagnosticsError {
    fn from(e: NumericsError) -> Self {
        DiagnosticsError::Numerics(e)
    }
}

/// Constraint family whose Jacobian is analyzed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatorKind {
    Ic,
    Pde,
    Bc,
}

impl OperatorKind {
    pub fn name(&self) -> &'static str {
        match self {
            OperatorKind::Ic => "ic",
            OperatorKind::Pde => "pde",
            OperatorKind::Bc => "bc",
        }
    }
}

/// Spectrum summary for one operator.
#[derive(Debug, Clone, Serialize)]
pub struct JacobianReport {
    pub operator: OperatorKind,
    /// Singular values, descending.
    pub sigma: Vec<f64>,
    /// Effective rank at the report's eta.
    pub r_eff: usize,
    /// Count of singular values above `1e-10 * sigma_1`.
    pub rank: usize,
    /// `sigma_1 / sigma_rank`.
    pub cond: f64,
    pub collapsed: bool,
    /// Residual vector 2-norm at the analyzed parameters.
    pub residual_norm: f64,
}

/// Kernel-matrix eigenvalue summary.
#[derive(Debug, Clone, Serialize)]
pub struct NtkReport {
    /// Eigenvalues of `J J^T`, descending.
    pub eigenvalues: Vec<f64>,
    pub cond: f64,
    /// Worst relative mismatch between eigenvalues and squared singular
    /// values, `|lambda - sigma^2| / max(lambda)`.
    pub sigma_sq_residual: f64,
    /// Spectral-bias decay-time ratio `(sigma_low / sigma_high)^2` between
    /// the lowest- and highest-decile spectrum indices.
    pub decay_time_ratio: f64,
}

/// Smallest `k` such that the top `k` squared singular values hold at least
/// `eta` of the total energy.
pub fn effective_rank(sigma: &[f64], eta: f64) -> Result<usize, DiagnosticsError> {
    if !(0.0 < eta && eta < 1.0) {
        return Err(DiagnosticsError::InvalidEta(eta));
    }
    let total: f64 = sigma.iter().map(|s| s * s).sum();
    if total == 0.0 || sigma.is_empty() {
        return Err(DiagnosticsError::ZeroSpectrum);
    }
    let mut acc = 0.0;
    for (k, s) in sigma.iter().enumerate() {
        acc += s * s;
        if acc / total >= eta {
            return Ok(k + 1);
        }
    }
    Ok(sigma.len())
}

/// Algebraic rank estimate.
pub fn rank_estimate(sigma: &[f64]) -> usize {
    let cutoff = sigma.first().copied().unwrap_or(0.0) * RANK_CUTOFF;
    sigma.iter().filter(|s| **s > cutoff).count()
}

/// Assemble the `N x p` Jacobian of one operator's residuals. Row `i` is
/// the full parameter gradient of residual `i`. `points` beyond
/// [`MAX_ROWS`] are truncated deterministically from the front of the set.
pub fn assemble_jacobian<S: Scalar, M: PointModel<S>>(
    model: &M,
    problem: &PdeProblem<S>,
    operator: OperatorKind,
    sets: &ConstraintSet<S>,
) -> Result<(DenseMatrix<f64>, Vec<f64>), DiagnosticsError> {
    let p = model.param_count();
    let rows: Vec<(Vec<f64>, f64)> = match operator {
        OperatorKind::Pde => {
            let points: Vec<_> = sets.pde.iter().take(MAX_ROWS).collect();
            points
                .par_iter()
                .map(|(x, t)| {
                    let mut scratch = M::Scratch::default();
                    let nq = problem.queries.len();
                    let mut q = vec![S::zero(); nq];
                    let mut partials = vec![S::zero(); nq];
                    model
                        .eval_queries(&problem.queries, x, *t, &mut scratch, &mut q)
                        .expect("query evaluation");
                    let mut out = Vec::with_capacity(problem.equations.len());
                    for eq in &problem.equations {
                        let r = (eq.eval)(&q, x, *t, &mut partials);
                        let mut grad = vec![S::zero(); p];
                        model
                            .accumulate_query_gradient(
                                &problem.queries,
                                &partials,
                                x,
                                *t,
                                S::one(),
                                &mut scratch,
                                &mut grad,
                            )
                            .expect("query gradient");
                        out.push((grad.iter().map(|g| g.value()).collect(), r.value()));
                    }
                    out
                })
                .flatten()
                .collect()
        }
        OperatorKind::Ic | OperatorKind::Bc => {
            let constraints = if operator == OperatorKind::Ic {
                &sets.ic
            } else {
                &sets.bc
            };
            constraints
                .par_iter()
                .take(MAX_ROWS)
                .map(|c| {
                    let mut scratch = M::Scratch::default();
                    let mut grad = vec![S::zero(); p];
                    let r = constraint_value_and_gradient(model, c, &mut scratch, &mut grad);
                    (grad.iter().map(|g| g.value()).collect(), r.value())
                })
                .collect()
        }
    };
    let n = rows.len();
    let mut data = Vec::with_capacity(n * p);
    let mut residual = Vec::with_capacity(n);
    for (row_idx, (row, r)) in rows.into_iter().enumerate() {
        if row.iter().any(|v| !v.is_finite()) || !r.is_finite() {
            return Err(DiagnosticsError::NonFiniteRow { row: row_idx });
        }
        data.extend(row);
        residual.push(r);
    }
    Ok((DenseMatrix::from_vec(n, p, data), residual))
}

fn constraint_value_and_gradient<S: Scalar, M: PointModel<S>>(
    model: &M,
    c: &Constraint<S>,
    scratch: &mut M::Scratch,
    grad: &mut [S],
) -> S {
    let mut out = [S::zero()];
    match c {
        Constraint::Dirichlet { x, t, field, target } => {
            model
                .eval_queries(&[Query::value(*field)], x, *t, scratch, &mut out)
                .expect("evaluation");
            model
                .accumulate_query_gradient(
                    &[Query::value(*field)],
                    &[S::one()],
                    x,
                    *t,
                    S::one(),
                    scratch,
                    grad,
                )
                .expect("gradient");
            out[0] - *target
        }
        Constraint::PeriodicPair { xa, xb, t, field } => {
            model
                .eval_queries(&[Query::value(*field)], xa, *t, scratch, &mut out)
                .expect("evaluation");
            let ua = out[0];
            model
                .accumulate_query_gradient(
                    &[Query::value(*field)],
                    &[S::one()],
                    xa,
                    *t,
                    S::one(),
                    scratch,
                    grad,
                )
                .expect("gradient");
            model
                .eval_queries(&[Query::value(*field)], xb, *t, scratch, &mut out)
                .expect("evaluation");
            model
                .accumulate_query_gradient(
                    &[Query::value(*field)],
                    &[S::one()],
                    xb,
                    *t,
                    -S::one(),
                    scratch,
                    grad,
                )
                .expect("gradient");
            ua - out[0]
        }
    }
}

/// Full spectrum report for one operator at the given eta.
pub fn jacobian_report(
    operator: OperatorKind,
    jacobian: &DenseMatrix<f64>,
    residual: &[f64],
    eta: f64,
) -> Result<JacobianReport, DiagnosticsError> {
    let sigma = singular_values(jacobian)?;
    let r_eff = effective_rank(&sigma, eta)?;
    let rank = rank_estimate(&sigma);
    let cond = if rank > 0 && sigma[rank - 1] > 0.0 {
        sigma[0] / sigma[rank - 1]
    } else {
        f64::INFINITY
    };
    let bound = jacobian.rows().min(jacobian.cols());
    let collapsed = (r_eff as f64) < COLLAPSE_FRACTION * bound as f64;
    Ok(JacobianReport {
        operator,
        sigma,
        r_eff,
        rank,
        cond,
        collapsed,
        residual_norm: residual.iter().map(|r| r * r).sum::<f64>().sqrt(),
    })
}

/// Kernel eigenvalues from a Jacobian: eigendecomposition of `J J^T`,
/// verified against squared singular values, with the quadratically
/// amplified condition number and the decile decay-time ratio.
pub fn ntk_from_jacobian(jacobian: &DenseMatrix<f64>) -> Result<NtkReport, DiagnosticsError> {
    let eigenvalues = symmetric_eigenvalues(&jacobian.gram())?;
    let sigma = singular_values(jacobian)?;
    let lead = eigenvalues.first().copied().unwrap_or(0.0).max(1e-300);
    let mut worst = 0.0f64;
    for (l, s) in eigenvalues.iter().zip(&sigma) {
        worst = worst.max((l - s * s).abs() / lead);
    }
    let rank = rank_estimate(&sigma);
    let cond = if rank > 0 && eigenvalues[rank - 1] > 0.0 {
        eigenvalues[0] / eigenvalues[rank - 1]
    } else {
        f64::INFINITY
    };
    let m = sigma.len();
    let low_idx = m / 10;
    let high_idx = (9 * m) / 10;
    let decay_time_ratio = if m > 1 && sigma[high_idx.min(m - 1)] > 0.0 {
        (sigma[low_idx] / sigma[high_idx.min(m - 1)]).powi(2)
    } else {
        f64::INFINITY
    };
    Ok(NtkReport {
        eigenvalues,
        cond,
        sigma_sq_residual: worst,
        decay_time_ratio,
    })
}

/// Closed-form linearized residual decay `r_i(t) = r_i(0) e^(-lambda_i t)`
/// per eigen-direction over a time grid.
pub fn simulate_residual_decay(
    eigenvalues: &[f64],
    initial: &[f64],
    times: &[f64],
) -> Vec<Vec<f64>> {
    assert_eq!(eigenvalues.len(), initial.len());
    eigenvalues
        .iter()
        .zip(initial)
        .map(|(&l, &r0)| times.iter().map(|&t| r0 * (-l * t).exp()).collect())
        .collect()
}
