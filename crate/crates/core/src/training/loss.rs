use super::{stream, TrainConfig, TrainError};
use crate::model::{PointModel, Query};
use crate::problems::{metrics, Constraint, ErrorMetrics, PdeProblem};
use crate::scalar::Scalar;
use rayon::prelude::*;

/// Fixed chunk size for parallel reductions: partial sums always combine in
/// chunk order, making results independent of the worker count.
const CHUNK: usize = 256;

/// Point sets sampled once before the training loop, one purpose-labeled
/// random stream each.
pub struct ConstraintSet<S> {
    pub ic: Vec<Constraint<S>>,
    pub bc: Vec<Constraint<S>>,
    pub pde: Vec<(Vec<S>, Option<S>)>,
}

impl<S: Scalar> ConstraintSet<S> {
    pub fn sample(problem: &PdeProblem<S>, config: &TrainConfig) -> Result<Self, TrainError> {
        let ic = match (&problem.sample_ic, config.n_ic) {
            (Some(sampler), n) if n > 0 => sampler(n, &mut stream(config.seed, "ic")),
            _ => Vec::new(),
        };
        let bc = if config.n_bc > 0 {
            (problem.sample_bc)(config.n_bc, &mut stream(config.seed, "bc"))
        } else {
            Vec::new()
        };
        let pde = (problem.sample_pde)(config.n_pde, &mut stream(config.seed, "pde"));
        Ok(ConstraintSet { ic, bc, pde })
    }
}

/// Per-component mean squared losses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossTerms {
    pub ic: f64,
    pub pde: f64,
    pub bc: f64,
}

impl LossTerms {
    pub fn total(&self, config: &TrainConfig) -> f64 {
        config.lambda_ic * self.ic + config.lambda_pde * self.pde + config.lambda_bc * self.bc
    }

    pub fn worst_component(&self) -> (&'static str, f64) {
        let mut worst = ("ic", self.ic);
        for (name, v) in [("pde", self.pde), ("bc", self.bc)] {
            if !v.is_finite() || v > worst.1 {
                worst = (name, v);
            }
        }
        worst
    }
}

/// Residual of one equality constraint.
fn constraint_residual<S: Scalar, M: PointModel<S>>(
    model: &M,
    c: &Constraint<S>,
    scratch: &mut M::Scratch,
) -> S {
    let mut out = [S::zero()];
    match c {
        Constraint::Dirichlet { x, t, field, target } => {
            model
                .eval_queries(&[Query::value(*field)], x, *t, scratch, &mut out)
                .expect("constraint evaluation");
            out[0] - *target
        }
        Constraint::PeriodicPair { xa, xb, t, field } => {
            model
                .eval_queries(&[Query::value(*field)], xa, *t, scratch, &mut out)
                .expect("constraint evaluation");
            let ua = out[0];
            model
                .eval_queries(&[Query::value(*field)], xb, *t, scratch, &mut out)
                .expect("constraint evaluation");
            ua - out[0]
        }
    }
}

/// Accumulate `scale * d residual / d theta` for one constraint.
fn constraint_gradient<S: Scalar, M: PointModel<S>>(
    model: &M,
    c: &Constraint<S>,
    scale: S,
    scratch: &mut M::Scratch,
    acc: &mut [S],
) {
    match c {
        Constraint::Dirichlet { x, t, field, .. } => {
            model
                .accumulate_query_gradient(
                    &[Query::value(*field)],
                    &[S::one()],
                    x,
                    *t,
                    scale,
                    scratch,
                    acc,
                )
                .expect("constraint gradient");
        }
        Constraint::PeriodicPair { xa, xb, t, field } => {
            model
                .accumulate_query_gradient(
                    &[Query::value(*field)],
                    &[S::one()],
                    xa,
                    *t,
                    scale,
                    scratch,
                    acc,
                )
                .expect("constraint gradient");
            model
                .accumulate_query_gradient(
                    &[Query::value(*field)],
                    &[S::one()],
                    xb,
                    *t,
                    -scale,
                    scratch,
                    acc,
                )
                .expect("constraint gradient");
        }
    }
}

/// Mean squared constraint loss and its gradient contribution
/// `lambda * (2/N) * sum_i r_i * d r_i / d theta`, chunk-parallel.
fn constraint_loss_grad<S: Scalar, M: PointModel<S>>(
    model: &M,
    constraints: &[Constraint<S>],
    lambda: f64,
    grad: &mut [S],
) -> f64 {
    if constraints.is_empty() {
        return 0.0;
    }
    let n = constraints.len();
    let scale0 = 2.0 * lambda / n as f64;
    let parts: Vec<(f64, Vec<S>)> = constraints
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut scratch = M::Scratch::default();
            let mut local = vec![S::zero(); grad.len()];
            let mut loss = 0.0f64;
            for c in chunk {
                let r = constraint_residual(model, c, &mut scratch);
                loss += r.value() * r.value();
                if lambda != 0.0 {
                    constraint_gradient(model, c, S::from_f64(scale0) * r, &mut scratch, &mut local);
                }
            }
            (loss, local)
        })
        .collect();
    let mut loss = 0.0;
    for (l, part) in parts {
        loss += l;
        for (g, p) in grad.iter_mut().zip(part) {
            *g = *g + p;
        }
    }
    loss / n as f64
}

/// PDE loss over collocation points: mean over points of the summed squared
/// equation residuals, with the chain-rule gradient folded into one
/// `accumulate_query_gradient` call per point.
fn pde_loss_grad<S: Scalar, M: PointModel<S>>(
    model: &M,
    problem: &PdeProblem<S>,
    points: &[(Vec<S>, Option<S>)],
    lambda: f64,
    grad: &mut [S],
) -> f64 {
    let n = points.len();
    let nq = problem.queries.len();
    let scale0 = 2.0 * lambda / n as f64;
    let parts: Vec<(f64, Vec<S>)> = points
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut scratch = M::Scratch::default();
            let mut local = vec![S::zero(); grad.len()];
            let mut q = vec![S::zero(); nq];
            let mut partials = vec![S::zero(); nq];
            let mut weights = vec![S::zero(); nq];
            let mut loss = 0.0f64;
            for (x, t) in chunk {
                model
                    .eval_queries(&problem.queries, x, *t, &mut scratch, &mut q)
                    .expect("query evaluation");
                for w in weights.iter_mut() {
                    *w = S::zero();
                }
                for eq in &problem.equations {
                    let r = (eq.eval)(&q, x, *t, &mut partials);
                    loss += r.value() * r.value();
                    for (w, p) in weights.iter_mut().zip(&partials) {
                        *w = *w + r * *p;
                    }
                }
                if lambda != 0.0 {
                    model
                        .accumulate_query_gradient(
                            &problem.queries,
                            &weights,
                            x,
                            *t,
                            S::from_f64(scale0),
                            &mut scratch,
                            &mut local,
                        )
                        .expect("query gradient");
                }
            }
            (loss, local)
        })
        .collect();
    let mut loss = 0.0;
    for (l, part) in parts {
        loss += l;
        for (g, p) in grad.iter_mut().zip(part) {
            *g = *g + p;
        }
    }
    loss / n as f64
}

/// All weighted loss components plus their combined gradient into `grad`.
pub fn losses_and_gradient<S: Scalar, M: PointModel<S>>(
    model: &M,
    problem: &PdeProblem<S>,
    sets: &ConstraintSet<S>,
    config: &TrainConfig,
    grad: &mut [S],
) -> Result<LossTerms, TrainError> {
    let ic = constraint_loss_grad(model, &sets.ic, config.lambda_ic, grad);
    let bc = constraint_loss_grad(model, &sets.bc, config.lambda_bc, grad);
    let pde = pde_loss_grad(model, problem, &sets.pde, config.lambda_pde, grad);
    Ok(LossTerms { ic, pde, bc })
}

/// Loss values only (no gradient), for tests and reporting.
pub fn losses_only<S: Scalar, M: PointModel<S>>(
    model: &M,
    problem: &PdeProblem<S>,
    sets: &ConstraintSet<S>,
) -> LossTerms {
    let mut sink: Vec<S> = Vec::new();
    let ic = constraint_loss_grad(model, &sets.ic, 0.0, &mut sink);
    let bc = constraint_loss_grad(model, &sets.bc, 0.0, &mut sink);
    let pde = pde_loss_grad(model, problem, &sets.pde, 0.0, &mut sink);
    LossTerms { ic, pde, bc }
}

/// Per-field error metrics over an evaluation point set.
pub fn test_metrics<S: Scalar, M: PointModel<S>>(
    model: &M,
    problem: &PdeProblem<S>,
    points: &[(Vec<S>, Option<S>)],
) -> Result<Vec<ErrorMetrics>, TrainError> {
    if problem.exact.is_none() {
        return Ok(Vec::new());
    }
    let nf = problem.field_count;
    let queries: Vec<Query> = (0..nf as u8).map(Query::value).collect();
    let preds: Vec<Vec<S>> = points
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut scratch = M::Scratch::default();
            let mut out = vec![S::zero(); nf];
            let mut vals = Vec::with_capacity(chunk.len() * nf);
            for (x, t) in chunk {
                model
                    .eval_queries(&queries, x, *t, &mut scratch, &mut out)
                    .expect("evaluation");
                vals.extend_from_slice(&out);
            }
            vals
        })
        .collect();
    let flat: Vec<S> = preds.into_iter().flatten().collect();
    let mut result = Vec::with_capacity(nf);
    for f in 0..nf {
        let pred: Vec<S> = flat.iter().skip(f).step_by(nf).copied().collect();
        let reference = problem.exact_on(points, f).unwrap();
        result.push(
            metrics::field_metrics(&pred, &reference, problem.gauge_fields[f])
                .map_err(TrainError::from)?,
        );
    }
    Ok(result)
}
