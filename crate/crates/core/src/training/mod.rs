//! Physics-informed loss assembly, Adam optimization with stepwise decay,
//! and the end-to-end training loop shared by the spectral model and the
//! fully-connected baseline.
//!
//! Losses are mean squared residuals over fixed point sets sampled once
//! before the loop. Gradient evaluation parallelizes over collocation points
//! in fixed-size chunks whose partial sums combine in chunk order, so
//! results are bit-identical for any worker count.

mod adam;
mod loss;
mod record;

pub use adam::AdamState;
pub use loss::{losses_and_gradient, losses_only, test_metrics, ConstraintSet, LossTerms};
pub use record::TrainRecord;

use crate::model::PointModel;
use crate::numerics::{sub_seed, RandomSource};
use crate::problems::{PdeProblem, ProblemError};
use crate::scalar::Scalar;
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum TrainError {
    /// Loss became non-finite; partial records are preserved by the caller.
    NonFiniteLoss {
        epoch: usize,
        component: &'static str,
        magnitude: f64,
    },
    Config(String),
    Problem(ProblemError),
}

impl fmt::Display for TrainError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrainError::NonFiniteLoss { epoch, component, magnitude } => write!(
                f,
                "non-finite {component} loss at epoch {epoch} (last finite magnitude {magnitude:.3e})"
            ),
            TrainError::Config(msg) => write!(f, "configuration error: {msg}"),
            TrainError::Problem(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for TrainError {}

impl From<ProblemError> for TrainError {
    fn from(e: ProblemError) -> Self {
        TrainError::Problem(e)
    }
}

/// Optimizer hyperparameters, schedule, point counts, and loss weights.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    /// Initial Adam learning rate.
    pub learning_rate: f64,
    /// Multiplicative decay applied every `decay_every` epochs.
    pub decay_factor: f64,
    pub decay_every: usize,
    pub lambda_ic: f64,
    pub lambda_pde: f64,
    pub lambda_bc: f64,
    pub n_ic: usize,
    pub n_bc: usize,
    pub n_pde: usize,
    pub seed: u64,
    /// Record cadence in epochs; 0 records only the final epoch.
    pub eval_stride: usize,
    /// Compute test metrics (rel_l2, max_abs) at record epochs.
    pub eval_metrics: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 5000,
            learning_rate: 1e-3,
            decay_factor: 0.99,
            decay_every: 500,
            lambda_ic: 1.0,
            lambda_pde: 1.0,
            lambda_bc: 1.0,
            n_ic: 1000,
            n_bc: 400,
            n_pde: 2000,
            seed: 0,
            eval_stride: 100,
            eval_metrics: true,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), TrainError> {
        if self.epochs < 1 {
            return Err(TrainError::Config("epochs must be >= 1".into()));
        }
        if self.n_pde < 1 {
            return Err(TrainError::Config("n_pde must be >= 1".into()));
        }
        if self.lambda_ic < 0.0 || self.lambda_pde < 0.0 || self.lambda_bc < 0.0 {
            return Err(TrainError::Config("loss weights must be non-negative".into()));
        }
        Ok(())
    }

    /// `alpha * factor^(floor(epoch / every))`.
    pub fn learning_rate_at(&self, epoch: usize) -> f64 {
        self.learning_rate * self.decay_factor.powi((epoch / self.decay_every) as i32)
    }
}

/// Outcome of a training run: final model is mutated in place; records
/// carry the loss curve and optional test metrics.
pub struct TrainOutput {
    pub records: Vec<TrainRecord>,
    /// Wall-clock seconds spent in the loop (excluded from records so record
    /// streams stay byte-identical across runs).
    pub wall_seconds: f64,
}

/// Train `model` on `problem` per Algorithm-style full-batch Adam: sample
/// points once, loop epochs computing weighted component losses and their
/// gradient, update with the scheduled learning rate. Deterministic given
/// the seed, for any rayon worker count.
pub fn train<S: Scalar, M: PointModel<S>>(
    model: &mut M,
    problem: &PdeProblem<S>,
    config: &TrainConfig,
) -> Result<TrainOutput, TrainError> {
    train_with(model, problem, config, |_| {})
}

/// [`train`] with a record sink invoked as records are produced, so callers
/// streaming to disk keep partial curves when a run aborts on a non-finite
/// loss. The abort itself emits one last diagnostic record through the sink
/// (epoch, offending component magnitudes) before the error returns.
pub fn train_with<S: Scalar, M: PointModel<S>>(
    model: &mut M,
    problem: &PdeProblem<S>,
    config: &TrainConfig,
    mut on_record: impl FnMut(&TrainRecord),
) -> Result<TrainOutput, TrainError> {
    config.validate()?;
    if model.field_count() != problem.field_count
        || model.is_time_dependent() != problem.time_dependent
        || model.dim() != problem.dim
    {
        return Err(TrainError::Config(format!(
            "model shape (dim {}, fields {}, time {}) does not match problem `{}`",
            model.dim(),
            model.field_count(),
            model.is_time_dependent(),
            problem.id
        )));
    }
    if problem.time_dependent && config.n_ic == 0 {
        return Err(TrainError::Config(
            "time-dependent problem requires n_ic >= 1".into(),
        ));
    }

    let start = std::time::Instant::now();
    let sets = ConstraintSet::sample(problem, config)?;
    let mut adam = AdamState::new(model.param_count());
    let mut records = Vec::new();
    let mut params: Vec<S> = model.flatten().data;
    let mut grad = vec![S::zero(); params.len()];

    let eval_points = if config.eval_metrics {
        problem.eval_points()
    } else {
        Vec::new()
    };

    for epoch in 0..config.epochs {
        let lr = config.learning_rate_at(epoch);
        for g in grad.iter_mut() {
            *g = S::zero();
        }
        let terms = loss::losses_and_gradient(model, problem, &sets, config, &mut grad)?;
        let total = terms.total(config);
        if !total.is_finite() {
            let (component, magnitude) = terms.worst_component();
            on_record(&TrainRecord::new(epoch, &terms, total, lr, None));
            return Err(TrainError::NonFiniteLoss {
                epoch,
                component,
                magnitude,
            });
        }

        adam.step(&mut params, &grad, S::from_f64(lr));
        model
            .assign_flat(&params)
            .map_err(|e| TrainError::Config(e.to_string()))?;

        let is_last = epoch + 1 == config.epochs;
        let due = config.eval_stride > 0 && (epoch + 1) % config.eval_stride == 0;
        if due || is_last {
            let metrics = if config.eval_metrics {
                Some(loss::test_metrics(model, problem, &eval_points)?)
            } else {
                None
            };
            let record = TrainRecord::new(epoch + 1, &terms, total, lr, metrics);
            on_record(&record);
            records.push(record);
        }
    }

    Ok(TrainOutput {
        records,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Purpose-labeled sub-streams derived from the run seed.
pub fn stream(seed: u64, purpose: &str) -> RandomSource {
    RandomSource::new(sub_seed(seed, purpose))
}
