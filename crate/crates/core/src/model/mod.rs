//! Solution ansatz assembly: separable spectral modes, optional temporal
//! networks, flat parameter views, and the query interface the training
//! loop, losses, and diagnostics are written against.
//!
//! A model answers *queries*: values of one output field differentiated to a
//! requested spatial multi-order (each direction up to second order) and
//! optionally once in time. The spectral solver answers them from closed
//! forms; the fully-connected baseline answers the same queries through
//! dual-number passes. Everything downstream sees only [`PointModel`], so
//! both model kinds share one training and diagnostics path.

mod flat;
mod svsnn;
mod temporal;

pub use flat::{FlatParams, ModelSpec, ParamLayout, Segment};
pub use svsnn::{SvSnnConfig, SvSnnModel, SvSnnScratch};
pub use temporal::{TemporalNet, TemporalScratch, TEMPORAL_WIDTHS};

use crate::scalar::Scalar;
use std::fmt;

/// One requested quantity of the solution at a point: the `field`-th output,
/// differentiated `dx[j]` times along direction `j` (each at most 2) and
/// once in `t` when `dt` is set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Query {
    pub field: u8,
    pub dx: [u8; 2],
    pub dt: bool,
}

impl Query {
    pub fn value(field: u8) -> Self {
        Query {
            field,
            dx: [0, 0],
            dt: false,
        }
    }

    pub fn spatial(field: u8, dx: [u8; 2]) -> Self {
        Query {
            field,
            dx,
            dt: false,
        }
    }

    pub fn time(field: u8) -> Self {
        Query {
            field,
            dx: [0, 0],
            dt: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelError {
    /// `t` supplied to a steady model or missing on a time-dependent one.
    TimeBinding { time_dependent: bool },
    /// Point dimension does not match the model.
    DimensionMismatch { expected: usize, got: usize },
    /// Spatial derivative order above 2.
    UnsupportedOrder(u32),
    /// Flat vector length does not match the layout.
    LengthMismatch { expected: usize, got: usize },
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::TimeBinding { time_dependent: true } => {
                write!(f, "model is time-dependent but no t was supplied")
            }
            ModelError::TimeBinding { time_dependent: false } => {
                write!(f, "model is steady but a t was supplied")
            }
            ModelError::DimensionMismatch { expected, got } => {
                write!(f, "point dimension {got}, model expects {expected}")
            }
            ModelError::UnsupportedOrder(o) => write!(f, "spatial order {o} exceeds 2"),
            ModelError::LengthMismatch { expected, got } => {
                write!(f, "flat parameter length {got}, layout expects {expected}")
            }
        }
    }
}

impl std::error::Error for ModelError {}

/// Point-wise evaluation and differentiation interface shared by the
/// spectral model and the fully-connected baseline.
///
/// Evaluation methods are `&self` and safe to call concurrently; each worker
/// owns its own `Scratch`. Parameter mutation (`assign_flat`) is the
/// optimizer's single-writer phase between evaluations.
pub trait PointModel<S: Scalar>: Send + Sync {
    type Scratch: Default + Send;

    fn dim(&self) -> usize;
    fn field_count(&self) -> usize;
    fn is_time_dependent(&self) -> bool;
    fn param_count(&self) -> usize;
    fn spec(&self) -> ModelSpec;

    fn flatten(&self) -> FlatParams<S>;
    fn assign_flat(&mut self, data: &[S]) -> Result<(), ModelError>;

    /// Evaluate `queries` at `(x, t)` into `out`.
    fn eval_queries(
        &self,
        queries: &[Query],
        x: &[S],
        t: Option<S>,
        scratch: &mut Self::Scratch,
        out: &mut [S],
    ) -> Result<(), ModelError>;

    /// `acc += scale * sum_i weights[i] * d(query_i)/d(theta)` over the flat
    /// parameter vector. This is the residual-gradient workhorse: one call
    /// per collocation point folds the whole chain rule.
    fn accumulate_query_gradient(
        &self,
        queries: &[Query],
        weights: &[S],
        x: &[S],
        t: Option<S>,
        scale: S,
        scratch: &mut Self::Scratch,
        acc: &mut [S],
    ) -> Result<(), ModelError>;

    /// Convenience single-field forward value.
    fn forward(&self, x: &[S], t: Option<S>, field: u8) -> Result<S, ModelError> {
        let mut scratch = Self::Scratch::default();
        let mut out = [S::zero()];
        self.eval_queries(&[Query::value(field)], x, t, &mut scratch, &mut out)?;
        Ok(out[0])
    }

    /// Convenience spatial partial.
    fn spatial_partial(
        &self,
        x: &[S],
        t: Option<S>,
        field: u8,
        dx: [u8; 2],
    ) -> Result<S, ModelError> {
        let mut scratch = Self::Scratch::default();
        let mut out = [S::zero()];
        self.eval_queries(&[Query::spatial(field, dx)], x, t, &mut scratch, &mut out)?;
        Ok(out[0])
    }

    /// Convenience time derivative.
    fn time_derivative(&self, x: &[S], t: S, field: u8) -> Result<S, ModelError> {
        let mut scratch = Self::Scratch::default();
        let mut out = [S::zero()];
        self.eval_queries(&[Query::time(field)], x, Some(t), &mut scratch, &mut out)?;
        Ok(out[0])
    }

    /// Gradient of a single scalar query combination as a fresh vector.
    fn query_gradient(
        &self,
        queries: &[Query],
        weights: &[S],
        x: &[S],
        t: Option<S>,
    ) -> Result<Vec<S>, ModelError> {
        let mut scratch = Self::Scratch::default();
        let mut acc = vec![S::zero(); self.param_count()];
        self.accumulate_query_gradient(queries, weights, x, t, S::one(), &mut scratch, &mut acc)?;
        Ok(acc)
    }
}
