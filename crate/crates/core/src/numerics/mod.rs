//! Dense matrix kernels, symmetric eigenvalues, singular values, and the
//! seeded random source used by every stochastic component.

mod decomp;
mod matrix;
mod rng;

pub use decomp::{singular_values, symmetric_eigenvalues};
pub use matrix::DenseMatrix;
pub use rng::{linspace, sub_seed, RandomSource};

use std::fmt;

/// Errors from the dense kernels.
#[derive(Debug, Clone, PartialEq)]
pub enum NumericsError {
    /// Input contains NaN or infinite entries.
    NonFinite,
    /// A square matrix was required.
    NotSquare { rows: usize, cols: usize },
    /// Symmetric input was required; largest deviation reported.
    Asymmetric { max_deviation: f64 },
    /// Iteration did not reach the target tolerance.
    NoConvergence { sweeps: usize, off_norm: f64 },
    /// Argument outside its documented domain.
    InvalidInput(&'static str),
}

impl fmt::Display for NumericsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NumericsError::NonFinite => write!(f, "matrix has non-finite entries"),
            NumericsError::NotSquare { rows, cols } => {
                write!(f, "expected square matrix, got {rows}x{cols}")
            }
            NumericsError::Asymmetric { max_deviation } => {
                write!(f, "matrix not symmetric, max |a_ij - a_ji| = {max_deviation:.3e}")
            }
            NumericsError::NoConvergence { sweeps, off_norm } => {
                write!(f, "no convergence after {sweeps} sweeps, off-diagonal norm {off_norm:.3e}")
            }
            NumericsError::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
        }
    }
}

impl std::error::Error for NumericsError {}
