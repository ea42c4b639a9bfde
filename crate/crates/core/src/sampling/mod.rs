//! Frequency initialization, collocation-point generation, and geometry
//! predicates for domains with holes.

mod frequency;
mod geometry;
mod points;

pub use frequency::{estimate_characteristic_frequency, three_level_frequencies, FrequencyPlan};
pub use geometry::{BoundaryPoint, DomainGeometry, Hole, Outer};
pub use points::{interior_points, lhs_points};

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum SamplingError {
    InvalidInput(&'static str),
    /// DFT of a (near-)constant signal has no non-zero dominant bin.
    NoDominantFrequency,
    /// Rejection sampling accepted too small a fraction of candidates.
    GeometryDegenerate { accepted: usize, attempted: usize },
}

impl fmt::Display for SamplingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SamplingError::InvalidInput(m) => write!(f, "invalid input: {m}"),
            SamplingError::NoDominantFrequency => {
                write!(f, "no dominant frequency: signal is constant")
            }
            SamplingError::GeometryDegenerate { accepted, attempted } => write!(
                f,
                "geometry acceptance ratio below 1e-3 ({accepted}/{attempted}); check hole layout"
            ),
        }
    }
}

impl std::error::Error for SamplingError {}
