//! Separated-variable spectral networks for high-frequency PDEs.
//!
//! The solution ansatz is a sum of separable modes: per-direction trainable
//! Fourier features multiplied together (and by a small temporal network for
//! time-dependent problems), with spatial derivatives taken in closed form
//! and temporal derivatives by forward-mode automatic differentiation. A
//! conventional fully-connected physics-informed network is included as the
//! baseline comparator, trained through the same loop and measured by the
//! same Jacobian-spectrum diagnostics.
//!
//! Everything numerical is generic over [`scalar::Scalar`]; the type aliases
//! at the crate root pin the default `f64` precision used by the CLI and the
//! test suites.

pub mod autodiff;
pub mod baseline;
pub mod checkpoint;
pub mod diagnostics;
pub mod model;
pub mod numerics;
pub mod problems;
pub mod sampling;
pub mod scalar;
pub mod spectral;
pub mod training;

pub use scalar::Scalar;

/// Default precision for binaries and tests.
pub type Real = f64;

/// Dense matrix at default precision.
pub type Mat = numerics::DenseMatrix<Real>;

/// Separable spectral model at default precision.
pub type Model = model::SvSnnModel<Real>;

/// Fully-connected comparator at default precision.
pub type Baseline = baseline::MlpModel<Real>;

/// Benchmark problem definition at default precision.
pub type Problem = problems::PdeProblem<Real>;
