//! Benchmark PDE definitions: residual operators over model queries,
//! initial/boundary constraint samplers, exact solutions with hand-coded
//! closed-form derivatives (for residual-identity checks), domain geometry,
//! characteristic frequencies, and recommended run configurations.

mod elliptic;
mod flow;
mod heat;
mod helmholtz;
pub mod metrics;
mod poisson;

pub use metrics::{max_abs_error, rel_l2, ErrorMetrics};

use crate::model::Query;
use crate::numerics::RandomSource;
use crate::sampling::DomainGeometry;
use crate::scalar::Scalar;
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemError {
    UnknownProblem(String),
    /// Metric against a zero-norm reference is undefined.
    UndefinedMetric,
    /// Operator not applicable (e.g. IC on a steady problem).
    OperatorInapplicable(&'static str),
}

impl fmt::Display for ProblemError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProblemError::UnknownProblem(id) => {
                write!(f, "unknown problem id `{id}`; valid ids: {}", PROBLEM_IDS.join(", "))
            }
            ProblemError::UndefinedMetric => write!(f, "relative error undefined: reference norm is zero"),
            ProblemError::OperatorInapplicable(op) => {
                write!(f, "operator {op} not applicable to this problem")
            }
        }
    }
}

impl std::error::Error for ProblemError {}

/// One PDE equation: residual value plus partial derivatives with respect to
/// the problem's query list, given query values and the point.
pub struct Equation<S> {
    pub name: &'static str,
    /// `(query_values, x, t, partials_out) -> residual`
    pub eval: Box<dyn Fn(&[S], &[S], Option<S>, &mut [S]) -> S + Send + Sync>,
}

/// A pointwise equality constraint (initial or boundary data).
#[derive(Debug, Clone, PartialEq)]
pub enum Constraint<S> {
    /// `u_field(x, t) = target`
    Dirichlet {
        x: Vec<S>,
        t: Option<S>,
        field: u8,
        target: S,
    },
    /// `u_field(xa, t) - u_field(xb, t) = 0` (periodic pairing)
    PeriodicPair {
        xa: Vec<S>,
        xb: Vec<S>,
        t: Option<S>,
        field: u8,
    },
}

type Sampler<T> = Box<dyn Fn(usize, &mut RandomSource) -> T + Send + Sync>;
type ExactFn<S> = Box<dyn Fn(&[S], Option<S>, usize) -> S + Send + Sync>;
type ExactQueryFn<S> = Box<dyn Fn(Query, &[S], Option<S>) -> S + Send + Sync>;

/// Suggested model shape, sampling counts, and schedule for one benchmark.
#[derive(Debug, Clone, PartialEq)]
pub struct Recommended {
    pub modes: usize,
    pub features: usize,
    pub sigma: f64,
    /// Amplitude-initialization scale (stddev multiplier on 1/sqrt(K)).
    pub amp_scale: f64,
    /// Recommended initial Adam learning rate.
    pub lr: f64,
    pub epochs: usize,
    pub n_ic: usize,
    pub n_bc: usize,
    pub n_pde: usize,
    pub baseline_widths: Vec<usize>,
}

/// Self-contained benchmark problem definition.
pub struct PdeProblem<S> {
    pub id: &'static str,
    pub dim: usize,
    pub time_dependent: bool,
    pub field_count: usize,
    pub field_names: Vec<&'static str>,
    /// Pressure-like fields defined up to an additive constant; error
    /// metrics subtract the mean difference first.
    pub gauge_fields: Vec<bool>,
    /// Union of model quantities the residual equations read.
    pub queries: Vec<Query>,
    pub equations: Vec<Equation<S>>,
    /// Initial-constraint sampler (time-dependent problems only).
    pub sample_ic: Option<Sampler<Vec<Constraint<S>>>>,
    pub sample_bc: Sampler<Vec<Constraint<S>>>,
    /// PDE collocation points `(x, t)`.
    pub sample_pde: Sampler<Vec<(Vec<S>, Option<S>)>>,
    pub exact: Option<ExactFn<S>>,
    /// Hand-derived closed-form derivatives of the exact solution; feeds the
    /// residual-identity battery without touching any model.
    pub exact_query: Option<ExactQueryFn<S>>,
    /// 2-d spatial geometry when the domain is not a plain box.
    pub geometry: Option<DomainGeometry>,
    /// Space(-time) bounding box: d spatial intervals, plus time last when
    /// time-dependent.
    pub bounds: Vec<(f64, f64)>,
    pub w_char: Vec<f64>,
    pub recommended: Recommended,
}

impl<S: Scalar> PdeProblem<S> {
    /// Evaluation grid: 200 x-points (x 11 times) in 1-d, 200x200 in 2-d
    /// (restricted to the valid region for holed domains), 100x100x11 for
    /// two-dimensional spatiotemporal problems.
    pub fn eval_points(&self) -> Vec<(Vec<S>, Option<S>)> {
        let mut out = Vec::new();
        match (self.dim, self.time_dependent) {
            (1, true) => {
                let xs = crate::numerics::linspace(
                    S::from_f64(self.bounds[0].0),
                    S::from_f64(self.bounds[0].1),
                    200,
                );
                let ts = crate::numerics::linspace(
                    S::from_f64(self.bounds[1].0),
                    S::from_f64(self.bounds[1].1),
                    11,
                );
                for &t in &ts {
                    for &x in &xs {
                        out.push((vec![x], Some(t)));
                    }
                }
            }
            (2, false) => {
                let xs = crate::numerics::linspace(
                    S::from_f64(self.bounds[0].0),
                    S::from_f64(self.bounds[0].1),
                    200,
                );
                let ys = crate::numerics::linspace(
                    S::from_f64(self.bounds[1].0),
                    S::from_f64(self.bounds[1].1),
                    200,
                );
                for &y in &ys {
                    for &x in &xs {
                        if self
                            .geometry
                            .as_ref()
                            .map_or(true, |g| g.contains([x.value(), y.value()]))
                        {
                            out.push((vec![x, y], None));
                        }
                    }
                }
            }
            (2, true) => {
                let xs = crate::numerics::linspace(
                    S::from_f64(self.bounds[0].0),
                    S::from_f64(self.bounds[0].1),
                    100,
                );
                let ys = crate::numerics::linspace(
                    S::from_f64(self.bounds[1].0),
                    S::from_f64(self.bounds[1].1),
                    100,
                );
                let ts = crate::numerics::linspace(
                    S::from_f64(self.bounds[2].0),
                    S::from_f64(self.bounds[2].1),
                    11,
                );
                for &t in &ts {
                    for &y in &ys {
                        for &x in &xs {
                            if self
                                .geometry
                                .as_ref()
                                .map_or(true, |g| g.contains([x.value(), y.value()]))
                            {
                                out.push((vec![x, y], Some(t)));
                            }
                        }
                    }
                }
            }
            _ => unreachable!("benchmarks are 1-d or 2-d"),
        }
        out
    }

    /// Exact-solution values over a point set for one field.
    pub fn exact_on(&self, points: &[(Vec<S>, Option<S>)], field: usize) -> Option<Vec<S>> {
        self.exact
            .as_ref()
            .map(|f| points.iter().map(|(x, t)| f(x, *t, field)).collect())
    }
}

pub const PROBLEM_IDS: [&str; 11] = [
    "heat20pi",
    "heat100pi",
    "heat500pi",
    "helmholtz24pi",
    "helmholtz24pi-cyl",
    "helmholtz48pi",
    "nonlin-elliptic",
    "poisson-holes",
    "poisson-source15",
    "taylor-green",
    "ns-two-cyl",
];

/// Build a registered problem by id.
pub fn make_problem<S: Scalar>(id: &str) -> Result<PdeProblem<S>, ProblemError> {
    match id {
        "heat20pi" => Ok(heat::make_heat(20.0 * std::f64::consts::PI, "heat20pi")),
        "heat100pi" => Ok(heat::make_heat(100.0 * std::f64::consts::PI, "heat100pi")),
        "heat500pi" => Ok(heat::make_heat(500.0 * std::f64::consts::PI, "heat500pi")),
        "helmholtz24pi" => Ok(helmholtz::make_helmholtz(
            24.0 * std::f64::consts::PI,
            "helmholtz24pi",
        )),
        "helmholtz24pi-cyl" => Ok(helmholtz::make_helmholtz_cylinder()),
        "helmholtz48pi" => Ok(helmholtz::make_helmholtz(
            48.0 * std::f64::consts::PI,
            "helmholtz48pi",
        )),
        "nonlin-elliptic" => Ok(elliptic::make_nonlinear_elliptic()),
        "poisson-holes" => Ok(poisson::make_poisson_complex_domain()),
        "poisson-source15" => Ok(poisson::make_poisson_complex_source()),
        "taylor-green" => Ok(flow::make_taylor_green(100.0)),
        "ns-two-cyl" => Ok(flow::make_double_cylinder_ns()),
        other => Err(ProblemError::UnknownProblem(other.to_string())),
    }
}
