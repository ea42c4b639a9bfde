use super::{Constraint, Equation, PdeProblem, Recommended};
use crate::model::Query;
use crate::sampling::{interior_points, DomainGeometry};
use crate::scalar::Scalar;

/// Nonlinear elliptic problem on the unit square:
/// `Laplacian(u) + u^2 = f`, exact `u = (x+y) cos(10x) sin(10y)`,
/// Dirichlet data from the exact solution.
///
/// The source is the expansion of `Laplacian(u*) + u*^2`:
/// `f = -200(x+y)cos(10x)sin(10y) - 20 sin(10x)sin(10y)
///      + 20 cos(10x)cos(10y) + (x+y)^2 cos^2(10x) sin^2(10y)`.
pub fn make_nonlinear_elliptic<S: Scalar>() -> PdeProblem<S> {
    let geometry = DomainGeometry::rectangle([0.0, 0.0], [1.0, 1.0]);

    fn exact_u<S: Scalar>(x: &[S]) -> S {
        let ten = S::from_f64(10.0);
        (x[0] + x[1]) * (ten * x[0]).cos() * (ten * x[1]).sin()
    }

    fn source<S: Scalar>(x: &[S]) -> S {
        let ten = S::from_f64(10.0);
        let (sx, cx) = (ten * x[0]).sin_cos();
        let (sy, cy) = (ten * x[1]).sin_cos();
        let sum = x[0] + x[1];
        S::from_f64(-200.0) * sum * cx * sy - S::from_f64(20.0) * sx * sy
            + S::from_f64(20.0) * cx * cy
            + sum * sum * cx * cx * sy * sy
    }

    // queries: [u, u_xx, u_yy]
    let queries = vec![
        Query::value(0),
        Query::spatial(0, [2, 0]),
        Query::spatial(0, [0, 2]),
    ];
    let equations = vec![Equation {
        name: "nonlinear-elliptic",
        eval: Box::new(move |q: &[S], x: &[S], _t, partials: &mut [S]| {
            partials[0] = S::from_f64(2.0) * q[0];
            partials[1] = S::one();
            partials[2] = S::one();
            q[1] + q[2] + q[0] * q[0] - source(x)
        }),
    }];

    let geom_bc = geometry.clone();
    let sample_bc = Box::new(move |n: usize, _rng: &mut crate::numerics::RandomSource| {
        geom_bc
            .boundary_points(n)
            .into_iter()
            .map(|bp| {
                let x = vec![S::from_f64(bp.x[0]), S::from_f64(bp.x[1])];
                Constraint::Dirichlet {
                    target: exact_u(&x),
                    x,
                    t: None,
                    field: 0,
                }
            })
            .collect()
    });

    let geom_pde = geometry.clone();
    let sample_pde = Box::new(move |n: usize, rng: &mut crate::numerics::RandomSource| {
        interior_points::<S>(&geom_pde, n, rng)
            .unwrap()
            .into_iter()
            .map(|p| (p, None))
            .collect()
    });

    let exact = Box::new(move |x: &[S], _t: Option<S>, _f: usize| exact_u(x));

    let exact_query = Box::new(move |q: Query, x: &[S], _t: Option<S>| {
        let ten = S::from_f64(10.0);
        let (sx, cx) = (ten * x[0]).sin_cos();
        let (sy, cy) = (ten * x[1]).sin_cos();
        let sum = x[0] + x[1];
        match q.dx {
            [0, 0] => sum * cx * sy,
            [1, 0] => (cx - ten * sum * sx) * sy,
            [2, 0] => (S::from_f64(-20.0) * sx - S::from_f64(100.0) * sum * cx) * sy,
            [0, 1] => cx * (sy + ten * sum * cy),
            [0, 2] => cx * (S::from_f64(20.0) * cy - S::from_f64(100.0) * sum * sy),
            [1, 1] => (cx - ten * sum * sx) * cy * ten + cx * sy, // d/dy of du/dx
            _ => unreachable!(),
        }
    });

    PdeProblem {
        id: "nonlin-elliptic",
        dim: 2,
        time_dependent: false,
        field_count: 1,
        field_names: vec!["u"],
        gauge_fields: vec![false],
        queries,
        equations,
        sample_ic: None,
        sample_bc,
        sample_pde,
        exact: Some(exact),
        exact_query: Some(exact_query),
        geometry: Some(geometry),
        bounds: vec![(0.0, 1.0), (0.0, 1.0)],
        w_char: vec![10.0, 10.0],
        recommended: Recommended {
            modes: 4,
            features: 32,
            amp_scale: 1.0,
            lr: 1e-3,
            sigma: 10.0 / std::f64::consts::PI,
            epochs: 5000,
            n_ic: 0,
            n_bc: 1024,
            n_pde: 10000,
            baseline_widths: vec![2, 100, 100, 100, 100, 100, 1],
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_left_edge_is_y_sin10y() {
        let p = make_nonlinear_elliptic::<f64>();
        let exact = p.exact.as_ref().unwrap();
        for y in [0.1, 0.5, 0.9] {
            let expect = y * (10.0 * y).sin();
            assert!((exact(&[0.0, y], None, 0) - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn operator_is_nonlinear() {
        // F[2u*] != 2 F[u*] because of the u^2 term
        let p = make_nonlinear_elliptic::<f64>();
        let eq = p.exact_query.as_ref().unwrap();
        let x = [0.31, 0.63];
        let q1: Vec<f64> = p.queries.iter().map(|&q| eq(q, &x, None)).collect();
        let q2: Vec<f64> = q1.iter().map(|v| 2.0 * v).collect();
        let mut partials = vec![0.0; 3];
        let r1 = (p.equations[0].eval)(&q1, &x, None, &mut partials);
        let r2 = (p.equations[0].eval)(&q2, &x, None, &mut partials);
        assert!((r2 - 2.0 * r1).abs() > 1e-3, "u^2 term must break linearity");
    }
}
