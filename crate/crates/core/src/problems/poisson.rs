use super::{Constraint, Equation, PdeProblem, Recommended};
use crate::model::Query;
use crate::sampling::{interior_points, DomainGeometry, Hole};
use crate::scalar::Scalar;

/// Poisson on `[-1,1]^2` minus three disks and an ellipse:
/// `-Laplacian(u) = f`, `f = 2 mu^2 sin(mu x) sin(mu y)`, `mu = 7 pi`,
/// exact `u = sin(mu x) sin(mu y)`, Dirichlet exact data on all components.
pub fn make_poisson_complex_domain<S: Scalar>() -> PdeProblem<S> {
    let mu = 7.0 * std::f64::consts::PI;
    let geometry = DomainGeometry::rectangle([-1.0, -1.0], [1.0, 1.0]).with_holes(vec![
        Hole::Circle { center: [-0.5, -0.5], radius: 0.1 },
        Hole::Circle { center: [0.5, 0.5], radius: 0.2 },
        Hole::Circle { center: [0.5, -0.5], radius: 0.2 },
        Hole::Ellipse { center: [-0.5, 0.5], coef: [16.0, 64.0] },
    ]);

    let exact_fn = move |x: &[S]| (S::from_f64(mu) * x[0]).sin() * (S::from_f64(mu) * x[1]).sin();

    // queries: [u_xx, u_yy]
    let queries = vec![Query::spatial(0, [2, 0]), Query::spatial(0, [0, 2])];
    let equations = vec![Equation {
        name: "poisson",
        eval: Box::new(move |q: &[S], x: &[S], _t, partials: &mut [S]| {
            let m = S::from_f64(mu);
            let f = S::from_f64(2.0 * mu * mu) * (m * x[0]).sin() * (m * x[1]).sin();
            partials[0] = -S::one();
            partials[1] = -S::one();
            -(q[0] + q[1]) - f
        }),
    }];

    let geom_bc = geometry.clone();
    let sample_bc = Box::new(move |n: usize, _rng: &mut crate::numerics::RandomSource| {
        // outer boundary gets n/3, each of the four holes (n - n/3)/4
        let outer_n = n / 3;
        let hole_n = (n - outer_n) / 4;
        let mut out = Vec::with_capacity(n);
        for bp in geom_bc.boundary_points(outer_n) {
            if bp.component == 0 {
                let x = vec![S::from_f64(bp.x[0]), S::from_f64(bp.x[1])];
                out.push(Constraint::Dirichlet { target: exact_fn(&x), x, t: None, field: 0 });
            }
        }
        for bp in geom_bc.boundary_points(hole_n) {
            if bp.component > 0 {
                let x = vec![S::from_f64(bp.x[0]), S::from_f64(bp.x[1])];
                out.push(Constraint::Dirichlet { target: exact_fn(&x), x, t: None, field: 0 });
            }
        }
        out
    });

    let geom_pde = geometry.clone();
    let sample_pde = Box::new(move |n: usize, rng: &mut crate::numerics::RandomSource| {
        interior_points::<S>(&geom_pde, n, rng)
            .unwrap()
            .into_iter()
            .map(|p| (p, None))
            .collect()
    });

    let exact = Box::new(move |x: &[S], _t: Option<S>, _f: usize| exact_fn(x));

    let exact_query = Box::new(move |q: Query, x: &[S], _t: Option<S>| {
        let m = S::from_f64(mu);
        let (sx, cx) = (m * x[0]).sin_cos();
        let (sy, cy) = (m * x[1]).sin_cos();
        let dx = match q.dx[0] {
            0 => sx,
            1 => m * cx,
            2 => -(m * m) * sx,
            _ => unreachable!(),
        };
        let dy = match q.dx[1] {
            0 => sy,
            1 => m * cy,
            2 => -(m * m) * sy,
            _ => unreachable!(),
        };
        dx * dy
    });

    PdeProblem {
        id: "poisson-holes",
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
        bounds: vec![(-1.0, 1.0), (-1.0, 1.0)],
        w_char: vec![mu, mu],
        recommended: Recommended {
            modes: 8,
            features: 40,
            amp_scale: 1.0,
            lr: 1e-3,
            sigma: mu / std::f64::consts::PI,
            epochs: 5000,
            n_ic: 0,
            n_bc: 1200,
            n_pde: 20000,
            baseline_widths: vec![2, 100, 100, 100, 100, 100, 1],
        },
    }
}

/// Poisson on `[-1,1]^2` with a position-dependent-frequency source:
/// `-Laplacian(u) = f`, exact `u = sin(15 x^2) + sin(15 y^2)`,
/// `f = 4 mu^2 x^2 sin(mu x^2) - 2 mu cos(mu x^2) + (same in y)`, `mu = 15`.
pub fn make_poisson_complex_source<S: Scalar>() -> PdeProblem<S> {
    let mu = 15.0;
    let geometry = DomainGeometry::rectangle([-1.0, -1.0], [1.0, 1.0]);

    fn exact_term<S: Scalar>(v: S, mu: f64) -> S {
        (S::from_f64(mu) * v * v).sin()
    }

    let exact_fn = move |x: &[S]| exact_term(x[0], mu) + exact_term(x[1], mu);

    // queries: [u_xx, u_yy]
    let queries = vec![Query::spatial(0, [2, 0]), Query::spatial(0, [0, 2])];
    let equations = vec![Equation {
        name: "poisson",
        eval: Box::new(move |q: &[S], x: &[S], _t, partials: &mut [S]| {
            let m = S::from_f64(mu);
            let f = |v: S| {
                S::from_f64(4.0 * mu * mu) * v * v * (m * v * v).sin()
                    - S::from_f64(2.0 * mu) * (m * v * v).cos()
            };
            partials[0] = -S::one();
            partials[1] = -S::one();
            -(q[0] + q[1]) - (f(x[0]) + f(x[1]))
        }),
    }];

    let geom_bc = geometry.clone();
    let sample_bc = Box::new(move |n: usize, _rng: &mut crate::numerics::RandomSource| {
        geom_bc
            .boundary_points(n)
            .into_iter()
            .map(|bp| {
                let x = vec![S::from_f64(bp.x[0]), S::from_f64(bp.x[1])];
                Constraint::Dirichlet { target: exact_fn(&x), x, t: None, field: 0 }
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

    let exact = Box::new(move |x: &[S], _t: Option<S>, _f: usize| exact_fn(x));

    // u = g(x) + g(y) with g(v) = sin(mu v^2):
    // g' = 2 mu v cos(mu v^2), g'' = 2 mu cos(mu v^2) - 4 mu^2 v^2 sin(mu v^2)
    let exact_query = Box::new(move |q: Query, x: &[S], _t: Option<S>| {
        let m = S::from_f64(mu);
        let g = |v: S, order: u8| -> S {
            let arg = m * v * v;
            match order {
                0 => arg.sin(),
                1 => S::from_f64(2.0 * mu) * v * arg.cos(),
                2 => {
                    S::from_f64(2.0 * mu) * arg.cos()
                        - S::from_f64(4.0 * mu * mu) * v * v * arg.sin()
                }
                _ => unreachable!(),
            }
        };
        match q.dx {
            [0, 0] => g(x[0], 0) + g(x[1], 0),
            [ox, 0] => g(x[0], ox),
            [0, oy] => g(x[1], oy),
            // mixed partials of a separable sum vanish
            _ => S::zero(),
        }
    });

    PdeProblem {
        id: "poisson-source15",
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
        bounds: vec![(-1.0, 1.0), (-1.0, 1.0)],
        w_char: vec![mu, mu],
        recommended: Recommended {
            modes: 4,
            features: 50,
            amp_scale: 1.0,
            lr: 1e-3,
            sigma: mu / std::f64::consts::PI,
            epochs: 40000,
            n_ic: 0,
            n_bc: 1024,
            n_pde: 10000,
            baseline_widths: vec![2, 100, 100, 100, 1],
        },
    }
}
