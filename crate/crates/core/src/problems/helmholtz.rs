use super::{Constraint, Equation, PdeProblem, Recommended};
use crate::model::Query;
use crate::sampling::{interior_points, DomainGeometry, Hole};
use crate::scalar::Scalar;

/// 2-d Helmholtz on the unit square:
/// `-Laplacian(u) - kappa^2 u = f`, `f = kappa^2 sin(kappa x) sin(kappa y)`,
/// homogeneous Dirichlet boundary, exact `u = sin(kappa x) sin(kappa y)`.
pub fn make_helmholtz<S: Scalar>(kappa: f64, id: &'static str) -> PdeProblem<S> {
    let geometry = DomainGeometry::rectangle([0.0, 0.0], [1.0, 1.0]);
    let mut p = helmholtz_core(kappa, id, geometry);
    p.recommended.modes = if kappa > 100.0 { 8 } else { 6 };
    p.recommended.n_bc = 1024;
    p.recommended.baseline_widths = if kappa > 100.0 {
        vec![2, 120, 120, 120, 120, 120, 1]
    } else {
        vec![2, 100, 100, 100, 100, 100, 1]
    };
    p
}

/// Same operator with a cylindrical obstacle: unit square minus the disk at
/// (0.5, 0.5) with radius 0.15, zero outer data, exact-solution data on the
/// cylinder boundary.
pub fn make_helmholtz_cylinder<S: Scalar>() -> PdeProblem<S> {
    let kappa = 24.0 * std::f64::consts::PI;
    let geometry = DomainGeometry::rectangle([0.0, 0.0], [1.0, 1.0]).with_holes(vec![
        Hole::Circle {
            center: [0.5, 0.5],
            radius: 0.15,
        },
    ]);
    let mut p = helmholtz_core(kappa, "helmholtz24pi-cyl", geometry);
    // 400 outer + 200 cylinder points at the recommended 600 total
    p.recommended.n_bc = 600;
    p
}

fn helmholtz_core<S: Scalar>(
    kappa: f64,
    id: &'static str,
    geometry: DomainGeometry,
) -> PdeProblem<S> {
    // queries: [u, u_xx, u_yy]
    let queries = vec![
        Query::value(0),
        Query::spatial(0, [2, 0]),
        Query::spatial(0, [0, 2]),
    ];
    let k2 = kappa * kappa;
    let equations = vec![Equation {
        name: "helmholtz",
        eval: Box::new(move |q: &[S], x: &[S], _t, partials: &mut [S]| {
            let k = S::from_f64(kappa);
            let f = S::from_f64(k2) * (k * x[0]).sin() * (k * x[1]).sin();
            partials[0] = S::from_f64(-k2);
            partials[1] = -S::one();
            partials[2] = -S::one();
            -(q[1] + q[2]) - S::from_f64(k2) * q[0] - f
        }),
    }];

    let exact_fn = move |x: &[S]| (S::from_f64(kappa) * x[0]).sin() * (S::from_f64(kappa) * x[1]).sin();

    let geom_bc = geometry.clone();
    let has_hole = !geometry.holes.is_empty();
    let sample_bc = Box::new(move |n: usize, _rng: &mut crate::numerics::RandomSource| {
        // exterior zero data; exact data on the obstacle boundary
        let per_component = if has_hole { n / 3 } else { n };
        let outer_n = if has_hole { n - per_component } else { n };
        let mut out = Vec::with_capacity(n);
        for bp in geom_bc.boundary_points(outer_n) {
            if bp.component == 0 {
                out.push(Constraint::Dirichlet {
                    x: vec![S::from_f64(bp.x[0]), S::from_f64(bp.x[1])],
                    t: None,
                    field: 0,
                    target: S::zero(),
                });
            }
        }
        if has_hole {
            for bp in geom_bc.boundary_points(per_component) {
                if bp.component > 0 {
                    let x = vec![S::from_f64(bp.x[0]), S::from_f64(bp.x[1])];
                    out.push(Constraint::Dirichlet {
                        target: exact_fn(&x),
                        x,
                        t: None,
                        field: 0,
                    });
                }
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
        let k = S::from_f64(kappa);
        let (sx, cx) = (k * x[0]).sin_cos();
        let (sy, cy) = (k * x[1]).sin_cos();
        let dx = match q.dx[0] {
            0 => sx,
            1 => k * cx,
            2 => -(k * k) * sx,
            _ => unreachable!(),
        };
        let dy = match q.dx[1] {
            0 => sy,
            1 => k * cy,
            2 => -(k * k) * sy,
            _ => unreachable!(),
        };
        dx * dy
    });

    PdeProblem {
        id,
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
        w_char: vec![kappa, kappa],
        recommended: Recommended {
            modes: 6,
            features: 64,
            amp_scale: 1.0,
            lr: 1e-3,
            sigma: kappa / std::f64::consts::PI,
            epochs: 5000,
            n_ic: 0,
            n_bc: 600,
            n_pde: 10000,
            baseline_widths: vec![2, 100, 100, 100, 100, 100, 1],
        },
    }
}
