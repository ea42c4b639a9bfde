use super::{Constraint, Equation, PdeProblem, Recommended};
use crate::model::Query;
use crate::numerics::linspace;
use crate::sampling::{interior_points, lhs_points, DomainGeometry, Hole};
use crate::scalar::Scalar;
use std::f64::consts::PI;

// Query indices shared by both incompressible flow problems (the unsteady
// one appends u_t, v_t at the end).
const Q_U: usize = 0;
const Q_V: usize = 1;
const Q_UX: usize = 2;
const Q_UY: usize = 3;
const Q_VX: usize = 4;
const Q_VY: usize = 5;
const Q_PX: usize = 6;
const Q_PY: usize = 7;
const Q_UXX: usize = 8;
const Q_UYY: usize = 9;
const Q_VXX: usize = 10;
const Q_VYY: usize = 11;
const Q_UT: usize = 12;
const Q_VT: usize = 13;

fn flow_queries(unsteady: bool) -> Vec<Query> {
    let mut q = vec![
        Query::value(0),
        Query::value(1),
        Query::spatial(0, [1, 0]),
        Query::spatial(0, [0, 1]),
        Query::spatial(1, [1, 0]),
        Query::spatial(1, [0, 1]),
        Query::spatial(2, [1, 0]),
        Query::spatial(2, [0, 1]),
        Query::spatial(0, [2, 0]),
        Query::spatial(0, [0, 2]),
        Query::spatial(1, [2, 0]),
        Query::spatial(1, [0, 2]),
    ];
    if unsteady {
        q.push(Query::time(0));
        q.push(Query::time(1));
    }
    q
}

/// Decaying vortex on `[-pi,pi]^2 x [0,1]`: incompressible Navier-Stokes
/// with periodic pairing constraints on the velocity components and the
/// classical single-mode initial data
/// `u0 = -cos(pi x) sin(pi y)`, `v0 = sin(pi x) cos(pi y)`,
/// `p0 = -(cos(2 pi x) + cos(2 pi y))/4`.
/// Reference fields decay as `e^{-2 pi^2 t / Re}` (squared for pressure).
pub fn make_taylor_green<S: Scalar>(re: f64) -> PdeProblem<S> {
    let inv_re = 1.0 / re;
    let queries = flow_queries(true);

    let equations = vec![
        Equation {
            name: "momentum-x",
            eval: Box::new(move |q: &[S], _x: &[S], _t, p: &mut [S]| {
                for v in p.iter_mut() {
                    *v = S::zero();
                }
                p[Q_UT] = S::one();
                p[Q_U] = q[Q_UX];
                p[Q_UX] = q[Q_U];
                p[Q_V] = q[Q_UY];
                p[Q_UY] = q[Q_V];
                p[Q_PX] = S::one();
                p[Q_UXX] = S::from_f64(-inv_re);
                p[Q_UYY] = S::from_f64(-inv_re);
                q[Q_UT] + q[Q_U] * q[Q_UX] + q[Q_V] * q[Q_UY] + q[Q_PX]
                    - S::from_f64(inv_re) * (q[Q_UXX] + q[Q_UYY])
            }),
        },
        Equation {
            name: "momentum-y",
            eval: Box::new(move |q: &[S], _x: &[S], _t, p: &mut [S]| {
                for v in p.iter_mut() {
                    *v = S::zero();
                }
                p[Q_VT] = S::one();
                p[Q_U] = q[Q_VX];
                p[Q_VX] = q[Q_U];
                p[Q_V] = q[Q_VY];
                p[Q_VY] = q[Q_V];
                p[Q_PY] = S::one();
                p[Q_VXX] = S::from_f64(-inv_re);
                p[Q_VYY] = S::from_f64(-inv_re);
                q[Q_VT] + q[Q_U] * q[Q_VX] + q[Q_V] * q[Q_VY] + q[Q_PY]
                    - S::from_f64(inv_re) * (q[Q_VXX] + q[Q_VYY])
            }),
        },
        Equation {
            name: "continuity",
            eval: Box::new(move |q: &[S], _x: &[S], _t, p: &mut [S]| {
                for v in p.iter_mut() {
                    *v = S::zero();
                }
                p[Q_UX] = S::one();
                p[Q_VY] = S::one();
                q[Q_UX] + q[Q_VY]
            }),
        },
    ];

    let exact_fields = move |x: &[S], t: S, field: usize| -> S {
        let pi_s = S::from_f64(PI);
        let decay = (S::from_f64(-2.0 * PI * PI * inv_re) * t).exp();
        match field {
            0 => -(pi_s * x[0]).cos() * (pi_s * x[1]).sin() * decay,
            1 => (pi_s * x[0]).sin() * (pi_s * x[1]).cos() * decay,
            _ => {
                S::from_f64(-0.25)
                    * ((S::from_f64(2.0 * PI) * x[0]).cos() + (S::from_f64(2.0 * PI) * x[1]).cos())
                    * decay
                    * decay
            }
        }
    };

    // initial data on a uniform grid: floor(sqrt(n)) per side, all three
    // fields pinned at t = 0
    let sample_ic = Box::new(move |n: usize, _rng: &mut crate::numerics::RandomSource| {
        let side = (n as f64).sqrt().floor() as usize;
        let xs = linspace(S::from_f64(-PI), S::from_f64(PI), side.max(2));
        let mut out = Vec::with_capacity(side * side * 3);
        for &y in &xs {
            for &x in &xs {
                for field in 0..3u8 {
                    out.push(Constraint::Dirichlet {
                        x: vec![x, y],
                        t: Some(S::zero()),
                        field,
                        target: exact_fields(&[x, y], S::zero(), field as usize),
                    });
                }
            }
        }
        out
    });

    // periodic pairing rows for u and v, split between the two axes
    let sample_bc = Box::new(move |n: usize, rng: &mut crate::numerics::RandomSource| {
        let locations = (n / 4).max(1);
        let mut out = Vec::with_capacity(4 * locations);
        let span = (S::from_f64(-PI), S::from_f64(PI));
        let time = (S::zero(), S::one());
        let ys = lhs_points::<S>(rng, locations, &[span, time]).unwrap();
        for loc in ys {
            for field in 0..2u8 {
                out.push(Constraint::PeriodicPair {
                    xa: vec![S::from_f64(-PI), loc[0]],
                    xb: vec![S::from_f64(PI), loc[0]],
                    t: Some(loc[1]),
                    field,
                });
            }
        }
        let xs = lhs_points::<S>(rng, locations, &[span, time]).unwrap();
        for loc in xs {
            for field in 0..2u8 {
                out.push(Constraint::PeriodicPair {
                    xa: vec![loc[0], S::from_f64(-PI)],
                    xb: vec![loc[0], S::from_f64(PI)],
                    t: Some(loc[1]),
                    field,
                });
            }
        }
        out
    });

    let sample_pde = Box::new(move |n: usize, rng: &mut crate::numerics::RandomSource| {
        let pts = lhs_points::<S>(
            rng,
            n,
            &[
                (S::from_f64(-PI), S::from_f64(PI)),
                (S::from_f64(-PI), S::from_f64(PI)),
                (S::zero(), S::one()),
            ],
        )
        .unwrap();
        pts.into_iter()
            .map(|p| (vec![p[0], p[1]], Some(p[2])))
            .collect()
    });

    let exact = Box::new(move |x: &[S], t: Option<S>, field: usize| {
        exact_fields(x, t.unwrap(), field)
    });

    let exact_query = Box::new(move |q: Query, x: &[S], t: Option<S>| -> S {
        let pi_s = S::from_f64(PI);
        let t = t.unwrap();
        let decay = (S::from_f64(-2.0 * PI * PI * inv_re) * t).exp();
        let (sx, cx) = (pi_s * x[0]).sin_cos();
        let (sy, cy) = (pi_s * x[1]).sin_cos();
        match q.field {
            0 => {
                // u = -cos(pi x) sin(pi y) decay
                let u = -cx * sy * decay;
                if q.dt {
                    return S::from_f64(-2.0 * PI * PI * inv_re) * u;
                }
                match q.dx {
                    [0, 0] => u,
                    [1, 0] => pi_s * sx * sy * decay,
                    [0, 1] => -pi_s * cx * cy * decay,
                    [2, 0] | [0, 2] => -(pi_s * pi_s) * u,
                    [1, 1] => pi_s * pi_s * sx * cy * decay,
                    _ => unreachable!(),
                }
            }
            1 => {
                let v = sx * cy * decay;
                if q.dt {
                    return S::from_f64(-2.0 * PI * PI * inv_re) * v;
                }
                match q.dx {
                    [0, 0] => v,
                    [1, 0] => pi_s * cx * cy * decay,
                    [0, 1] => -pi_s * sx * sy * decay,
                    [2, 0] | [0, 2] => -(pi_s * pi_s) * v,
                    [1, 1] => -(pi_s * pi_s) * cx * sy * decay,
                    _ => unreachable!(),
                }
            }
            _ => {
                let two_pi = S::from_f64(2.0 * PI);
                let d2 = decay * decay;
                if q.dt {
                    unreachable!("pressure time derivative is never queried");
                }
                match q.dx {
                    [0, 0] => {
                        S::from_f64(-0.25) * ((two_pi * x[0]).cos() + (two_pi * x[1]).cos()) * d2
                    }
                    [1, 0] => S::from_f64(0.5) * pi_s * (two_pi * x[0]).sin() * d2,
                    [0, 1] => S::from_f64(0.5) * pi_s * (two_pi * x[1]).sin() * d2,
                    _ => unreachable!(),
                }
            }
        }
    });

    PdeProblem {
        id: "taylor-green",
        dim: 2,
        time_dependent: true,
        field_count: 3,
        field_names: vec!["u", "v", "p"],
        gauge_fields: vec![false, false, true],
        queries,
        equations,
        sample_ic: Some(sample_ic),
        sample_bc,
        sample_pde,
        exact: Some(exact),
        exact_query: Some(exact_query),
        geometry: None,
        bounds: vec![(-PI, PI), (-PI, PI), (0.0, 1.0)],
        w_char: vec![PI, PI],
        recommended: Recommended {
            modes: 6,
            features: 32,
            amp_scale: 1.0,
            lr: 1e-3,
            sigma: 1.0,
            epochs: 5000,
            n_ic: 10000,
            n_bc: 2000,
            n_pde: 10000,
            baseline_widths: vec![3, 100, 100, 100, 100, 100, 3],
        },
    }
}

/// Steady incompressible Navier-Stokes in the radius-3 disk minus two
/// radius-0.3 cylinders at (-1, 0.5) and (1, -0.5), with `rho = mu = 1` and
/// the five-term sine forcing
/// `S_x = sin 4x - 0.25 sin(x-3y) + sin(x+y) + 8 sin 2x cos 2y + 0.75 sin(3x-y)`
/// `S_y = sin 4y - 0.75 sin(x-3y) - sin(x+y) - 8 cos 2x sin 2y + 0.25 sin(3x-y)`.
///
/// The manufactured fields behind that forcing are
/// `u = sin 2x cos 2y + sin(x+y)/2`,
/// `v = -cos 2x sin 2y - sin(x+y)/2`, `p = 0`
/// (divergence-free; the vortex self-advection supplies the sin 4x / sin 4y
/// terms and the vortex-shear cross advection the remaining three
/// harmonics). Dirichlet data for u and v on all three boundary components
/// comes from these fields.
pub fn make_double_cylinder_ns<S: Scalar>() -> PdeProblem<S> {
    let geometry = DomainGeometry::circle([0.0, 0.0], 3.0).with_holes(vec![
        Hole::Circle { center: [-1.0, 0.5], radius: 0.3 },
        Hole::Circle { center: [1.0, -0.5], radius: 0.3 },
    ]);
    let queries = flow_queries(false);

    fn source_x<S: Scalar>(x: &[S]) -> S {
        let (x, y) = (x[0], x[1]);
        (S::from_f64(4.0) * x).sin() - S::from_f64(0.25) * (x - S::from_f64(3.0) * y).sin()
            + (x + y).sin()
            + S::from_f64(8.0) * (S::from_f64(2.0) * x).sin() * (S::from_f64(2.0) * y).cos()
            + S::from_f64(0.75) * (S::from_f64(3.0) * x - y).sin()
    }

    fn source_y<S: Scalar>(x: &[S]) -> S {
        let (x, y) = (x[0], x[1]);
        (S::from_f64(4.0) * y).sin() - S::from_f64(0.75) * (x - S::from_f64(3.0) * y).sin()
            - (x + y).sin()
            - S::from_f64(8.0) * (S::from_f64(2.0) * x).cos() * (S::from_f64(2.0) * y).sin()
            + S::from_f64(0.25) * (S::from_f64(3.0) * x - y).sin()
    }

    let equations = vec![
        Equation {
            name: "momentum-x",
            eval: Box::new(move |q: &[S], x: &[S], _t, p: &mut [S]| {
                for v in p.iter_mut() {
                    *v = S::zero();
                }
                p[Q_U] = q[Q_UX];
                p[Q_UX] = q[Q_U];
                p[Q_V] = q[Q_UY];
                p[Q_UY] = q[Q_V];
                p[Q_PX] = S::one();
                p[Q_UXX] = -S::one();
                p[Q_UYY] = -S::one();
                q[Q_U] * q[Q_UX] + q[Q_V] * q[Q_UY] + q[Q_PX] - (q[Q_UXX] + q[Q_UYY])
                    - source_x(x)
            }),
        },
        Equation {
            name: "momentum-y",
            eval: Box::new(move |q: &[S], x: &[S], _t, p: &mut [S]| {
                for v in p.iter_mut() {
                    *v = S::zero();
                }
                p[Q_U] = q[Q_VX];
                p[Q_VX] = q[Q_U];
                p[Q_V] = q[Q_VY];
                p[Q_VY] = q[Q_V];
                p[Q_PY] = S::one();
                p[Q_VXX] = -S::one();
                p[Q_VYY] = -S::one();
                q[Q_U] * q[Q_VX] + q[Q_V] * q[Q_VY] + q[Q_PY] - (q[Q_VXX] + q[Q_VYY])
                    - source_y(x)
            }),
        },
        Equation {
            name: "continuity",
            eval: Box::new(move |q: &[S], _x: &[S], _t, p: &mut [S]| {
                for v in p.iter_mut() {
                    *v = S::zero();
                }
                p[Q_UX] = S::one();
                p[Q_VY] = S::one();
                q[Q_UX] + q[Q_VY]
            }),
        },
    ];

    fn exact_field<S: Scalar>(x: &[S], field: usize) -> S {
        let two = S::from_f64(2.0);
        let half = S::from_f64(0.5);
        let (sx2, cx2) = (two * x[0]).sin_cos();
        let (sy2, cy2) = (two * x[1]).sin_cos();
        let s = (x[0] + x[1]).sin();
        match field {
            0 => sx2 * cy2 + half * s,
            1 => -cx2 * sy2 - half * s,
            _ => S::zero(),
        }
    }

    let geom_bc = geometry.clone();
    let sample_bc = Box::new(move |n: usize, _rng: &mut crate::numerics::RandomSource| {
        // boundary points: 2n/3 outer, n/6 per cylinder; u and v pinned
        let outer_n = 2 * n / 3;
        let hole_n = (n - outer_n) / 2;
        let mut out = Vec::with_capacity(2 * n);
        let mut push_all = |bx: [f64; 2]| {
            let x = vec![S::from_f64(bx[0]), S::from_f64(bx[1])];
            for field in 0..2u8 {
                out.push(Constraint::Dirichlet {
                    target: exact_field(&x, field as usize),
                    x: x.clone(),
                    t: None,
                    field,
                });
            }
        };
        for bp in geom_bc.boundary_points(outer_n) {
            if bp.component == 0 {
                push_all(bp.x);
            }
        }
        for bp in geom_bc.boundary_points(hole_n) {
            if bp.component > 0 {
                push_all(bp.x);
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

    let exact = Box::new(move |x: &[S], _t: Option<S>, field: usize| exact_field(x, field));

    let exact_query = Box::new(move |q: Query, x: &[S], _t: Option<S>| -> S {
        let two = S::from_f64(2.0);
        let half = S::from_f64(0.5);
        let four = S::from_f64(4.0);
        let (sx2, cx2) = (two * x[0]).sin_cos();
        let (sy2, cy2) = (two * x[1]).sin_cos();
        let (s, c) = (x[0] + x[1]).sin_cos();
        match q.field {
            0 => match q.dx {
                // u = sin2x cos2y + s/2
                [0, 0] => sx2 * cy2 + half * s,
                [1, 0] => two * cx2 * cy2 + half * c,
                [0, 1] => -two * sx2 * sy2 + half * c,
                [2, 0] | [0, 2] => -four * sx2 * cy2 - half * s,
                [1, 1] => -four * cx2 * sy2 - half * s,
                _ => unreachable!(),
            },
            1 => match q.dx {
                // v = -cos2x sin2y - s/2
                [0, 0] => -cx2 * sy2 - half * s,
                [1, 0] => two * sx2 * sy2 - half * c,
                [0, 1] => -two * cx2 * cy2 - half * c,
                [2, 0] | [0, 2] => four * cx2 * sy2 + half * s,
                [1, 1] => four * sx2 * cy2 + half * s,
                _ => unreachable!(),
            },
            // p = 0
            _ => S::zero(),
        }
    });

    PdeProblem {
        id: "ns-two-cyl",
        dim: 2,
        time_dependent: false,
        field_count: 3,
        field_names: vec!["u", "v", "p"],
        gauge_fields: vec![false, false, true],
        queries,
        equations,
        sample_ic: None,
        sample_bc,
        sample_pde,
        exact: Some(exact),
        exact_query: Some(exact_query),
        geometry: Some(geometry),
        bounds: vec![(-3.0, 3.0), (-3.0, 3.0)],
        w_char: vec![4.0, 4.0],
        recommended: Recommended {
            modes: 4,
            features: 16,
            amp_scale: 1.0,
            lr: 1e-3,
            sigma: 4.0 / std::f64::consts::PI,
            epochs: 15000,
            n_ic: 0,
            n_bc: 600,
            n_pde: 20000,
            baseline_widths: vec![2, 50, 50, 50, 50, 3],
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn taylor_green_continuity_of_exact_is_zero() {
        let p = make_taylor_green::<f64>(100.0);
        let eq = p.exact_query.as_ref().unwrap();
        let mut rng = crate::numerics::RandomSource::new(8);
        for _ in 0..200 {
            let x = [rng.draw_uniform(-PI, PI), rng.draw_uniform(-PI, PI)];
            let t = rng.draw_uniform(0.0, 1.0);
            let ux = eq(Query::spatial(0, [1, 0]), &x, Some(t));
            let vy = eq(Query::spatial(1, [0, 1]), &x, Some(t));
            assert!((ux + vy).abs() < 1e-14, "continuity {}", ux + vy);
        }
    }

    #[test]
    fn double_cylinder_exact_is_divergence_free() {
        let p = make_double_cylinder_ns::<f64>();
        let eq = p.exact_query.as_ref().unwrap();
        let mut rng = crate::numerics::RandomSource::new(9);
        for _ in 0..200 {
            let x = [rng.draw_uniform(-3.0, 3.0), rng.draw_uniform(-3.0, 3.0)];
            let ux = eq(Query::spatial(0, [1, 0]), &x, None);
            let vy = eq(Query::spatial(1, [0, 1]), &x, None);
            assert!((ux + vy).abs() < 1e-14);
        }
    }

    #[test]
    fn ns_boundary_split() {
        let p = make_double_cylinder_ns::<f64>();
        let mut rng = crate::numerics::RandomSource::new(10);
        let cs = (p.sample_bc)(600, &mut rng);
        // 400 outer + 100 + 100 points, two velocity rows each
        assert_eq!(cs.len(), 1200);
    }

    #[test]
    fn taylor_green_ic_is_grid() {
        let p = make_taylor_green::<f64>(100.0);
        let mut rng = crate::numerics::RandomSource::new(11);
        let cs = (p.sample_ic.as_ref().unwrap())(100, &mut rng);
        assert_eq!(cs.len(), 10 * 10 * 3);
    }
}
