use super::{Constraint, Equation, PdeProblem, Recommended};
use crate::model::Query;
use crate::sampling::lhs_points;
use crate::scalar::Scalar;

/// 1-d heat conduction on `[-1,1] x [0,1]`:
/// `u_t - alpha u_xx = 0`, `alpha = 1/kappa^2`,
/// `u(x,0) = sin(kappa x)`, `u(+-1,t) = 0`,
/// exact `u = e^{-t} sin(kappa x)`.
pub fn make_heat<S: Scalar>(kappa: f64, id: &'static str) -> PdeProblem<S> {
    let alpha = 1.0 / (kappa * kappa);
    // queries: [u_t, u_xx]
    let queries = vec![Query::time(0), Query::spatial(0, [2, 0])];
    let equations = vec![Equation {
        name: "heat",
        eval: Box::new(move |q: &[S], _x: &[S], _t, partials: &mut [S]| {
            partials[0] = S::one();
            partials[1] = S::from_f64(-alpha);
            q[0] - S::from_f64(alpha) * q[1]
        }),
    }];

    let sample_ic = Box::new(move |n: usize, rng: &mut crate::numerics::RandomSource| {
        let pts = lhs_points::<S>(rng, n, &[(S::from_f64(-1.0), S::one())]).unwrap();
        pts.into_iter()
            .map(|p| Constraint::Dirichlet {
                target: (S::from_f64(kappa) * p[0]).sin(),
                x: p,
                t: Some(S::zero()),
                field: 0,
            })
            .collect()
    });

    let sample_bc = Box::new(move |n: usize, rng: &mut crate::numerics::RandomSource| {
        let ts = lhs_points::<S>(rng, n, &[(S::zero(), S::one())]).unwrap();
        ts.into_iter()
            .enumerate()
            .map(|(i, t)| Constraint::Dirichlet {
                x: vec![if i % 2 == 0 { S::from_f64(-1.0) } else { S::one() }],
                t: Some(t[0]),
                field: 0,
                target: S::zero(),
            })
            .collect()
    });

    let sample_pde = Box::new(move |n: usize, rng: &mut crate::numerics::RandomSource| {
        let pts = lhs_points::<S>(
            rng,
            n,
            &[(S::from_f64(-1.0), S::one()), (S::zero(), S::one())],
        )
        .unwrap();
        pts.into_iter()
            .map(|p| (vec![p[0]], Some(p[1])))
            .collect()
    });

    let exact = Box::new(move |x: &[S], t: Option<S>, _field: usize| {
        (-t.unwrap()).exp() * (S::from_f64(kappa) * x[0]).sin()
    });

    // closed-form derivatives of e^{-t} sin(kappa x)
    let exact_query = Box::new(move |q: Query, x: &[S], t: Option<S>| {
        let k = S::from_f64(kappa);
        let decay = (-t.unwrap()).exp();
        let u = decay * (k * x[0]).sin();
        if q.dt {
            return -u;
        }
        match q.dx[0] {
            0 => u,
            1 => decay * k * (k * x[0]).cos(),
            2 => -(k * k) * u,
            _ => unreachable!(),
        }
    });

    PdeProblem {
        id,
        dim: 1,
        time_dependent: true,
        field_count: 1,
        field_names: vec!["u"],
        gauge_fields: vec![false],
        queries,
        equations,
        sample_ic: Some(sample_ic),
        sample_bc,
        sample_pde,
        exact: Some(exact),
        exact_query: Some(exact_query),
        geometry: None,
        bounds: vec![(-1.0, 1.0), (0.0, 1.0)],
        w_char: vec![kappa],
        recommended: Recommended {
            modes: if kappa > 70.0 { 4 } else { 10 },
            features: if kappa > 70.0 { 50 } else { 40 },
            amp_scale: 1.0,
            lr: 1e-3,
            sigma: kappa / std::f64::consts::PI,
            epochs: 5000,
            n_ic: 1000,
            n_bc: 400,
            n_pde: 10000,
            baseline_widths: if kappa > 70.0 {
                vec![2, 120, 120, 120, 120, 120, 1]
            } else {
                vec![2, 100, 100, 100, 100, 100, 1]
            },
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn exact_at_known_point() {
        let p = make_heat::<f64>(20.0 * PI, "heat20pi");
        let exact = p.exact.as_ref().unwrap();
        // sin(20 pi * 0.025) = sin(pi/2) = 1 at t = 0
        assert!((exact(&[0.025], Some(0.0), 0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn recommended_config_matches_published_setup() {
        let p = make_heat::<f64>(20.0 * PI, "heat20pi");
        assert_eq!(p.recommended.modes, 10);
        assert_eq!(p.recommended.features, 40);
        assert_eq!(p.recommended.epochs, 5000);
        let p = make_heat::<f64>(100.0 * PI, "heat100pi");
        assert_eq!((p.recommended.modes, p.recommended.features), (4, 50));
    }

    #[test]
    fn boundary_sampler_alternates_sides() {
        let p = make_heat::<f64>(20.0 * PI, "heat20pi");
        let mut rng = crate::numerics::RandomSource::new(3);
        let cs = (p.sample_bc)(10, &mut rng);
        assert_eq!(cs.len(), 10);
        for (i, c) in cs.iter().enumerate() {
            match c {
                Constraint::Dirichlet { x, target, .. } => {
                    assert_eq!(x[0].abs(), 1.0);
                    assert_eq!(x[0] < 0.0, i % 2 == 0);
                    assert_eq!(*target, 0.0);
                }
                _ => panic!("heat boundary is Dirichlet"),
            }
        }
    }
}
