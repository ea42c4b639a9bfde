//! Minimal scalar automatic differentiation.
//!
//! Reverse mode runs over a recorded expression tape; forward mode rides on
//! dual numbers. The two compose: replaying a tape with dual-valued leaves
//! and running the reverse pass in dual arithmetic yields parameter
//! gradients of input derivatives. Second-order input derivatives come from
//! nesting duals, not from taping the tape.
//!
//! Tapes are scalar and per-point: collocation batches loop over points and
//! parallelize across them, never inside a tape.

mod dual;
mod tape;

pub use dual::Dual;
pub use tape::{Expr, Graph, Tape};

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum AutodiffError {
    /// A division node saw a zero denominator.
    DivisionByZero { node: usize },
    /// Value-dependent query on a tape whose inputs changed since `eval`.
    Unevaluated,
    /// Input derivatives support orders 1 and 2 only.
    UnsupportedOrder(u32),
}

impl fmt::Display for AutodiffError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AutodiffError::DivisionByZero { node } => {
                write!(f, "division by zero at tape node {node}")
            }
            AutodiffError::Unevaluated => write!(f, "tape not evaluated; call eval() first"),
            AutodiffError::UnsupportedOrder(o) => {
                write!(f, "unsupported derivative order {o} (orders 1 and 2 only)")
            }
        }
    }
}

impl std::error::Error for AutodiffError {}

#[cfg(test)]
mod tests {
    use super::*;

    fn central_diff(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
        (f(x + h) - f(x - h)) / (2.0 * h)
    }

    #[test]
    fn square_gradient() {
        let t = Tape::record(&[], &[3.0f64], |_, _, p| p[0] * p[0]).unwrap();
        assert_eq!(t.value().unwrap(), 9.0);
        assert_eq!(t.backward(1.0).unwrap(), vec![6.0]);
    }

    #[test]
    fn tanh_gradient_at_zero() {
        let t = Tape::record(&[], &[0.0f64], |_, _, p| p[0].tanh()).unwrap();
        assert_eq!(t.backward(1.0).unwrap(), vec![1.0]);
    }

    #[test]
    fn two_param_gradient_matches_finite_difference() {
        let f = |a: f64, b: f64| a * b.sin() + b * b;
        let (a, b) = (1.37, -0.64);
        let t = Tape::record(&[], &[a, b], |_, _, p| p[0] * p[1].sin() + p[1] * p[1]).unwrap();
        let g = t.backward(1.0).unwrap();
        let h = 1e-5;
        let ga = central_diff(|x| f(x, b), a, h);
        let gb = central_diff(|x| f(a, x), b, h);
        assert!((g[0] - ga).abs() < 1e-6 * ga.abs().max(1.0));
        assert!((g[1] - gb).abs() < 1e-6 * gb.abs().max(1.0));
    }

    #[test]
    fn input_derivatives_first_and_second() {
        // d/dt tanh(t) at 0 = 1
        let t = Tape::record(&[0.0f64], &[], |_, x, _| x[0].tanh()).unwrap();
        assert!((t.input_derivative(0, 1).unwrap() - 1.0).abs() < 1e-14);
        // d2/dt2 sin(t) at pi/2 = -1
        let t = Tape::record(&[std::f64::consts::FRAC_PI_2], &[], |_, x, _| x[0].sin()).unwrap();
        assert!((t.input_derivative(0, 2).unwrap() + 1.0).abs() < 1e-14);
        assert!(matches!(
            t.input_derivative(0, 3),
            Err(AutodiffError::UnsupportedOrder(3))
        ));
    }

    #[test]
    fn param_gradient_of_input_derivative() {
        // f = w * tanh(t); d/dw [d/dt f] = 1 - tanh(t)^2 at t = 0.5
        let (w, t0) = (2.0f64, 0.5f64);
        let tape = Tape::record(&[t0], &[w], |_, x, p| p[0] * x[0].tanh()).unwrap();
        let grads = tape.backward_of_input_derivative(0, 1).unwrap();
        let expect = 1.0 - t0.tanh().powi(2);
        assert!((grads[0] - expect).abs() < 1e-12);
        // and against a finite difference in w
        let h = 1e-6;
        let dt = |w: f64| {
            let tape = Tape::record(&[t0], &[w], |_, x, p| p[0] * x[0].tanh()).unwrap();
            tape.input_derivative(0, 1).unwrap()
        };
        let fd = (dt(w + h) - dt(w - h)) / (2.0 * h);
        assert!((grads[0] - fd).abs() < 1e-6);
    }

    #[test]
    fn division_by_zero_is_reported() {
        let r = Tape::record(&[0.0f64], &[1.0f64], |_, x, p| p[0] / x[0]);
        assert!(matches!(r, Err(AutodiffError::DivisionByZero { .. })));
    }

    #[test]
    fn unevaluated_tape_is_a_state_error() {
        let mut t = Tape::record(&[1.0f64], &[2.0f64], |_, x, p| x[0] * p[0]).unwrap();
        t.set_input(0, 3.0);
        assert!(matches!(t.value(), Err(AutodiffError::Unevaluated)));
        assert!(matches!(t.backward(1.0), Err(AutodiffError::Unevaluated)));
        t.eval().unwrap();
        assert_eq!(t.value().unwrap(), 6.0);
        assert_eq!(t.backward(1.0).unwrap(), vec![3.0]);
    }

    #[test]
    fn gradient_of_sum_is_sum_of_gradients() {
        let params = [0.3f64, -1.1, 0.8];
        let t1 = Tape::record(&[], &params, |_, _, p| p[0].sin() * p[1] + p[2].exp()).unwrap();
        let t2 = Tape::record(&[], &params, |_, _, p| p[1].cos() - p[0] * p[2]).unwrap();
        let tsum = Tape::record(&[], &params, |_, _, p| {
            p[0].sin() * p[1] + p[2].exp() + (p[1].cos() - p[0] * p[2])
        })
        .unwrap();
        let g1 = t1.backward(1.0).unwrap();
        let g2 = t2.backward(1.0).unwrap();
        let gs = tsum.backward(1.0).unwrap();
        for i in 0..3 {
            assert!((gs[i] - (g1[i] + g2[i])).abs() < 1e-14);
        }
    }

    /// Random expression over the supported primitives, safe to
    /// finite-difference (division guarded away from zero).
    fn random_expr_check(seed: u64) {
        use crate::numerics::RandomSource;
        let mut rng = RandomSource::new(seed);
        let n_params = 3;
        let params: Vec<f64> = (0..n_params).map(|_| rng.draw_uniform(-2.0, 2.0)).collect();
        let picks: Vec<u64> = (0..8).map(|_| rng.next_u64() % 7).collect();

        // Expression builder shared between the tape and the plain closure.
        fn combine(ops: &[u64], v: [f64; 3]) -> f64 {
            let mut acc = v[0];
            for (k, &op) in ops.iter().enumerate() {
                let rhs = v[(k + 1) % 3];
                acc = match op {
                    0 => acc + rhs,
                    1 => acc - rhs,
                    2 => acc * rhs,
                    3 => acc / (rhs * rhs + 1.5), // denominator kept positive
                    4 => acc.sin() + rhs,
                    5 => acc.tanh() * rhs,
                    _ => (acc * 0.4).exp() - rhs,
                };
            }
            acc
        }

        let tape = Tape::record(&[], &params, |g, _, p| {
            let c15 = g.constant(1.5);
            let c04 = g.constant(0.4);
            let mut acc = p[0];
            for (k, &op) in picks.iter().enumerate() {
                let rhs = p[(k + 1) % 3];
                acc = match op {
                    0 => acc + rhs,
                    1 => acc - rhs,
                    2 => acc * rhs,
                    3 => acc / (rhs * rhs + c15),
                    4 => acc.sin() + rhs,
                    5 => acc.tanh() * rhs,
                    _ => (acc * c04).exp() - rhs,
                };
            }
            acc
        })
        .unwrap();

        let direct = combine(&picks, [params[0], params[1], params[2]]);
        assert!(
            (tape.value().unwrap() - direct).abs() <= 1e-12 * direct.abs().max(1.0),
            "tape value mismatch"
        );

        let grads = tape.backward(1.0).unwrap();
        let h = 1e-5;
        for i in 0..n_params {
            let mut lo = params.clone();
            let mut hi = params.clone();
            lo[i] -= h;
            hi[i] += h;
            let fd = (combine(&picks, [hi[0], hi[1], hi[2]])
                - combine(&picks, [lo[0], lo[1], lo[2]]))
                / (2.0 * h);
            let denom = fd.abs().max(1e-3);
            assert!(
                (grads[i] - fd).abs() / denom < 1e-6,
                "seed {seed} param {i}: reverse {} vs fd {fd}",
                grads[i]
            );
        }
    }

    #[test]
    fn hundred_random_compositions_match_finite_differences() {
        for seed in 0..100 {
            random_expr_check(seed * 7919 + 13);
        }
    }

    #[test]
    fn mixed_second_derivatives_agree_across_modes() {
        // d^2/dx dtheta computed two ways: reverse pass in dual arithmetic
        // (tangent on the input) vs nested forward with the parameter seeded.
        use crate::numerics::RandomSource;
        let mut rng = RandomSource::new(99);
        for _ in 0..50 {
            let x0: f64 = rng.draw_uniform(-1.5, 1.5);
            let th: Vec<f64> = (0..2).map(|_| rng.draw_uniform(-1.5, 1.5)).collect();
            let tape = Tape::record(&[x0], &th, |_, x, p| {
                (p[0] * x[0]).tanh() * p[1] + (x[0] * x[0]) * p[0].sin()
            })
            .unwrap();
            let rev_over_fwd: Vec<f64> = tape
                .backward_with_input_tangent(0, 1.0)
                .unwrap()
                .iter()
                .map(|d| d.tangent)
                .collect();
            for i in 0..2 {
                let fwd_over_fwd = tape.forward_param_derivative(i, Some(0)).unwrap();
                assert!(
                    (rev_over_fwd[i] - fwd_over_fwd.tangent).abs() < 1e-10,
                    "param {i}: {} vs {}",
                    rev_over_fwd[i],
                    fwd_over_fwd.tangent
                );
                // primal parts are the plain gradient; cross-check those too
                assert!((tape.backward(1.0).unwrap()[i] - fwd_over_fwd.primal).abs() < 1e-12);
            }
        }
    }
}
