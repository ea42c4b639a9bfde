//! Adaptive Fourier spectral features: evaluation, analytical input
//! derivatives to second order, closed-form parameter gradients, and
//! separable d-dimensional products with mixed partials.
//!
//! A one-dimensional feature is
//! `sum_k [a_k sin(w_k x) + b_k cos(w_k x)] + beta`
//! with trainable amplitudes, frequencies, and bias. Frequencies are
//! unconstrained reals; sine and cosine are well defined for either sign.
//! Derivative orders stop at two — every benchmark PDE needs at most second
//! spatial derivatives, and anything higher is an explicit error rather than
//! silent garbage.

use crate::scalar::Scalar;
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum SpectralError {
    /// Spatial derivatives are implemented for orders 0, 1, 2 only.
    UnsupportedOrder(u32),
}

impl fmt::Display for SpectralError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectralError::UnsupportedOrder(o) => {
                write!(f, "unsupported derivative order {o} (max 2)")
            }
        }
    }
}

impl std::error::Error for SpectralError {}

/// One direction's learnable spectral feature.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierFeature1D<S> {
    /// Sine amplitudes, length K.
    pub a: Vec<S>,
    /// Cosine amplitudes, length K.
    pub b: Vec<S>,
    /// Frequencies in radians per unit length, length K.
    pub w: Vec<S>,
    /// Scalar bias.
    pub beta: S,
}

/// Cached `sin(w_k x)` / `cos(w_k x)` tables for one feature at one point.
/// Everything downstream (values, derivatives, parameter gradients) reads
/// from these, so the trig functions are evaluated once per point.
#[derive(Debug, Clone)]
pub struct FeatureTables<S> {
    pub x: S,
    pub sin: Vec<S>,
    pub cos: Vec<S>,
    /// Feature value and first/second derivatives at `x`.
    pub deriv: [S; 3],
}

impl<S: Scalar> FeatureTables<S> {
    pub fn empty() -> Self {
        FeatureTables {
            x: S::zero(),
            sin: Vec::new(),
            cos: Vec::new(),
            deriv: [S::zero(); 3],
        }
    }
}

impl<S: Scalar> FourierFeature1D<S> {
    pub fn constant(beta: S) -> Self {
        FourierFeature1D {
            a: vec![S::zero()],
            b: vec![S::zero()],
            w: vec![S::zero()],
            beta,
        }
    }

    pub fn feature_count(&self) -> usize {
        self.a.len()
    }

    /// 3K + 1 parameters.
    pub fn param_count(&self) -> usize {
        3 * self.a.len() + 1
    }

    pub fn tables(&self, x: S) -> FeatureTables<S> {
        let mut out = FeatureTables::empty();
        self.tables_into(x, &mut out);
        out
    }

    /// Fill `out` in place, reusing its buffers.
    pub fn tables_into(&self, x: S, out: &mut FeatureTables<S>) {
        let k = self.a.len();
        out.x = x;
        out.sin.clear();
        out.cos.clear();
        out.sin.reserve(k);
        out.cos.reserve(k);
        let mut d0 = self.beta;
        let mut d1 = S::zero();
        let mut d2 = S::zero();
        for i in 0..k {
            let (s, c) = (self.w[i] * x).sin_cos();
            out.sin.push(s);
            out.cos.push(c);
            let osc = self.a[i] * s + self.b[i] * c;
            let anti = self.a[i] * c - self.b[i] * s;
            d0 = d0 + osc;
            d1 = d1 + self.w[i] * anti;
            d2 = d2 - self.w[i] * self.w[i] * osc;
        }
        out.deriv = [d0, d1, d2];
    }

    /// `sum_k [a_k sin(w_k x) + b_k cos(w_k x)] + beta`.
    pub fn eval(&self, x: S) -> S {
        self.tables(x).deriv[0]
    }

    /// Analytical derivative of the given order (0, 1, or 2). The bias
    /// vanishes for order >= 1.
    pub fn deriv(&self, x: S, order: u32) -> Result<S, SpectralError> {
        if order > 2 {
            return Err(SpectralError::UnsupportedOrder(order));
        }
        Ok(self.tables(x).deriv[order as usize])
    }

    /// Closed-form gradient of the order-`order` derivative with respect to
    /// the parameters, written as `[da_1.., db_1.., dw_1.., dbeta]` into
    /// `out` (length 3K + 1) scaled by `scale` and accumulated.
    ///
    /// Order 0:  d/da_k = sin,  d/db_k = cos,   d/dw_k = x(a cos - b sin)
    /// Order 1:  d/da_k = w cos, d/db_k = -w sin,
    ///           d/dw_k = (a cos - b sin) - w x (a sin + b cos)
    /// Order 2:  d/da_k = -w^2 sin, d/db_k = -w^2 cos,
    ///           d/dw_k = -2w(a sin + b cos) - w^2 x (a cos - b sin)
    pub fn accumulate_param_grads(
        &self,
        tables: &FeatureTables<S>,
        order: u32,
        scale: S,
        out: &mut [S],
    ) -> Result<(), SpectralError> {
        let k = self.a.len();
        debug_assert_eq!(out.len(), 3 * k + 1);
        let x = tables.x;
        match order {
            0 => {
                for i in 0..k {
                    let (s, c) = (tables.sin[i], tables.cos[i]);
                    out[i] = out[i] + scale * s;
                    out[k + i] = out[k + i] + scale * c;
                    out[2 * k + i] =
                        out[2 * k + i] + scale * x * (self.a[i] * c - self.b[i] * s);
                }
                out[3 * k] = out[3 * k] + scale;
            }
            1 => {
                for i in 0..k {
                    let (s, c) = (tables.sin[i], tables.cos[i]);
                    let wi = self.w[i];
                    let osc = self.a[i] * s + self.b[i] * c;
                    let anti = self.a[i] * c - self.b[i] * s;
                    out[i] = out[i] + scale * wi * c;
                    out[k + i] = out[k + i] - scale * wi * s;
                    out[2 * k + i] = out[2 * k + i] + scale * (anti - wi * x * osc);
                }
            }
            2 => {
                for i in 0..k {
                    let (s, c) = (tables.sin[i], tables.cos[i]);
                    let wi = self.w[i];
                    let w2 = wi * wi;
                    let osc = self.a[i] * s + self.b[i] * c;
                    let anti = self.a[i] * c - self.b[i] * s;
                    out[i] = out[i] - scale * w2 * s;
                    out[k + i] = out[k + i] - scale * w2 * c;
                    out[2 * k + i] = out[2 * k + i]
                        - scale * (S::from_f64(2.0) * wi * osc + w2 * x * anti);
                }
            }
            o => return Err(SpectralError::UnsupportedOrder(o)),
        }
        Ok(())
    }

    /// Convenience: parameter gradient as a fresh vector.
    pub fn param_grads(&self, x: S, order: u32) -> Result<Vec<S>, SpectralError> {
        let mut out = vec![S::zero(); self.param_count()];
        let tables = self.tables(x);
        self.accumulate_param_grads(&tables, order, S::one(), &mut out)?;
        Ok(out)
    }

    /// Parameters in flat layout `[a.., b.., w.., beta]`.
    pub fn write_flat(&self, out: &mut Vec<S>) {
        out.extend_from_slice(&self.a);
        out.extend_from_slice(&self.b);
        out.extend_from_slice(&self.w);
        out.push(self.beta);
    }

    pub fn read_flat(&mut self, data: &[S]) {
        let k = self.a.len();
        debug_assert_eq!(data.len(), 3 * k + 1);
        self.a.copy_from_slice(&data[..k]);
        self.b.copy_from_slice(&data[k..2 * k]);
        self.w.copy_from_slice(&data[2 * k..3 * k]);
        self.beta = data[3 * k];
    }
}

/// Product of d independently parameterized one-dimensional features.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableMode<S> {
    pub directions: Vec<FourierFeature1D<S>>,
}

impl<S: Scalar> SeparableMode<S> {
    pub fn dim(&self) -> usize {
        self.directions.len()
    }

    pub fn param_count(&self) -> usize {
        self.directions.iter().map(|f| f.param_count()).sum()
    }

    /// `prod_j Phi^(j)(x_j)`.
    pub fn eval(&self, x: &[S]) -> S {
        debug_assert_eq!(x.len(), self.directions.len());
        let mut p = S::one();
        for (f, &xi) in self.directions.iter().zip(x) {
            p = p * f.eval(xi);
        }
        p
    }

    /// Separable mixed partial: `prod_j d^{p_j} Phi^(j) / dx_j^{p_j}`.
    pub fn mixed_partial(&self, x: &[S], orders: &[u32]) -> Result<S, SpectralError> {
        debug_assert_eq!(x.len(), self.directions.len());
        debug_assert_eq!(orders.len(), self.directions.len());
        let mut p = S::one();
        for ((f, &xi), &o) in self.directions.iter().zip(x).zip(orders) {
            p = p * f.deriv(xi, o)?;
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RandomSource;
    use std::f64::consts::PI;

    fn random_feature(rng: &mut RandomSource, k: usize, wmax: f64) -> FourierFeature1D<f64> {
        FourierFeature1D {
            a: (0..k).map(|_| rng.draw_uniform(-1.0, 1.0)).collect(),
            b: (0..k).map(|_| rng.draw_uniform(-1.0, 1.0)).collect(),
            w: (0..k).map(|_| rng.draw_uniform(0.5, wmax)).collect(),
            beta: rng.draw_uniform(-1.0, 1.0),
        }
    }

    #[test]
    fn eval_known_values() {
        let f = FourierFeature1D {
            a: vec![1.0],
            b: vec![0.0],
            w: vec![PI],
            beta: 0.0,
        };
        assert!((f.eval(0.5) - 1.0).abs() < 1e-15); // sin(pi/2)

        let bias_only = FourierFeature1D {
            a: vec![0.0],
            b: vec![0.0],
            w: vec![7.0],
            beta: 2.5,
        };
        assert_eq!(bias_only.eval(0.0), 2.5);
        assert_eq!(bias_only.eval(13.7), 2.5);
    }

    #[test]
    fn eval_matches_direct_sum_oracle() {
        let mut rng = RandomSource::new(17);
        let f = random_feature(&mut rng, 3, 10.0);
        let x = 0.37;
        let direct: f64 = (0..3)
            .map(|k| f.a[k] * (f.w[k] * x).sin() + f.b[k] * (f.w[k] * x).cos())
            .sum::<f64>()
            + f.beta;
        assert_eq!(f.eval(x), direct);
    }

    #[test]
    fn second_derivative_of_sine_feature() {
        let f = FourierFeature1D {
            a: vec![1.0],
            b: vec![0.0],
            w: vec![PI],
            beta: 0.0,
        };
        // d2/dx2 sin(pi x) at 0.5 = -pi^2
        assert!((f.deriv(0.5, 2).unwrap() + PI * PI).abs() < 1e-12);
    }

    #[test]
    fn bias_only_derivatives_vanish() {
        let f = FourierFeature1D::constant(2.5f64);
        assert_eq!(f.deriv(0.3, 1).unwrap(), 0.0);
        assert_eq!(f.deriv(0.3, 2).unwrap(), 0.0);
    }

    #[test]
    fn order_above_two_is_error() {
        let f = FourierFeature1D::constant(1.0f64);
        assert!(matches!(
            f.deriv(0.0, 3),
            Err(SpectralError::UnsupportedOrder(3))
        ));
        let m = SeparableMode {
            directions: vec![f],
        };
        assert!(m.mixed_partial(&[0.0], &[3]).is_err());
    }

    #[test]
    fn first_derivative_matches_finite_difference() {
        let mut rng = RandomSource::new(3);
        let f = random_feature(&mut rng, 5, 20.0);
        let h = 1e-6;
        for _ in 0..50 {
            let x = rng.draw_uniform(-2.0, 2.0);
            let fd = (f.eval(x + h) - f.eval(x - h)) / (2.0 * h);
            let an = f.deriv(x, 1).unwrap();
            assert!(
                (an - fd).abs() <= 1e-6 * an.abs().max(1.0),
                "x={x}: {an} vs {fd}"
            );
        }
    }

    #[test]
    fn derivative_of_derivative_is_second_derivative() {
        let mut rng = RandomSource::new(5);
        let f = random_feature(&mut rng, 4, 10.0);
        let h = 1e-6;
        for _ in 0..20 {
            let x = rng.draw_uniform(-1.0, 1.0);
            let fd = (f.deriv(x + h, 1).unwrap() - f.deriv(x - h, 1).unwrap()) / (2.0 * h);
            let an = f.deriv(x, 2).unwrap();
            assert!((an - fd).abs() <= 1e-5 * an.abs().max(1.0));
        }
    }

    #[test]
    fn param_grad_trivial_entries() {
        let mut rng = RandomSource::new(7);
        let f = random_feature(&mut rng, 3, 5.0);
        let g = f.param_grads(0.0, 0).unwrap();
        // at x=0: d/da_k = sin(0) = 0, d/dbeta = 1
        for i in 0..3 {
            assert_eq!(g[i], 0.0);
        }
        assert_eq!(g[9], 1.0);
    }

    #[test]
    fn param_grads_match_finite_difference_all_orders() {
        let mut rng = RandomSource::new(11);
        for order in 0..=2u32 {
            let f = random_feature(&mut rng, 4, 8.0);
            let x = rng.draw_uniform(-1.5, 1.5);
            let g = f.param_grads(x, order).unwrap();
            let h = 1e-6;
            let n = f.param_count();
            let mut flat = Vec::new();
            f.write_flat(&mut flat);
            for i in 0..n {
                let mut lo = f.clone();
                let mut hi = f.clone();
                let mut fl = flat.clone();
                fl[i] += h;
                hi.read_flat(&fl);
                fl[i] -= 2.0 * h;
                lo.read_flat(&fl);
                let fd =
                    (hi.deriv(x, order).unwrap() - lo.deriv(x, order).unwrap()) / (2.0 * h);
                assert!(
                    (g[i] - fd).abs() <= 1e-6 * fd.abs().max(1.0),
                    "order {order} param {i}: {} vs {fd}",
                    g[i]
                );
            }
        }
    }

    #[test]
    fn mode_eval_is_product() {
        let m = SeparableMode {
            directions: vec![
                FourierFeature1D::constant(2.0f64),
                FourierFeature1D::constant(3.0),
            ],
        };
        assert_eq!(m.eval(&[0.1, 0.2]), 6.0);

        let mut rng = RandomSource::new(13);
        let m = SeparableMode {
            directions: vec![random_feature(&mut rng, 3, 6.0), random_feature(&mut rng, 3, 6.0)],
        };
        let x = [0.3, -0.7];
        let direct = m.directions[0].eval(x[0]) * m.directions[1].eval(x[1]);
        assert_eq!(m.eval(&x), direct);

        // d = 1 reduces to the single feature
        let f = random_feature(&mut rng, 2, 4.0);
        let m1 = SeparableMode {
            directions: vec![f.clone()],
        };
        assert_eq!(m1.eval(&[0.9]), f.eval(0.9));
    }

    #[test]
    fn mixed_partial_analytic_case() {
        // u = sin(pi x) cos(pi y): d2u/dx2 at (0.5, 0) = -pi^2
        let m = SeparableMode {
            directions: vec![
                FourierFeature1D {
                    a: vec![1.0],
                    b: vec![0.0],
                    w: vec![PI],
                    beta: 0.0,
                },
                FourierFeature1D {
                    a: vec![0.0],
                    b: vec![1.0],
                    w: vec![PI],
                    beta: 0.0,
                },
            ],
        };
        let v = m.mixed_partial(&[0.5, 0.0], &[2, 0]).unwrap();
        assert!((v + PI * PI).abs() < 1e-12);
        // zero orders reduce to eval
        assert_eq!(m.mixed_partial(&[0.3, 0.4], &[0, 0]).unwrap(), m.eval(&[0.3, 0.4]));
    }

    #[test]
    fn mixed_partial_matches_nested_finite_difference() {
        let mut rng = RandomSource::new(19);
        let m = SeparableMode {
            directions: vec![random_feature(&mut rng, 3, 6.0), random_feature(&mut rng, 3, 6.0)],
        };
        let (x, y) = (0.21, -0.43);
        let h = 1e-5;
        let fd = (m.eval(&[x + h, y + h]) - m.eval(&[x + h, y - h]) - m.eval(&[x - h, y + h])
            + m.eval(&[x - h, y - h]))
            / (4.0 * h * h);
        let an = m.mixed_partial(&[x, y], &[1, 1]).unwrap();
        assert!((an - fd).abs() <= 1e-5 * an.abs().max(1.0), "{an} vs {fd}");
    }

    #[test]
    fn laplacian_identity_for_shared_frequency() {
        // All directions a single shared frequency w, pure oscillatory parts:
        // sum_j d2/dx_j2 (prod phi) = -d w^2 (prod phi) when each phi has
        // beta = 0 and a single (a, b) pair.
        let w = 3.0f64;
        for d in 1..=3usize {
            let dirs: Vec<FourierFeature1D<f64>> = (0..d)
                .map(|j| FourierFeature1D {
                    a: vec![0.6 + 0.1 * j as f64],
                    b: vec![-0.3 + 0.2 * j as f64],
                    w: vec![w],
                    beta: 0.0,
                })
                .collect();
            let m = SeparableMode { directions: dirs };
            let x: Vec<f64> = (0..d).map(|j| 0.17 * (j as f64 + 1.0)).collect();
            let mut lap = 0.0;
            for j in 0..d {
                let mut orders = vec![0u32; d];
                orders[j] = 2;
                lap += m.mixed_partial(&x, &orders).unwrap();
            }
            let expect = -(d as f64) * w * w * m.eval(&x);
            assert!(
                (lap - expect).abs() < 1e-10 * expect.abs().max(1.0),
                "d={d}: {lap} vs {expect}"
            );
        }
    }

    #[test]
    fn param_grads_agree_with_tape_replica() {
        // A taped replica of the feature sum must produce the same parameter
        // gradient as the closed forms, for all derivative orders.
        use crate::autodiff::Tape;
        let mut rng = RandomSource::new(23);
        let f = random_feature(&mut rng, 3, 5.0);
        let x0 = 0.43;
        let k = 3;
        let mut theta = Vec::new();
        f.write_flat(&mut theta);
        let tape = Tape::record(&[x0], &theta, |_, x, p| {
            let mut acc = p[3 * k]; // beta
            for i in 0..k {
                let arg = p[2 * k + i] * x[0];
                acc = acc + p[i] * arg.sin() + p[k + i] * arg.cos();
            }
            acc
        })
        .unwrap();
        for order in 0..=2u32 {
            let closed = f.param_grads(x0, order).unwrap();
            let taped = match order {
                0 => tape.backward(1.0).unwrap(),
                o => tape.backward_of_input_derivative(0, o).unwrap(),
            };
            for i in 0..closed.len() {
                assert!(
                    (closed[i] - taped[i]).abs() <= 1e-10 * taped[i].abs().max(1.0),
                    "order {order} param {i}: closed {} vs tape {}",
                    closed[i],
                    taped[i]
                );
            }
        }
    }
}
