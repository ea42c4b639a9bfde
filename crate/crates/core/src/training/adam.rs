use crate::scalar::Scalar;

/// Adam optimizer state: bias-corrected first and second moments.
/// `beta1 = 0.9`, `beta2 = 0.999`, `eps = 1e-8`.
#[derive(Debug, Clone)]
pub struct AdamState<S> {
    pub m: Vec<S>,
    pub v: Vec<S>,
    pub step: usize,
}

const BETA1: f64 = 0.9;
const BETA2: f64 = 0.999;
const EPS: f64 = 1e-8;

impl<S: Scalar> AdamState<S> {
    pub fn new(n: usize) -> Self {
        AdamState {
            m: vec![S::zero(); n],
            v: vec![S::zero(); n],
            step: 0,
        }
    }

    /// `theta <- theta - lr * m_hat / (sqrt(v_hat) + eps)`.
    pub fn step(&mut self, params: &mut [S], grad: &[S], lr: S) {
        debug_assert_eq!(params.len(), grad.len());
        debug_assert_eq!(params.len(), self.m.len());
        self.step += 1;
        let b1 = S::from_f64(BETA1);
        let b2 = S::from_f64(BETA2);
        let one_m_b1 = S::from_f64(1.0 - BETA1);
        let one_m_b2 = S::from_f64(1.0 - BETA2);
        let bc1 = S::from_f64(1.0 - BETA1.powi(self.step as i32));
        let bc2 = S::from_f64(1.0 - BETA2.powi(self.step as i32));
        let eps = S::from_f64(EPS);
        for i in 0..params.len() {
            let g = grad[i];
            self.m[i] = b1 * self.m[i] + one_m_b1 * g;
            self.v[i] = b2 * self.v[i] + one_m_b2 * g * g;
            let m_hat = self.m[i] / bc1;
            let v_hat = self.v[i] / bc2;
            params[i] = params[i] - lr * m_hat / (v_hat.sqrt() + eps);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_step_hand_computed() {
        // f(theta) = theta^2 at theta = 1: grad = 2.
        // m_hat = 2, v_hat = 4 => theta ~ 1 - lr * 2/(2 + eps)
        let mut adam = AdamState::new(1);
        let mut theta = vec![1.0f64];
        adam.step(&mut theta, &[2.0], 1e-3);
        let expect = 1.0 - 1e-3 * (2.0 / (2.0 + 1e-8));
        assert!((theta[0] - expect).abs() < 1e-15, "{} vs {expect}", theta[0]);
    }

    #[test]
    fn zero_gradient_keeps_parameters() {
        let mut adam = AdamState::new(3);
        let mut theta = vec![1.0, -2.0, 0.5];
        let before = theta.clone();
        adam.step(&mut theta, &[0.0, 0.0, 0.0], 1e-2);
        assert_eq!(theta, before);
        assert_eq!(adam.step, 1);
    }

    #[test]
    fn replicas_are_bit_identical() {
        let grads = [[0.3, -1.0], [0.1, 0.2], [-0.5, 0.9]];
        let run = || {
            let mut adam = AdamState::new(2);
            let mut theta = vec![0.5f64, -0.25];
            for g in grads {
                adam.step(&mut theta, &g, 1e-3);
            }
            theta
        };
        assert_eq!(run(), run());
    }
}
