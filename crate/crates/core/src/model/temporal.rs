use crate::autodiff::{Dual, Tape};
use crate::numerics::RandomSource;
use crate::scalar::Scalar;

/// Temporal mode networks are shallow fully-connected tanh networks with a
/// fixed shape: one input, three hidden layers of ten, one linear output.
/// 20 + 110 + 110 + 11 = 251 parameters.
pub const TEMPORAL_WIDTHS: [usize; 5] = [1, 10, 10, 10, 1];

pub const TEMPORAL_PARAM_COUNT: usize = 251;

/// One mode's temporal factor `T_n(t)`, recorded as an autodiff tape so the
/// time derivative and the parameter gradients both come from the tape.
#[derive(Debug, Clone)]
pub struct TemporalNet<S> {
    params: Vec<S>,
    tape: Tape<S>,
}

/// Reusable buffers for tape replay and reverse passes.
#[derive(Debug)]
pub struct TemporalScratch<S> {
    pub vals: Vec<Dual<S>>,
    pub adjoints: Vec<Dual<S>>,
    pub grads: Vec<Dual<S>>,
}

impl<S> Default for TemporalScratch<S> {
    fn default() -> Self {
        TemporalScratch {
            vals: Vec::new(),
            adjoints: Vec::new(),
            grads: Vec::new(),
        }
    }
}

impl<S: Scalar> TemporalNet<S> {
    /// Glorot-uniform weights, zero biases.
    pub fn init(rng: &mut RandomSource) -> Self {
        let mut params = Vec::with_capacity(TEMPORAL_PARAM_COUNT);
        for l in 0..TEMPORAL_WIDTHS.len() - 1 {
            let (fan_in, fan_out) = (TEMPORAL_WIDTHS[l], TEMPORAL_WIDTHS[l + 1]);
            let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
            for _ in 0..fan_in * fan_out {
                params.push(rng.draw_uniform(S::from_f64(-bound), S::from_f64(bound)));
            }
            for _ in 0..fan_out {
                params.push(S::zero());
            }
        }
        Self::from_params(params)
    }

    /// Build from a flat layer-major parameter vector
    /// `[W1 row-major, b1, W2, b2, W3, b3, W4, b4]`.
    pub fn from_params(params: Vec<S>) -> Self {
        assert_eq!(params.len(), TEMPORAL_PARAM_COUNT);
        let tape = Tape::record(&[S::zero()], &params, |_, x, p| {
            let mut acts = vec![x[0]];
            let mut off = 0usize;
            for l in 0..TEMPORAL_WIDTHS.len() - 1 {
                let (fan_in, fan_out) = (TEMPORAL_WIDTHS[l], TEMPORAL_WIDTHS[l + 1]);
                let last = l == TEMPORAL_WIDTHS.len() - 2;
                let mut next = Vec::with_capacity(fan_out);
                for j in 0..fan_out {
                    let mut z = p[off + fan_in * fan_out + j];
                    for (k, &a) in acts.iter().enumerate() {
                        z = z + p[off + j * fan_in + k] * a;
                    }
                    next.push(if last { z } else { z.tanh() });
                }
                off += fan_in * fan_out + fan_out;
                acts = next;
            }
            acts[0]
        })
        .expect("temporal net records no divisions");
        TemporalNet { params, tape }
    }

    pub fn params(&self) -> &[S] {
        &self.params
    }

    pub fn set_params(&mut self, params: &[S]) {
        assert_eq!(params.len(), TEMPORAL_PARAM_COUNT);
        self.params.copy_from_slice(params);
        self.tape.set_params(params);
    }

    /// `(T(t), dT/dt)` via a dual replay into caller scratch; the replay
    /// buffer stays valid for a following [`TemporalNet::accumulate_grads`].
    pub fn value_and_dt(&self, t: S, scratch: &mut TemporalScratch<S>) -> (S, S) {
        self.tape
            .replay_dual_at(0, t, &mut scratch.vals)
            .expect("temporal net replay cannot fail");
        let out = self.tape.replay_output(&scratch.vals);
        (out.primal, out.tangent)
    }

    /// As [`TemporalNet::value_and_dt`] but into an external buffer, so
    /// several modes' replays can stay cached side by side.
    pub fn value_and_dt_into(&self, t: S, buf: &mut Vec<Dual<S>>) -> (S, S) {
        self.tape
            .replay_dual_at(0, t, buf)
            .expect("temporal net replay cannot fail");
        let out = self.tape.replay_output(buf);
        (out.primal, out.tangent)
    }

    /// `acc += w_val * dT/dtheta + w_dt * d(dT/dt)/dtheta`, reusing the
    /// replay from the latest [`TemporalNet::value_and_dt`] on this scratch.
    pub fn accumulate_grads(
        &self,
        scratch: &mut TemporalScratch<S>,
        w_val: S,
        w_dt: S,
        acc: &mut [S],
    ) {
        let vals = std::mem::take(&mut scratch.vals);
        self.accumulate_grads_from(&vals, scratch, w_val, w_dt, acc);
        scratch.vals = vals;
    }

    /// Reverse pass over a cached replay buffer.
    pub fn accumulate_grads_from(
        &self,
        vals: &[Dual<S>],
        scratch: &mut TemporalScratch<S>,
        w_val: S,
        w_dt: S,
        acc: &mut [S],
    ) {
        debug_assert_eq!(acc.len(), TEMPORAL_PARAM_COUNT);
        self.tape
            .backward_dual_from(vals, &mut scratch.adjoints, &mut scratch.grads);
        for (a, g) in acc.iter_mut().zip(&scratch.grads) {
            *a = *a + w_val * g.primal + w_dt * g.tangent;
        }
    }
}
