//! Conventional fully-connected physics-informed network: tanh multilayer
//! perceptron with derivatives to second order from dual-number passes and
//! parameter gradients from a reverse pass run in jet arithmetic
//! (forward-over-reverse). It answers the same [`Query`] interface as the
//! spectral model, so losses, the optimizer, and the diagnostics see one
//! code path for both.
//!
//! The hot kernels are layerwise over component arrays rather than the
//! expression tape: the comparator has tens of thousands of parameters and
//! the full-batch loop re-differentiates every collocation point every
//! epoch. A jet `[value, d, d2]` is the symmetric collapse of the nested
//! dual `Dual<Dual<S>>` (whose two first-order slots are always equal when
//! both tangents seed the same input), and the mixed-derivative jet
//! `[value, da, db, dab]` is the general nesting; the arithmetic below is
//! exactly the dual chain rule, component by component.

use crate::model::{FlatParams, ModelError, ModelSpec, ParamLayout, PointModel, Query, Segment};
use crate::numerics::RandomSource;
use crate::scalar::Scalar;

/// `sum over layers of (fan_in * fan_out + fan_out)`.
pub fn mlp_count_parameters(widths: &[usize]) -> usize {
    widths.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
}

/// Tanh MLP over `[x_1.. x_d, t?]` with identity output layer. Parameters
/// are stored flat, layer-major: `[W1 row-major, b1, W2, b2, ..]`.
#[derive(Debug, Clone)]
pub struct MlpModel<S> {
    widths: Vec<usize>,
    params: Vec<S>,
    layer_offsets: Vec<usize>,
    dim: usize,
    time_dependent: bool,
    /// Bumped on parameter assignment so cached activations invalidate.
    version: u64,
}

/// Per-worker activation and adjoint buffers, one set per jet width.
pub struct MlpScratch<S> {
    acts1: Vec<Vec<[S; 1]>>,
    acts2: Vec<Vec<[S; 2]>>,
    acts3: Vec<Vec<[S; 3]>>,
    acts4: Vec<Vec<[S; 4]>>,
    omega: Vec<[S; 4]>,
    keys: [Option<(u64, Pass, Vec<S>, Option<S>)>; 4],
}

impl<S: Scalar> Default for MlpScratch<S> {
    fn default() -> Self {
        MlpScratch {
            acts1: Vec::new(),
            acts2: Vec::new(),
            acts3: Vec::new(),
            acts4: Vec::new(),
            omega: Vec::new(),
            keys: [None, None, None, None],
        }
    }
}

/// One forward differentiation pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Pass {
    /// Values only.
    Val,
    /// First-order jet along one input.
    Jet1(usize),
    /// Second-order jet along one input.
    Jet2(usize),
    /// Mixed jet: first-order tangents on two distinct inputs.
    Mixed(usize, usize),
}

/// Where a query reads its value: pass index plus jet component.
#[derive(Debug, Clone, Copy)]
struct Slot {
    pass: usize,
    comp: usize,
}

// Jet chain rules, monomorphized per component count. Component meaning:
// C=1 [v]; C=2 [v, d]; C=3 [v, d, d2]; C=4 [v, da, db, dab].

#[inline]
fn jet_tanh<S: Scalar, const C: usize>(z: [S; C]) -> [S; C] {
    let th = z[0].tanh();
    let g = S::one() - th * th;
    let mut out = [S::zero(); C];
    out[0] = th;
    match C {
        1 => {}
        2 => out[1] = g * z[1],
        3 => {
            out[1] = g * z[1];
            out[2] = g * z[2] - S::from_f64(2.0) * th * g * z[1] * z[1];
        }
        4 => {
            out[1] = g * z[1];
            out[2] = g * z[2];
            out[3] = g * z[3] - S::from_f64(2.0) * th * g * z[1] * z[2];
        }
        _ => unreachable!(),
    }
    out
}

/// `1 - a (x) a`, the tanh backward factor as a jet.
#[inline]
fn jet_one_minus_sq<S: Scalar, const C: usize>(a: &[S; C]) -> [S; C] {
    let two = S::from_f64(2.0);
    let mut m = [S::zero(); C];
    m[0] = S::one() - a[0] * a[0];
    match C {
        1 => {}
        2 => m[1] = -(two * a[0] * a[1]),
        3 => {
            m[1] = -(two * a[0] * a[1]);
            m[2] = -(two * (a[0] * a[2] + a[1] * a[1]));
        }
        4 => {
            m[1] = -(two * a[0] * a[1]);
            m[2] = -(two * a[0] * a[2]);
            m[3] = -(two * (a[0] * a[3] + a[1] * a[2]));
        }
        _ => unreachable!(),
    }
    m
}

/// Jet product (the truncated Leibniz rule).
#[inline]
fn jet_mul<S: Scalar, const C: usize>(x: &[S; C], y: &[S; C]) -> [S; C] {
    let mut p = [S::zero(); C];
    p[0] = x[0] * y[0];
    match C {
        1 => {}
        2 => p[1] = x[0] * y[1] + x[1] * y[0],
        3 => {
            p[1] = x[0] * y[1] + x[1] * y[0];
            p[2] = x[0] * y[2] + S::from_f64(2.0) * x[1] * y[1] + x[2] * y[0];
        }
        4 => {
            p[1] = x[0] * y[1] + x[1] * y[0];
            p[2] = x[0] * y[2] + x[2] * y[0];
            p[3] = x[0] * y[3] + x[1] * y[2] + x[2] * y[1] + x[3] * y[0];
        }
        _ => unreachable!(),
    }
    p
}

/// Contraction coefficients: with `delta` the adjoint jet of a unit and
/// `omega` the component weights of the target scalar, the gradient
/// contribution of weight `w_jk` is `sum_c ccoef[c] * a_k[c]`.
#[inline]
fn jet_contract_coeffs<S: Scalar, const C: usize>(delta: &[S; C], omega: &[S; 4]) -> [S; C] {
    let mut c = [S::zero(); C];
    match C {
        1 => c[0] = omega[0] * delta[0],
        2 => {
            c[0] = omega[0] * delta[0] + omega[1] * delta[1];
            c[1] = omega[1] * delta[0];
        }
        3 => {
            c[0] = omega[0] * delta[0] + omega[1] * delta[1] + omega[2] * delta[2];
            c[1] = omega[1] * delta[0] + S::from_f64(2.0) * omega[2] * delta[1];
            c[2] = omega[2] * delta[0];
        }
        4 => {
            c[0] = omega[0] * delta[0]
                + omega[1] * delta[1]
                + omega[2] * delta[2]
                + omega[3] * delta[3];
            c[1] = omega[1] * delta[0] + omega[3] * delta[2];
            c[2] = omega[2] * delta[0] + omega[3] * delta[1];
            c[3] = omega[3] * delta[0];
        }
        _ => unreachable!(),
    }
    c
}

impl<S: Scalar> MlpModel<S> {
    /// Glorot-uniform weights, zero biases. `widths[0]` must equal the
    /// spatial dimension plus one when time-dependent.
    pub fn init(
        widths: Vec<usize>,
        dim: usize,
        time_dependent: bool,
        rng: &mut RandomSource,
    ) -> Self {
        assert_eq!(
            widths[0],
            dim + usize::from(time_dependent),
            "input width must match dim (+1 for t)"
        );
        assert!(widths.len() >= 2);
        let mut params = Vec::with_capacity(mlp_count_parameters(&widths));
        for w in widths.windows(2) {
            let (fan_in, fan_out) = (w[0], w[1]);
            let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
            for _ in 0..fan_in * fan_out {
                params.push(rng.draw_uniform(S::from_f64(-bound), S::from_f64(bound)));
            }
            for _ in 0..fan_out {
                params.push(S::zero());
            }
        }
        Self::from_params(widths, dim, time_dependent, params)
    }

    pub fn from_params(
        widths: Vec<usize>,
        dim: usize,
        time_dependent: bool,
        params: Vec<S>,
    ) -> Self {
        assert_eq!(params.len(), mlp_count_parameters(&widths));
        assert_eq!(widths[0], dim + usize::from(time_dependent));
        let mut layer_offsets = Vec::with_capacity(widths.len());
        let mut off = 0;
        for w in widths.windows(2) {
            layer_offsets.push(off);
            off += w[0] * w[1] + w[1];
        }
        MlpModel {
            widths,
            params,
            layer_offsets,
            dim,
            time_dependent,
            version: 0,
        }
    }

    pub fn widths(&self) -> &[usize] {
        &self.widths
    }

    fn layer_count(&self) -> usize {
        self.widths.len() - 1
    }

    fn input_len(&self) -> usize {
        self.widths[0]
    }

    fn check_point(&self, x: &[S], t: Option<S>) -> Result<(), ModelError> {
        if x.len() != self.dim {
            return Err(ModelError::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        if t.is_some() != self.time_dependent {
            return Err(ModelError::TimeBinding {
                time_dependent: self.time_dependent,
            });
        }
        Ok(())
    }

    /// Map queries onto the minimal set of differentiation passes.
    fn plan_passes(&self, queries: &[Query]) -> Result<(Vec<Pass>, Vec<Slot>), ModelError> {
        let mut passes: Vec<Pass> = Vec::new();
        let mut slots = Vec::with_capacity(queries.len());
        let need_pass = |p: Pass, passes: &mut Vec<Pass>| -> usize {
            if let Some(i) = passes.iter().position(|&q| q == p) {
                i
            } else {
                passes.push(p);
                passes.len() - 1
            }
        };
        for q in queries {
            for j in 0..2 {
                if q.dx[j] > 2 {
                    return Err(ModelError::UnsupportedOrder(q.dx[j] as u32));
                }
            }
            if q.dt && !self.time_dependent {
                return Err(ModelError::TimeBinding {
                    time_dependent: false,
                });
            }
            let orders: Vec<(usize, u8)> = (0..self.dim)
                .filter(|&j| q.dx[j] > 0)
                .map(|j| (j, q.dx[j]))
                .collect();
            let slot = if q.dt {
                if !orders.is_empty() {
                    return Err(ModelError::UnsupportedOrder(3));
                }
                Slot {
                    pass: need_pass(Pass::Jet1(self.dim), &mut passes),
                    comp: 1,
                }
            } else {
                match orders.as_slice() {
                    [] => Slot { pass: usize::MAX, comp: 0 }, // value; assigned below
                    [(j, o)] => Slot {
                        pass: need_pass(Pass::Jet2(*j), &mut passes),
                        comp: *o as usize,
                    },
                    [(ja, 1), (jb, 1)] => Slot {
                        pass: need_pass(Pass::Mixed(*ja, *jb), &mut passes),
                        comp: 3,
                    },
                    _ => return Err(ModelError::UnsupportedOrder(4)),
                }
            };
            slots.push(slot);
        }
        if passes.is_empty() {
            passes.push(Pass::Val);
        }
        for s in &mut slots {
            if s.pass == usize::MAX {
                s.pass = 0;
            }
        }
        Ok((passes, slots))
    }

    fn input_coord(&self, x: &[S], t: Option<S>, j: usize) -> S {
        if j < self.dim {
            x[j]
        } else {
            t.unwrap()
        }
    }

    /// Forward pass in C-component jets; `tangents` lists which inputs
    /// carry a unit seed in which component.
    fn forward_soa<const C: usize>(
        &self,
        x: &[S],
        t: Option<S>,
        tangents: &[(usize, usize)],
        acts: &mut Vec<Vec<[S; C]>>,
    ) {
        acts.resize_with(self.widths.len(), Vec::new);
        let input = &mut acts[0];
        input.clear();
        for j in 0..self.input_len() {
            let mut cell = [S::zero(); C];
            cell[0] = self.input_coord(x, t, j);
            for &(dir, comp) in tangents {
                if dir == j {
                    cell[comp] = S::one();
                }
            }
            input.push(cell);
        }
        let layers = self.layer_count();
        for l in 0..layers {
            let (fan_in, fan_out) = (self.widths[l], self.widths[l + 1]);
            let off = self.layer_offsets[l];
            let boff = off + fan_in * fan_out;
            let last = l + 1 == layers;
            let (lo, hi) = acts.split_at_mut(l + 1);
            let prev = &lo[l];
            let next = &mut hi[0];
            next.clear();
            next.reserve(fan_out);
            for j in 0..fan_out {
                let mut z = [S::zero(); C];
                z[0] = self.params[boff + j];
                let row = &self.params[off + j * fan_in..off + (j + 1) * fan_in];
                for (w, a) in row.iter().zip(prev.iter()) {
                    for c in 0..C {
                        z[c] = z[c] + *w * a[c];
                    }
                }
                next.push(if last { z } else { jet_tanh(z) });
            }
        }
    }

    /// Reverse pass over stored jet activations for one output unit:
    /// accumulates `scale * sum_c omega[c] * d(out[c]) / d theta` into
    /// `acc`. The delta buffers live on the stack frame (layer widths are
    /// hundreds at most).
    fn backward_soa<const C: usize>(
        &self,
        acts: &[Vec<[S; C]>],
        field: usize,
        omega: [S; 4],
        scale: S,
        acc: &mut [S],
    ) {
        let layers = self.layer_count();
        let omega = {
            let mut o = omega;
            for v in o.iter_mut() {
                *v = *v * scale;
            }
            o
        };
        let mut delta: Vec<[S; C]> = vec![[S::zero(); C]; self.widths[layers]];
        delta[field][0] = S::one();
        let mut delta_next: Vec<[S; C]> = Vec::new();
        for l in (0..layers).rev() {
            let (fan_in, fan_out) = (self.widths[l], self.widths[l + 1]);
            let off = self.layer_offsets[l];
            let boff = off + fan_in * fan_out;
            let prev = &acts[l];
            if l > 0 {
                delta_next.clear();
                delta_next.resize(fan_in, [S::zero(); C]);
            }
            for j in 0..fan_out {
                let d = delta[j];
                let cc = jet_contract_coeffs(&d, &omega);
                let row_start = off + j * fan_in;
                let row = &self.params[row_start..row_start + fan_in];
                let grads = &mut acc[row_start..row_start + fan_in];
                if l > 0 {
                    for (((a, g), w), dn) in prev
                        .iter()
                        .zip(grads.iter_mut())
                        .zip(row.iter())
                        .zip(delta_next.iter_mut())
                    {
                        let mut gv = *g;
                        for c in 0..C {
                            gv = gv + cc[c] * a[c];
                            dn[c] = dn[c] + *w * d[c];
                        }
                        *g = gv;
                    }
                } else {
                    for (a, g) in prev.iter().zip(grads.iter_mut()) {
                        let mut gv = *g;
                        for c in 0..C {
                            gv = gv + cc[c] * a[c];
                        }
                        *g = gv;
                    }
                }
                acc[boff + j] = acc[boff + j] + cc[0];
            }
            if l == 0 {
                break;
            }
            // delta through tanh: multiply by the (1 - a^2) jet
            for k in 0..fan_in {
                let m = jet_one_minus_sq(&prev[k]);
                delta_next[k] = jet_mul(&delta_next[k], &m);
            }
            std::mem::swap(&mut delta, &mut delta_next);
        }
    }

    fn run_pass_forward(&self, pass: Pass, x: &[S], t: Option<S>, scratch: &mut MlpScratch<S>) {
        let slot = match pass {
            Pass::Val => 0,
            Pass::Jet1(_) => 1,
            Pass::Jet2(_) => 2,
            Pass::Mixed(..) => 3,
        };
        let valid = scratch.keys[slot]
            .as_ref()
            .map(|(v, p, kx, kt)| {
                *v == self.version && *p == pass && kx.as_slice() == x && *kt == t
            })
            .unwrap_or(false);
        if valid {
            return;
        }
        match pass {
            Pass::Val => self.forward_soa::<1>(x, t, &[], &mut scratch.acts1),
            Pass::Jet1(dir) => self.forward_soa::<2>(x, t, &[(dir, 1)], &mut scratch.acts2),
            Pass::Jet2(dir) => self.forward_soa::<3>(x, t, &[(dir, 1)], &mut scratch.acts3),
            Pass::Mixed(a, b) => {
                self.forward_soa::<4>(x, t, &[(a, 1), (b, 2)], &mut scratch.acts4)
            }
        }
        match &mut scratch.keys[slot] {
            Some((v, p, kx, kt)) => {
                *v = self.version;
                *p = pass;
                kx.clear();
                kx.extend_from_slice(x);
                *kt = t;
            }
            key => *key = Some((self.version, pass, x.to_vec(), t)),
        }
    }

    fn read_component(&self, pass: Pass, scratch: &MlpScratch<S>, field: usize, comp: usize) -> S {
        match pass {
            Pass::Val => scratch.acts1.last().unwrap()[field][0],
            Pass::Jet1(_) => scratch.acts2.last().unwrap()[field][comp.min(1)],
            Pass::Jet2(_) => scratch.acts3.last().unwrap()[field][comp],
            Pass::Mixed(..) => scratch.acts4.last().unwrap()[field][if comp == 3 { 3 } else { comp }],
        }
    }

    fn run_pass_backward(
        &self,
        pass: Pass,
        scratch: &MlpScratch<S>,
        field: usize,
        omega: [S; 4],
        scale: S,
        acc: &mut [S],
    ) {
        match pass {
            Pass::Val => self.backward_soa::<1>(&scratch.acts1, field, omega, scale, acc),
            Pass::Jet1(_) => self.backward_soa::<2>(&scratch.acts2, field, omega, scale, acc),
            Pass::Jet2(_) => self.backward_soa::<3>(&scratch.acts3, field, omega, scale, acc),
            Pass::Mixed(..) => self.backward_soa::<4>(&scratch.acts4, field, omega, scale, acc),
        }
    }
}

impl<S: Scalar> PointModel<S> for MlpModel<S> {
    type Scratch = MlpScratch<S>;

    fn dim(&self) -> usize {
        self.dim
    }

    fn field_count(&self) -> usize {
        *self.widths.last().unwrap()
    }

    fn is_time_dependent(&self) -> bool {
        self.time_dependent
    }

    fn param_count(&self) -> usize {
        self.params.len()
    }

    fn spec(&self) -> ModelSpec {
        ModelSpec::Mlp {
            widths: self.widths.clone(),
        }
    }

    fn flatten(&self) -> FlatParams<S> {
        let mut segments = Vec::new();
        for l in 0..self.layer_count() {
            let (fan_in, fan_out) = (self.widths[l], self.widths[l + 1]);
            let off = self.layer_offsets[l];
            segments.push(Segment {
                name: format!("layer{l}.weights"),
                offset: off,
                len: fan_in * fan_out,
            });
            segments.push(Segment {
                name: format!("layer{l}.bias"),
                offset: off + fan_in * fan_out,
                len: fan_out,
            });
        }
        FlatParams {
            data: self.params.clone(),
            layout: ParamLayout {
                spec: self.spec(),
                total: self.params.len(),
                segments,
            },
        }
    }

    fn assign_flat(&mut self, data: &[S]) -> Result<(), ModelError> {
        if data.len() != self.params.len() {
            return Err(ModelError::LengthMismatch {
                expected: self.params.len(),
                got: data.len(),
            });
        }
        self.params.copy_from_slice(data);
        self.version += 1;
        Ok(())
    }

    fn eval_queries(
        &self,
        queries: &[Query],
        x: &[S],
        t: Option<S>,
        scratch: &mut Self::Scratch,
        out: &mut [S],
    ) -> Result<(), ModelError> {
        self.check_point(x, t)?;
        let (passes, slots) = self.plan_passes(queries)?;
        for (pi, pass) in passes.iter().enumerate() {
            self.run_pass_forward(*pass, x, t, scratch);
            for (qi, (q, slot)) in queries.iter().zip(&slots).enumerate() {
                if slot.pass == pi {
                    out[qi] = self.read_component(*pass, scratch, q.field as usize, slot.comp);
                }
            }
        }
        Ok(())
    }

    fn accumulate_query_gradient(
        &self,
        queries: &[Query],
        weights: &[S],
        x: &[S],
        t: Option<S>,
        scale: S,
        scratch: &mut Self::Scratch,
        acc: &mut [S],
    ) -> Result<(), ModelError> {
        self.check_point(x, t)?;
        let (passes, slots) = self.plan_passes(queries)?;
        let nf = self.field_count();
        scratch.omega.clear();
        scratch.omega.resize(passes.len() * nf, [S::zero(); 4]);
        for ((q, slot), &wq) in queries.iter().zip(&slots).zip(weights) {
            let cell = &mut scratch.omega[slot.pass * nf + q.field as usize];
            cell[slot.comp] = cell[slot.comp] + wq;
        }
        for (pi, pass) in passes.iter().enumerate() {
            let any = (0..nf).any(|f| {
                scratch.omega[pi * nf + f].iter().any(|w| w.value() != 0.0)
            });
            if !any {
                continue;
            }
            self.run_pass_forward(*pass, x, t, scratch);
            for f in 0..nf {
                let om = scratch.omega[pi * nf + f];
                if om.iter().all(|w| w.value() == 0.0) {
                    continue;
                }
                self.run_pass_backward(*pass, scratch, f, om, scale, acc);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameter_count_goldens() {
        assert_eq!(mlp_count_parameters(&[2, 100, 100, 100, 100, 100, 1]), 40_801);
        assert_eq!(mlp_count_parameters(&[2, 120, 120, 120, 120, 120, 1]), 58_561);
        assert_eq!(mlp_count_parameters(&[2, 100, 100, 100, 1]), 20_601);
        assert_eq!(mlp_count_parameters(&[2, 50, 50, 50, 50, 3]), 7_953);
        assert_eq!(mlp_count_parameters(&[3, 100, 100, 100, 100, 100, 3]), 41_103);
        assert_eq!(mlp_count_parameters(&[1, 1]), 2);
    }

    #[test]
    fn zero_weight_network_outputs_final_bias() {
        let widths = vec![2, 8, 1];
        let mut params = vec![0.0f64; mlp_count_parameters(&widths)];
        let n = params.len();
        params[n - 1] = 1.75; // output bias
        let mlp = MlpModel::from_params(widths, 2, false, params);
        assert_eq!(mlp.forward(&[0.3, -0.8], None, 0).unwrap(), 1.75);
        assert_eq!(mlp.spatial_partial(&[0.3, -0.8], None, 0, [1, 0]).unwrap(), 0.0);
        assert_eq!(mlp.spatial_partial(&[0.3, -0.8], None, 0, [0, 2]).unwrap(), 0.0);
    }

    #[test]
    fn one_hidden_unit_matches_hand_chain_rule() {
        // u(x) = w2 * tanh(w1 x + b1) + b2
        let (w1, b1, w2, b2) = (1.3f64, -0.4, 0.7, 0.2);
        let mlp = MlpModel::from_params(vec![1, 1, 1], 1, false, vec![w1, b1, w2, b2]);
        let x = 0.37;
        let z = w1 * x + b1;
        let th = z.tanh();
        let sech2 = 1.0 - th * th;
        assert!((mlp.forward(&[x], None, 0).unwrap() - (w2 * th + b2)).abs() < 1e-15);
        let du = mlp.spatial_partial(&[x], None, 0, [1, 0]).unwrap();
        assert!((du - w2 * sech2 * w1).abs() < 1e-14);
        let d2u = mlp.spatial_partial(&[x], None, 0, [2, 0]).unwrap();
        let expect = w2 * (-2.0 * th * sech2) * w1 * w1;
        assert!((d2u - expect).abs() < 1e-14, "{d2u} vs {expect}");
        // parameter gradient of du against hand forms
        let g = mlp
            .query_gradient(&[Query::spatial(0, [1, 0])], &[1.0], &[x], None)
            .unwrap();
        // d(du)/dw2 = sech2 * w1
        assert!((g[2] - sech2 * w1).abs() < 1e-12);
        // d(du)/db2 = 0
        assert!(g[3].abs() < 1e-15);
        // d(du)/dw1 = w2 * (sech2 + w1 * x * -2 th sech2)
        let expect_w1 = w2 * (sech2 + w1 * x * (-2.0 * th * sech2));
        assert!((g[0] - expect_w1).abs() < 1e-12, "{} vs {expect_w1}", g[0]);
    }

    #[test]
    fn second_derivative_matches_nested_finite_difference() {
        let mut rng = RandomSource::new(21);
        let mlp = MlpModel::<f64>::init(vec![2, 12, 12, 1], 2, false, &mut rng);
        let x = [0.4, -0.6];
        let h = 1e-4;
        let f = |a: f64, b: f64| mlp.forward(&[a, b], None, 0).unwrap();
        let fd = (f(x[0] + h, x[1]) - 2.0 * f(x[0], x[1]) + f(x[0] - h, x[1])) / (h * h);
        let an = mlp.spatial_partial(&x, None, 0, [2, 0]).unwrap();
        assert!((an - fd).abs() <= 1e-4 * an.abs().max(1.0), "{an} vs {fd}");
    }

    #[test]
    fn jet_second_derivative_equals_nested_duals() {
        // the symmetric jet must agree with literal Dual<Dual<_>> nesting
        use crate::autodiff::Dual;
        let mut rng = RandomSource::new(63);
        let mlp = MlpModel::<f64>::init(vec![2, 9, 7, 1], 2, false, &mut rng);
        for trial in 0..20 {
            let x = [
                rng.draw_uniform(-1.0, 1.0),
                rng.draw_uniform(-1.0, 1.0),
            ];
            // nested-dual reference through the generic Scalar forward
            let xd: Vec<Dual<Dual<f64>>> = vec![
                Dual::new(Dual::variable(x[0]), Dual::one()),
                Dual::constant(Dual::constant(x[1])),
            ];
            let flat = mlp.flatten();
            let lifted = MlpModel::from_params(
                vec![2, 9, 7, 1],
                2,
                false,
                flat.data.iter().map(|&v| Dual::constant(Dual::constant(v))).collect(),
            );
            let out = lifted
                .forward(&[xd[0], xd[1]], None, 0)
                .unwrap();
            let jet = (
                mlp.forward(&x, None, 0).unwrap(),
                mlp.spatial_partial(&x, None, 0, [1, 0]).unwrap(),
                mlp.spatial_partial(&x, None, 0, [2, 0]).unwrap(),
            );
            assert!((out.primal.primal - jet.0).abs() < 1e-13, "trial {trial}");
            assert!((out.primal.tangent - jet.1).abs() < 1e-13);
            assert!((out.tangent.tangent - jet.2).abs() < 1e-13);
        }
    }

    #[test]
    fn mixed_partial_matches_finite_difference() {
        let mut rng = RandomSource::new(31);
        let mlp = MlpModel::<f64>::init(vec![2, 10, 1], 2, false, &mut rng);
        let x = [0.1, 0.2];
        let h = 1e-4;
        let f = |a: f64, b: f64| mlp.forward(&[a, b], None, 0).unwrap();
        let fd = (f(x[0] + h, x[1] + h) - f(x[0] + h, x[1] - h) - f(x[0] - h, x[1] + h)
            + f(x[0] - h, x[1] - h))
            / (4.0 * h * h);
        let an = mlp.spatial_partial(&x, None, 0, [1, 1]).unwrap();
        assert!((an - fd).abs() <= 1e-4 * an.abs().max(1.0), "{an} vs {fd}");
    }

    #[test]
    fn time_derivative_and_gradients_match_finite_difference() {
        let mut rng = RandomSource::new(41);
        let mut mlp = MlpModel::<f64>::init(vec![2, 6, 6, 1], 1, true, &mut rng);
        let (x, t) = ([0.3], 0.5);
        let h = 1e-5;
        let fd = (mlp.forward(&x, Some(t + h), 0).unwrap()
            - mlp.forward(&x, Some(t - h), 0).unwrap())
            / (2.0 * h);
        let an = mlp.time_derivative(&x, t, 0).unwrap();
        assert!((an - fd).abs() < 1e-6 * fd.abs().max(1.0));

        // full residual-style gradient: u_t - 0.3 u_xx
        let queries = [Query::time(0), Query::spatial(0, [2, 0])];
        let weights = [1.0, -0.3];
        let grads = mlp.query_gradient(&queries, &weights, &x, Some(t)).unwrap();
        let flat = mlp.flatten();
        let combo = |m: &MlpModel<f64>| {
            m.time_derivative(&x, t, 0).unwrap()
                - 0.3 * m.spatial_partial(&x, Some(t), 0, [2, 0]).unwrap()
        };
        for i in (0..flat.data.len()).step_by(7) {
            let mut hi = flat.data.clone();
            let mut lo = flat.data.clone();
            hi[i] += h;
            lo[i] -= h;
            mlp.assign_flat(&hi).unwrap();
            let fp = combo(&mlp);
            mlp.assign_flat(&lo).unwrap();
            let fm = combo(&mlp);
            mlp.assign_flat(&flat.data).unwrap();
            let fd = (fp - fm) / (2.0 * h);
            assert!(
                (grads[i] - fd).abs() < 2e-5 * fd.abs().max(1.0),
                "param {i}: {} vs {fd}",
                grads[i]
            );
        }
    }

    #[test]
    fn multi_field_gradients_match_finite_difference() {
        let mut rng = RandomSource::new(51);
        let mut mlp = MlpModel::<f64>::init(vec![2, 8, 3], 2, false, &mut rng);
        let x = [0.25, -0.15];
        let queries = [
            Query::value(0),
            Query::spatial(1, [1, 0]),
            Query::spatial(2, [0, 2]),
            Query::spatial(0, [0, 1]),
        ];
        let weights = [0.7, -1.1, 0.4, 2.0];
        let grads = mlp.query_gradient(&queries, &weights, &x, None).unwrap();
        let flat = mlp.flatten();
        let h = 1e-5;
        let combo = |m: &MlpModel<f64>| {
            0.7 * m.forward(&x, None, 0).unwrap()
                - 1.1 * m.spatial_partial(&x, None, 1, [1, 0]).unwrap()
                + 0.4 * m.spatial_partial(&x, None, 2, [0, 2]).unwrap()
                + 2.0 * m.spatial_partial(&x, None, 0, [0, 1]).unwrap()
        };
        for i in (0..flat.data.len()).step_by(5) {
            let mut hi = flat.data.clone();
            let mut lo = flat.data.clone();
            hi[i] += h;
            lo[i] -= h;
            mlp.assign_flat(&hi).unwrap();
            let fp = combo(&mlp);
            mlp.assign_flat(&lo).unwrap();
            let fm = combo(&mlp);
            mlp.assign_flat(&flat.data).unwrap();
            let fd = (fp - fm) / (2.0 * h);
            assert!(
                (grads[i] - fd).abs() < 2e-5 * fd.abs().max(1.0),
                "param {i}: {} vs {fd}",
                grads[i]
            );
        }
    }

    #[test]
    fn flatten_roundtrip() {
        let mut rng = RandomSource::new(61);
        let mlp = MlpModel::<f64>::init(vec![2, 5, 5, 1], 2, false, &mut rng);
        let flat = mlp.flatten();
        assert_eq!(flat.data.len(), mlp.param_count());
        let mut copy = mlp.clone();
        copy.assign_flat(&flat.data).unwrap();
        assert_eq!(copy.flatten().data, flat.data);
    }

    #[test]
    fn same_seed_same_network() {
        let a = MlpModel::<f64>::init(vec![2, 7, 1], 2, false, &mut RandomSource::new(9));
        let b = MlpModel::<f64>::init(vec![2, 7, 1], 2, false, &mut RandomSource::new(9));
        assert_eq!(a.flatten().data, b.flatten().data);
    }
}
