use super::flat::{FlatParams, ModelSpec, ParamLayout, Segment};
use super::temporal::{TemporalNet, TemporalScratch, TEMPORAL_PARAM_COUNT};
use super::{ModelError, PointModel, Query};
use crate::numerics::RandomSource;
use crate::sampling::{three_level_frequencies, FrequencyPlan};
use crate::scalar::Scalar;
use crate::spectral::{FeatureTables, FourierFeature1D, SeparableMode};

/// Architecture of a separable spectral model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SvSnnConfig {
    /// Number of separable modes N.
    pub modes: usize,
    /// Fourier feature count per spatial direction.
    pub features: Vec<usize>,
    /// Attach one temporal network per mode.
    pub temporal: bool,
    /// Output fields sharing the spatial modes (coefficients are per-field).
    pub field_count: usize,
}

impl SvSnnConfig {
    pub fn dim(&self) -> usize {
        self.features.len()
    }

    /// Spatial: N * sum_j (3 K_j + 1); temporal: N * 251; coefficients:
    /// field_count * N.
    pub fn count_parameters(&self) -> usize {
        let spatial: usize = self.features.iter().map(|k| 3 * k + 1).sum();
        let temporal = if self.temporal { TEMPORAL_PARAM_COUNT } else { 0 };
        self.modes * (spatial + temporal) + self.field_count * self.modes
    }

    fn mode_spatial_params(&self) -> usize {
        self.features.iter().map(|k| 3 * k + 1).sum()
    }

    pub fn spec(&self) -> ModelSpec {
        ModelSpec::SvSnn {
            modes: self.modes,
            features: self.features.clone(),
            temporal: self.temporal,
            field_count: self.field_count,
        }
    }
}

/// Sum of separable modes with per-field coefficients:
/// `u_f(x, t) = sum_n c_{f,n} prod_j Phi_n^(j)(x_j) T_n(t)`
/// (temporal factor one for steady models). Spatial modes and temporal
/// networks are shared across fields.
#[derive(Debug, Clone)]
pub struct SvSnnModel<S> {
    config: SvSnnConfig,
    modes: Vec<SeparableMode<S>>,
    temporal: Option<Vec<TemporalNet<S>>>,
    /// Field-major: `coeffs[field * N + n]`.
    coeffs: Vec<S>,
    /// Bumped on parameter assignment so scratch caches invalidate.
    version: u64,
}

/// Reusable per-worker buffers: trig tables per (mode, direction), cached
/// temporal replays per mode, and the point/version keys that validate
/// them. Spatial tables key on `(version, x)` and temporal replays on
/// `(version, t)`, so sweeping many points at one time level (initial data,
/// for instance) replays each temporal net once.
pub struct SvSnnScratch<S> {
    tables: Vec<FeatureTables<S>>,
    tvals: Vec<(S, S)>,
    tweights: Vec<(S, S)>,
    temporal_bufs: Vec<Vec<crate::autodiff::Dual<S>>>,
    temporal_scratch: TemporalScratch<S>,
    spatial_key: Option<(u64, Vec<S>)>,
    temporal_key: Option<(u64, S)>,
}

impl<S: Scalar> Default for SvSnnScratch<S> {
    fn default() -> Self {
        SvSnnScratch {
            tables: Vec::new(),
            tvals: Vec::new(),
            tweights: Vec::new(),
            temporal_bufs: Vec::new(),
            temporal_scratch: TemporalScratch::default(),
            spatial_key: None,
            temporal_key: None,
        }
    }
}

impl<S: Scalar> SvSnnModel<S> {
    /// Initialize with three-level frequency sampling per direction,
    /// amplitudes `N(0, amp_scale/sqrt(K))`, zero bias, coefficients `1/N`,
    /// and Glorot temporal weights.
    pub fn init(
        config: SvSnnConfig,
        plans: &[FrequencyPlan<S>],
        rng: &mut RandomSource,
    ) -> Result<Self, crate::sampling::SamplingError> {
        Self::init_with_amplitude(config, plans, 1.0, rng)
    }

    /// [`SvSnnModel::init`] with the amplitude stddev scaled by
    /// `amp_scale`. Near-zero starts (`0.1` or less) make the earliest
    /// residual gradients pick out the source frequencies directly, which
    /// speeds up problems whose data enters only through the operator.
    pub fn init_with_amplitude(
        config: SvSnnConfig,
        plans: &[FrequencyPlan<S>],
        amp_scale: f64,
        rng: &mut RandomSource,
    ) -> Result<Self, crate::sampling::SamplingError> {
        assert_eq!(plans.len(), config.dim(), "one frequency plan per direction");
        let mut modes = Vec::with_capacity(config.modes);
        for _ in 0..config.modes {
            let mut dirs = Vec::with_capacity(config.dim());
            for (j, plan) in plans.iter().enumerate() {
                let k = config.features[j];
                debug_assert_eq!(plan.k, k, "plan K must match the config");
                let w = three_level_frequencies(plan, rng)?;
                let amp = S::from_f64(amp_scale / (k as f64).sqrt());
                let a = (0..k).map(|_| rng.draw_gaussian(S::zero(), amp)).collect();
                let b = (0..k).map(|_| rng.draw_gaussian(S::zero(), amp)).collect();
                dirs.push(FourierFeature1D {
                    a,
                    b,
                    w,
                    beta: S::zero(),
                });
            }
            modes.push(SeparableMode { directions: dirs });
        }
        let temporal = if config.temporal {
            Some((0..config.modes).map(|_| TemporalNet::init(rng)).collect())
        } else {
            None
        };
        let coeffs = vec![S::from_f64(1.0 / config.modes as f64); config.field_count * config.modes];
        Ok(SvSnnModel {
            config,
            modes,
            temporal,
            coeffs,
            version: 0,
        })
    }

    /// Assemble from explicit parts (used by tests and checkpoint loading).
    pub fn from_parts(
        config: SvSnnConfig,
        modes: Vec<SeparableMode<S>>,
        temporal: Option<Vec<TemporalNet<S>>>,
        coeffs: Vec<S>,
    ) -> Self {
        assert_eq!(modes.len(), config.modes);
        assert_eq!(coeffs.len(), config.field_count * config.modes);
        assert_eq!(temporal.is_some(), config.temporal);
        SvSnnModel {
            config,
            modes,
            temporal,
            coeffs,
            version: 0,
        }
    }

    pub fn config(&self) -> &SvSnnConfig {
        &self.config
    }

    pub fn modes(&self) -> &[SeparableMode<S>] {
        &self.modes
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn temporal_nets(&self) -> Option<&[TemporalNet<S>]> {
        self.temporal.as_deref()
    }

    pub fn from_flat(spec: &ModelSpec, data: &[S]) -> Result<Self, ModelError> {
        let config = match spec {
            ModelSpec::SvSnn {
                modes,
                features,
                temporal,
                field_count,
            } => SvSnnConfig {
                modes: *modes,
                features: features.clone(),
                temporal: *temporal,
                field_count: *field_count,
            },
            ModelSpec::Mlp { .. } => {
                return Err(ModelError::LengthMismatch { expected: 0, got: data.len() })
            }
        };
        let mut modes = Vec::with_capacity(config.modes);
        for _ in 0..config.modes {
            let dirs = config
                .features
                .iter()
                .map(|&k| FourierFeature1D {
                    a: vec![S::zero(); k],
                    b: vec![S::zero(); k],
                    w: vec![S::zero(); k],
                    beta: S::zero(),
                })
                .collect();
            modes.push(SeparableMode { directions: dirs });
        }
        let temporal = if config.temporal {
            Some(
                (0..config.modes)
                    .map(|_| TemporalNet::from_params(vec![S::zero(); TEMPORAL_PARAM_COUNT]))
                    .collect(),
            )
        } else {
            None
        };
        let coeffs = vec![S::zero(); config.field_count * config.modes];
        let mut model = SvSnnModel {
            config,
            modes,
            temporal,
            coeffs,
            version: 0,
        };
        model.assign_flat(data)?;
        Ok(model)
    }

    fn temporal_offset(&self) -> usize {
        self.config.modes * self.config.mode_spatial_params()
    }

    fn coeff_offset(&self) -> usize {
        self.temporal_offset()
            + if self.config.temporal {
                self.config.modes * TEMPORAL_PARAM_COUNT
            } else {
                0
            }
    }

    fn check_point(&self, x: &[S], t: Option<S>) -> Result<(), ModelError> {
        if x.len() != self.config.dim() {
            return Err(ModelError::DimensionMismatch {
                expected: self.config.dim(),
                got: x.len(),
            });
        }
        if t.is_some() != self.config.temporal {
            return Err(ModelError::TimeBinding {
                time_dependent: self.config.temporal,
            });
        }
        Ok(())
    }

    /// Fill scratch tables for `(x, t)` unless already valid.
    fn prepare(&self, x: &[S], t: Option<S>, scratch: &mut SvSnnScratch<S>) {
        let n = self.config.modes;
        let d = self.config.dim();
        let spatial_valid = scratch
            .spatial_key
            .as_ref()
            .map(|(v, kx)| *v == self.version && kx.as_slice() == x)
            .unwrap_or(false);
        if !spatial_valid {
            while scratch.tables.len() < n * d {
                scratch.tables.push(FeatureTables::empty());
            }
            for (ni, mode) in self.modes.iter().enumerate() {
                for (j, feat) in mode.directions.iter().enumerate() {
                    feat.tables_into(x[j], &mut scratch.tables[ni * d + j]);
                }
            }
            match &mut scratch.spatial_key {
                Some((v, kx)) => {
                    *v = self.version;
                    kx.clear();
                    kx.extend_from_slice(x);
                }
                key => *key = Some((self.version, x.to_vec())),
            }
        }
        if let (Some(nets), Some(tv)) = (&self.temporal, t) {
            let temporal_valid = scratch
                .temporal_key
                .map(|(v, kt)| v == self.version && kt == tv)
                .unwrap_or(false);
            if !temporal_valid {
                scratch.tvals.clear();
                scratch.temporal_bufs.resize_with(n, Vec::new);
                for (ni, net) in nets.iter().enumerate() {
                    scratch
                        .tvals
                        .push(net.value_and_dt_into(tv, &mut scratch.temporal_bufs[ni]));
                }
                scratch.temporal_key = Some((self.version, tv));
            }
        }
    }

    #[inline]
    fn temporal_factor(&self, scratch: &SvSnnScratch<S>, mode: usize, dt: bool) -> S {
        if self.config.temporal {
            let (v, d) = scratch.tvals[mode];
            if dt {
                d
            } else {
                v
            }
        } else {
            S::one()
        }
    }
}

impl<S: Scalar> PointModel<S> for SvSnnModel<S> {
    type Scratch = SvSnnScratch<S>;

    fn dim(&self) -> usize {
        self.config.dim()
    }

    fn field_count(&self) -> usize {
        self.config.field_count
    }

    fn is_time_dependent(&self) -> bool {
        self.config.temporal
    }

    fn param_count(&self) -> usize {
        self.config.count_parameters()
    }

    fn spec(&self) -> ModelSpec {
        self.config.spec()
    }

    fn flatten(&self) -> FlatParams<S> {
        let mut data = Vec::with_capacity(self.param_count());
        let mut segments = Vec::new();
        for (ni, mode) in self.modes.iter().enumerate() {
            for (j, feat) in mode.directions.iter().enumerate() {
                let offset = data.len();
                feat.write_flat(&mut data);
                segments.push(Segment {
                    name: format!("mode{ni}.dir{j}"),
                    offset,
                    len: data.len() - offset,
                });
            }
        }
        if let Some(nets) = &self.temporal {
            for (ni, net) in nets.iter().enumerate() {
                let offset = data.len();
                data.extend_from_slice(net.params());
                segments.push(Segment {
                    name: format!("mode{ni}.temporal"),
                    offset,
                    len: TEMPORAL_PARAM_COUNT,
                });
            }
        }
        for f in 0..self.config.field_count {
            let offset = data.len();
            data.extend_from_slice(&self.coeffs[f * self.config.modes..(f + 1) * self.config.modes]);
            segments.push(Segment {
                name: format!("coeffs.field{f}"),
                offset,
                len: self.config.modes,
            });
        }
        debug_assert_eq!(data.len(), self.param_count());
        FlatParams {
            data,
            layout: ParamLayout {
                spec: self.config.spec(),
                total: self.param_count(),
                segments,
            },
        }
    }

    fn assign_flat(&mut self, data: &[S]) -> Result<(), ModelError> {
        if data.len() != self.param_count() {
            return Err(ModelError::LengthMismatch {
                expected: self.param_count(),
                got: data.len(),
            });
        }
        let mut off = 0usize;
        for mode in &mut self.modes {
            for feat in &mut mode.directions {
                let len = feat.param_count();
                feat.read_flat(&data[off..off + len]);
                off += len;
            }
        }
        if let Some(nets) = &mut self.temporal {
            for net in nets {
                net.set_params(&data[off..off + TEMPORAL_PARAM_COUNT]);
                off += TEMPORAL_PARAM_COUNT;
            }
        }
        let n_coeffs = self.coeffs.len();
        self.coeffs.copy_from_slice(&data[off..off + n_coeffs]);
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
        for q in queries {
            if q.dt && !self.config.temporal {
                return Err(ModelError::TimeBinding { time_dependent: false });
            }
            for j in 0..self.config.dim() {
                if q.dx[j] > 2 {
                    return Err(ModelError::UnsupportedOrder(q.dx[j] as u32));
                }
            }
        }
        self.prepare(x, t, scratch);
        let n = self.config.modes;
        let d = self.config.dim();
        for (q, o) in queries.iter().zip(out.iter_mut()) {
            let mut acc = S::zero();
            for ni in 0..n {
                let mut spatial = S::one();
                for j in 0..d {
                    spatial = spatial * scratch.tables[ni * d + j].deriv[q.dx[j] as usize];
                }
                let c = self.coeffs[q.field as usize * n + ni];
                acc = acc + c * spatial * self.temporal_factor(scratch, ni, q.dt);
            }
            *o = acc;
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
        debug_assert_eq!(acc.len(), self.param_count());
        self.prepare(x, t, scratch);
        let n = self.config.modes;
        let d = self.config.dim();
        let mode_params = self.config.mode_spatial_params();
        let coeff0 = self.coeff_offset();
        let temporal0 = self.temporal_offset();

        scratch.tweights.clear();
        scratch.tweights.resize(n, (S::zero(), S::zero()));

        for (q, &wq) in queries.iter().zip(weights) {
            if wq.value() == 0.0 {
                continue;
            }
            if q.dt && !self.config.temporal {
                return Err(ModelError::TimeBinding { time_dependent: false });
            }
            let w = scale * wq;
            for ni in 0..n {
                let c = self.coeffs[q.field as usize * n + ni];
                let mut dvals = [S::one(); 2];
                let mut spatial = S::one();
                for j in 0..d {
                    let v = scratch.tables[ni * d + j].deriv[q.dx[j] as usize];
                    dvals[j] = v;
                    spatial = spatial * v;
                }
                let tf = self.temporal_factor(scratch, ni, q.dt);

                // coefficient gradient
                let cidx = coeff0 + q.field as usize * n + ni;
                acc[cidx] = acc[cidx] + w * spatial * tf;

                // spectral gradients, direction by direction
                let mut seg = ni * mode_params;
                for j in 0..d {
                    let feat = &self.modes[ni].directions[j];
                    let len = feat.param_count();
                    let mut other = S::one();
                    for m in 0..d {
                        if m != j {
                            other = other * dvals[m];
                        }
                    }
                    feat.accumulate_param_grads(
                        &scratch.tables[ni * d + j],
                        q.dx[j] as u32,
                        w * c * other * tf,
                        &mut acc[seg..seg + len],
                    )
                    .map_err(|_| ModelError::UnsupportedOrder(q.dx[j] as u32))?;
                    seg += len;
                }

                // temporal contributions collect per-mode weights; one
                // reverse pass per mode at the end
                if self.config.temporal {
                    let contribution = w * c * spatial;
                    if q.dt {
                        scratch.tweights[ni].1 = scratch.tweights[ni].1 + contribution;
                    } else {
                        scratch.tweights[ni].0 = scratch.tweights[ni].0 + contribution;
                    }
                }
            }
        }

        if let (Some(nets), Some(_)) = (&self.temporal, t) {
            for (ni, net) in nets.iter().enumerate() {
                let (w_val, w_dt) = scratch.tweights[ni];
                if w_val.value() == 0.0 && w_dt.value() == 0.0 {
                    continue;
                }
                let seg = temporal0 + ni * TEMPORAL_PARAM_COUNT;
                let buf = std::mem::take(&mut scratch.temporal_bufs[ni]);
                net.accumulate_grads_from(
                    &buf,
                    &mut scratch.temporal_scratch,
                    w_val,
                    w_dt,
                    &mut acc[seg..seg + TEMPORAL_PARAM_COUNT],
                );
                scratch.temporal_bufs[ni] = buf;
            }
        }
        Ok(())
    }
}
