use super::SamplingError;
use crate::numerics::{linspace, RandomSource};
use crate::scalar::Scalar;

/// Frequency initialization recipe for one spatial direction.
///
/// Defaults follow the benchmark setups: `w_min = 1`, `w_max = 2 w_char`,
/// and a Gaussian band stddev of `w_char / pi` unless a problem overrides
/// it.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyPlan<S> {
    /// Characteristic angular frequency (rad per unit length).
    pub w_char: S,
    /// Stddev of the characteristic-frequency band.
    pub sigma: S,
    pub w_min: S,
    pub w_max: S,
    /// Frequencies drawn per direction.
    pub k: usize,
}

impl<S: Scalar> FrequencyPlan<S> {
    pub fn new(w_char: S, k: usize) -> Self {
        FrequencyPlan {
            w_char,
            sigma: w_char / S::from_f64(std::f64::consts::PI),
            w_min: S::one(),
            w_max: w_char * S::from_f64(2.0),
            k,
        }
    }

    pub fn with_sigma(mut self, sigma: S) -> Self {
        self.sigma = sigma;
        self
    }

    pub fn with_bounds(mut self, w_min: S, w_max: S) -> Self {
        self.w_min = w_min;
        self.w_max = w_max;
        self
    }

    pub fn validate(&self) -> Result<(), SamplingError> {
        if self.k < 4 {
            return Err(SamplingError::InvalidInput("frequency count K must be >= 4"));
        }
        if !(S::zero() < self.w_min && self.w_min <= self.w_char && self.w_char <= self.w_max) {
            return Err(SamplingError::InvalidInput(
                "frequency bounds must satisfy 0 < w_min <= w_char <= w_max",
            ));
        }
        if self.sigma < S::zero() {
            return Err(SamplingError::InvalidInput("sigma must be non-negative"));
        }
        Ok(())
    }
}

/// Three-band frequency initialization.
///
/// The first `floor(K/4)` values are linearly spaced on `[w_min, w_char]`
/// (basic frequencies), the middle `K - 2 floor(K/4)` are Gaussian around
/// `w_char` clamped into `[w_min, w_max]` (characteristic band), and the
/// last `floor(K/4)` are uniform on `[w_char, w_max]` (high-frequency
/// compensation). Band order is preserved in the output.
pub fn three_level_frequencies<S: Scalar>(
    plan: &FrequencyPlan<S>,
    rs: &mut RandomSource,
) -> Result<Vec<S>, SamplingError> {
    plan.validate()?;
    let quarter = plan.k / 4;
    let mid = plan.k - 2 * quarter;
    let mut out = Vec::with_capacity(plan.k);
    out.extend(linspace(plan.w_min, plan.w_char, quarter.max(1)).into_iter().take(quarter));
    for _ in 0..mid {
        let w = rs.draw_gaussian(plan.w_char, plan.sigma);
        out.push(w.clamp(plan.w_min, plan.w_max));
    }
    for _ in 0..quarter {
        out.push(rs.draw_uniform(plan.w_char, plan.w_max));
    }
    Ok(out)
}

/// Dominant angular frequency of uniformly spaced samples spanning `span`
/// units: `2 pi k* / span` where `k*` is the non-zero DFT bin of maximal
/// magnitude.
pub fn estimate_characteristic_frequency<S: Scalar>(
    samples: &[S],
    span: S,
) -> Result<S, SamplingError> {
    let n = samples.len();
    if n < 64 {
        return Err(SamplingError::InvalidInput(
            "need at least 64 uniformly spaced samples",
        ));
    }
    let vals: Vec<f64> = samples.iter().map(|s| s.value()).collect();
    let scale: f64 = vals.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let mut best_bin = 0usize;
    let mut best_mag = 0.0f64;
    for k in 1..=n / 2 {
        let (mut re, mut im) = (0.0f64, 0.0f64);
        for (j, &v) in vals.iter().enumerate() {
            let phase = -2.0 * std::f64::consts::PI * (k * j) as f64 / n as f64;
            re += v * phase.cos();
            im += v * phase.sin();
        }
        let mag = re * re + im * im;
        if mag > best_mag {
            best_mag = mag;
            best_bin = k;
        }
    }
    // A constant signal leaks nothing into non-zero bins beyond roundoff.
    if best_mag.sqrt() <= 1e-9 * scale.max(1e-300) * n as f64 {
        return Err(SamplingError::NoDominantFrequency);
    }
    Ok(S::from_f64(2.0 * std::f64::consts::PI * best_bin as f64) / span)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn band_sizes_heat_plan() {
        // K=40 heat plan: 10 linear + 20 gaussian + 10 uniform
        let plan = FrequencyPlan::new(20.0 * PI, 40).with_sigma(20.0);
        let mut rs = RandomSource::new(1);
        let w = three_level_frequencies(&plan, &mut rs).unwrap();
        assert_eq!(w.len(), 40);
        // linear band is exactly linspace(w_min, w_char, 10)
        let lin = crate::numerics::linspace(1.0, 20.0 * PI, 10);
        assert_eq!(&w[..10], &lin[..]);
        // high band within [w_char, w_max]
        for &f in &w[30..] {
            assert!((20.0 * PI..=40.0 * PI).contains(&f));
        }
    }

    #[test]
    fn band_sizes_smallest_split() {
        let plan = FrequencyPlan::new(10.0, 4);
        let mut rs = RandomSource::new(2);
        let w = three_level_frequencies(&plan, &mut rs).unwrap();
        assert_eq!(w.len(), 4);
        assert_eq!(w[0], 1.0); // single linear value sits at w_min
        assert!((10.0..=20.0).contains(&w[3]));
    }

    #[test]
    fn band_proportions_exact_for_all_k() {
        for k in 4..=64usize {
            let plan = FrequencyPlan::new(30.0, k);
            let mut rs = RandomSource::new(k as u64);
            let w = three_level_frequencies(&plan, &mut rs).unwrap();
            assert_eq!(w.len(), k);
            let quarter = k / 4;
            // linear band values are deterministic; check the band boundary
            let lin = crate::numerics::linspace(plan.w_min, plan.w_char, quarter.max(1));
            assert_eq!(&w[..quarter], &lin[..quarter]);
            for &f in &w {
                assert!(f >= plan.w_min && f <= plan.w_max, "k={k} f={f}");
            }
        }
    }

    #[test]
    fn k_below_four_rejected() {
        let plan = FrequencyPlan::new(10.0, 3);
        let mut rs = RandomSource::new(3);
        assert!(matches!(
            three_level_frequencies(&plan, &mut rs),
            Err(SamplingError::InvalidInput(_))
        ));
    }

    #[test]
    fn gaussian_band_mean_statistical_check() {
        let w_char = 20.0 * PI;
        let plan = FrequencyPlan::new(w_char, 40).with_sigma(20.0);
        let mut rs = RandomSource::new(7);
        let mut sum = 0.0;
        let mut count = 0usize;
        for _ in 0..10_000 / 20 {
            let w = three_level_frequencies(&plan, &mut rs).unwrap();
            for &f in &w[10..30] {
                sum += f;
                count += 1;
            }
        }
        let mean = sum / count as f64;
        assert!(
            (mean - w_char).abs() < 0.01 * w_char,
            "gaussian band mean {mean} vs w_char {w_char}"
        );
    }

    #[test]
    fn dft_finds_high_frequency_sine() {
        // sin(20 pi x) on [-1, 1] with 512 points
        let n = 512;
        let samples: Vec<f64> = (0..n)
            .map(|j| {
                let x = -1.0 + 2.0 * j as f64 / n as f64;
                (20.0 * PI * x).sin()
            })
            .collect();
        let est = estimate_characteristic_frequency(&samples, 2.0).unwrap();
        let bin_width = 2.0 * PI / 2.0;
        assert!(
            (est - 20.0 * PI).abs() <= bin_width,
            "estimate {est} vs {}",
            20.0 * PI
        );
    }

    #[test]
    fn dft_larger_magnitude_wins() {
        let n = 512;
        let samples: Vec<f64> = (0..n)
            .map(|j| {
                let x = -1.0 + 2.0 * j as f64 / n as f64;
                (3.0 * x).sin() + 0.1 * (30.0 * x).sin()
            })
            .collect();
        let est = estimate_characteristic_frequency(&samples, 2.0).unwrap();
        let bin_width = PI;
        assert!((est - 3.0).abs() <= bin_width, "estimate {est}");
    }

    #[test]
    fn dft_constant_input_errors() {
        let samples = vec![4.2f64; 128];
        assert!(matches!(
            estimate_characteristic_frequency(&samples, 2.0),
            Err(SamplingError::NoDominantFrequency)
        ));
    }
}
