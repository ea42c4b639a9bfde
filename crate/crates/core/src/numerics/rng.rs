use crate::scalar::Scalar;

/// Deterministic seeded random source.
///
/// The generator is SplitMix64 (Steele, Lea, Flood 2014): a 64-bit counter
/// stepped by the golden-ratio increment with a two-round finalizer. Integer
/// output is bit-identical on every platform, which keeps golden tests
/// stable. One value per call, no cached state beyond the counter, so
/// reseeding reproduces sequences exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomSource {
    state: u64,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        RandomSource { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw in `[lo, hi)`, built from the top 53 bits.
    pub fn draw_uniform<S: Scalar>(&mut self, lo: S, hi: S) -> S {
        debug_assert!(lo <= hi, "draw_uniform requires lo <= hi");
        let u = (self.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0);
        lo + (hi - lo) * S::from_f64(u)
    }

    /// Gaussian draw via Box-Muller. Consumes two uniforms per call.
    pub fn draw_gaussian<S: Scalar>(&mut self, mean: S, stddev: S) -> S {
        debug_assert!(stddev >= S::zero(), "stddev must be non-negative");
        // u1 in (0, 1] so the log stays finite.
        let u1 = ((self.next_u64() >> 11) + 1) as f64 * (1.0 / 9007199254740992.0);
        let u2 = (self.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0);
        let z = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
        mean + stddev * S::from_f64(z)
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = (self.next_u64() % (i as u64 + 1)) as usize;
            items.swap(i, j);
        }
    }
}

/// Evenly spaced values over `[lo, hi]`, both endpoints included for n >= 2.
pub fn linspace<S: Scalar>(lo: S, hi: S, n: usize) -> Vec<S> {
    assert!(n >= 1, "linspace requires n >= 1");
    if n == 1 {
        return vec![lo];
    }
    let step = (hi - lo) / S::from_f64((n - 1) as f64);
    (0..n)
        .map(|i| if i == n - 1 { hi } else { lo + step * S::from_f64(i as f64) })
        .collect()
}

/// Documented stream-splitting rule: every component derives its own seed
/// from the run seed and a purpose label, so any stage can be re-run in
/// isolation. `sub_seed = finalize(master XOR fnv1a64(purpose))`.
pub fn sub_seed(master: u64, purpose: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in purpose.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x1000_0000_01b3);
    }
    RandomSource::new(master ^ h).next_u64()
}
