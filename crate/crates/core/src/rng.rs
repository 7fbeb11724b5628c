//! Deterministic pseudo-random numbers.
//!
//! Every stochastic step in the toolkit draws from a [`SplitMix64`] stream.
//! Reproducibility contract: a run is a pure function of its seed, and
//! parallel or independently replayable work derives child streams with
//! [`mix`] instead of sharing a generator. Named streams hash their label
//! with [`fnv1a64`]; indexed substreams mix the index in directly.

use std::f64::consts::TAU;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// splitmix64 finalizer: bijective avalanche over one 64-bit word.
#[inline]
fn finalize(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive a child seed from a parent seed and a stream label.
///
/// `child = finalize(parent XOR finalize(label * GOLDEN))`. Distinct labels
/// give decorrelated streams; the same (parent, label) pair always gives the
/// same child.
#[inline]
pub fn mix(parent: u64, label: u64) -> u64 {
    finalize(parent ^ finalize(label.wrapping_mul(GOLDEN_GAMMA)))
}

/// FNV-1a 64-bit hash, used to turn string labels into stream labels.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// splitmix64 generator with a Box-Muller Gaussian source.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
    spare_gaussian: Option<f64>,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self {
            state: seed,
            spare_gaussian: None,
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        finalize(self.state)
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `(0, 1]`; safe as a logarithm argument.
    #[inline]
    fn next_f64_open(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[0, n)`.
    #[inline]
    pub fn next_below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        self.next_u64() % n
    }

    /// Standard normal deviate via Box-Muller; pairs are cached so every
    /// draw costs half a transform on average.
    pub fn next_gaussian(&mut self) -> f64 {
        if let Some(g) = self.spare_gaussian.take() {
            return g;
        }
        let r = (-2.0 * self.next_f64_open().ln()).sqrt();
        let theta = TAU * self.next_f64();
        self.spare_gaussian = Some(r * theta.sin());
        r * theta.cos()
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.next_below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}
