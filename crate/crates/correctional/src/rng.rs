//! Minimal deterministic pseudorandom generator.
//!
//! SplitMix64 is used for all sampling so that identical seeds give identical
//! streams on every platform. Not cryptographic.

/// SplitMix64 stream generator.
#[derive(Debug, Clone, Copy)]
pub struct SplitMix64 {
    state: u64,
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn finalize(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        finalize(self.state)
    }

    /// Uniform draw in `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw in `0..bound` (`bound` must be positive).
    pub fn next_below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        self.next_u64() % bound
    }
}

/// Derives an independent stream seed from a master seed and a work-item index.
///
/// `mix_seed(m, i) = finalize(m + finalize(i + GOLDEN_GAMMA))`, where
/// `finalize` is the SplitMix64 output mix. The same `(master, index)` pair
/// always yields the same seed, so work items can be computed in any order.
pub fn mix_seed(master: u64, index: u64) -> u64 {
    finalize(master.wrapping_add(finalize(index.wrapping_add(GOLDEN_GAMMA))))
}
