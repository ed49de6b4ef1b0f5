use rand_xoshiro::rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

/// SplitMix64 stream with the two derived draws the generators use.
///
/// * `next_u64`: standard SplitMix64 (state += 0x9e3779b97f4a7c15, then the
///   `(30, 0xbf58476d1ce4e5b9, 27, 0x94d049bb133111eb, 31)` finalizer), with
///   the seed as initial state.
/// * `below(n)`: high 64 bits of `next_u64() · n` (128-bit product).
/// * `unit()`: `(next_u64() >> 11) · 2^-53`, in `[0, 1)`.
#[derive(Debug, Clone)]
pub struct SynthRng(SplitMix64);

impl SynthRng {
    pub fn new(seed: u64) -> Self {
        Self(SplitMix64::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    pub fn below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        ((u128::from(self.next_u64()) * u128::from(n)) >> 64) as u64
    }

    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[lo, hi]` via `lo + below(hi - lo + 1)`.
    pub fn between(&mut self, lo: i64, hi: i64) -> i64 {
        lo + self.below((hi - lo + 1) as u64) as i64
    }
}
