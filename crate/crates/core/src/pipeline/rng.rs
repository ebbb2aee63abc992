//! Seeded randomness for balancing and splitting.
//!
//! Generator: ChaCha with 8 rounds (`rand_chacha::ChaCha8Rng`), keyed by
//! `seed_from_u64(seed)`. Each consumer gets its own stream number, so the
//! balancing draws never shift the split draws:
//!
//! | stream | consumer      |
//! |--------|---------------|
//! | 1      | [`super::balance`]       |
//! | 2      | [`super::assign_splits`] |
//!
//! Bounded integers are drawn by rejection on `next_u64` (no modulo bias),
//! and shuffles are Fisher–Yates from the last index down. Together these
//! pin the exact permutation for a given seed.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub const BALANCE_STREAM: u64 = 1;
pub const SPLIT_STREAM: u64 = 2;

pub struct StreamRng(ChaCha8Rng);

impl StreamRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self(rng)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform in `0..bound`. `bound` must be non-zero.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        // smallest r accepted; values below it would bias the modulo
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let r = self.0.next_u64();
            if r >= threshold {
                return r % bound;
            }
        }
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}
