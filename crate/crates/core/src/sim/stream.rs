//! Per-walker random streams.
//!
//! Walker `i` of an ensemble seeded with `master_seed` draws from
//! `ChaCha8Rng::seed_from_u64(master_seed)` switched to stream `i`
//! (rand_chacha 0.9). Each uniform is the top 53 bits of one `next_u64`.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

const TWO_POW_M53: f64 = 1.0 / 9_007_199_254_740_992.0;

#[derive(Debug, Clone)]
pub struct WalkerStream {
    rng: ChaCha8Rng,
}

impl WalkerStream {
    pub fn new(master_seed: u64, walker_index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(walker_index);
        Self { rng }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * TWO_POW_M53
    }
}
