//! Seeded, splittable randomness.
//!
//! Every simulation draws from a [`RandomSource`]. Replica `k` of an ensemble
//! seeded with `s` uses `RandomSource::new(s).child(k)`, which selects ChaCha
//! stream `k` under key `s`, so replicas never share draws and can run in any
//! order.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct RandomSource {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { seed, stream, rng }
    }

    /// Independent stream for replica `k`. Depends only on `(seed, k)`,
    /// not on how much of `self` has been consumed.
    pub fn child(&self, k: u64) -> Self {
        Self::with_stream(self.seed, k)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }
}

impl RngCore for RandomSource {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}
