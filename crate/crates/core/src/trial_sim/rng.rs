//! Per-patient random streams.
//!
//! Patient `i` always draws from ChaCha8 stream `i` under the key derived from
//! the master seed, so the draws a patient sees never depend on how patients
//! are split across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct StreamFactory {
    base: ChaCha8Rng,
}

impl StreamFactory {
    pub fn new(seed: u64) -> Self {
        StreamFactory { base: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn stream(&self, index: u64) -> ChaCha8Rng {
        let mut rng = self.base.clone();
        rng.set_stream(index);
        rng
    }
}
