//! Seeded DB latency model: a shifted exponential with mean equal to the
//! configured base latency. 80% of the mean is a deterministic floor and
//! the remaining 20% is exponential jitter, so the tail exists but stays
//! far from the delay-rule margin at healthy baselines while a slow_db
//! factor moves the whole distribution past it.

use std::sync::Mutex;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct LatencyModel {
    base_ms: f64,
    rng: Mutex<ChaCha8Rng>,
}

impl LatencyModel {
    pub fn new(base_ms: f64, seed: u64) -> Self {
        LatencyModel {
            base_ms: base_ms.max(0.0),
            rng: Mutex::new(ChaCha8Rng::seed_from_u64(seed)),
        }
    }

    /// Draw one latency with the mean scaled by `factor`.
    pub fn sample_ms(&self, factor: f64) -> f64 {
        let mean = self.base_ms * factor.max(0.0);
        let floor = 0.8 * mean;
        let jitter_mean = 0.2 * mean;
        let u: f64 = self.rng.lock().expect("rng lock").random::<f64>();
        // Inverse CDF of Exp(1/jitter_mean); u in [0,1) keeps ln finite.
        let jitter = -jitter_mean * (1.0 - u).ln();
        floor + jitter
    }
}
