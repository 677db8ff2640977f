//! Deterministic, splittable random streams for replicate-level derivation.
//!
//! Every `(base_seed, family_id, replicate_index)` triple maps to its own
//! ChaCha8 stream, so a replicate's draws never depend on how work was
//! batched across workers. The family id encodes the scenario cell without
//! the delay length, which gives common random numbers across delay values.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// A deterministic random source owned by one replicate.
#[derive(Debug, Clone)]
pub struct RngStream {
    rng: ChaCha8Rng,
    family_id: u32,
    replicate_index: u32,
}

impl RngStream {
    /// Derives the stream for `(base_seed, family_id, replicate_index)`.
    pub fn derive(base_seed: u64, family_id: u32, replicate_index: u32) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(base_seed);
        rng.set_stream((u64::from(family_id) << 32) | u64::from(replicate_index));
        RngStream {
            rng,
            family_id,
            replicate_index,
        }
    }

    /// The `(family_id, replicate_index)` provenance label.
    pub fn label(&self) -> (u32, u32) {
        (self.family_id, self.replicate_index)
    }

    /// Draws `count` values from N(mu, sd^2). `sd = 0` yields the constant
    /// `mu`.
    pub fn draw_normal(&mut self, count: usize, mu: f64, sd: f64) -> Vec<f64> {
        debug_assert!(sd >= 0.0, "sd must be non-negative");
        if sd == 0.0 {
            return vec![mu; count];
        }
        let dist = Normal::new(mu, sd).expect("finite mean and positive sd");
        (0..count).map(|_| dist.sample(&mut self.rng)).collect()
    }

    /// Draws `count` Bernoulli(p) outcomes as 0/1 values.
    pub fn draw_bernoulli(&mut self, count: usize, p: f64) -> Vec<u8> {
        debug_assert!((0.0..=1.0).contains(&p), "p must lie in [0, 1]");
        (0..count)
            .map(|_| u8::from(self.rng.random::<f64>() < p))
            .collect()
    }

    /// One raw 64-bit draw; used by stream-independence checks.
    pub fn next_u64(&mut self) -> u64 {
        self.rng.random()
    }
}
