//! Labelled, splittable random streams.
//!
//! A stream is identified by a 64-bit seed and a label. The label/seed pair is
//! hashed into a ChaCha20 key, so the same pair yields the same sequence on
//! every platform, and sibling streams (`trial:0`, `trial:1`, ...) never
//! depend on how many values another stream consumed.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::model::ArrivalOrder;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    seed: u64,
    label: String,
}

impl RngStream {
    pub fn new(seed: u64, label: impl Into<String>) -> Self {
        RngStream {
            seed,
            label: label.into(),
        }
    }

    /// The stream of the `trial`-th independent repetition of an experiment.
    pub fn for_trial(seed: u64, trial: u64) -> Self {
        RngStream::new(seed, format!("trial:{trial}"))
    }

    /// A derived stream labelled `<label>/<name>`.
    pub fn child(&self, name: &str) -> Self {
        RngStream::new(self.seed, format!("{}/{}", self.label, name))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn rng(&self) -> ChaCha20Rng {
        let mut hasher = Sha256::new();
        hasher.update(self.seed.to_le_bytes());
        hasher.update(self.label.as_bytes());
        ChaCha20Rng::from_seed(hasher.finalize().into())
    }

    /// `n` draws from U[0, 1); draw `i` belongs to vertex `i`.
    pub fn uniforms(&self, n: usize) -> Vec<f64> {
        let mut rng = self.rng();
        (0..n).map(|_| rng.gen::<f64>()).collect()
    }

    /// Coin `i` is heads iff `uniforms(n)[i] < p`.
    pub fn coins(&self, n: usize, p: f64) -> Vec<bool> {
        self.uniforms(n).into_iter().map(|u| u < p).collect()
    }

    pub fn fair_coins(&self, n: usize) -> Vec<bool> {
        self.coins(n, 0.5)
    }

    /// A uniformly random arrival order over `0..n` (Fisher-Yates).
    pub fn permutation(&self, n: usize) -> ArrivalOrder {
        let mut ids: Vec<usize> = (0..n).collect();
        ids.shuffle(&mut self.rng());
        ArrivalOrder::new(ids).expect("a shuffle is a permutation")
    }
}
