//! Deterministic rational sampling.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scalar::Rational;

pub const DEFAULT_SEED: u64 = 0xC0FFEE;
pub const MAX_PART: u64 = 1000;

#[derive(Debug, Clone)]
pub struct SampleRng(ChaCha8Rng);

impl SampleRng {
    pub fn new(seed: u64) -> Self {
        SampleRng(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn below(&mut self, bound: u64) -> u64 {
        self.0.next_u64() % bound
    }

    /// `p/q` with `1 ≤ p, q ≤ max`.
    pub fn positive_rational(&mut self, max: u64) -> Rational {
        let p = 1 + self.below(max);
        let q = 1 + self.below(max);
        Rational::new(BigInt::from(p), BigInt::from(q))
    }

    /// `p/q` with `|p| ≤ max`, `1 ≤ q ≤ max`.
    pub fn signed_rational(&mut self, max: u64) -> Rational {
        let p = self.below(2 * max + 1) as i64 - max as i64;
        let q = 1 + self.below(max);
        Rational::new(BigInt::from(p), BigInt::from(q))
    }

    pub fn positive_point(&mut self, n: usize) -> Vec<Rational> {
        (0..n).map(|_| self.positive_rational(MAX_PART)).collect()
    }
}
