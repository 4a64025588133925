//! Seeded random rational data for checks and demos.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::Rational;

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Numerator in `[-5, 5]`, denominator in `[1, 3]`.
pub fn rational(r: &mut SampleRng) -> Rational {
    Rational::new(r.gen_range(-5i64..=5).into(), r.gen_range(1i64..=3).into())
}

pub fn field(r: &mut SampleRng, len: usize) -> Vec<Rational> {
    (0..len).map(|_| rational(r)).collect()
}
