//! Seeded inputs for the benchmarks in `benches/`.

use dyadic::{ExactScalar, Mask, StepFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Rank-`log_len` function on `[0, 1)` with small rational values.
pub fn step(log_len: i32, seed: u64) -> StepFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vals = (0..1usize << log_len)
        .map(|_| ExactScalar::ratio(rng.random_range(-9..=9), rng.random_range(1..=8)))
        .collect();
    StepFunction::new(log_len, 0, vals).unwrap()
}

/// Normalized real mask with `top + 1` coefficients.
pub fn mask(top: usize, seed: u64) -> Mask {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let c = (0..=top)
            .map(|_| ExactScalar::from_int(rng.random_range(-2..=5)))
            .collect();
        if let Ok(m) = Mask::normalized(c) {
            return m;
        }
    }
}
