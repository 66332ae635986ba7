//! Seeded generators shared by the integration tests.

use dyadic::{ExactScalar, Mask, StepFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const DENS: [i64; 7] = [1, 2, 3, 4, 5, 7, 8];

fn small_ratio(rng: &mut ChaCha8Rng) -> ExactScalar {
    ExactScalar::ratio(rng.random_range(-9..=9), DENS[rng.random_range(0..DENS.len())])
}

/// A value that is zero about a third of the time and complex about a
/// quarter of the time.
pub fn scalar(rng: &mut ChaCha8Rng) -> ExactScalar {
    if rng.random_bool(0.3) {
        return ExactScalar::zero();
    }
    let re = small_ratio(rng);
    if rng.random_bool(0.25) {
        ExactScalar::new(re.re, small_ratio(rng).re)
    } else {
        re
    }
}

/// Random step function with `rank + support_exp = log_len` and rank in
/// `-2..=4`.
pub fn step(rng: &mut ChaCha8Rng, log_len: i32) -> StepFunction {
    let rank = rng.random_range(-2..=4);
    let support = log_len - rank;
    let values = (0..1usize << log_len).map(|_| scalar(rng)).collect();
    StepFunction::new(rank, support, values).unwrap()
}

/// Normalized mask with top index in `1..=max_top`; coefficients are small
/// integers (complex with probability ¼) rescaled to sum to 2.
pub fn mask(rng: &mut ChaCha8Rng, max_top: usize) -> Mask {
    loop {
        let top = rng.random_range(1..=max_top);
        let complex = rng.random_bool(0.25);
        let coeffs: Vec<ExactScalar> = (0..=top)
            .map(|_| {
                let re = ExactScalar::from_int(rng.random_range(-3..=5)).re;
                let im = if complex { rng.random_range(-2..=2) } else { 0 };
                ExactScalar::new(re, ExactScalar::from_int(im).re)
            })
            .collect();
        if let Ok(m) = Mask::normalized(coeffs) {
            return m;
        }
    }
}

/// Mask with non-negative real coefficients `2 a_k / Σ a`.
pub fn nonnegative_mask(rng: &mut ChaCha8Rng, max_top: usize) -> Mask {
    loop {
        let top = rng.random_range(1..=max_top);
        let coeffs: Vec<ExactScalar> = (0..=top)
            .map(|_| ExactScalar::from_int(rng.random_range(0..=4)))
            .collect();
        if let Ok(m) = Mask::normalized(coeffs) {
            return m;
        }
    }
}

/// Random step function scaled to unit integral.
pub fn unit_integral_step(rng: &mut ChaCha8Rng, log_len: i32) -> StepFunction {
    loop {
        let f = step(rng, log_len);
        if let Some(c) = f.integrate().inv() {
            return f.scale(&c);
        }
    }
}
