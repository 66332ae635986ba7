//! Walsh–Fourier transform on dyadic step functions, and exact moments of
//! Walsh functions.
//!
//! For `f` of rank `n` supported in `[0, 2^m)` the transform has rank `m` and
//! support `[0, 2^n)`, and its value on `Δ_{m,p}` is
//! `2^{-n} Σ_q f_q ψ(q 2^{-n}, p 2^{-m})`. Writing `L = m + n`, the kernel sign
//! reduces to the parity of `p & rev_L(q)`, so the fast path bit-reverses the
//! input, runs a natural-order Hadamard butterfly over the integer numerators,
//! and applies the `2^{-n}` factor once at the end.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::dyadic::{bit_length, psi, walsh, walsh_big, DyadicInterval, DyadicRational};
use crate::scalar::ExactScalar;
use crate::stepfn::{CInt, StepFunction};

/// Fast Walsh–Fourier transform, `O(N log N)` additions for `N = f.len()`.
pub fn wft(f: &StepFunction) -> StepFunction {
    let bits = (f.rank() + f.support_exp()) as u32;
    let mut data: Vec<CInt> = f.numerators().to_vec();
    bit_reverse_permute(&mut data, bits);
    hadamard_in_place(&mut data);
    finish(f, data)
}

/// Transform by explicit kernel summation, `O(N²)`. Reference for [`wft`].
pub fn wft_direct(f: &StepFunction) -> StepFunction {
    wft_direct_at_rank(f, f.support_exp()).expect("output rank at least the support exponent")
}

/// Kernel-sum transform sampled on atoms of `out_rank >= f.support_exp()`.
///
/// With `out_rank` above the support exponent this re-derives the transform on
/// a finer grid, which must agree with `wft(f).refine_rank(out_rank)`.
pub fn wft_direct_at_rank(f: &StepFunction, out_rank: i32) -> crate::Result<StepFunction> {
    let n = f.rank();
    if out_rank < f.support_exp() {
        return Err(crate::Error::RankDecrease {
            from: f.support_exp(),
            to: out_rank,
        });
    }
    let out_len = crate::stepfn::shape_len(out_rank, n)?;
    let xs: Vec<(DyadicRational, BigUint)> = (0..f.len())
        .map(|q| {
            let x = DyadicRational::from_scaled(BigUint::from(q), -i64::from(n));
            let fl = x.floor();
            (x, fl)
        })
        .collect();
    let nums = f.numerators();
    // Sums of up to 2^26 terms below 2^63 in magnitude fit in i128.
    let small: Option<Vec<(i64, i64)>> = nums.iter().map(|v| Some((v.re.to_i64()?, v.im.to_i64()?))).collect();
    let mut out = Vec::with_capacity(out_len);
    for p in 0..out_len {
        let y = DyadicRational::from_scaled(BigUint::from(p), -i64::from(out_rank));
        let fy = y.floor();
        // ψ(x, y) = w_{⌊y⌋}(x) · w_{⌊x⌋}(y)
        let kernel = |(x, fx): &(DyadicRational, BigUint)| walsh_big(&fy, x) * walsh_big(fx, &y);
        let acc = match &small {
            Some(vals) => {
                let (mut re, mut im) = (0i128, 0i128);
                for (xf, &(a, b)) in xs.iter().zip(vals) {
                    if (a, b) == (0, 0) {
                        continue;
                    }
                    let s = i128::from(kernel(xf));
                    re += s * i128::from(a);
                    im += s * i128::from(b);
                }
                CInt::new(re.into(), im.into())
            }
            None => {
                let mut acc = CInt::default();
                for (xf, v) in xs.iter().zip(nums) {
                    if v.is_zero() {
                        continue;
                    }
                    if kernel(xf) > 0 {
                        acc += v;
                    } else {
                        acc -= v;
                    }
                }
                acc
            }
        };
        out.push(acc);
    }
    let (nums, den) = scale_by_pow2(out, f.denominator().clone(), n);
    Ok(StepFunction::from_scaled(out_rank, n, nums, den))
}

fn finish(f: &StepFunction, data: Vec<CInt>) -> StepFunction {
    let (nums, den) = scale_by_pow2(data, f.denominator().clone(), f.rank());
    StepFunction::from_scaled(f.support_exp(), f.rank(), nums, den)
}

/// Multiplies `nums / den` by `2^{-n}`.
fn scale_by_pow2(mut nums: Vec<CInt>, den: BigInt, n: i32) -> (Vec<CInt>, BigInt) {
    if n >= 0 {
        (nums, den << n as u32)
    } else {
        let s = (-n) as u32;
        for v in nums.iter_mut() {
            v.re <<= s;
            v.im <<= s;
        }
        (nums, den)
    }
}

fn bit_reverse_permute<T>(data: &mut [T], bits: u32) {
    if bits == 0 {
        return;
    }
    for i in 0..data.len() {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if i < j {
            data.swap(i, j);
        }
    }
}

/// Unnormalized natural-order Walsh–Hadamard butterfly.
fn hadamard_in_place(data: &mut [CInt]) {
    let n = data.len();
    let mut h = 1;
    while h < n {
        for block in data.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let t = std::mem::take(b);
                *b = &*a - &t;
                *a += t;
            }
        }
        h *= 2;
    }
}

/// `∫_Δ x · w_k(x) dx`, exact.
///
/// On `Δ = a + 2^{-j}[0,1)` write `x = a ⊕ 2^{-j}u`, so
/// `w_k(x) = w_k(a) Π_{i∈S} (−1)^{u_{−i}}` where `S` collects the digits of
/// `u` that `k` flips. Under Lebesgue measure the digits of `u` are
/// independent fair bits, so only `|S| ≤ 1` contributes.
pub fn moment_integral(k: &BigUint, iv: &DyadicInterval) -> ExactScalar {
    let j = i64::from(iv.rank);
    let a = iv.left();
    // i = l + 1 − j over the set bits l >= j of k
    let mut flipped = (0..k.bits())
        .filter(|&l| k.bit(l) && (l as i64) >= j)
        .map(|l| l as i64 + 1 - j);
    let first = flipped.next();
    let second = flipped.next();
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let step = pow2(-j);
    let body = match (first, second) {
        // a·1 + 2^{-j}·½
        (None, _) => a.to_rational() + &step * &half,
        // 2^{-j}·(−½·2^{-i})
        (Some(i), None) => -(&step * &half * pow2(-i)),
        _ => BigRational::zero(),
    };
    let sign = walsh_big(k, &a);
    let v = step * body;
    ExactScalar::real(if sign > 0 { v } else { -v })
}

/// `∫_Δ x · w_k(x) dx` by splitting `Δ` into atoms of rank
/// `max(rank(Δ), bit_length(k), 0)`, on which `w_k` is constant, and summing
/// `±(b² − a²)/2` in exact integers.
pub fn moment_integral_by_refinement(k: u64, iv: &DyadicInterval) -> ExactScalar {
    let r = (bit_length(k) as i32).max(iv.rank).max(0);
    refine_quadrature(iv, r, |x| walsh(k, x))
}

/// `∫_Δ x · ψ(x, y) dx` by the same refinement; `ψ(·, y)` is constant on atoms
/// of rank `max(bit_length(⌊y⌋), 0)`.
pub fn kernel_moment_by_refinement(y: &DyadicRational, iv: &DyadicInterval) -> ExactScalar {
    let r = (y.floor().bits() as i32).max(iv.rank).max(0);
    refine_quadrature(iv, r, |x| psi(x, y))
}

fn refine_quadrature(iv: &DyadicInterval, r: i32, sign: impl Fn(&DyadicRational) -> i32) -> ExactScalar {
    let sub = (r - iv.rank) as u32;
    let start = BigUint::from(iv.index) << sub;
    let count = 1u64 << sub;
    let mut acc = BigInt::zero();
    for t in 0..count {
        let idx = &start + t;
        let left = DyadicRational::from_scaled(idx.clone(), -i64::from(r));
        // ((idx+1)² − idx²) / 2^{2r} = (2·idx + 1) / 2^{2r}
        let w = BigInt::from(idx) * 2 + 1;
        if sign(&left) > 0 {
            acc += w;
        } else {
            acc -= w;
        }
    }
    ExactScalar::real(BigRational::from_integer(acc) * pow2(-(2 * i64::from(r) + 1)))
}

fn pow2(e: i64) -> BigRational {
    crate::scalar::pow2_ratio(e)
}
