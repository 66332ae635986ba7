//! Refinement equations `φ(x) = Σ_k c_k φ(2x ⊖ k)` on the dyadic half-line.
//!
//! The mask `m(y) = ½ Σ_k c_k w_k(y)` is a Walsh polynomial of period 1.
//! With top index `K` it is constant on atoms of rank `r = bit_length(K)`, the
//! smallest `r` with `K < 2^r`, and `m ≡ 1` on `[0, 2^{-r})` once `Σ c_k = 2`.
//! On the transform side `(Tf)^(y) = m(y/2) f^(y/2)`, so the product
//! `Π_{j≥1} m(2^{-j} y)` stabilizes after finitely many factors on any window
//! `[0, 2^N)`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::dyadic::{bit_length, walsh, DyadicInterval, DyadicRational};
use crate::error::{Error, Result};
use crate::scalar::ExactScalar;
use crate::stepfn::{cmul, inner, shape_len, to_scaled, CInt, StepFunction};
use crate::wft::wft;

/// A normalized refinement mask: coefficients `c_0..c_K` with `Σ c_k = 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mask {
    coeffs: Vec<ExactScalar>,
    resolution: u32,
    table: Vec<ExactScalar>,
}

impl Mask {
    /// Builds the mask; the coefficients must sum to exactly 2.
    pub fn new(coeffs: Vec<ExactScalar>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::EmptyMask);
        }
        let sum: ExactScalar = coeffs.iter().cloned().sum();
        if sum != ExactScalar::from_int(2) {
            return Err(Error::SumNotTwo(Box::new(sum)));
        }
        let resolution = bit_length(coeffs.len() as u64 - 1);
        let table = mask_table(&coeffs, resolution);
        Ok(Mask {
            coeffs,
            resolution,
            table,
        })
    }

    /// Normalizes with [`mask_normalize`], then builds.
    pub fn normalized(coeffs: Vec<ExactScalar>) -> Result<Self> {
        Self::new(mask_normalize(&coeffs)?)
    }

    /// Convenience constructor from `(num, den)` real pairs.
    pub fn from_ratios(coeffs: &[(i64, i64)]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&(n, d)| ExactScalar::ratio(n, d)).collect())
    }

    pub fn coefficients(&self) -> &[ExactScalar] {
        &self.coeffs
    }

    /// Top index `K`.
    pub fn top_index(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `r = bit_length(K)`: the mask is constant on rank-`r` atoms.
    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    /// Values of `m` on `Δ_{r,q}`, `q < 2^r`.
    pub fn table(&self) -> &[ExactScalar] {
        &self.table
    }

    /// The value table re-derived from the coefficients at any rank.
    pub fn table_at_rank(&self, rank: u32) -> Vec<ExactScalar> {
        mask_table(&self.coeffs, rank)
    }

    /// `m(y)`, by table lookup on the fractional part of `y`.
    pub fn eval(&self, y: &DyadicRational) -> ExactScalar {
        let r = self.resolution;
        let idx = y.frac().floor_scaled(i64::from(r));
        let idx = usize::try_from(&idx).expect("table index below 2^r");
        self.table[idx].clone()
    }

    /// `m` restricted to `[0, 1)` as a step function of rank `r`.
    pub fn as_step(&self) -> StepFunction {
        StepFunction::new(self.resolution as i32, 0, self.table.clone()).expect("table has 2^r entries")
    }

    /// All coefficients real and non-negative.
    pub fn check_nonnegative(&self) -> Result<()> {
        for (index, c) in self.coeffs.iter().enumerate() {
            if !c.is_real() || c.re.is_negative() {
                return Err(Error::NotNonNegative {
                    index,
                    value: Box::new(c.clone()),
                });
            }
        }
        Ok(())
    }

    fn scaled_coeffs(&self) -> (Vec<CInt>, BigInt) {
        to_scaled(&self.coeffs)
    }

    fn scaled_table(&self) -> (Vec<CInt>, BigInt) {
        to_scaled(&self.table)
    }
}

fn mask_table(coeffs: &[ExactScalar], rank: u32) -> Vec<ExactScalar> {
    let half = ExactScalar::ratio(1, 2);
    (0..1u64 << rank)
        .map(|q| {
            let y = DyadicRational::from_parts(q, rank);
            let s: ExactScalar = coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| if walsh(k as u64, &y) > 0 { c.clone() } else { -c })
                .sum();
            &half * &s
        })
        .collect()
}

/// Rescales coefficients by `2 / Σ c_k`.
pub fn mask_normalize(coeffs: &[ExactScalar]) -> Result<Vec<ExactScalar>> {
    let sum: ExactScalar = coeffs.iter().cloned().sum();
    let factor = &ExactScalar::from_int(2) * &sum.inv().ok_or(Error::ZeroSum)?;
    Ok(coeffs.iter().map(|c| c * &factor).collect())
}

/// Errors with [`Error::TooLarge`] if some step of `T^k f` would exceed the
/// storage limit. Each step extends to support `max(s, r)` before contracting,
/// so `rank(f) + k + max(s, r)` bounds every intermediate length.
pub fn check_cascade_size(m: &Mask, f: &StepFunction, k: usize) -> Result<()> {
    let e = i64::from(f.rank()) + k as i64 + i64::from(f.support_exp().max(m.resolution as i32));
    if e > crate::stepfn::MAX_LOG_LEN {
        return Err(Error::TooLarge(e));
    }
    Ok(())
}

/// Errors with [`Error::TooLarge`] if [`phihat_window`] would exceed the
/// storage limit.
pub fn check_window_size(m: &Mask, window: u32) -> Result<()> {
    let n = i64::from(window);
    let e = (i64::from(m.resolution) - 1).max(-n) + n;
    if e > crate::stepfn::MAX_LOG_LEN {
        return Err(Error::TooLarge(e));
    }
    Ok(())
}

/// `Tf(x) = Σ_k c_k f(2x ⊕ k)`.
///
/// For `f` of rank `j` and support exponent `s` the result has rank `j + 1`
/// and support exponent `max(s, r) − 1`.
pub fn transition(m: &Mask, f: &StepFunction) -> StepFunction {
    let support = f.support_exp().max(m.resolution as i32);
    let ext = f.with_support(support).expect("support within size limit");
    let (cn, cd) = m.scaled_coeffs();
    let offsets: Vec<usize> = (0..cn.len())
        .map(|k| crate::stepfn::xor_offset(&DyadicRational::from_int(k as u64), ext.rank()))
        .collect();
    let src = ext.numerators();
    // Σ_k c_k · translate(f, k), then contract.
    let nums: Vec<CInt> = (0..ext.len())
        .map(|p| {
            let mut acc = CInt::default();
            for (c, &t) in cn.iter().zip(&offsets) {
                if !c.is_zero() {
                    acc += cmul(&src[p ^ t], c);
                }
            }
            acc
        })
        .collect();
    StepFunction::from_scaled(ext.rank() + 1, support - 1, nums, ext.denominator() * cd)
}

/// `T*g(u) = ½ Σ_k conj(c_k) g((u ⊕ k)/2)`, so that
/// `inner(Tf, g) = inner(f, T*g)`.
///
/// Each application lowers the rank by one and raises the support exponent by
/// one, so the number of stored values stays fixed.
pub fn transition_adjoint(m: &Mask, g: &StepFunction) -> StepFunction {
    let e = g.expand();
    let support = e.support_exp().max(m.resolution as i32);
    let ext = e.with_support(support).expect("support within size limit");
    let conj: Vec<ExactScalar> = m.coeffs.iter().map(|c| c.conj()).collect();
    let (cn, cd) = to_scaled(&conj);
    let offsets: Vec<usize> = (0..cn.len())
        .map(|k| crate::stepfn::xor_offset(&DyadicRational::from_int(k as u64), ext.rank()))
        .collect();
    let src = ext.numerators();
    let nums: Vec<CInt> = (0..ext.len())
        .map(|p| {
            let mut acc = CInt::default();
            for (c, &t) in cn.iter().zip(&offsets) {
                if !c.is_zero() {
                    acc += cmul(&src[p ^ t], c);
                }
            }
            acc
        })
        .collect();
    StepFunction::from_scaled(ext.rank(), support, nums, ext.denominator() * cd * 2)
}

/// `[T f0, T² f0, …, T^kmax f0]`.
pub fn cascade(m: &Mask, f0: &StepFunction, kmax: usize) -> Vec<StepFunction> {
    let mut out = Vec::with_capacity(kmax);
    let mut cur = f0.clone();
    for _ in 0..kmax {
        cur = transition(m, &cur);
        out.push(cur.clone());
    }
    out
}

/// `T^k f`.
pub fn iterate(m: &Mask, f: &StepFunction, k: usize) -> StepFunction {
    (0..k).fold(f.clone(), |cur, _| transition(m, &cur))
}

/// Support exponent of `T^k f` for `f` with support exponent `s`.
pub fn iterate_support_exp(m: &Mask, s: i32, k: usize) -> i32 {
    let r = m.resolution as i32;
    (0..k).fold(s, |cur, _| cur.max(r) - 1)
}

/// `f^(2^{-k} y) · Π_{j=1}^{k} m(2^{-j} y)` on the same grid as
/// `wft(T^k f)`: rank `iterate_support_exp(m, s, k)`, support `[0, 2^{rank(f)+k})`.
pub fn wft_iterate_identity(m: &Mask, f: &StepFunction, k: usize) -> StepFunction {
    let fh = wft(f);
    let rank = iterate_support_exp(m, f.support_exp(), k);
    let support = f.rank() + k as i32;
    let (tn, td) = m.scaled_table();
    let r = m.resolution as i32;
    let tmask = (1usize << r) - 1;
    let fnums = fh.numerators();
    let len = shape_len(rank, support).expect("window within size limit");
    let kk = k as i32;
    let nums = (0..len)
        .map(|p| {
            // 2^{-k} y lands in atom p >> (rank + k − s) of f^
            let mut acc = fnums[p >> (rank + kk - fh.rank())].clone();
            for j in 1..=kk {
                if acc.is_zero() {
                    break;
                }
                let q = if r == 0 { 0 } else { (p >> (rank + j - r)) & tmask };
                acc = cmul(&acc, &tn[q]);
            }
            acc
        })
        .collect();
    let den = fh.denominator() * num_traits::pow(td, k);
    StepFunction::from_scaled(rank, support, nums, den)
}

/// `Π_{j=1}^{J} m(2^{-j} y)` on `[0, 2^N)` with `J = N + r − 1`; every later
/// factor is identically 1 there. The result has rank `max(r − 1, −N)`.
pub fn phihat_window(m: &Mask, window: u32) -> StepFunction {
    let n = window as i32;
    let r = m.resolution as i32;
    let rank = (r - 1).max(-n);
    let depth = (n + r - 1).max(0);
    let (tn, td) = m.scaled_table();
    let tmask = (1usize << r) - 1;
    let len = shape_len(rank, n).expect("window within size limit");
    let nums = (0..len)
        .map(|p| {
            let mut acc = CInt::new(BigInt::one(), BigInt::zero());
            for j in 1..=depth {
                if acc.is_zero() {
                    break;
                }
                let q = if r == 0 { 0 } else { (p >> (rank + j - r)) & tmask };
                acc = cmul(&acc, &tn[q]);
            }
            acc
        })
        .collect();
    StepFunction::from_scaled(rank, n, nums, num_traits::pow(td, depth as usize))
}

/// `T^kmax χ_[0,1)`: the cascade approximation of the refinable function with
/// unit integral.
pub fn solve_refinable(m: &Mask, kmax: usize) -> StepFunction {
    iterate(m, &StepFunction::unit(), kmax)
}

/// `T^kmax f0 / ∫ f0`; the limit does not depend on `f0`.
pub fn solve_refinable_from(m: &Mask, f0: &StepFunction, kmax: usize) -> Result<StepFunction> {
    let c = f0.integrate().inv().ok_or(Error::ZeroIntegral)?;
    Ok(iterate(m, &f0.scale(&c), kmax))
}

/// True iff every nonzero value of `f` sits on an atom inside `[0, 2^n)`.
pub fn check_support(f: &StepFunction, n: i32) -> bool {
    let e = i64::from(n) + i64::from(f.rank());
    match f.nonzero_indices().last() {
        None => true,
        Some(_) if e < 0 => false,
        Some(last) => e >= 64 || (last as u64) < (1u64 << e),
    }
}

/// Runs the cascade from `χ_[0,1)` and checks every iterate is real and
/// non-negative. The mask must have real non-negative coefficients.
pub fn check_nonnegative_cascade(m: &Mask, kmax: usize) -> Result<bool> {
    m.check_nonnegative()?;
    let mut cur = StepFunction::unit();
    for _ in 0..kmax {
        cur = transition(m, &cur);
        if !cur.is_nonnegative_real() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `inner(T^k f, χ_Δ)` for each atom, computed as `inner(f, (T*)^k χ_Δ)`
/// so the cost does not grow with `k`.
pub fn cascade_pairings(m: &Mask, f: &StepFunction, atoms: &[DyadicInterval], k: usize) -> Result<Vec<ExactScalar>> {
    atoms
        .iter()
        .map(|&a| {
            let g = (0..k).fold(StepFunction::indicator(a)?, |g, _| transition_adjoint(m, &g));
            inner(f, &g)
        })
        .collect()
}

/// All atoms of rank `0..=max_rank` inside `[0, 2^support_exp)`.
pub fn atom_panel(max_rank: i32, support_exp: i32) -> Vec<DyadicInterval> {
    (0..=max_rank)
        .flat_map(|j| {
            let e = j + support_exp;
            let count = if e < 0 { 0 } else { 1u64 << e };
            (0..count).map(move |k| DyadicInterval::new(j, k))
        })
        .collect()
}
