//! Dyadic step functions: finite linear combinations of indicators of dyadic
//! intervals.
//!
//! A [`StepFunction`] of rank `j` and support exponent `m` is constant on every
//! `Δ_{j,k}` and vanishes outside `[0, 2^m)`. Values are held as complex integer
//! numerators over one shared positive denominator, reduced so the gcd of the
//! denominator and every numerator component is 1. That keeps the transform
//! and cascade kernels in integer arithmetic and makes two functions with the
//! same shape and the same values share the exact same representation.

use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::dyadic::{DyadicInterval, DyadicRational};
use crate::error::{Error, Result};
use crate::scalar::ExactScalar;

/// Largest `rank + support_exp` a step function may have.
pub const MAX_LOG_LEN: i64 = 26;

pub(crate) type CInt = Complex<BigInt>;

#[derive(Clone, Debug)]
pub struct StepFunction {
    rank: i32,
    support_exp: i32,
    den: BigInt,
    nums: Vec<CInt>,
}

/// Direction for [`StepFunction::dilate`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dilation {
    /// `x ↦ f(2x)`
    Contract,
    /// `x ↦ f(x/2)`
    Expand,
}

pub(crate) fn shape_len(rank: i32, support_exp: i32) -> Result<usize> {
    let e = i64::from(rank) + i64::from(support_exp);
    if e < 0 {
        return Err(Error::InvalidShape { rank, support_exp });
    }
    if e > MAX_LOG_LEN {
        return Err(Error::TooLarge(e));
    }
    Ok(1usize << e)
}

/// Common-denominator form of a scalar sequence.
pub(crate) fn to_scaled(values: &[ExactScalar]) -> (Vec<CInt>, BigInt) {
    let mut den = BigInt::one();
    for v in values {
        den = den.lcm(v.re.denom());
        den = den.lcm(v.im.denom());
    }
    let nums = values
        .iter()
        .map(|v| {
            CInt::new(
                v.re.numer() * (&den / v.re.denom()),
                v.im.numer() * (&den / v.im.denom()),
            )
        })
        .collect();
    (nums, den)
}

pub(crate) fn scalar_to_scaled(v: &ExactScalar) -> (CInt, BigInt) {
    let (mut n, d) = to_scaled(std::slice::from_ref(v));
    (n.pop().unwrap(), d)
}

pub(crate) fn scaled_value(n: &CInt, den: &BigInt) -> ExactScalar {
    ExactScalar::new(
        BigRational::new(n.re.clone(), den.clone()),
        BigRational::new(n.im.clone(), den.clone()),
    )
}

/// `a · b` with a shortcut for real `b`.
pub(crate) fn cmul(a: &CInt, b: &CInt) -> CInt {
    if b.im.is_zero() {
        CInt::new(&a.re * &b.re, &a.im * &b.re)
    } else if a.im.is_zero() {
        CInt::new(&a.re * &b.re, &a.re * &b.im)
    } else {
        a * b
    }
}

fn conj_mul(a: &CInt, b: &CInt) -> CInt {
    cmul(a, &CInt::new(b.re.clone(), -&b.im))
}

/// Divides the shared denominator and all numerators by their gcd.
fn canonicalize(nums: &mut [CInt], den: &mut BigInt) {
    debug_assert!(den.is_positive());
    let mut g = den.clone();
    let mut any = false;
    for n in nums.iter() {
        for part in [&n.re, &n.im] {
            if !part.is_zero() {
                any = true;
                if !g.is_one() {
                    g = g.gcd(part);
                }
            }
        }
    }
    if !any {
        *den = BigInt::one();
        return;
    }
    if !g.is_one() {
        for n in nums.iter_mut() {
            n.re /= &g;
            n.im /= &g;
        }
        *den /= &g;
    }
}

/// `⌊h · 2^rank⌋` as an index offset.
pub(crate) fn xor_offset(h: &DyadicRational, rank: i32) -> usize {
    h.floor_scaled(i64::from(rank))
        .to_usize()
        .expect("translation offset exceeds usize")
}

impl StepFunction {
    /// Builds the function with `values[k]` on `Δ_{rank,k}`.
    pub fn new(rank: i32, support_exp: i32, values: Vec<ExactScalar>) -> Result<Self> {
        let expected = shape_len(rank, support_exp)?;
        if values.len() != expected {
            return Err(Error::LengthMismatch {
                rank,
                support_exp,
                expected,
                got: values.len(),
            });
        }
        let (nums, den) = to_scaled(&values);
        Ok(Self::from_scaled(rank, support_exp, nums, den))
    }

    /// Convenience constructor for integer-valued functions.
    pub fn from_ints(rank: i32, support_exp: i32, values: &[i64]) -> Result<Self> {
        Self::new(
            rank,
            support_exp,
            values.iter().map(|&v| ExactScalar::from_int(v)).collect(),
        )
    }

    pub(crate) fn from_scaled(rank: i32, support_exp: i32, mut nums: Vec<CInt>, mut den: BigInt) -> Self {
        debug_assert_eq!(Ok(nums.len()), shape_len(rank, support_exp).map_err(|_| ()));
        if den.is_negative() {
            den = -den;
            for n in nums.iter_mut() {
                *n = -std::mem::take(n);
            }
        }
        canonicalize(&mut nums, &mut den);
        StepFunction {
            rank,
            support_exp,
            den,
            nums,
        }
    }

    pub fn zero(rank: i32, support_exp: i32) -> Result<Self> {
        let len = shape_len(rank, support_exp)?;
        Ok(StepFunction {
            rank,
            support_exp,
            den: BigInt::one(),
            nums: vec![CInt::default(); len],
        })
    }

    /// `χ_Δ` at the rank of `Δ`, with the smallest support exponent that covers it.
    pub fn indicator(iv: DyadicInterval) -> Result<Self> {
        let bits = 64 - iv.index.leading_zeros() as i32;
        let support_exp = bits - iv.rank;
        let len = shape_len(iv.rank, support_exp)?;
        let mut nums = vec![CInt::default(); len];
        nums[iv.index as usize] = CInt::new(BigInt::one(), BigInt::zero());
        Ok(StepFunction {
            rank: iv.rank,
            support_exp,
            den: BigInt::one(),
            nums,
        })
    }

    /// `χ_[0,1)`.
    pub fn unit() -> Self {
        Self::indicator(DyadicInterval::new(0, 0)).unwrap()
    }

    /// `c · χ_[0, 2^m)` stored with a single value.
    pub fn constant(c: &ExactScalar, support_exp: i32) -> Self {
        let (n, d) = scalar_to_scaled(c);
        Self::from_scaled(-support_exp, support_exp, vec![n], d)
    }

    pub fn rank(&self) -> i32 {
        self.rank
    }

    pub fn support_exp(&self) -> i32 {
        self.support_exp
    }

    pub fn len(&self) -> usize {
        self.nums.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nums.is_empty()
    }

    pub(crate) fn numerators(&self) -> &[CInt] {
        &self.nums
    }

    pub(crate) fn denominator(&self) -> &BigInt {
        &self.den
    }

    /// Value on `Δ_{rank, k}`.
    pub fn value(&self, k: usize) -> ExactScalar {
        scaled_value(&self.nums[k], &self.den)
    }

    pub fn values(&self) -> Vec<ExactScalar> {
        (0..self.len()).map(|k| self.value(k)).collect()
    }

    /// `f(x)`.
    pub fn eval(&self, x: &DyadicRational) -> ExactScalar {
        if !x.floor_scaled(-i64::from(self.support_exp)).is_zero() {
            return ExactScalar::zero();
        }
        let k = x.floor_scaled(i64::from(self.rank));
        self.value(k.to_usize().expect("index below len"))
    }

    pub fn is_zero(&self) -> bool {
        self.nums.iter().all(|n| n.is_zero())
    }

    /// True if every value is real and `>= 0`.
    pub fn is_nonnegative_real(&self) -> bool {
        self.nums.iter().all(|n| n.im.is_zero() && !n.re.is_negative())
    }

    /// Indices `k` with a nonzero value on `Δ_{rank, k}`.
    pub fn nonzero_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.nums
            .iter()
            .enumerate()
            .filter(|(_, n)| !n.is_zero())
            .map(|(k, _)| k)
    }

    /// Representation equality: same rank, support exponent, and values.
    pub fn identical(&self, other: &StepFunction) -> bool {
        self.rank == other.rank
            && self.support_exp == other.support_exp
            && self.den == other.den
            && self.nums == other.nums
    }

    /// The same function (or its restriction to `[0, 2^support_exp)`) at a
    /// finer or equal rank.
    pub fn resample(&self, rank: i32, support_exp: i32) -> Result<Self> {
        if rank < self.rank {
            return Err(Error::RankDecrease {
                from: self.rank,
                to: rank,
            });
        }
        let len = shape_len(rank, support_exp)?;
        let shift = (rank - self.rank) as u32;
        let nums: Vec<CInt> = (0..len)
            .map(|p| self.nums.get(p >> shift).cloned().unwrap_or_default())
            .collect();
        let mut out = StepFunction {
            rank,
            support_exp,
            den: self.den.clone(),
            nums,
        };
        if support_exp < self.support_exp {
            canonicalize(&mut out.nums, &mut out.den);
        }
        Ok(out)
    }

    /// The coarsest representation of the same function: rank lowered while
    /// neighbouring atoms agree, support shrunk while the upper half is zero.
    /// The zero function becomes a single zero on `[0, 1)`.
    pub fn simplify(&self) -> Self {
        if self.is_zero() {
            return Self::zero(0, 0).expect("one atom");
        }
        let mut rank = self.rank;
        let mut support_exp = self.support_exp;
        let mut nums = self.nums.clone();
        loop {
            if nums.len() >= 2 && nums.chunks(2).all(|p| p[0] == p[1]) {
                nums = nums.into_iter().step_by(2).collect();
                rank -= 1;
            } else if nums.len() >= 2 && nums[nums.len() / 2..].iter().all(|v| v.is_zero()) {
                nums.truncate(nums.len() / 2);
                support_exp -= 1;
            } else {
                break;
            }
        }
        Self::from_scaled(rank, support_exp, nums, self.den.clone())
    }

    /// Repeats each value `2^(j2 − rank)` times.
    pub fn refine_rank(&self, j2: i32) -> Result<Self> {
        self.resample(j2, self.support_exp)
    }

    /// Pads with zeros (or truncates) to support `[0, 2^m)`, refining the
    /// rank if the window would be shorter than one atom.
    pub fn with_support(&self, m: i32) -> Result<Self> {
        self.resample(self.rank.max(-m), m)
    }

    pub fn scale(&self, a: &ExactScalar) -> Self {
        let (an, ad) = scalar_to_scaled(a);
        let nums = self.nums.iter().map(|n| cmul(n, &an)).collect();
        Self::from_scaled(self.rank, self.support_exp, nums, &self.den * ad)
    }

    /// `f(x ⊕ h)`.
    pub fn dyadic_translate(&self, h: &DyadicRational) -> Self {
        if h.is_zero() {
            return self.clone();
        }
        let need = h.floor().bits() as i32;
        let support_exp = self.support_exp.max(need);
        let ext = self
            .resample(self.rank, support_exp)
            .expect("translation support within size limit");
        let t = xor_offset(h, self.rank);
        let nums = (0..ext.len()).map(|p| ext.nums[p ^ t].clone()).collect();
        StepFunction {
            rank: self.rank,
            support_exp,
            den: ext.den,
            nums,
        }
    }

    /// `f(2x)`.
    pub fn contract(&self) -> Self {
        StepFunction {
            rank: self.rank + 1,
            support_exp: self.support_exp - 1,
            ..self.clone()
        }
    }

    /// `f(x/2)`.
    pub fn expand(&self) -> Self {
        StepFunction {
            rank: self.rank - 1,
            support_exp: self.support_exp + 1,
            ..self.clone()
        }
    }

    pub fn dilate(&self, direction: Dilation) -> Self {
        match direction {
            Dilation::Contract => self.contract(),
            Dilation::Expand => self.expand(),
        }
    }

    /// `∫ f dx`.
    pub fn integrate(&self) -> ExactScalar {
        let mut acc = CInt::default();
        for n in &self.nums {
            acc += n;
        }
        scaled_value(&acc, &self.den).mul_pow2(-i64::from(self.rank))
    }
}

fn common_shape(f: &StepFunction, g: &StepFunction) -> (i32, i32) {
    (f.rank.max(g.rank), f.support_exp.max(g.support_exp))
}

/// Shape on which a product of `f` and `g` lives: the smaller support, at a
/// rank fine enough for both and for at least one atom.
fn product_shape(f: &StepFunction, g: &StepFunction) -> (i32, i32) {
    let m = f.support_exp.min(g.support_exp);
    (f.rank.max(g.rank).max(-m), m)
}

/// `a·f + b·g`.
pub fn linear_combine(a: &ExactScalar, f: &StepFunction, b: &ExactScalar, g: &StepFunction) -> Result<StepFunction> {
    let (rank, support_exp) = common_shape(f, g);
    let fa = f.resample(rank, support_exp)?;
    let ga = g.resample(rank, support_exp)?;
    let (an, ad) = scalar_to_scaled(a);
    let (bn, bd) = scalar_to_scaled(b);
    let u = cmul(&an, &CInt::new(&ga.den * &bd, BigInt::zero()));
    let v = cmul(&bn, &CInt::new(&fa.den * &ad, BigInt::zero()));
    let nums = fa
        .nums
        .iter()
        .zip(&ga.nums)
        .map(|(x, y)| cmul(x, &u) + cmul(y, &v))
        .collect();
    let den = fa.den * ad * ga.den * bd;
    Ok(StepFunction::from_scaled(rank, support_exp, nums, den))
}

/// `∫ f · conj(g) dx`.
pub fn inner(f: &StepFunction, g: &StepFunction) -> Result<ExactScalar> {
    let (rank, support_exp) = product_shape(f, g);
    let fa = f.resample(rank, support_exp)?;
    let ga = g.resample(rank, support_exp)?;
    let mut acc = CInt::default();
    for (x, y) in fa.nums.iter().zip(&ga.nums) {
        acc += conj_mul(x, y);
    }
    Ok(scaled_value(&acc, &(fa.den * ga.den)).mul_pow2(-i64::from(rank)))
}

/// Pointwise product `f · g`.
pub fn pointwise_mul(f: &StepFunction, g: &StepFunction) -> Result<StepFunction> {
    let (rank, support_exp) = product_shape(f, g);
    let fa = f.resample(rank, support_exp)?;
    let ga = g.resample(rank, support_exp)?;
    let nums = fa.nums.iter().zip(&ga.nums).map(|(x, y)| cmul(x, y)).collect();
    Ok(StepFunction::from_scaled(rank, support_exp, nums, fa.den * ga.den))
}

/// Pointwise equality, refining both sides to a common shape.
impl PartialEq for StepFunction {
    fn eq(&self, other: &Self) -> bool {
        if self.rank == other.rank && self.support_exp == other.support_exp {
            return self.identical(other);
        }
        let (rank, support_exp) = common_shape(self, other);
        match (self.resample(rank, support_exp), other.resample(rank, support_exp)) {
            (Ok(a), Ok(b)) => a.identical(&b),
            _ => false,
        }
    }
}

impl std::ops::Add for &StepFunction {
    type Output = StepFunction;
    fn add(self, rhs: &StepFunction) -> StepFunction {
        linear_combine(&ExactScalar::one(), self, &ExactScalar::one(), rhs).expect("sum within size limit")
    }
}

impl std::ops::Sub for &StepFunction {
    type Output = StepFunction;
    fn sub(self, rhs: &StepFunction) -> StepFunction {
        linear_combine(&ExactScalar::one(), self, &ExactScalar::from_int(-1), rhs)
            .expect("difference within size limit")
    }
}

impl std::ops::Neg for &StepFunction {
    type Output = StepFunction;
    fn neg(self) -> StepFunction {
        StepFunction {
            nums: self.nums.iter().map(|n| -n).collect(),
            ..self.clone()
        }
    }
}
