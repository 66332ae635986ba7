//! Points of the dyadic half-line and the primitive digit operations on them.
//!
//! A [`DyadicRational`] is a non-negative number with a terminating binary
//! expansion `x = Σ x_k 2^k`. For points with two expansions the terminating
//! one is the only one that can be represented, so digits are unambiguous.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// `numerator · 2^(−scale)` in canonical form: `scale == 0` or the numerator
/// is odd. Zero is `(0, 0)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct DyadicRational {
    numerator: BigUint,
    scale: u32,
}

impl DyadicRational {
    pub fn new(numerator: BigUint, scale: u32) -> Self {
        if numerator.is_zero() {
            return Self::zero();
        }
        let tz = numerator.trailing_zeros().unwrap_or(0);
        let drop = tz.min(u64::from(scale)) as u32;
        DyadicRational {
            numerator: numerator >> drop,
            scale: scale - drop,
        }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_int(n: u64) -> Self {
        Self::new(BigUint::from(n), 0)
    }

    /// `n · 2^(−scale)`.
    pub fn from_parts(n: u64, scale: u32) -> Self {
        Self::new(BigUint::from(n), scale)
    }

    /// `n · 2^exp` for any integer exponent.
    pub fn from_scaled(n: BigUint, exp: i64) -> Self {
        if exp >= 0 {
            Self::new(n << exp as u64, 0)
        } else {
            Self::new(n, u32::try_from(-exp).expect("dyadic scale exceeds u32"))
        }
    }

    pub fn numerator(&self) -> &BigUint {
        &self.numerator
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    /// Exact value as a rational; `None` for negative rationals or
    /// denominators that are not powers of two.
    pub fn from_rational(r: &BigRational) -> Option<Self> {
        let (n, d) = (r.numer(), r.denom());
        if n.sign() == num_bigint::Sign::Minus {
            return None;
        }
        let d = d.magnitude();
        if d.count_ones() != 1 {
            return None;
        }
        let scale = u32::try_from(d.bits() - 1).ok()?;
        Some(Self::new(n.magnitude().clone(), scale))
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(BigInt::from(self.numerator.clone()), BigInt::one() << self.scale)
    }

    /// Binary digit `x_i` (coefficient of `2^i`).
    pub fn bit(&self, i: i64) -> u8 {
        let pos = i + i64::from(self.scale);
        if pos < 0 {
            return 0;
        }
        u8::from(self.numerator.bit(pos as u64))
    }

    /// `⌊x · 2^j⌋`.
    pub fn floor_scaled(&self, j: i64) -> BigUint {
        let shift = j - i64::from(self.scale);
        if shift >= 0 {
            &self.numerator << shift as u64
        } else {
            &self.numerator >> (-shift) as u64
        }
    }

    /// Integer part `⌊x⌋`.
    pub fn floor(&self) -> BigUint {
        self.floor_scaled(0)
    }

    /// Fractional part `x − ⌊x⌋`.
    pub fn frac(&self) -> Self {
        let mask = (BigUint::one() << self.scale) - 1u32;
        Self::new(&self.numerator & mask, self.scale)
    }

    /// `x · 2^e`.
    pub fn mul_pow2(&self, e: i64) -> Self {
        Self::from_scaled(self.numerator.clone(), e - i64::from(self.scale))
    }

    /// Renders the binary literal form, e.g. `10.011b`.
    pub fn to_binary_string(&self) -> String {
        let int = self.floor().to_str_radix(2);
        if self.scale == 0 {
            return format!("{int}b");
        }
        let frac = self.frac().numerator.to_str_radix(2);
        let pad = self.scale as usize - frac.len();
        format!("{int}.{}{frac}b", "0".repeat(pad))
    }
}

impl Ord for DyadicRational {
    fn cmp(&self, other: &Self) -> Ordering {
        let s = self.scale.max(other.scale);
        let a = &self.numerator << (s - self.scale);
        let b = &other.numerator << (s - other.scale);
        a.cmp(&b)
    }
}

impl PartialOrd for DyadicRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `p/2^s` form (just `p` for integers).
impl fmt::Display for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.scale == 0 {
            write!(f, "{}", self.numerator)
        } else {
            write!(f, "{}/2^{}", self.numerator, self.scale)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error(
    "invalid dyadic rational {0:?}: expected `p/2^s`, `p/q` with q a power of two, or a binary literal like `10.011b`"
)]
pub struct ParseDyadicError(pub String);

impl FromStr for DyadicRational {
    type Err = ParseDyadicError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseDyadicError(s.to_string());
        let t = s.trim();
        if let Some(bin) = t.strip_suffix('b') {
            let (int, frac) = bin.split_once('.').unwrap_or((bin, ""));
            if int.is_empty() && frac.is_empty() {
                return Err(err());
            }
            let digits = format!("{int}{frac}");
            if !digits.bytes().all(|b| b == b'0' || b == b'1') {
                return Err(err());
            }
            let n = BigUint::parse_bytes(digits.as_bytes(), 2).ok_or_else(err)?;
            let scale = u32::try_from(frac.len()).map_err(|_| err())?;
            return Ok(Self::new(n, scale));
        }
        match t.split_once('/') {
            None => Ok(Self::new(t.parse().map_err(|_| err())?, 0)),
            Some((p, d)) => {
                let p: BigUint = p.parse().map_err(|_| err())?;
                if let Some(e) = d.strip_prefix("2^") {
                    let e: u32 = e.parse().map_err(|_| err())?;
                    return Ok(Self::new(p, e));
                }
                let d: BigUint = d.parse().map_err(|_| err())?;
                if d.count_ones() != 1 {
                    return Err(err());
                }
                let scale = u32::try_from(d.bits() - 1).map_err(|_| err())?;
                Ok(Self::new(p, scale))
            }
        }
    }
}

/// The dyadic interval `Δ_{j,k} = [2^{−j}k, 2^{−j}(k+1))` of rank `j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DyadicInterval {
    pub rank: i32,
    pub index: u64,
}

impl DyadicInterval {
    pub fn new(rank: i32, index: u64) -> Self {
        DyadicInterval { rank, index }
    }

    pub fn left(&self) -> DyadicRational {
        DyadicRational::from_scaled(BigUint::from(self.index), -i64::from(self.rank))
    }

    pub fn right(&self) -> DyadicRational {
        DyadicRational::from_scaled(BigUint::from(self.index) + 1u32, -i64::from(self.rank))
    }

    pub fn contains(&self, x: &DyadicRational) -> bool {
        x.floor_scaled(i64::from(self.rank)) == BigUint::from(self.index)
    }
}

impl fmt::Display for DyadicInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.left(), self.right())
    }
}

/// Digit `x_i` of `x`.
pub fn bit(x: &DyadicRational, i: i64) -> u8 {
    x.bit(i)
}

/// Digitwise mod-2 addition `x ⊕ y` (which is also `x ⊖ y`).
pub fn dyadic_add(x: &DyadicRational, y: &DyadicRational) -> DyadicRational {
    let s = x.scale.max(y.scale);
    let a = &x.numerator << (s - x.scale);
    let b = &y.numerator << (s - y.scale);
    DyadicRational::new(a ^ b, s)
}

/// `(y, x) = Σ_k y_k x_{−1−k}`. Symmetric in its arguments.
pub fn pairing(y: &DyadicRational, x: &DyadicRational) -> u64 {
    pairing_parts(&y.numerator, y.scale, x)
}

/// [`pairing`] with `y = numerator · 2^{-scale}` given by parts.
fn pairing_parts(y_num: &BigUint, y_scale: u32, x: &DyadicRational) -> u64 {
    // y_k sits at bit b = k + s_y of y's numerator; x_{-1-k} at bit s_x - 1 - k.
    let (sy, sx) = (i64::from(y_scale), i64::from(x.scale));
    let mut total = 0u64;
    for (w, digit) in y_num.iter_u64_digits().enumerate() {
        let mut d = digit;
        while d != 0 {
            let b = (w as i64) * 64 + i64::from(d.trailing_zeros());
            d &= d - 1;
            let xb = sx - 1 - (b - sy);
            if xb >= 0 && x.numerator.bit(xb as u64) {
                total += 1;
            }
        }
    }
    total
}

/// Walsh function `w_k(x) = (−1)^{(k, x)}` for an arbitrary-precision index.
pub fn walsh_big(k: &BigUint, x: &DyadicRational) -> i32 {
    parity_sign(pairing_parts(k, 0, x))
}

/// Walsh function `w_k(x) = (−1)^{(k, x)}`.
pub fn walsh(k: u64, x: &DyadicRational) -> i32 {
    // (k, x) = Σ_i k_i x_{−1−i}: AND of k with the reversed fractional bits.
    let mut total = 0u32;
    let mut kk = k;
    while kk != 0 {
        let i = i64::from(kk.trailing_zeros());
        kk &= kk - 1;
        total += u32::from(x.bit(-1 - i));
    }
    parity_sign(u64::from(total))
}

/// Generalized Walsh kernel `ψ(x, y) = w_{⌊y⌋}(x) · w_{⌊x⌋}(y)`.
pub fn psi(x: &DyadicRational, y: &DyadicRational) -> i32 {
    walsh_big(&y.floor(), x) * walsh_big(&x.floor(), y)
}

fn parity_sign(n: u64) -> i32 {
    if n.is_even() {
        1
    } else {
        -1
    }
}

/// Smallest `r` with `k < 2^r`.
pub fn bit_length(k: u64) -> u32 {
    64 - k.leading_zeros()
}
