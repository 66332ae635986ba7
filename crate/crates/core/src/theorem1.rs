//! Exact audit of the transform of `f(x) = x·χ_[0,1)(x)` and of the pairing
//! of `y f^(y)` against `g(y) = −1/(n+1)` on the blocks `[2^n, 2^n + 1)`.
//!
//! On `[0, 1)` the kernel is `ψ(x, y) = w_{⌊y⌋}(x)`, so `f^` is constant on
//! each block and equals `∫_0^1 x w_{2^n}(x) dx = −2^{−(n+2)}`. The closed form
//! commonly quoted for it, `−2^{−(n+1)}`, is off by a factor of two; both are
//! reported. Either way the pairing terms behave like `¼/(n+1)` and the
//! partial sums diverge.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::dyadic::{DyadicInterval, DyadicRational};
use crate::error::{Error, Result};
use crate::scalar::{pow2_ratio, ExactScalar};
use crate::wft::{kernel_moment_by_refinement, moment_integral};

/// Blocks up to this index are also checked by brute-force quadrature of the
/// kernel at two points of the block (`2^{n+1}` atoms each).
pub const QUADRATURE_MAX_N: u32 = 20;

/// Value of `f^` on `[2^n, 2^n + 1)`.
///
/// For `n <= QUADRATURE_MAX_N` the defining integral `∫_0^1 x ψ(x, y) dx` is
/// also evaluated at two distinct `y` in the block; any disagreement is a
/// [`Error::Defect`].
pub fn fhat_on_block(n: u32) -> Result<ExactScalar> {
    let unit = DyadicInterval::new(0, 0);
    let v = block_value(n);
    if n <= QUADRATURE_MAX_N {
        for y in block_probes(n) {
            let q = kernel_moment_by_refinement(&y, &unit);
            if q != v {
                return Err(Error::Defect(format!(
                    "f^ at y = {y} is {q}, expected {v} on block n = {n}"
                )));
            }
        }
    }
    Ok(v)
}

/// Digit-expansion value of `∫_0^1 x w_{2^n}(x) dx`, without the quadrature
/// cross-check.
fn block_value(n: u32) -> ExactScalar {
    moment_integral(&(BigUint::one() << n), &DyadicInterval::new(0, 0))
}

/// `2^n` and `2^n + 5/8`.
fn block_probes(n: u32) -> [DyadicRational; 2] {
    let base = BigUint::one() << n;
    [
        DyadicRational::new(base.clone(), 0),
        DyadicRational::new((base << 3u32) + 5u32, 3),
    ]
}

/// The printed closed form `−2^{−(n+1)}`.
pub fn printed_block_value(n: u32) -> ExactScalar {
    ExactScalar::real(-pow2_ratio(-(i64::from(n) + 1)))
}

/// `(1/(n+1)) · |f^ on block n| · ∫_{2^n}^{2^n+1} y dy`. Uses the digit
/// route only; [`fhat_on_block`] audits it.
pub fn pairing_term(n: u32) -> Result<BigRational> {
    let fhat = block_value(n);
    // ∫ y dy over [2^n, 2^n + 1) = 2^n + ½
    let y_mass = pow2_ratio(i64::from(n)) + BigRational::new(BigInt::one(), BigInt::from(2));
    Ok(div_small(&(fhat.re.abs() * y_mass), u64::from(n) + 1))
}

/// `r / d` for a small `d`, reducing with a gcd against `d` only. `r` must be
/// reduced; a general big gcd here is quadratic in the size of `r`.
fn div_small(r: &BigRational, d: u64) -> BigRational {
    let d = BigInt::from(d);
    let g = (r.numer() % &d).gcd(&d);
    BigRational::new_raw(r.numer() / &g, r.denom() * (&d / &g))
}

/// `S_N = Σ_{n=1}^{N} pairing_term(n)`.
pub fn pairing_partial_sum(big_n: u32) -> Result<ExactScalar> {
    let mut s = ExactSum::default();
    for n in 1..=big_n {
        s.add(&pairing_term(n)?);
    }
    Ok(ExactScalar::real(s.value()))
}

/// `¼ (H_{N+1} − 1) = Σ_{n=1}^{N} ¼/(n+1)`.
pub fn harmonic_lower_bound(big_n: u32) -> BigRational {
    let mut s = ExactSum::default();
    for n in 1..=big_n {
        s.add(&BigRational::new_raw(
            BigInt::one(),
            BigInt::from(4 * (u64::from(n) + 1)),
        ));
    }
    s.value()
}

/// Smallest `N <= max_n` with `S_N > bound`.
pub fn divergence_witness(bound: &BigRational, max_n: u32) -> Result<Option<u32>> {
    let mut s = ExactSum::default();
    for n in 1..=max_n {
        s.add(&pairing_term(n)?);
        if s.cmp_rational(bound).is_gt() {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// Running exact sum of rationals whose denominators are a power of two
/// times a small odd factor. The denominator is kept as `odd · 2^exp` and
/// never fully reduced, so each addition costs a division by the small odd
/// part instead of a big gcd.
#[derive(Clone, Debug)]
pub struct ExactSum {
    num: BigInt,
    odd: BigInt,
    exp: u64,
}

impl Default for ExactSum {
    fn default() -> Self {
        ExactSum {
            num: BigInt::zero(),
            odd: BigInt::one(),
            exp: 0,
        }
    }
}

impl ExactSum {
    pub fn add(&mut self, t: &BigRational) {
        let d = t.denom();
        let e = d.trailing_zeros().unwrap_or(0);
        let v: BigInt = d >> e;
        let g = (&self.odd % &v).gcd(&v);
        let v_g = &v / &g;
        let new_exp = self.exp.max(e);
        let lhs = (&self.num * &v_g) << (new_exp - self.exp);
        let rhs = (t.numer() * (&self.odd / &g)) << (new_exp - e);
        self.num = lhs + rhs;
        self.odd *= v_g;
        self.exp = new_exp;
    }

    fn denom(&self) -> BigInt {
        &self.odd << self.exp
    }

    /// The sum, reduced.
    pub fn value(&self) -> BigRational {
        BigRational::new(self.num.clone(), self.denom())
    }

    pub fn cmp_rational(&self, r: &BigRational) -> std::cmp::Ordering {
        (&self.num * r.denom()).cmp(&(r.numer() * self.denom()))
    }

    pub fn cmp_sum(&self, other: &ExactSum) -> std::cmp::Ordering {
        (&self.num * other.denom()).cmp(&(&other.num * self.denom()))
    }
}

/// Side-by-side of computed block values, the printed closed form, and the
/// partial sums of the divergent pairing.
#[derive(Clone, Debug, PartialEq)]
pub struct Theorem1Report {
    pub n_range: (u32, u32),
    pub fhat_values: BTreeMap<u32, ExactScalar>,
    pub paper_constant: BTreeMap<u32, ExactScalar>,
    /// Block `n = 0`, outside the audited range: computed and printed value.
    pub block_zero: (ExactScalar, ExactScalar),
    pub partial_sums: BTreeMap<u32, ExactScalar>,
}

impl Theorem1Report {
    /// Blocks where the computed value differs from the printed one.
    pub fn deviations(&self) -> Vec<u32> {
        self.fhat_values
            .iter()
            .filter(|(n, v)| self.paper_constant.get(n) != Some(v))
            .map(|(&n, _)| n)
            .collect()
    }

    pub fn partial_sums_increasing(&self) -> bool {
        let v: Vec<_> = self.partial_sums.values().collect();
        v.windows(2).all(|w| w[0].re < w[1].re)
    }
}

pub fn theorem1_report(n_max: u32, big_n_max: u32) -> Result<Theorem1Report> {
    if n_max < 1 || big_n_max < 1 {
        return Err(Error::InvalidArgument("n_max and N_max must be at least 1".into()));
    }
    let mut fhat_values = BTreeMap::new();
    let mut paper_constant = BTreeMap::new();
    for n in 1..=n_max {
        fhat_values.insert(n, fhat_on_block(n)?);
        paper_constant.insert(n, printed_block_value(n));
    }
    let mut partial_sums = BTreeMap::new();
    let mut s = ExactSum::default();
    for big_n in 1..=big_n_max {
        s.add(&pairing_term(big_n)?);
        partial_sums.insert(big_n, ExactScalar::real(s.value()));
    }
    Ok(Theorem1Report {
        n_range: (1, n_max),
        fhat_values,
        paper_constant,
        block_zero: (fhat_on_block(0)?, printed_block_value(0)),
        partial_sums,
    })
}
