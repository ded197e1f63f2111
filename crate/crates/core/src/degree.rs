//! Exact carrier for `deg₂ D = r + Σ n_p log₂ p` and the decisions made on it.
//!
//! `r` is rational and the `p` are odd primes with nonzero multiplicity. When
//! no odd prime survives the value is an exact rational; otherwise it is
//! irrational (unique factorisation), so it never sits exactly on a rational
//! boundary and comparisons terminate once the enclosure is tight enough.
//!
//! Two independent routes are provided:
//!
//! * [`DegreeValue::pow2_floor`] / [`DegreeValue::pow2_ceil`] compute
//!   `⌊2^x⌋` and `⌈2^x⌉` exactly with big-integer roots. Nothing is rounded.
//! * [`DegreeValue::floor`] and [`DegreeValue::cmp_rational`] refine a
//!   rigorous rational enclosure of the odd-prime logarithms, doubling the
//!   precision up to a cap and failing with [`DegreeError::Precision`] if the
//!   decision is still open.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::Neg;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub const DEFAULT_PRECISION_BITS: u32 = 256;

/// Starting precision of the refinement loop.
const INITIAL_PRECISION_BITS: u32 = 64;

/// Largest intermediate integer (in bits) the exact power route may build.
pub const MAX_EXACT_BITS: u64 = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DegreeError {
    #[error("comparison undecided at the precision cap of {bits} bits")]
    Precision { bits: u32 },
    #[error("exact evaluation of 2^deg₂ exceeds the {limit}-bit limit")]
    TooLarge { bits: u64, limit: u64 },
    #[error("{0} is not a prime")]
    NotPrime(u64),
}

/// `deg₂` of a divisor: a rational part plus integer multiples of `log₂ p`
/// for odd primes `p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DegreeValue {
    rational_part: BigRational,
    log_terms: BTreeMap<u64, i64>,
    precision_bits: u32,
}

impl DegreeValue {
    pub fn rational(value: BigRational) -> Self {
        DegreeValue {
            rational_part: value,
            log_terms: BTreeMap::new(),
            precision_bits: DEFAULT_PRECISION_BITS,
        }
    }

    pub fn integer(value: i64) -> Self {
        Self::rational(BigRational::from_integer(value.into()))
    }

    /// `rational + Σ n_p log₂ p`. Terms at `p = 2` fold into the rational
    /// part; zero multiplicities are dropped.
    pub fn from_parts(
        rational: BigRational,
        terms: impl IntoIterator<Item = (u64, i64)>,
    ) -> Result<Self, DegreeError> {
        let mut value = Self::rational(rational);
        for (p, n) in terms {
            if !is_prime(p) {
                return Err(DegreeError::NotPrime(p));
            }
            if p == 2 {
                value.rational_part += BigRational::from_integer(n.into());
            } else {
                *value.log_terms.entry(p).or_insert(0) += n;
            }
        }
        value.log_terms.retain(|_, n| *n != 0);
        Ok(value)
    }

    pub fn with_precision(mut self, bits: u32) -> Self {
        self.precision_bits = bits.max(INITIAL_PRECISION_BITS);
        self
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.rational_part
    }

    pub fn log_terms(&self) -> &BTreeMap<u64, i64> {
        &self.log_terms
    }

    pub fn is_rational(&self) -> bool {
        self.log_terms.is_empty()
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        self.is_rational().then_some(&self.rational_part)
    }

    /// `self + shift` for a rational shift.
    pub fn shifted(&self, shift: &BigRational) -> Self {
        let mut out = self.clone();
        out.rational_part += shift;
        out
    }

    /// Rigorous enclosure `lo ≤ self ≤ hi` with dyadic endpoints of
    /// denominator `2^bits`. Exact (`lo == hi`) for rational values.
    pub fn enclosure(&self, bits: u32) -> (BigRational, BigRational) {
        if self.is_rational() {
            return (self.rational_part.clone(), self.rational_part.clone());
        }
        let mut lo = self.rational_part.clone();
        let mut hi = self.rational_part.clone();
        for (&p, &n) in &self.log_terms {
            let (l, h) = log2_enclosure(p, bits);
            let n = BigRational::from_integer(n.into());
            if n.is_positive() {
                lo += &n * l;
                hi += &n * h;
            } else {
                lo += &n * h;
                hi += &n * l;
            }
        }
        let scale = BigRational::from_integer(BigInt::one() << bits as usize);
        let lo = (lo * &scale).floor() / &scale;
        let hi = (hi * &scale).ceil() / &scale;
        (lo, hi)
    }

    fn refine<T>(
        &self,
        mut decide: impl FnMut(&BigRational, &BigRational) -> Option<T>,
    ) -> Result<T, DegreeError> {
        let cap = self.precision_bits;
        let mut bits = INITIAL_PRECISION_BITS.min(cap);
        loop {
            let (lo, hi) = self.enclosure(bits);
            if let Some(answer) = decide(&lo, &hi) {
                return Ok(answer);
            }
            if bits >= cap {
                return Err(DegreeError::Precision { bits: cap });
            }
            bits = bits.saturating_mul(2).min(cap);
        }
    }

    /// `⌊self⌋`.
    pub fn floor(&self) -> Result<BigInt, DegreeError> {
        if let Some(r) = self.as_rational() {
            return Ok(r.floor().to_integer());
        }
        self.refine(|lo, hi| {
            let (fl, fh) = (lo.floor(), hi.floor());
            (fl == fh).then(|| fl.to_integer())
        })
    }

    /// Order of `self` relative to an exact rational.
    pub fn cmp_rational(&self, c: &BigRational) -> Result<Ordering, DegreeError> {
        if let Some(r) = self.as_rational() {
            return Ok(r.cmp(c));
        }
        self.refine(|lo, hi| {
            if hi < c {
                Some(Ordering::Less)
            } else if lo > c {
                Some(Ordering::Greater)
            } else {
                None
            }
        })
    }

    /// Write `2^self` as `(num / den)^{1/root}` with integers.
    fn pow2_parts(&self) -> Result<(BigUint, BigUint, u32), DegreeError> {
        let r = &self.rational_part;
        let too_large = |bits| DegreeError::TooLarge {
            bits,
            limit: MAX_EXACT_BITS,
        };
        let root = r.denom().to_u32().ok_or(too_large(u64::MAX))?;
        let two_exp = r.numer().magnitude().to_u64().ok_or(too_large(u64::MAX))?;
        let mut estimate = two_exp;
        for (&p, &n) in &self.log_terms {
            let p_bits = 64 - u64::from(p.leading_zeros());
            estimate = estimate.saturating_add(
                n.unsigned_abs()
                    .saturating_mul(p_bits)
                    .saturating_mul(u64::from(root)),
            );
        }
        if estimate > MAX_EXACT_BITS {
            return Err(too_large(estimate));
        }
        let mut num = BigUint::one();
        let mut den = BigUint::one();
        if r.numer().is_negative() {
            den <<= two_exp as usize;
        } else {
            num <<= two_exp as usize;
        }
        for (&p, &n) in &self.log_terms {
            let exp = (n.unsigned_abs() * u64::from(root)) as u32;
            let factor = BigUint::from(p).pow(exp);
            if n > 0 {
                num *= factor;
            } else {
                den *= factor;
            }
        }
        Ok((num, den, root))
    }

    /// `⌊2^self⌋`, exact.
    pub fn pow2_floor(&self) -> Result<BigUint, DegreeError> {
        let (num, den, root) = self.pow2_parts()?;
        Ok((num / den).nth_root(root))
    }

    /// `⌈2^self⌉`, exact.
    pub fn pow2_ceil(&self) -> Result<BigUint, DegreeError> {
        let (num, den, root) = self.pow2_parts()?;
        let r = (&num / &den).nth_root(root);
        if r.pow(root) * &den == num {
            Ok(r)
        } else {
            Ok(r + 1u32)
        }
    }

    /// Floating-point approximation, for display and plotting only.
    pub fn approx_f64(&self) -> f64 {
        let r = self.rational_part.to_f64().unwrap_or(f64::NAN);
        self.log_terms
            .iter()
            .fold(r, |acc, (&p, &n)| acc + n as f64 * (p as f64).log2())
    }
}

impl Neg for &DegreeValue {
    type Output = DegreeValue;

    fn neg(self) -> DegreeValue {
        DegreeValue {
            rational_part: -&self.rational_part,
            log_terms: self.log_terms.iter().map(|(&p, &n)| (p, -n)).collect(),
            precision_bits: self.precision_bits,
        }
    }
}

impl fmt::Display for DegreeValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        if !self.rational_part.is_zero() || self.log_terms.is_empty() {
            write!(f, "{}", self.rational_part)?;
            first = false;
        }
        for (p, n) in &self.log_terms {
            match (first, *n < 0) {
                (true, true) => write!(f, "-{}·log2({p})", -n)?,
                (true, false) => write!(f, "{n}·log2({p})")?,
                (false, true) => write!(f, " - {}·log2({p})", -n)?,
                (false, false) => write!(f, " + {n}·log2({p})")?,
            }
            first = false;
        }
        Ok(())
    }
}

impl From<BigRational> for DegreeValue {
    fn from(value: BigRational) -> Self {
        DegreeValue::rational(value)
    }
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in SMALL {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let pow = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul(acc, b);
            }
            b = mul(b, b);
            e >>= 1;
        }
        acc
    };
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in SMALL {
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Fixed-point enclosure of `atanh(num/den)` scaled by `2^scale`, for
/// `0 ≤ num/den ≤ 1/3`: `(lo, hi)` with `lo ≤ 2^scale·atanh(num/den) ≤ hi`.
fn atanh_fixed(num: &BigUint, den: &BigUint, scale: u32) -> (BigUint, BigUint) {
    let z2_num = num * num;
    let z2_den = den * den;
    let mut p_num = num.clone();
    let mut p_den = den.clone();
    let mut lo = BigUint::zero();
    let mut hi = BigUint::zero();
    let mut k = 0u64;
    loop {
        let top = &p_num << scale as usize;
        let bottom = &p_den * BigUint::from(2 * k + 1);
        let (q, r) = top.div_rem(&bottom);
        let ceil = if r.is_zero() { q.clone() } else { &q + 1u32 };
        if ceil <= BigUint::one() {
            // Remaining tail ≤ term / (1 − z²) ≤ 9/8 · 2^-scale.
            hi += ceil + 2u32;
            return (lo, hi);
        }
        lo += q;
        hi += ceil;
        p_num *= &z2_num;
        p_den *= &z2_den;
        k += 1;
    }
}

/// Rigorous rational bounds on `log₂ p` for an integer `p ≥ 2`.
pub fn log2_enclosure(p: u64, bits: u32) -> (BigRational, BigRational) {
    let e = 63 - p.leading_zeros();
    let base = 1u64 << e;
    let scale = bits + 16;
    let rat = |n: BigUint| BigRational::from_integer(BigInt::from(n));
    let exponent = BigRational::from_integer(e.into());
    if p == base {
        return (exponent.clone(), exponent);
    }
    // ln(p / 2^e) = 2 atanh((p − 2^e)/(p + 2^e)), ln 2 = 2 atanh(1/3).
    let (m_lo, m_hi) = atanh_fixed(&BigUint::from(p - base), &BigUint::from(p + base), scale);
    let (t_lo, t_hi) = atanh_fixed(&BigUint::one(), &BigUint::from(3u32), scale);
    let lo = &exponent + rat(m_lo) / rat(t_hi);
    let hi = &exponent + rat(m_hi) / rat(t_lo);
    (lo, hi)
}
