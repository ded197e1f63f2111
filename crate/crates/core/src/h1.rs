//! `dim_𝕊 H¹`: the tolerant module `(R/Z, d)_λ` at level 1.
//!
//! Points of the circle are exact rationals in `[0, 1)`. The dimension is
//! bracketed by the measure bound (the `2^k` admissible sums each cover an arc
//! of length `2λ`) and the family `F(m) = {(-2)^{-j} : 1 ≤ j ≤ m}`, whose
//! subset sums are exactly the multiples of `2^{-m}`.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::degree::{DegreeError, DegreeValue};

/// Default cap on the number of generators enumerated by [`subset_sums_circle`].
pub const DEFAULT_ENUMERATION_CAP: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum H1Error {
    #[error("enumerating subsets of {size} points exceeds the cap of {cap}")]
    TooLarge { size: usize, cap: usize },
    #[error("{0}")]
    Domain(&'static str),
}

/// A point of `R/Z`, stored as its representative in `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CirclePoint(BigRational);

impl CirclePoint {
    /// Reduce any rational mod 1.
    pub fn new(x: BigRational) -> Self {
        CirclePoint(&x - x.floor())
    }

    pub fn zero() -> Self {
        CirclePoint(BigRational::zero())
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn add(&self, other: &CirclePoint) -> CirclePoint {
        CirclePoint::new(&self.0 + &other.0)
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for CirclePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn pow2(e: u32) -> BigRational {
    BigRational::from_integer(BigInt::one() << e as usize)
}

/// `2^{-e}` as an exact rational.
pub fn inv_pow2(e: u32) -> BigRational {
    pow2(e).recip()
}

/// `min(|x − y|, 1 − |x − y|)`.
pub fn circle_distance(x: &CirclePoint, y: &CirclePoint) -> BigRational {
    let diff = (&x.0 - &y.0).abs();
    let wrap = BigRational::one() - &diff;
    diff.min(wrap)
}

/// `F(m)` reduced mod 1: `1 − 2^{-j}` for odd `j`, `2^{-j}` for even `j`.
pub fn f_generators(m: u32) -> Vec<CirclePoint> {
    (1..=m)
        .map(|j| {
            let mut x = inv_pow2(j);
            if j % 2 == 1 {
                x = -x;
            }
            CirclePoint::new(x)
        })
        .collect()
}

/// All `2^|F|` subset sums mod 1, deduplicated (the empty sum is 0).
pub fn subset_sums_circle(f: &[CirclePoint], cap: usize) -> Result<BTreeSet<CirclePoint>, H1Error> {
    if f.len() > cap {
        return Err(H1Error::TooLarge { size: f.len(), cap });
    }
    let mut sums = BTreeSet::from([CirclePoint::zero()]);
    for x in f {
        let shifted: Vec<CirclePoint> = sums.iter().map(|s| s.add(x)).collect();
        sums.extend(shifted);
    }
    Ok(sums)
}

/// Cyclic gaps between consecutive points of a sorted nonempty set.
fn cyclic_gaps<'a>(sorted: &'a [&'a CirclePoint]) -> impl Iterator<Item = BigRational> + 'a {
    let last = sorted.len() - 1;
    (0..sorted.len()).map(move |i| {
        if i == last {
            BigRational::one() - &sorted[last].0 + &sorted[0].0
        } else {
            &sorted[i + 1].0 - &sorted[i].0
        }
    })
}

/// Smallest `r` such that every point of the circle is within `r` of `P`:
/// half the largest cyclic gap.
pub fn covering_radius<'a>(
    points: impl IntoIterator<Item = &'a CirclePoint>,
) -> Result<BigRational, H1Error> {
    let mut sorted: Vec<&CirclePoint> = points.into_iter().collect();
    if sorted.is_empty() {
        return Err(H1Error::Domain("covering radius of an empty set"));
    }
    sorted.sort();
    sorted.dedup();
    let widest = cyclic_gaps(&sorted).max().unwrap();
    Ok(widest / BigRational::from_integer(2.into()))
}

/// Minimum pairwise circle distance: the smallest cyclic gap.
pub fn min_separation(f: &[CirclePoint]) -> Result<BigRational, H1Error> {
    if f.len() < 2 {
        return Err(H1Error::Domain("separation needs at least two points"));
    }
    let mut sorted: Vec<&CirclePoint> = f.iter().collect();
    sorted.sort();
    Ok(cyclic_gaps(&sorted).min().unwrap())
}

/// `F` is pairwise non-tolerant at `λ` and its admissible sums come within
/// `λ` of every point.
pub fn is_generating_circle(
    f: &[CirclePoint],
    lambda: &BigRational,
    cap: usize,
) -> Result<bool, H1Error> {
    if !lambda.is_positive() {
        return Err(H1Error::Domain("λ must be positive"));
    }
    let separated = f.len() <= 1 || min_separation(f)? > *lambda;
    if !separated {
        return Ok(false);
    }
    let sums = subset_sums_circle(f, cap)?;
    Ok(covering_radius(&sums)? <= *lambda)
}

/// Least `k` with `2λ·2^k ≥ 1`.
pub fn lower_bound_cardinality(lambda: &BigRational) -> Result<u32, H1Error> {
    if !lambda.is_positive() {
        return Err(H1Error::Domain("λ must be positive"));
    }
    let twice = lambda * BigRational::from_integer(2.into());
    let mut k = 0;
    while &twice * pow2(k) < BigRational::one() {
        k += 1;
    }
    Ok(k)
}

/// `dim_𝕊 H¹(D)` from `deg₂ D`, with `λ = 2^{deg₂ D}`: 0 when `λ ≥ 1/2`,
/// and `m` when `2^{-m-1} ≤ λ < 2^{-m}`.
///
/// Decided exactly through `B = ⌈1/λ⌉`: `2^m < 1/λ ≤ 2^{m+1}` holds iff
/// `2^m < B ≤ 2^{m+1}`.
///
/// If `2^{-deg₂}` cannot be expanded, `⌈2^y⌉ − 1` has `⌈y⌉` bits for `y > 1`.
pub fn dim_h1(deg2: &DegreeValue) -> Result<u64, DegreeError> {
    let b = match (-deg2).pow2_ceil() {
        Ok(b) => b,
        Err(DegreeError::TooLarge { bits, limit }) => {
            let y = -deg2;
            let f = y.floor()?;
            let exact = y.as_rational().is_some_and(|r| r.is_integer());
            let ceil = if exact { f } else { f + 1 };
            if ceil <= BigInt::one() {
                return Ok(0);
            }
            return ceil
                .to_u64()
                .map(|c| c - 1)
                .ok_or(DegreeError::TooLarge { bits, limit });
        }
        Err(e) => return Err(e),
    };
    if b <= 2u32.into() {
        return Ok(0);
    }
    let b_minus_one = b - 1u32;
    Ok(b_minus_one.bits() - 1)
}

/// Both sides of the dimension at a rational `λ`: measure bound and the
/// certified family `F(m)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct H1Certificate {
    pub lambda: String,
    pub lower_bound: u32,
    pub generators: Vec<String>,
    pub covering_radius: String,
    pub min_separation: Option<String>,
    pub generating: bool,
}

impl H1Certificate {
    /// Lower bound met by a generating family of the same size.
    pub fn is_tight(&self) -> bool {
        self.generating && self.generators.len() as u32 == self.lower_bound
    }
}

/// Certify `dim_𝕊 (R/Z, d)_λ` at a rational `λ`.
pub fn certify_lambda(lambda: &BigRational, cap: usize) -> Result<H1Certificate, H1Error> {
    let lower_bound = lower_bound_cardinality(lambda)?;
    let family = f_generators(lower_bound);
    let sums = subset_sums_circle(&family, cap)?;
    let radius = covering_radius(&sums)?;
    let separation = if family.len() >= 2 {
        Some(min_separation(&family)?)
    } else {
        None
    };
    let generating = is_generating_circle(&family, lambda, cap)?;
    Ok(H1Certificate {
        lambda: lambda.to_string(),
        lower_bound,
        generators: family.iter().map(ToString::to_string).collect(),
        covering_radius: radius.to_string(),
        min_separation: separation.map(|s| s.to_string()),
        generating,
    })
}
