//! Arakelov divisors on the compactification of Spec Z and the Riemann-Roch
//! identity `dim H⁰(D) − dim H¹(D) = ⌈deg₂ D⌉′ + 1`.
//!
//! The two sides are computed along independent routes: the dimensions through
//! the exact integers `⌊2^{deg₂ D}⌋` and `⌈2^{-deg₂ D}⌉`, the right-hand side
//! through `⌊deg₂ D⌋` obtained by enclosure refinement.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::degree::{is_prime, DegreeError, DegreeValue};
use crate::h0::dim_h0;
use crate::h1::dim_h1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DivisorError {
    #[error(transparent)]
    Degree(#[from] DegreeError),
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("Riemann-Roch violated at deg₂ = {deg2}: h0 − h1 = {chi}, ⌈deg₂⌉′ + 1 = {rhs}")]
    FormulaViolation { deg2: String, chi: i64, rhs: i64 },
    #[error("value out of the supported range: {0}")]
    Range(String),
    #[error("bad scan parameters: {0}")]
    BadScan(&'static str),
}

/// `Σ n_p {p} + u·{∞}`, with the archimedean coefficient `u` measured in
/// log₂ units (so `deg₂` of `u·{∞}` is `u`).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ArakelovDivisor {
    finite_part: BTreeMap<u64, i64>,
    archimedean_log2: BigRational,
}

impl ArakelovDivisor {
    pub fn new(
        places: impl IntoIterator<Item = (u64, i64)>,
        archimedean_log2: BigRational,
    ) -> Result<Self, DivisorError> {
        let mut finite_part = BTreeMap::new();
        for (p, n) in places {
            if !is_prime(p) {
                return Err(DivisorError::NotPrime(p));
            }
            *finite_part.entry(p).or_insert(0) += n;
        }
        finite_part.retain(|_, n| *n != 0);
        Ok(ArakelovDivisor {
            finite_part,
            archimedean_log2,
        })
    }

    /// `u·{∞}` in log₂ units.
    pub fn at_infinity(u: BigRational) -> Self {
        ArakelovDivisor {
            finite_part: BTreeMap::new(),
            archimedean_log2: u,
        }
    }

    /// The canonical divisor `K = −2{2}`.
    pub fn canonical() -> Self {
        ArakelovDivisor::new([(2, -2)], BigRational::zero()).expect("2 is prime")
    }

    pub fn finite_part(&self) -> &BTreeMap<u64, i64> {
        &self.finite_part
    }

    pub fn archimedean_log2(&self) -> &BigRational {
        &self.archimedean_log2
    }

    /// `deg₂ D = Σ n_p log₂ p + u`.
    pub fn deg2(&self) -> DegreeValue {
        DegreeValue::from_parts(
            self.archimedean_log2.clone(),
            self.finite_part.iter().map(|(&p, &n)| (p, n)),
        )
        .expect("keys were checked prime")
    }
}

impl fmt::Display for ArakelovDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (p, n) in &self.finite_part {
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "{n}{{{p}}}")?;
            first = false;
        }
        if first || !self.archimedean_log2.is_zero() {
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "({})·log2{{∞}}", self.archimedean_log2)?;
        }
        Ok(())
    }
}

/// The degree of the divisor `δ{∞}` with the same degree as `D`: every place
/// collapses onto the archimedean one, and the dimensions only see `deg₂`.
pub fn reduce_to_infinity(d: &ArakelovDivisor) -> DegreeValue {
    d.deg2()
}

/// `⌈x⌉′`: `⌊x⌋ + 1` for `x ≥ 0`, `⌊x⌋` for `x < 0`.
///
/// This is the right-continuous function equal to `ceiling(x)` on positive
/// non-integers and to `−ceiling(−x)` on negative non-integers.
pub fn ceil_prime(x: &DegreeValue) -> Result<BigInt, DegreeError> {
    let f = x.floor()?;
    Ok(if f >= BigInt::zero() { f + 1 } else { f })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EulerReport {
    pub deg2: String,
    pub h0: u64,
    pub h1: u64,
    pub chi: i64,
    pub rhs: i64,
}

/// Both sides of Riemann-Roch at a degree value. Fails with
/// [`DivisorError::FormulaViolation`] if they disagree.
pub fn euler_at(deg2: &DegreeValue) -> Result<EulerReport, DivisorError> {
    let h0 = dim_h0(deg2)?;
    let h1 = dim_h1(deg2)?;
    let chi = h0 as i64 - h1 as i64;
    let rhs = (ceil_prime(deg2)? + BigInt::from(1))
        .to_i64()
        .ok_or_else(|| DivisorError::Range(deg2.to_string()))?;
    if chi != rhs {
        return Err(DivisorError::FormulaViolation {
            deg2: deg2.to_string(),
            chi,
            rhs,
        });
    }
    Ok(EulerReport {
        deg2: deg2.to_string(),
        h0,
        h1,
        chi,
        rhs,
    })
}

/// `(χ, h⁰, h¹, ⌈deg₂ D⌉′ + 1)` for a divisor.
pub fn euler_characteristic(d: &ArakelovDivisor) -> Result<EulerReport, DivisorError> {
    euler_at(&reduce_to_infinity(d))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanPoint {
    pub deg2: String,
    pub kind: ProbeKind,
    pub h0: u64,
    pub h1: u64,
    pub chi: i64,
    pub rhs: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbeKind {
    Grid,
    Integer,
    LeftProbe,
    RightProbe,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanReport {
    pub lo: String,
    pub hi: String,
    pub step: String,
    pub points: Vec<ScanPoint>,
    /// `(deg₂, χ, rhs)` wherever the two sides differ.
    pub violations: Vec<(String, i64, i64)>,
    /// Integers `n` whose value differs from the value at `n + ε`.
    pub right_continuity_failures: Vec<String>,
    pub passed: bool,
}

fn integers_in(lo: &BigRational, hi: &BigRational) -> impl Iterator<Item = BigInt> {
    let mut n = lo.ceil().to_integer();
    let last = hi.floor().to_integer();
    std::iter::from_fn(move || {
        (n <= last).then(|| {
            let out = n.clone();
            n += 1;
            out
        })
    })
}

/// Evaluate Riemann-Roch on the grid `lo + i·step ≤ hi`, on every integer of
/// `[lo, hi]`, and at `n ± step/16` around each integer.
pub fn rr_scan(
    lo: &BigRational,
    hi: &BigRational,
    step: &BigRational,
) -> Result<ScanReport, DivisorError> {
    if lo > hi {
        return Err(DivisorError::BadScan("lo must not exceed hi"));
    }
    if *step <= BigRational::zero() {
        return Err(DivisorError::BadScan("step must be positive"));
    }
    let mut probes: BTreeMap<BigRational, ProbeKind> = BTreeMap::new();
    if lo == hi {
        probes.insert(lo.clone(), ProbeKind::Grid);
    } else {
        let mut x = lo.clone();
        while &x <= hi {
            probes.insert(x.clone(), ProbeKind::Grid);
            x += step;
        }
        let eps = step / BigRational::from_integer(16.into());
        for n in integers_in(lo, hi) {
            let n = BigRational::from_integer(n);
            probes.entry(&n - &eps).or_insert(ProbeKind::LeftProbe);
            probes.entry(&n + &eps).or_insert(ProbeKind::RightProbe);
            probes.insert(n, ProbeKind::Integer);
        }
    }
    let probes: Vec<(BigRational, ProbeKind)> = probes.into_iter().collect();

    let evaluate =
        |(x, kind): &(BigRational, ProbeKind)| -> Result<(ScanPoint, bool), DivisorError> {
            let deg = DegreeValue::rational(x.clone());
            let h0 = dim_h0(&deg)?;
            let h1 = dim_h1(&deg)?;
            let chi = h0 as i64 - h1 as i64;
            let rhs = (ceil_prime(&deg)? + BigInt::from(1))
                .to_i64()
                .ok_or_else(|| DivisorError::Range(x.to_string()))?;
            Ok((
                ScanPoint {
                    deg2: x.to_string(),
                    kind: *kind,
                    h0,
                    h1,
                    chi,
                    rhs,
                },
                chi == rhs,
            ))
        };
    let evaluated = map_ordered(&probes, evaluate);
    let mut points = Vec::with_capacity(evaluated.len());
    let mut violations = Vec::new();
    for result in evaluated {
        let (point, ok) = result?;
        if !ok {
            violations.push((point.deg2.clone(), point.chi, point.rhs));
        }
        points.push(point);
    }

    let mut right_continuity_failures = Vec::new();
    for (i, (x, kind)) in probes.iter().enumerate() {
        if *kind == ProbeKind::Integer {
            if let Some(next) = points.get(i + 1) {
                if next.chi != points[i].chi {
                    right_continuity_failures.push(x.to_string());
                }
            }
        }
    }
    Ok(ScanReport {
        lo: lo.to_string(),
        hi: hi.to_string(),
        step: step.to_string(),
        passed: violations.is_empty() && right_continuity_failures.is_empty(),
        points,
        violations,
        right_continuity_failures,
    })
}

#[cfg(feature = "parallel")]
fn map_ordered<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_ordered<T, R>(items: &[T], f: impl Fn(&T) -> R) -> Vec<R> {
    items.iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma::ratio;

    fn deg(n: i64, d: i64) -> DegreeValue {
        DegreeValue::rational(ratio(n, d))
    }

    #[test]
    fn degree_examples() {
        assert_eq!(ArakelovDivisor::default().deg2(), DegreeValue::integer(0));
        assert_eq!(
            ArakelovDivisor::canonical().deg2(),
            DegreeValue::integer(-2)
        );
        let d = ArakelovDivisor::new([(3, 1)], ratio(1, 2)).unwrap();
        let (lo, hi) = d.deg2().enclosure(20);
        assert!(lo > ratio(2084, 1000) && hi < ratio(2086, 1000));
        assert_eq!(
            ArakelovDivisor::new([(4, 1)], ratio(0, 1)),
            Err(DivisorError::NotPrime(4))
        );
    }

    #[test]
    fn reduction_examples() {
        let d = ArakelovDivisor::new([(2, -1)], ratio(3, 1)).unwrap();
        let reduced = reduce_to_infinity(&d);
        assert_eq!(reduced, DegreeValue::integer(2));
        assert_eq!(dim_h0(&reduced).unwrap(), 4);
        assert_eq!(
            reduce_to_infinity(&ArakelovDivisor::canonical()),
            DegreeValue::integer(-2)
        );
        assert_eq!(
            dim_h0(&reduce_to_infinity(&ArakelovDivisor::default())).unwrap(),
            2
        );
    }

    #[test]
    fn ceil_prime_examples() {
        let c = |n, d| ceil_prime(&deg(n, d)).unwrap();
        assert_eq!(c(1, 2), BigInt::from(1));
        assert_eq!(c(-1, 2), BigInt::from(-1));
        assert_eq!(c(0, 1), BigInt::from(1));
        assert_eq!(c(-2, 1), BigInt::from(-2));
        assert_eq!(c(7, 3), BigInt::from(3));
        assert_eq!(c(-7, 3), BigInt::from(-3));
    }

    #[test]
    fn euler_examples() {
        let r = euler_characteristic(&ArakelovDivisor::default()).unwrap();
        assert_eq!((r.chi, r.h0, r.h1, r.rhs), (2, 2, 0, 2));
        let k = euler_characteristic(&ArakelovDivisor::canonical()).unwrap();
        assert_eq!((k.chi, k.h0, k.h1, k.rhs), (-1, 0, 1, -1));
        let r = euler_at(&deg(-1, 1)).unwrap();
        assert_eq!((r.chi, r.h0, r.h1, r.rhs), (0, 0, 0, 0));
    }

    #[test]
    fn euler_with_odd_primes() {
        // deg₂ = log₂3 − 2 ≈ −0.415.
        let d = ArakelovDivisor::new([(3, 1)], ratio(-2, 1)).unwrap();
        let r = euler_characteristic(&d).unwrap();
        assert_eq!((r.h0, r.h1, r.chi), (0, 0, 0));
        // deg₂ = 2 log₂5 − 3 log₂3 ≈ −0.11.
        let d = ArakelovDivisor::new([(5, 2), (3, -3)], ratio(0, 1)).unwrap();
        let r = euler_characteristic(&d).unwrap();
        assert_eq!((r.h0, r.h1, r.chi, r.rhs), (0, 0, 0, 0));
        // deg₂ = 3 log₂7 ≈ 8.42.
        let d = ArakelovDivisor::new([(7, 3)], ratio(0, 1)).unwrap();
        assert_eq!(euler_characteristic(&d).unwrap().chi, 10);
    }

    #[test]
    fn scan_examples() {
        let r = rr_scan(&ratio(-1, 1), &ratio(1, 1), &ratio(1, 1)).unwrap();
        assert!(r.passed);
        let at = |x: &str| r.points.iter().find(|p| p.deg2 == x).unwrap().chi - 1;
        assert_eq!((at("-1"), at("0"), at("1")), (-1, 1, 2));

        let single = rr_scan(&ratio(3, 2), &ratio(3, 2), &ratio(1, 4)).unwrap();
        assert_eq!(single.points.len(), 1);
        assert!(rr_scan(&ratio(1, 1), &ratio(0, 1), &ratio(1, 4)).is_err());
        assert!(rr_scan(&ratio(0, 1), &ratio(1, 1), &ratio(0, 1)).is_err());
    }
}
