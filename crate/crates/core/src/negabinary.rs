//! Base −2 words, the sequence `j(n)` and the intervals `Δ(n)`.
//!
//! Digit `i` of a [`NegabinaryWord`] weights `(-2)^i` (little-endian). The
//! `2^n` words of width `n` hit every integer of [`delta_interval`]`(n)`
//! exactly once.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// Widest word supported; `j(n)` and `2^n` stay inside `i128` below this.
pub const MAX_WIDTH: u32 = 120;

/// Default cap on `n` for the exhaustive bijection check.
pub const DEFAULT_VERIFY_CAP: u32 = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NegabinaryError {
    #[error("{q} is outside Δ({n}) = [{lo}, {hi}]")]
    OutOfRange { q: i128, n: u32, lo: i128, hi: i128 },
    #[error("width {width} exceeds the supported maximum {max}")]
    TooWide { width: u32, max: u32 },
    #[error("exhaustive check of width {n} exceeds the cap {cap}")]
    CapExceeded { n: u32, cap: u32 },
    #[error("digit {digit} at position {position} is not 0 or 1")]
    BadDigit { position: usize, digit: u8 },
    #[error("Δ(n) needs n >= 1")]
    ZeroWidth,
}

/// `j(n) = ⅓(−2)^n − ½(−1)^n + ⅙`, computed by the integer recurrence
/// `j(0) = 0`, `j(n+1) = −2 j(n) + [n odd]`.
pub fn j_value(n: u32) -> Result<i128, NegabinaryError> {
    if n > MAX_WIDTH + 1 {
        return Err(NegabinaryError::TooWide {
            width: n,
            max: MAX_WIDTH + 1,
        });
    }
    let mut j = 0i128;
    for i in 0..n {
        j = -2 * j + i128::from(i % 2 == 1);
    }
    Ok(j)
}

/// The closed form of `j(n)` over a common denominator of 6.
pub fn j_closed_form(n: u32) -> i128 {
    let pow_m2 = (-2i128).pow(n);
    let sign = if n.is_multiple_of(2) { 1 } else { -1 };
    let numerator = 2 * pow_m2 - 3 * sign + 1;
    debug_assert_eq!(numerator % 6, 0);
    numerator / 6
}

/// `Δ(n) = [j(k), j(k) + 2^n − 1]` with `k = 2⌊n/2⌋ + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DeltaInterval {
    pub n: u32,
    pub lo: i128,
    pub hi: i128,
}

impl DeltaInterval {
    pub fn contains(&self, q: i128) -> bool {
        self.lo <= q && q <= self.hi
    }

    /// Number of integers in the interval, always `2^n`.
    pub fn cardinality(&self) -> u128 {
        (self.hi - self.lo + 1) as u128
    }
}

impl fmt::Display for DeltaInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

pub fn delta_interval(n: u32) -> Result<DeltaInterval, NegabinaryError> {
    if n == 0 {
        return Err(NegabinaryError::ZeroWidth);
    }
    if n > MAX_WIDTH {
        return Err(NegabinaryError::TooWide {
            width: n,
            max: MAX_WIDTH,
        });
    }
    let k = 2 * (n / 2) + 1;
    let lo = j_value(k)?;
    Ok(DeltaInterval {
        n,
        lo,
        hi: lo + (1i128 << n) - 1,
    })
}

/// A 0/1 digit vector; digit `i` carries weight `(-2)^i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct NegabinaryWord {
    digits: Vec<u8>,
}

impl NegabinaryWord {
    pub fn from_digits(digits: Vec<u8>) -> Result<Self, NegabinaryError> {
        if let Some((position, &digit)) = digits.iter().enumerate().find(|(_, &d)| d > 1) {
            return Err(NegabinaryError::BadDigit { position, digit });
        }
        if digits.len() > MAX_WIDTH as usize {
            return Err(NegabinaryError::TooWide {
                width: digits.len() as u32,
                max: MAX_WIDTH,
            });
        }
        Ok(NegabinaryWord { digits })
    }

    /// The word whose digit `i` is bit `i` of `mask`.
    pub fn from_mask(mask: u64, width: u32) -> Self {
        NegabinaryWord {
            digits: (0..width).map(|i| ((mask >> i) & 1) as u8).collect(),
        }
    }

    pub fn width(&self) -> u32 {
        self.digits.len() as u32
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }
}

impl fmt::Display for NegabinaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, d) in self.digits.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, ")")
    }
}

/// Write `q` in base −2 with exactly `n` digits.
pub fn encode(q: i128, n: u32) -> Result<NegabinaryWord, NegabinaryError> {
    let delta = delta_interval(n)?;
    if !delta.contains(q) {
        return Err(NegabinaryError::OutOfRange {
            q,
            n,
            lo: delta.lo,
            hi: delta.hi,
        });
    }
    let mut digits = Vec::with_capacity(n as usize);
    let mut rest = q;
    while rest != 0 {
        let r = rest.rem_euclid(2);
        digits.push(r as u8);
        rest = (rest - r) / -2;
    }
    assert!(
        digits.len() <= n as usize,
        "{q} in Δ({n}) needed {} digits",
        digits.len()
    );
    digits.resize(n as usize, 0);
    Ok(NegabinaryWord { digits })
}

/// `Σ α_i (−2)^i`.
pub fn decode(word: &NegabinaryWord) -> i128 {
    word.digits
        .iter()
        .rev()
        .fold(0i128, |acc, &d| acc * -2 + i128::from(d))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BijectionReport {
    pub n: u32,
    pub interval: DeltaInterval,
    /// Words enumerated (`2^n`).
    pub words: u64,
    /// Distinct values hit inside `Δ(n)`.
    pub distinct_values: u64,
    /// Values that fell outside `Δ(n)`.
    pub out_of_range: u64,
    pub lo_witness: Option<NegabinaryWord>,
    pub hi_witness: Option<NegabinaryWord>,
    pub passed: bool,
}

/// Enumerate all `2^n` words of width `n` and check they biject onto `Δ(n)`.
pub fn verify_bijection(n: u32, cap: u32) -> Result<BijectionReport, NegabinaryError> {
    if n > cap {
        return Err(NegabinaryError::CapExceeded { n, cap });
    }
    let interval = delta_interval(n)?;
    let total = 1u64 << n;
    let mut seen = vec![false; total as usize];
    let mut distinct = 0u64;
    let mut out_of_range = 0u64;
    let mut lo_witness = None;
    let mut hi_witness = None;
    for mask in 0..total {
        let word = NegabinaryWord::from_mask(mask, n);
        let value = decode(&word);
        if !interval.contains(value) {
            out_of_range += 1;
            continue;
        }
        let slot = &mut seen[(value - interval.lo) as usize];
        if !*slot {
            *slot = true;
            distinct += 1;
        }
        if value == interval.lo {
            lo_witness = Some(word.clone());
        }
        if value == interval.hi {
            hi_witness = Some(word);
        }
    }
    Ok(BijectionReport {
        n,
        interval,
        words: total,
        distinct_values: distinct,
        out_of_range,
        passed: distinct == total && out_of_range == 0,
        lo_witness,
        hi_witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn j_examples() {
        assert_eq!(j_value(0).unwrap(), 0);
        assert_eq!(j_value(1).unwrap(), 0);
        assert_eq!(j_value(2).unwrap(), 1);
        assert_eq!(j_value(3).unwrap(), -2);
        assert_eq!(j_value(4).unwrap(), 5);
        assert_eq!(j_value(5).unwrap(), -10);
        let listed = [0, 1, -2, 5, -10, 21, -42, 85, -170, 341, -682, 1365, -2730];
        for (i, &want) in listed.iter().enumerate() {
            assert_eq!(j_value(i as u32 + 1).unwrap(), want);
        }
    }

    #[test]
    fn recurrence_matches_closed_form() {
        for n in 0..=62 {
            assert_eq!(j_value(n).unwrap(), j_closed_form(n), "n = {n}");
        }
    }

    #[test]
    fn delta_examples() {
        let pairs = [
            (1, 0, 1),
            (2, -2, 1),
            (3, -2, 5),
            (4, -10, 5),
            (5, -10, 21),
            (6, -42, 21),
        ];
        for (n, lo, hi) in pairs {
            assert_eq!(delta_interval(n).unwrap(), DeltaInterval { n, lo, hi });
        }
        assert_eq!(delta_interval(0), Err(NegabinaryError::ZeroWidth));
    }

    #[test]
    fn encode_examples() {
        assert_eq!(encode(0, 4).unwrap().digits(), &[0, 0, 0, 0]);
        assert_eq!(encode(-2, 2).unwrap().digits(), &[0, 1]);
        assert_eq!(encode(3, 3).unwrap().digits(), &[1, 1, 1]);
        assert_eq!(
            encode(6, 3),
            Err(NegabinaryError::OutOfRange {
                q: 6,
                n: 3,
                lo: -2,
                hi: 5
            })
        );
    }

    #[test]
    fn decode_examples() {
        let w = |d: &[u8]| NegabinaryWord::from_digits(d.to_vec()).unwrap();
        assert_eq!(decode(&w(&[1])), 1);
        assert_eq!(decode(&w(&[1, 0, 1])), 5);
        assert_eq!(decode(&w(&[0, 1, 0, 1])), -10);
        assert!(NegabinaryWord::from_digits(vec![0, 2]).is_err());
    }

    #[test]
    fn bijection_examples() {
        let r3 = verify_bijection(3, DEFAULT_VERIFY_CAP).unwrap();
        assert!(r3.passed);
        assert_eq!(
            r3.interval,
            DeltaInterval {
                n: 3,
                lo: -2,
                hi: 5
            }
        );
        assert_eq!(r3.lo_witness.unwrap().digits(), &[0, 1, 0]);
        assert_eq!(r3.hi_witness.unwrap().digits(), &[1, 0, 1]);

        let r1 = verify_bijection(1, DEFAULT_VERIFY_CAP).unwrap();
        assert!(r1.passed);
        assert_eq!((r1.interval.lo, r1.interval.hi), (0, 1));

        let r4 = verify_bijection(4, DEFAULT_VERIFY_CAP).unwrap();
        assert_eq!(r4.lo_witness.unwrap().digits(), &[0, 1, 0, 1]);
        assert!(matches!(
            verify_bijection(21, DEFAULT_VERIFY_CAP),
            Err(NegabinaryError::CapExceeded { .. })
        ));
    }
}
