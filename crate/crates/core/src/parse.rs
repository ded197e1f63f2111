//! Exact parsing of degree inputs. Accepts integers, `p/q` fractions and finite
//! decimals; a decimal such as `-2.75` is read as the rational `-11/4`, never
//! through a binary float.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("cannot read {0:?} as an exact rational")]
    Rational(String),
    #[error("cannot read {0:?} as a place p:n")]
    Place(String),
}

fn digits(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

pub fn parse_rational(input: &str) -> Result<BigRational, ParseError> {
    let err = || ParseError::Rational(input.to_string());
    let trimmed = input.trim().replace('−', "-");
    let (negative, body) = match trimmed.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, trimmed.strip_prefix('+').unwrap_or(&trimmed)),
    };
    let value = if let Some((num, den)) = body.split_once('/') {
        if !digits(num) || !digits(den) {
            return Err(err());
        }
        let den = BigInt::from_str_radix(den, 10).map_err(|_| err())?;
        if den.is_zero() {
            return Err(err());
        }
        BigRational::new(BigInt::from_str_radix(num, 10).map_err(|_| err())?, den)
    } else {
        let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
        if !(digits(int_part) || (int_part.is_empty() && digits(frac_part)))
            || !(frac_part.is_empty() || digits(frac_part))
        {
            return Err(err());
        }
        let all = format!("{int_part}{frac_part}");
        let num = BigInt::from_str_radix(&all, 10).map_err(|_| err())?;
        let den = BigInt::from(10u32).pow(frac_part.len() as u32);
        BigRational::new(num, den)
    };
    Ok(if negative { -value } else { value })
}

/// `p:n`, a prime place with integer multiplicity.
pub fn parse_place(input: &str) -> Result<(u64, i64), ParseError> {
    let err = || ParseError::Place(input.to_string());
    let (p, n) = input.trim().split_once(':').ok_or_else(err)?;
    let p = p.trim().parse::<u64>().map_err(|_| err())?;
    let n = n
        .trim()
        .replace('−', "-")
        .parse::<i64>()
        .map_err(|_| err())?;
    Ok((p, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma::ratio;

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("-5/2").unwrap(), ratio(-5, 2));
        assert_eq!(parse_rational("−5/2").unwrap(), ratio(-5, 2));
        assert_eq!(parse_rational("-2.75").unwrap(), ratio(-11, 4));
        assert_eq!(parse_rational("3").unwrap(), ratio(3, 1));
        assert_eq!(parse_rational("+0.5").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational(".25").unwrap(), ratio(1, 4));
        assert_eq!(parse_rational("4.").unwrap(), ratio(4, 1));
        assert_eq!(parse_rational("0.1").unwrap(), ratio(1, 10));
        for bad in ["", "-", "1/0", "1e3", "a", "1.2.3", "1/-2", "."] {
            assert!(parse_rational(bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn places() {
        assert_eq!(parse_place("2:-2").unwrap(), (2, -2));
        assert_eq!(parse_place("3:1").unwrap(), (3, 1));
        assert!(parse_place("3").is_err());
        assert!(parse_place("x:1").is_err());
    }
}
