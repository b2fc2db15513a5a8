//! Exact rational helpers and the `"p/q"` text encoding used at every I/O
//! boundary of the crate.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Exact rational scalar used throughout the crate.
pub type Q = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed rational literal `{0}` (expected `p/q` or `p`)")]
pub struct ParseRatioError(pub String);

/// Parses `"p/q"` or `"p"` into an exact rational. Whitespace around the
/// parts is ignored; a zero denominator is rejected.
pub fn parse_ratio(text: &str) -> Result<Q, ParseRatioError> {
    let err = || ParseRatioError(text.to_string());
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text.trim(), "1"),
    };
    let num: BigInt = num.parse().map_err(|_| err())?;
    let den: BigInt = den.parse().map_err(|_| err())?;
    if den.is_zero() {
        return Err(err());
    }
    Ok(Q::new(num, den))
}

/// Formats a rational as `"p/q"` in lowest terms, always with an explicit
/// denominator so the encoding is uniform.
pub fn format_ratio(value: &Q) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

/// Display adapter producing the `"p/q"` encoding.
pub struct RatioDisplay<'a>(pub &'a Q);

impl fmt::Display for RatioDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

pub fn from_u64(value: u64) -> Q {
    Q::from_integer(BigInt::from(value))
}

pub fn from_biguint(value: &BigUint) -> Q {
    Q::from_integer(BigInt::from(value.clone()))
}

/// `2^exp` for any signed exponent.
pub fn pow2(exp: i64) -> Q {
    let magnitude = BigInt::one() << exp.unsigned_abs();
    if exp >= 0 {
        Q::from_integer(magnitude)
    } else {
        Q::new(BigInt::one(), magnitude)
    }
}

/// Least integer strictly greater than `value`.
pub fn next_integer_above(value: &Q) -> BigInt {
    value.floor().to_integer() + 1
}

/// `z` with `value = 2^z`, if `value` is a power of two.
pub fn exact_log2(value: &Q) -> Option<i64> {
    let is_pow2 = |x: &BigInt| x.sign() == num_bigint::Sign::Plus && (x & (x - 1u32)).is_zero();
    let (num, den) = (value.numer(), value.denom());
    if !is_pow2(num) || !is_pow2(den) {
        return None;
    }
    Some(num.bits() as i64 - den.bits() as i64)
}

/// Serde adapter: `BigRational` as a `"p/q"` string.
pub mod serde_ratio {
    use super::*;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_ratio(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let text = String::deserialize(d)?;
        parse_ratio(&text).map_err(D::Error::custom)
    }
}

/// Serde adapter: `Vec<BigRational>` as a list of `"p/q"` strings.
pub mod serde_ratio_vec {
    use super::*;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(values: &[Q], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(values.iter().map(format_ratio))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Q>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|t| parse_ratio(t).map_err(D::Error::custom))
            .collect()
    }
}

/// Serde adapter: `BigUint` as a decimal string (values outgrow JSON numbers).
pub mod serde_biguint {
    use super::*;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&value.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fraction_and_integer() {
        assert_eq!(parse_ratio("2/5").unwrap(), Q::new(2.into(), 5.into()));
        assert_eq!(parse_ratio("4/10").unwrap(), Q::new(2.into(), 5.into()));
        assert_eq!(parse_ratio("-3").unwrap(), Q::from_integer((-3).into()));
        assert!(parse_ratio("1/0").is_err());
        assert!(parse_ratio("x/2").is_err());
        assert!(parse_ratio("").is_err());
    }

    #[test]
    fn exact_log2_of_powers() {
        for z in -70..70 {
            assert_eq!(exact_log2(&pow2(z)), Some(z));
        }
        assert_eq!(exact_log2(&parse_ratio("3/4").unwrap()), None);
        assert_eq!(exact_log2(&parse_ratio("-2").unwrap()), None);
        assert_eq!(exact_log2(&Q::zero()), None);
    }

    #[test]
    fn formats_with_explicit_denominator() {
        assert_eq!(format_ratio(&from_u64(3)), "3/1");
        assert_eq!(format_ratio(&pow2(-5)), "1/32");
        assert_eq!(RatioDisplay(&pow2(4)).to_string(), "16/1");
    }

    #[test]
    fn next_integer_is_strict() {
        assert_eq!(next_integer_above(&parse_ratio("5/2").unwrap()), 3.into());
        assert_eq!(next_integer_above(&parse_ratio("3").unwrap()), 4.into());
    }
}
