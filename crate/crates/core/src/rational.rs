//! Exact rational numbers in JSON: `"p/q"` strings, with decimal strings and
//! plain JSON numbers accepted on input.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("not a rational number: {0:?}")]
pub struct RationalParseError(pub String);

/// Parses `"p/q"`, an integer, or a finite decimal such as `"-1.25"`.
pub fn parse_rational(s: &str) -> Result<BigRational, RationalParseError> {
    let t = s.trim();
    let err = || RationalParseError(s.to_string());
    if t.contains('/') {
        let q = BigRational::from_str(t).map_err(|_| err())?;
        return Ok(q);
    }
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| err())?),
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() && frac.is_empty()
        || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())
    {
        return Err(err());
    }
    let all = format!("{int}{frac}");
    let numer = BigInt::from_str(if all.is_empty() { "0" } else { &all }).map_err(|_| err())?;
    let scale = exponent - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut q = BigRational::from_integer(numer);
    if scale >= 0 {
        q *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        q /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if neg { -q } else { q })
}

/// `"p/q"`, or `"p"` for integers.
pub fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Serde wrapper for an exact rational.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Q(pub BigRational);

impl Q {
    pub fn int(n: i64) -> Q {
        Q(BigRational::from_integer(BigInt::from(n)))
    }
}

impl From<BigRational> for Q {
    fn from(q: BigRational) -> Self {
        Q(q)
    }
}

impl fmt::Display for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(&self.0))
    }
}

impl Serialize for Q {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

struct QVisitor;

impl Visitor<'_> for QVisitor {
    type Value = Q;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a rational as \"p/q\", a decimal string, or a number")
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Q, E> {
        parse_rational(v).map(Q).map_err(E::custom)
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Q, E> {
        Ok(Q::int(v))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Q, E> {
        Ok(Q(BigRational::from_integer(BigInt::from(v))))
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<Q, E> {
        if !v.is_finite() {
            return Err(E::custom("non-finite coordinate"));
        }
        // The shortest round-trip decimal is what the user wrote.
        parse_rational(&format!("{v:?}")).map(Q).map_err(E::custom)
    }
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        d.deserialize_any(QVisitor)
    }
}

/// Sign of a rational as −1, 0 or 1.
pub fn signum(q: &BigRational) -> i32 {
    if q.is_zero() {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}
