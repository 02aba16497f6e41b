//! Exact scalar arithmetic and the numeric abstraction used by the solver.
//!
//! All model data (prices, probabilities, claim values) is kept as
//! arbitrary-precision rationals so that equalities between optimal values
//! can be checked with zero tolerance. The solver itself is generic over
//! [`Scalar`] so the same pivoting code runs either exactly (rationals) or
//! in `f64` with an explicit tolerance.

use std::cmp::Ordering;
use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Exact scalar used throughout the model layer.
pub type Rational = BigRational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScalarParseError {
    #[error("empty scalar string")]
    Empty,
    #[error("invalid scalar `{0}`")]
    Invalid(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// Parses a scalar string, either decimal (`"1.25"`, `"-3"`) or rational
/// (`"5/4"`), into an exact rational.
pub fn parse_scalar(text: &str) -> Result<Rational, ScalarParseError> {
    let s = text.trim();
    if s.is_empty() {
        return Err(ScalarParseError::Empty);
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = BigInt::from_str(num.trim())
            .map_err(|_| ScalarParseError::Invalid(text.to_string()))?;
        let den = BigInt::from_str(den.trim())
            .map_err(|_| ScalarParseError::Invalid(text.to_string()))?;
        if den.is_zero() {
            return Err(ScalarParseError::ZeroDenominator(text.to_string()));
        }
        return Ok(Rational::new(num, den));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(ScalarParseError::Invalid(text.to_string()));
        }
        let negative = int_part.trim_start().starts_with('-');
        let int = if int_part == "-" || int_part.is_empty() {
            BigInt::zero()
        } else {
            BigInt::from_str(int_part).map_err(|_| ScalarParseError::Invalid(text.to_string()))?
        };
        let frac = BigInt::from_str(frac_part)
            .map_err(|_| ScalarParseError::Invalid(text.to_string()))?;
        let scale = BigInt::from(10u8).pow(frac_part.len() as u32);
        let magnitude = int.magnitude().clone() * scale.magnitude().clone() + frac.magnitude();
        let numer = if negative {
            -BigInt::from(magnitude)
        } else {
            BigInt::from(magnitude)
        };
        return Ok(Rational::new(numer, scale));
    }
    let int = BigInt::from_str(s).map_err(|_| ScalarParseError::Invalid(text.to_string()))?;
    Ok(Rational::from_integer(int))
}

/// Formats a rational as `"n"` for integers and `"n/d"` otherwise.
pub fn format_scalar(value: &Rational) -> String {
    if value.is_integer() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Serde adapter serializing scalars through their `Display`/`FromStr`
/// forms, so reports carry `"5/4"` in exact mode and decimal strings in
/// float mode.
pub mod scalar_string {
    use serde::{de, Deserialize, Deserializer, Serializer};

    use super::ScalarLike;

    pub fn serialize<T: ScalarLike, S: Serializer>(
        value: &T,
        serializer: S,
    ) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&value.to_scalar_string())
    }

    pub fn deserialize<'de, T: ScalarLike, D: Deserializer<'de>>(
        deserializer: D,
    ) -> Result<T, D::Error> {
        let text = String::deserialize(deserializer)?;
        T::from_scalar_string(&text).map_err(de::Error::custom)
    }

    pub mod option {
        use serde::{de, Deserialize, Deserializer, Serializer};

        use super::ScalarLike;

        pub fn serialize<T: ScalarLike, S: Serializer>(
            value: &Option<T>,
            serializer: S,
        ) -> Result<S::Ok, S::Error> {
            match value {
                Some(v) => serializer.serialize_some(&v.to_scalar_string()),
                None => serializer.serialize_none(),
            }
        }

        pub fn deserialize<'de, T: ScalarLike, D: Deserializer<'de>>(
            deserializer: D,
        ) -> Result<Option<T>, D::Error> {
            let text = Option::<String>::deserialize(deserializer)?;
            text.map(|t| T::from_scalar_string(&t).map_err(de::Error::custom))
                .transpose()
        }
    }

    pub mod map {
        use std::collections::BTreeMap;

        use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

        use super::ScalarLike;

        pub fn serialize<K: Serialize + Ord, T: ScalarLike, S: Serializer>(
            value: &BTreeMap<K, T>,
            serializer: S,
        ) -> Result<S::Ok, S::Error> {
            let stringly: BTreeMap<&K, String> = value
                .iter()
                .map(|(k, v)| (k, v.to_scalar_string()))
                .collect();
            stringly.serialize(serializer)
        }

        pub fn deserialize<'de, K, T, D>(deserializer: D) -> Result<BTreeMap<K, T>, D::Error>
        where
            K: Deserialize<'de> + Ord,
            T: ScalarLike,
            D: Deserializer<'de>,
        {
            let stringly = BTreeMap::<K, String>::deserialize(deserializer)?;
            stringly
                .into_iter()
                .map(|(k, t)| {
                    T::from_scalar_string(&t)
                        .map(|v| (k, v))
                        .map_err(de::Error::custom)
                })
                .collect()
        }
    }

    pub mod vec_map {
        use std::collections::BTreeMap;

        use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

        use super::ScalarLike;

        pub fn serialize<K: Serialize + Ord, T: ScalarLike, S: Serializer>(
            value: &BTreeMap<K, Vec<T>>,
            serializer: S,
        ) -> Result<S::Ok, S::Error> {
            let stringly: BTreeMap<&K, Vec<String>> = value
                .iter()
                .map(|(k, vs)| (k, vs.iter().map(|v| v.to_scalar_string()).collect()))
                .collect();
            stringly.serialize(serializer)
        }

        pub fn deserialize<'de, K, T, D>(deserializer: D) -> Result<BTreeMap<K, Vec<T>>, D::Error>
        where
            K: Deserialize<'de> + Ord,
            T: ScalarLike,
            D: Deserializer<'de>,
        {
            let stringly = BTreeMap::<K, Vec<String>>::deserialize(deserializer)?;
            stringly
                .into_iter()
                .map(|(k, ts)| {
                    ts.iter()
                        .map(|t| T::from_scalar_string(t))
                        .collect::<Result<Vec<T>, _>>()
                        .map(|vs| (k, vs))
                        .map_err(de::Error::custom)
                })
                .collect()
        }
    }
}

/// String conversion hooks shared by exact and float scalars.
pub trait ScalarLike: Sized {
    fn to_scalar_string(&self) -> String;
    fn from_scalar_string(text: &str) -> Result<Self, ScalarParseError>;
}

impl ScalarLike for Rational {
    fn to_scalar_string(&self) -> String {
        format_scalar(self)
    }

    fn from_scalar_string(text: &str) -> Result<Self, ScalarParseError> {
        parse_scalar(text)
    }
}

impl ScalarLike for f64 {
    fn to_scalar_string(&self) -> String {
        let mut buf = ryu_format(*self);
        if !buf.contains('.') && !buf.contains('e') && !buf.contains("inf") && !buf.contains("NaN")
        {
            buf.push_str(".0");
        }
        buf
    }

    fn from_scalar_string(text: &str) -> Result<Self, ScalarParseError> {
        if let Some((num, den)) = text.split_once('/') {
            let num: f64 = num
                .trim()
                .parse()
                .map_err(|_| ScalarParseError::Invalid(text.to_string()))?;
            let den: f64 = den
                .trim()
                .parse()
                .map_err(|_| ScalarParseError::Invalid(text.to_string()))?;
            return Ok(num / den);
        }
        text.trim()
            .parse()
            .map_err(|_| ScalarParseError::Invalid(text.to_string()))
    }
}

fn ryu_format(value: f64) -> String {
    // `{}` on f64 already prints the shortest round-trippable form.
    format!("{value}")
}

/// Arithmetic required by the simplex kernel. Implemented exactly for
/// [`Rational`] and with tolerance-based comparisons for `f64`.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + PartialOrd
    + ScalarLike
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// True when arithmetic is exact and tolerances are meaningless.
    const EXACT: bool;

    fn from_rational(value: &Rational) -> Self;
    fn abs(&self) -> Self;

    /// Sign of `self` treating magnitudes at most `tol` as zero.
    fn sign_within(&self, tol: &Self) -> Ordering;

    fn is_zero_within(&self, tol: &Self) -> bool {
        self.sign_within(tol) == Ordering::Equal
    }

    fn is_positive_within(&self, tol: &Self) -> bool {
        self.sign_within(tol) == Ordering::Greater
    }

    fn is_negative_within(&self, tol: &Self) -> bool {
        self.sign_within(tol) == Ordering::Less
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_rational(value: &Rational) -> Self {
        value.clone()
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }

    fn sign_within(&self, _tol: &Self) -> Ordering {
        self.cmp(&<Rational as Zero>::zero())
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_rational(value: &Rational) -> Self {
        let numer = value.numer();
        let denom = value.denom();
        // Convert through i128 when possible to avoid intermediate rounding.
        match (i128::try_from(numer), i128::try_from(denom)) {
            (Ok(n), Ok(d)) => n as f64 / d as f64,
            _ => {
                let n: f64 = numer.to_string().parse().unwrap_or(f64::NAN);
                let d: f64 = denom.to_string().parse().unwrap_or(f64::NAN);
                n / d
            }
        }
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }

    fn sign_within(&self, tol: &Self) -> Ordering {
        if *self > *tol {
            Ordering::Greater
        } else if *self < -*tol {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }
}

/// Convenience constructor for integer rationals.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Convenience constructor for `n/d` rationals.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimals_and_fractions() {
        assert_eq!(parse_scalar("1.25").unwrap(), ratio(5, 4));
        assert_eq!(parse_scalar("5/4").unwrap(), ratio(5, 4));
        assert_eq!(parse_scalar("-0.5").unwrap(), ratio(-1, 2));
        assert_eq!(parse_scalar("-3/6").unwrap(), ratio(-1, 2));
        assert_eq!(parse_scalar(" 7 ").unwrap(), rat(7));
        assert_eq!(parse_scalar("-.5").unwrap(), ratio(-1, 2));
    }

    #[test]
    fn rejects_malformed_scalars() {
        assert!(parse_scalar("").is_err());
        assert!(parse_scalar("1/0").is_err());
        assert!(parse_scalar("1.2.3").is_err());
        assert!(parse_scalar("abc").is_err());
        assert!(parse_scalar("1.-2").is_err());
    }

    #[test]
    fn formats_integers_without_denominator() {
        assert_eq!(format_scalar(&rat(3)), "3");
        assert_eq!(format_scalar(&ratio(6, 2)), "3");
        assert_eq!(format_scalar(&ratio(5, 4)), "5/4");
        assert_eq!(format_scalar(&ratio(-5, 4)), "-5/4");
    }

    #[test]
    fn round_trips_through_strings() {
        for text in ["5/4", "-17/3", "0", "12"] {
            let value = parse_scalar(text).unwrap();
            assert_eq!(format_scalar(&value), text);
        }
    }
}
