//! Real literals that remember how they were written, so `1/3` prints back
//! as `1/3` instead of a decimal expansion.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NumberError {
    #[error("`{0}` is not a number")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

#[derive(Clone, Copy, Debug)]
pub enum Real {
    /// `num/den` kept unreduced.
    Rational { num: i64, den: u64 },
    Decimal(f64),
}

impl Real {
    pub fn rational(num: i64, den: u64) -> Self {
        assert!(den != 0, "zero denominator");
        Real::Rational { num, den }
    }

    pub fn decimal(value: f64) -> Self {
        assert!(value.is_finite(), "non-finite literal");
        Real::Decimal(value)
    }

    pub fn value(self) -> f64 {
        match self {
            Real::Rational { num, den } => num as f64 / den as f64,
            Real::Decimal(v) => v,
        }
    }
}

// Decimals compare bitwise so that a formatted literal reparses to an equal value.
impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Real::Rational { num: a, den: b }, Real::Rational { num: c, den: d }) => {
                a == c && b == d
            }
            (Real::Decimal(a), Real::Decimal(b)) => a.to_bits() == b.to_bits(),
            _ => false,
        }
    }
}

impl Eq for Real {}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Real::Rational { num, den } => write!(f, "{num}/{den}"),
            // `{}` on f64 is the shortest representation that round-trips.
            Real::Decimal(v) => write!(f, "{v}"),
        }
    }
}

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

fn is_decimal_literal(s: &str) -> bool {
    let body = s.strip_prefix(['-', '+']).unwrap_or(s);
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], Some(&body[i + 1..])),
        None => (body, None),
    };
    let mut parts = mantissa.splitn(2, '.');
    let int = parts.next().unwrap_or("");
    let frac = parts.next();
    let digits = |t: &str| t.chars().all(|c| c.is_ascii_digit());
    let mantissa_ok = digits(int)
        && frac.is_none_or(digits)
        && (!int.is_empty() || frac.is_some_and(|f| !f.is_empty()));
    let exponent_ok = exponent.is_none_or(|e| {
        let e = e.strip_prefix(['-', '+']).unwrap_or(e);
        !e.is_empty() && digits(e)
    });
    mantissa_ok && exponent_ok
}

impl FromStr for Real {
    type Err = NumberError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some((n, d)) = s.split_once('/') {
            let num: i64 = n.parse().map_err(|_| NumberError::Malformed(s.into()))?;
            let den: u64 = d.parse().map_err(|_| NumberError::Malformed(s.into()))?;
            if den == 0 {
                return Err(NumberError::ZeroDenominator(s.into()));
            }
            return Ok(Real::Rational { num, den });
        }
        if !is_decimal_literal(s) {
            return Err(NumberError::Malformed(s.into()));
        }
        let v: f64 = s.parse().map_err(|_| NumberError::Malformed(s.into()))?;
        if !v.is_finite() {
            return Err(NumberError::Malformed(s.into()));
        }
        Ok(Real::Decimal(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_rationals_and_decimals() {
        assert_eq!("1/3".parse::<Real>().unwrap(), Real::rational(1, 3));
        assert_eq!("1/3".parse::<Real>().unwrap().value(), 1.0 / 3.0);
        assert_eq!("45".parse::<Real>().unwrap(), Real::decimal(45.0));
        assert_eq!("-22.5".parse::<Real>().unwrap().value(), -22.5);
        assert_eq!("1e-3".parse::<Real>().unwrap().value(), 1e-3);
        assert_eq!(".5".parse::<Real>().unwrap().value(), 0.5);
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "abc", "1/0", "1/-3", "nan", "inf", "1.2.3", "--1", "1e", "0x10", "1/3/4"] {
            assert!(bad.parse::<Real>().is_err(), "{bad} parsed");
        }
        assert_eq!(
            "2/0".parse::<Real>(),
            Err(NumberError::ZeroDenominator("2/0".into()))
        );
    }

    #[test]
    fn rational_prints_exactly() {
        assert_eq!(Real::rational(1, 3).to_string(), "1/3");
        assert_eq!(Real::rational(2, 4).to_string(), "2/4");
        assert_eq!(Real::decimal(45.0).to_string(), "45");
    }

    proptest! {
        #[test]
        fn display_round_trips(v in proptest::num::f64::NORMAL | proptest::num::f64::ZERO,
                               n in -1000i64..1000, d in 1u64..1000) {
            let dec = Real::decimal(v);
            prop_assert_eq!(dec.to_string().parse::<Real>().unwrap(), dec);
            let rat = Real::rational(n, d);
            prop_assert_eq!(rat.to_string().parse::<Real>().unwrap(), rat);
        }
    }
}
