//! Exact rational numbers and their decimal text form.
//!
//! Every input value, output value and formula coefficient is a
//! [`Rational`]. Text uses plain decimals (`12`, `-3`, `0.25`) whenever the
//! value has a terminating decimal expansion and `p/q` otherwise.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision exact rational.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid number `{text}`")]
pub struct NumberError {
    pub text: String,
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ints(values: &[i64]) -> Vec<Rational> {
    values.iter().map(|&v| int(v)).collect()
}

/// Parses `12`, `-3`, `+4`, `0.25`, `-.5`, `7/3` or `-7/3`.
pub fn parse_number(text: &str) -> Result<Rational, NumberError> {
    let err = || NumberError {
        text: text.to_string(),
    };
    let s = text.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n = parse_integer(num).ok_or_else(err)?;
        let d = parse_integer(den).ok_or_else(err)?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(n, d));
    }
    let (neg, body) = match s.as_bytes().first() {
        Some(b'-') => (true, &s[1..]),
        Some(b'+') => (false, &s[1..]),
        _ => (false, s),
    };
    let (whole, frac) = match body.split_once('.') {
        Some((w, f)) => (w, f),
        None => (body, ""),
    };
    if whole.is_empty() && frac.is_empty() {
        return Err(err());
    }
    if !whole.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(err());
    }
    let mut digits = String::with_capacity(whole.len() + frac.len());
    digits.push_str(whole);
    digits.push_str(frac);
    let mantissa = BigInt::parse_bytes(digits.as_bytes(), 10).ok_or_else(err)?;
    let scale = num_traits::pow(BigInt::from(10u8), frac.len());
    let value = Rational::new(mantissa, scale);
    Ok(if neg { -value } else { value })
}

fn parse_integer(s: &str) -> Option<BigInt> {
    let s = s.trim();
    let body = s.strip_prefix('+').unwrap_or(s);
    let digits = body.strip_prefix('-').unwrap_or(body);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    BigInt::parse_bytes(body.as_bytes(), 10)
}

/// Formats a rational as an integer, a terminating decimal, or `p/q`.
pub fn format_number(value: &Rational) -> String {
    if value.is_integer() {
        return value.numer().to_string();
    }
    let den = value.denom();
    let two = BigInt::from(2u8);
    let five = BigInt::from(5u8);
    let (mut rest, mut twos, mut fives) = (den.clone(), 0usize, 0usize);
    while rest.is_even() {
        rest /= &two;
        twos += 1;
    }
    while (&rest % &five).is_zero() {
        rest /= &five;
        fives += 1;
    }
    if !rest.is_one() {
        let mut out = String::new();
        let _ = write!(out, "{}/{}", value.numer(), den);
        return out;
    }
    let places = twos.max(fives);
    let scaled = value * Rational::from_integer(num_traits::pow(BigInt::from(10u8), places));
    let digits = scaled.numer().abs().to_string();
    let digits = if digits.len() <= places {
        let mut padded = "0".repeat(places + 1 - digits.len());
        padded.push_str(&digits);
        padded
    } else {
        digits
    };
    let split = digits.len() - places;
    let mut out = String::new();
    if scaled.numer().sign() == Sign::Minus {
        out.push('-');
    }
    out.push_str(&digits[..split]);
    out.push('.');
    out.push_str(&digits[split..]);
    out
}

/// Space-separated decimal rendering of a vector, as used in `.in` files.
pub fn format_numbers<'a>(values: impl IntoIterator<Item = &'a Rational>) -> String {
    let mut out = String::new();
    for (i, v) in values.into_iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(&format_number(v));
    }
    out
}

pub fn parse_numbers(line: &str) -> Result<Vec<Rational>, NumberError> {
    line.split_whitespace().map(parse_number).collect()
}

/// Lossy conversion for reporting only.
pub fn to_f64(value: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    value.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn formats_integers_decimals_and_fractions() {
        assert_eq!(format_number(&int(-42)), "-42");
        assert_eq!(format_number(&q(1, 10)), "0.1");
        assert_eq!(format_number(&q(-1, 4)), "-0.25");
        assert_eq!(format_number(&q(123, 100)), "1.23");
        assert_eq!(format_number(&q(1, 3)), "1/3");
        assert_eq!(format_number(&q(-7, 6)), "-7/6");
    }

    #[test]
    fn parses_all_forms() {
        assert_eq!(parse_number("17").unwrap(), int(17));
        assert_eq!(parse_number("+17").unwrap(), int(17));
        assert_eq!(parse_number("-0.5").unwrap(), q(-1, 2));
        assert_eq!(parse_number(".5").unwrap(), q(1, 2));
        assert_eq!(parse_number("-7/3").unwrap(), q(-7, 3));
        assert_eq!(parse_number(" 3 ").unwrap(), int(3));
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "-", ".", "1e5", "abc", "1/0", "1.2.3", "--1", "nan", "inf"] {
            assert!(parse_number(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn vector_lines() {
        let v = parse_numbers("2 2  2\n").unwrap();
        assert_eq!(v, ints(&[2, 2, 2]));
        assert_eq!(format_numbers(&v), "2 2 2");
    }

    proptest::proptest! {
        #[test]
        fn text_round_trip(n in -100_000i64..100_000, d in 1i64..2_000) {
            let v = q(n, d);
            proptest::prop_assert_eq!(parse_number(&format_number(&v)).unwrap(), v);
        }
    }
}
