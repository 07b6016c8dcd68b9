//! Text formats and small helpers for the exact rational scalar.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Rational, Result};

/// Parses `"p/q"` or `"p"` with an optional leading `-`.
///
/// The result is canonical (reduced, positive denominator). Surrounding
/// whitespace is ignored.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::Parse(format!("invalid rational {text:?}"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    let num = parse_signed_integer(num).ok_or_else(bad)?;
    let den = match den {
        Some(d) => {
            if d.is_empty() || !d.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            d.parse::<BigInt>().map_err(|_| bad())?
        }
        None => BigInt::one(),
    };
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {text:?}")));
    }
    Ok(Rational::new(num, den))
}

fn parse_signed_integer(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix('-').unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Converts a decimal literal such as `-0.125` or `2.5e-3` to the rational
/// it denotes, digit for digit.
pub fn parse_decimal(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::Parse(format!("invalid decimal {text:?}"));
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: i32 = s[i + 1..].parse().map_err(|_| bad())?;
            (&s[..i], e)
        }
        None => (s, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(digits.parse::<BigInt>().map_err(|_| bad())?);
    let scale = exponent - frac_part.len() as i32;
    let ten = Rational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= num_traits::pow(ten, scale as usize);
    } else {
        value /= num_traits::pow(ten, (-scale) as usize);
    }
    Ok(if negative { -value } else { value })
}

/// Accepts either rational text or, when `allow_decimal` is set, a decimal
/// literal.
pub fn parse_number(text: &str, allow_decimal: bool) -> Result<Rational> {
    match parse_rational(text) {
        Ok(q) => Ok(q),
        Err(e) if !allow_decimal => {
            if text.contains(['.', 'e', 'E']) {
                Err(Error::BackendMismatch(format!(
                    "decimal {text:?} is not accepted by the exact backend; write it as p/q"
                )))
            } else {
                Err(e)
            }
        }
        Err(_) => parse_decimal(text),
    }
}

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn is_integer(q: &Rational) -> bool {
    q.denom().is_one()
}

/// `q` as a machine integer when it is an integer that fits.
pub fn as_i64(q: &Rational) -> Option<i64> {
    if is_integer(q) {
        q.numer().to_i64()
    } else {
        None
    }
}

/// `q` as a nonnegative machine index when it is one.
pub fn as_index(q: &Rational) -> Option<usize> {
    as_i64(q).and_then(|n| usize::try_from(n).ok())
}

/// Smallest integer `>= q`.
pub fn ceil(q: &Rational) -> BigInt {
    let (quot, rem) = q.numer().div_mod_floor(q.denom());
    if rem.is_zero() {
        quot
    } else {
        quot + 1
    }
}

/// Largest integer `<= q`.
pub fn floor(q: &Rational) -> BigInt {
    q.numer().div_floor(q.denom())
}

pub fn factorial(n: usize) -> Rational {
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc *= i;
    }
    Rational::from_integer(acc)
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        if q.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Exact rational value of a finite float.
pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_prints_canonically() {
        assert_eq!(parse_rational("6/4").unwrap(), rat(3, 2));
        assert_eq!(parse_rational("-7").unwrap(), int(-7));
        assert_eq!(parse_rational(" 0/5 ").unwrap(), int(0));
        assert_eq!(parse_rational("-3/9").unwrap().to_string(), "-1/3");
        assert_eq!(int(12).to_string(), "12");
    }

    #[test]
    fn rejects_malformed_rationals() {
        for s in ["", "1/0", "1/", "/2", "1.5", "--1", "1/-2", "a/b", "+1"] {
            assert!(parse_rational(s).is_err(), "{s:?} should not parse");
        }
    }

    #[test]
    fn decimals_convert_verbatim() {
        assert_eq!(parse_decimal("0.1").unwrap(), rat(1, 10));
        assert_eq!(parse_decimal("-2.50").unwrap(), rat(-5, 2));
        assert_eq!(parse_decimal("1.25e2").unwrap(), int(125));
        assert_eq!(parse_decimal("5e-3").unwrap(), rat(1, 200));
        assert!(parse_decimal(".").is_err());
        assert!(parse_decimal("1.2.3").is_err());
    }

    #[test]
    fn exact_mode_refuses_decimals() {
        assert!(matches!(
            parse_number("0.5", false),
            Err(Error::BackendMismatch(_))
        ));
        assert_eq!(parse_number("0.5", true).unwrap(), rat(1, 2));
        assert_eq!(parse_number("1/2", false).unwrap(), rat(1, 2));
    }

    #[test]
    fn ceil_and_floor() {
        assert_eq!(ceil(&rat(1, 2)), BigInt::from(1));
        assert_eq!(ceil(&rat(-1, 2)), BigInt::from(0));
        assert_eq!(ceil(&int(3)), BigInt::from(3));
        assert_eq!(floor(&rat(-1, 2)), BigInt::from(-1));
        assert_eq!(floor(&rat(7, 3)), BigInt::from(2));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn text_round_trip(p in -10_000i64..10_000, q in 1i64..10_000) {
                let x = rat(p, q);
                prop_assert_eq!(parse_rational(&x.to_string()).unwrap(), x);
            }
        }
    }
}
