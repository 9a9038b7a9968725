//! Exact rational arithmetic helpers.
//!
//! Every capacity, cost, weight, and objective in this crate is a
//! [`Rational`]: an arbitrary-precision fraction kept in reduced form with a
//! positive denominator. Several constructions use capacities like `n/(n+1)`
//! whose feasibility boundaries floating point cannot represent, so rationals
//! are load-bearing, not a style choice.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use thiserror::Error;

/// Arbitrary-precision rational number (always reduced, denominator > 0).
pub type Rational = BigRational;

/// Build a rational from an integer.
pub fn rat(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// Build a rational from a numerator/denominator pair.
///
/// # Panics
/// Panics if `den == 0`; intended for literals in code and tests.
pub fn ratio(num: i64, den: i64) -> Rational {
    assert!(den != 0, "zero denominator");
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Errors from parsing the `"p/q"` wire encoding.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid integer in rational literal: {0:?}")]
    BadInteger(String),
    #[error("zero denominator in rational literal")]
    ZeroDenominator,
}

/// Parse a rational from its wire form: `"p"` or `"p/q"` with optional sign.
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    let parse_int = |t: &str| -> Result<BigInt, ParseRationalError> {
        t.trim()
            .parse::<BigInt>()
            .map_err(|_| ParseRationalError::BadInteger(t.to_string()))
    };
    match s.split_once('/') {
        None => Ok(BigRational::from_integer(parse_int(s)?)),
        Some((p, q)) => {
            let num = parse_int(p)?;
            let den = parse_int(q)?;
            if den.is_zero() {
                return Err(ParseRationalError::ZeroDenominator);
            }
            Ok(BigRational::new(num, den))
        }
    }
}

/// Format a rational in its wire form: `"p"` for integers, else `"p/q"`.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Floor of `a / b` as a big integer (`b > 0` expected).
pub fn floor_div(a: &Rational, b: &Rational) -> BigInt {
    assert!(b.is_positive(), "floor_div by non-positive rational");
    (a / b).floor().to_integer()
}

/// Least common multiple of two positive big integers.
pub fn lcm_bigint(a: &BigInt, b: &BigInt) -> BigInt {
    num::integer::lcm(a.clone(), b.clone())
}
