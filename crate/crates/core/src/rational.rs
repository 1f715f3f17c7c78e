//! Exact rational arithmetic helpers.
//!
//! All probabilities in this crate are `BigRational` values. Decimal input
//! ("0.32") is parsed as an exact decimal fraction, never through a float,
//! and decimal output is produced by round-half-even at a caller-chosen
//! number of places with the exact value always retained alongside.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseRationalError {
    #[error("empty string is not a number")]
    Empty,
    #[error("invalid number `{0}`")]
    Invalid(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// Shorthand for small literal rationals.
pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Parses `"0.32"`, `"-1.5"`, `".07"`, `"3"` or ratio form `"23/100"`.
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    if let Some((n, d)) = s.split_once('/') {
        let numer: BigInt = n
            .trim()
            .parse()
            .map_err(|_| ParseRationalError::Invalid(s.to_string()))?;
        let denom: BigInt = d
            .trim()
            .parse()
            .map_err(|_| ParseRationalError::Invalid(s.to_string()))?;
        if denom.is_zero() {
            return Err(ParseRationalError::ZeroDenominator(s.to_string()));
        }
        return Ok(Rational::new(numer, denom));
    }

    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(ParseRationalError::Invalid(s.to_string()));
    }
    if !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return Err(ParseRationalError::Invalid(s.to_string()));
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits
            .parse()
            .map_err(|_| ParseRationalError::Invalid(s.to_string()))?
    };
    let denom = BigInt::from(10u32).pow(frac_part.len() as u32);
    Ok(Rational::new(numer * sign, denom))
}

/// Renders `x` with exactly `places` decimal digits, rounding half to even.
pub fn format_decimal(x: &Rational, places: u32) -> String {
    let scale = BigInt::from(10u32).pow(places);
    let scaled = x * Rational::from_integer(scale);
    let floor = scaled.floor().to_integer();
    let remainder = &scaled - Rational::from_integer(floor.clone());
    let half = rat(1, 2);
    let rounded = if remainder > half {
        floor + 1
    } else if remainder < half {
        floor
    } else if (&floor % 2) == BigInt::zero() {
        floor
    } else {
        floor + 1
    };

    let negative = rounded.is_negative();
    let mut digits = rounded.abs().to_string();
    let places = places as usize;
    if digits.len() <= places {
        digits = format!("{}{}", "0".repeat(places + 1 - digits.len()), digits);
    }
    let point = digits.len() - places;
    let (int_digits, frac_digits) = digits.split_at(point);
    let body = if places == 0 {
        int_digits.to_string()
    } else {
        format!("{int_digits}.{frac_digits}")
    };
    // never render "-0.00"
    if negative && body.chars().any(|c| c.is_ascii_digit() && c != '0') {
        format!("-{body}")
    } else {
        body
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RenormalizeError {
    #[error("negative entry {0}")]
    NegativeEntry(String),
    #[error("entries sum to {0}, outside the 1e-9 tolerance around 1")]
    BadSum(String),
}

/// Checks that `values` form a probability vector. A sum that deviates from
/// one by at most 1e-9 (decimal truncation in published tables) is corrected
/// by exact scaling; larger deviations are rejected.
pub fn renormalize_unit_sum(values: &mut [Rational]) -> Result<(), RenormalizeError> {
    for v in values.iter() {
        if v.is_negative() {
            return Err(RenormalizeError::NegativeEntry(format_ratio(v)));
        }
    }
    let sum: Rational = values.iter().sum();
    if sum.is_one() {
        return Ok(());
    }
    let tolerance = Rational::new(BigInt::one(), BigInt::from(1_000_000_000u64));
    if (&sum - Rational::one()).abs() > tolerance {
        return Err(RenormalizeError::BadSum(format_ratio(&sum)));
    }
    for v in values.iter_mut() {
        *v /= &sum;
    }
    Ok(())
}

/// Renders the exact value, `"n"` for integers and `"n/d"` otherwise.
pub fn format_ratio(x: &Rational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}
