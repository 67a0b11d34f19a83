//! Parsing and formatting of exact rationals.
//!
//! Decimal strings are read as exact decimal fractions (`"0.49"` is
//! literally `49/100`), and the default serialization is the lossless
//! `num/den` form. Decimal output exists only as an explicit, lossy opt-in.

use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Parses a rational from `"num/den"`, a decimal string, or a bare integer.
///
/// Accepted forms: `"3/4"`, `"0.75"`, `".75"`, `"3."`, `"3"`, each with an
/// optional leading sign. Whitespace around the value is ignored.
pub fn parse_ratio(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational literal".into()));
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_bigint(num)?;
        let den = parse_bigint(den)?;
        if den.is_zero() {
            return Err(Error::Parse(format!("zero denominator in `{s}`")));
        }
        return Ok(BigRational::new(num, den));
    }
    let (sign, digits) = match s.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(Error::Parse(format!("`{s}` is not a number")));
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit())
        || !frac_part.bytes().all(|b| b.is_ascii_digit())
    {
        return Err(Error::Parse(format!("`{s}` is not a number")));
    }
    let int: BigInt = if int_part.is_empty() {
        BigInt::zero()
    } else {
        BigInt::from_str(int_part).map_err(|e| Error::Parse(format!("`{s}`: {e}")))?
    };
    let mut value = BigRational::from_integer(int);
    if !frac_part.is_empty() {
        let num = BigInt::from_str(frac_part).map_err(|e| Error::Parse(format!("`{s}`: {e}")))?;
        let den = BigInt::from(10u32).pow(frac_part.len() as u32);
        value += BigRational::new(num, den);
    }
    if sign < 0 {
        value = -value;
    }
    Ok(value)
}

fn parse_bigint(s: &str) -> Result<BigInt> {
    BigInt::from_str(s.trim()).map_err(|e| Error::Parse(format!("`{s}`: {e}")))
}

/// Formats a rational as the canonical lossless `num/den` string.
///
/// The denominator is always printed, so integers come out as `"5/1"`;
/// this keeps emitted tables uniformly re-parseable as exact values.
pub fn format_ratio(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Formats a rational as a decimal rounded to `digits` fractional digits
/// (ties away from zero). Lossy; intended for display only.
pub fn format_decimal(q: &BigRational, digits: u32) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = (q * BigRational::from_integer(scale.clone())).round();
    let scaled = scaled.to_integer();
    let negative = scaled.is_negative();
    let mag = scaled.magnitude().to_string();
    let digits = digits as usize;
    let (int_part, frac_part) = if digits == 0 {
        (mag, String::new())
    } else if mag.len() <= digits {
        (
            String::from("0"),
            format!("{:0>width$}", mag, width = digits),
        )
    } else {
        let split = mag.len() - digits;
        (mag[..split].to_string(), mag[split..].to_string())
    };
    let sign = if negative && (int_part != "0" || frac_part.bytes().any(|b| b != b'0')) {
        "-"
    } else {
        ""
    };
    if frac_part.is_empty() {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac_part}")
    }
}

/// Convenience constructor for small rationals used throughout the tests.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// The rational 1/2, the majority threshold that keeps appearing.
pub fn one_half() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(2))
}
