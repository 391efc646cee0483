//! Exact rational helpers shared by the ledger, the oracle and the CLI.
//!
//! Every coefficient and discrepancy in this crate is a [`Rational`]; there is
//! no floating point anywhere on the computation path.

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RationalParseError {
    #[error("empty rational literal")]
    Empty,
    #[error("malformed rational literal `{0}` (expected `p` or `p/q`)")]
    Malformed(String),
    #[error("denominator must be positive in `{0}`")]
    NonPositiveDenominator(String),
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Parses `p` or `p/q` with an optional leading `-` on `p` and `q > 0`.
pub fn parse_rational(text: &str) -> Result<Rational, RationalParseError> {
    if text.is_empty() {
        return Err(RationalParseError::Empty);
    }
    let (numer, denom) = match text.split_once('/') {
        Some((p, q)) => (p, Some(q)),
        None => (text, None),
    };
    let numer = parse_signed(numer).ok_or_else(|| RationalParseError::Malformed(text.into()))?;
    let denom = match denom {
        None => BigInt::from(1),
        Some(q) => {
            if q.starts_with('-') {
                return Err(RationalParseError::NonPositiveDenominator(text.into()));
            }
            let q = parse_unsigned(q).ok_or_else(|| RationalParseError::Malformed(text.into()))?;
            if q.is_zero() {
                return Err(RationalParseError::NonPositiveDenominator(text.into()));
            }
            q
        }
    };
    Ok(Rational::new(numer, denom))
}

fn parse_unsigned(digits: &str) -> Option<BigInt> {
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

fn parse_signed(text: &str) -> Option<BigInt> {
    match text.strip_prefix('-') {
        Some(rest) => parse_unsigned(rest).map(|v| -v),
        None => parse_unsigned(text),
    }
}

/// Lowest-terms rendering that always carries the denominator, e.g. `-1/1`.
pub fn render_fraction(value: &Rational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

/// Compact rendering: integers without a denominator, everything else `p/q`.
pub fn render_compact(value: &Rational) -> String {
    if value.is_integer() {
        value.numer().to_string()
    } else {
        render_fraction(value)
    }
}

/// Canonical literal accepted back by [`parse_rational`].
pub fn render_literal(value: &Rational) -> String {
    render_compact(value)
}
