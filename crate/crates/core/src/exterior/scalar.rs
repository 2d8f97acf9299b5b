use std::fmt;

use num::bigint::BigInt;
use num::{BigRational, FromPrimitive, Num, Signed, ToPrimitive};

/// Exact arbitrary-precision rational.
pub type Rational = BigRational;

/// Coefficient field for forms and vectors: either `f64` or [`Rational`].
pub trait Scalar:
    Num + Signed + Clone + PartialOrd + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    const EXACT: bool;

    fn from_i64(value: i64) -> Self;

    fn to_f64(&self) -> f64;

    /// Parses `a`, `a/b` or a decimal literal. Decimals are converted
    /// exactly for the rational flavor.
    fn parse_literal(text: &str) -> Option<Self>;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_i64(value: i64) -> Self {
        value as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn parse_literal(text: &str) -> Option<Self> {
        if let Some((n, d)) = text.split_once('/') {
            let n: f64 = n.trim().parse().ok()?;
            let d: f64 = d.trim().parse().ok()?;
            return (d != 0.0).then(|| n / d);
        }
        text.trim().parse().ok().filter(|v: &f64| v.is_finite())
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_i64(value: i64) -> Self {
        Rational::from_integer(BigInt::from(value))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn parse_literal(text: &str) -> Option<Self> {
        let text = text.trim();
        if let Some((n, d)) = text.split_once('/') {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d == BigInt::from(0) {
                return None;
            }
            return Some(Rational::new(n, d));
        }
        let (negative, body) = match text.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, text.strip_prefix('+').unwrap_or(text)),
        };
        let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return None;
        }
        if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
            return None;
        }
        let digits = format!("{int_part}{frac_part}");
        let numer: BigInt = if digits.is_empty() { BigInt::from(0) } else { digits.parse().ok()? };
        let denom = num::pow(BigInt::from(10), frac_part.len());
        let value = Rational::new(numer, denom);
        Some(if negative { -value } else { value })
    }
}

/// Exact conversion of a finite float into a rational.
pub(crate) fn rational_from_f64(value: f64) -> Option<Rational> {
    Rational::from_f64(value)
}
