//! Scalar types for probabilities and polynomial coefficients.
//!
//! The perturbative engine works in exact rationals so first-order
//! coefficients compare by equality; the Monte Carlo side and the sweeps
//! work in floats. Everything that only needs field arithmetic is generic
//! over [`Scalar`].

use std::fmt::{Debug, Display};

use num_rational::Ratio;
use num_traits::{Num, ToPrimitive};

/// Field-like scalar used for fault weights, exact enumeration and
/// polynomial coefficients.
pub trait Scalar:
    Num + Clone + PartialOrd + Debug + Display + Send + Sync + 'static
{
    /// Builds `num / den` in this scalar type.
    fn from_ratio(num: i64, den: i64) -> Self;

    fn to_f64(&self) -> f64;

    fn from_int(value: i64) -> Self {
        Self::from_ratio(value, 1)
    }
}

impl Scalar for f64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for f32 {
    fn from_ratio(num: i64, den: i64) -> Self {
        (num as f64 / den as f64) as f32
    }

    fn to_f64(&self) -> f64 {
        f64::from(*self)
    }
}

impl Scalar for Ratio<i64> {
    fn from_ratio(num: i64, den: i64) -> Self {
        Ratio::new(num, den)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

impl Scalar for Ratio<i128> {
    fn from_ratio(num: i64, den: i64) -> Self {
        Ratio::new(i128::from(num), i128::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// Parses a decimal probability such as `0.005` into an exact rational.
///
/// Accepts plain decimals and scientific notation (`1e-3`). Returns `None`
/// for anything that is not a finite decimal literal.
pub fn rational_from_decimal(text: &str) -> Option<Ratio<i64>> {
    let text = text.trim();
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let negative = mantissa.starts_with('-');
    let mantissa = mantissa.trim_start_matches(['+', '-']);
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut numer: i64 = digits.parse().ok()?;
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i32;
    let pow = 10i64.checked_pow(scale.unsigned_abs())?;
    Some(if scale >= 0 {
        Ratio::from_integer(numer.checked_mul(pow)?)
    } else {
        Ratio::new(numer, pow)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_parsing() {
        assert_eq!(rational_from_decimal("0.005"), Some(Ratio::new(1, 200)));
        assert_eq!(rational_from_decimal("1e-3"), Some(Ratio::new(1, 1000)));
        assert_eq!(rational_from_decimal("2.5E-2"), Some(Ratio::new(1, 40)));
        assert_eq!(rational_from_decimal("0"), Some(Ratio::from_integer(0)));
        assert_eq!(rational_from_decimal("abc"), None);
        assert_eq!(rational_from_decimal("."), None);
    }

    #[test]
    fn conversions_agree() {
        let r = <Ratio<i64> as Scalar>::from_ratio(1, 3);
        assert!((Scalar::to_f64(&r) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(<f64 as Scalar>::from_int(7), 7.0);
    }
}
