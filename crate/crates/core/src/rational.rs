//! Exact rational numbers.
//!
//! All arithmetic in the crate goes through [`Rational`], an arbitrary
//! precision fraction kept in lowest terms with a positive denominator.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

pub type Rational = num_rational::BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Renders as `num/den`, or just `num` when the denominator is one.
pub fn format(r: &Rational) -> String {
    r.to_string()
}

/// Parses `num`, `num/den` or a terminating decimal such as `0.25`.
pub fn parse(text: &str) -> Option<Rational> {
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    if let Some((whole, fractional)) = text.split_once('.') {
        if fractional.is_empty() || !fractional.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let negative = whole.starts_with('-');
        let whole: BigInt = if whole.is_empty() || whole == "-" {
            BigInt::zero()
        } else {
            whole.parse().ok()?
        };
        let scale = BigInt::from(10u32).pow(fractional.len() as u32);
        let digits: BigInt = fractional.parse().ok()?;
        let mut value = Rational::from_integer(whole.abs()) + Rational::new(digits, scale);
        if negative {
            value = -value;
        }
        return Some(value);
    }
    text.parse::<BigInt>().ok().map(Rational::from_integer)
}
