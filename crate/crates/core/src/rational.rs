//! Exact rational helpers shared by every exact layer.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary precision rational used for every exact weight.
pub type Rational = BigRational;

/// `n / d` as an exact rational. Panics if `d == 0`.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: impl Into<BigInt>) -> Rational {
    Rational::from_integer(n.into())
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Canonical text form `p/q` (reduced, `q > 0`, denominator always written).
pub fn to_string(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Parses `p/q` or a bare integer `p`.
pub fn parse(text: &str) -> Option<Rational> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(Rational::new(num, den))
}

/// Parses a decimal such as `0.01`, `1e-3` or `-2.5E2` exactly, or falls
/// back to [`parse`] for `p/q`.
pub fn parse_decimal(text: &str) -> Option<Rational> {
    let text = text.trim();
    if text.contains('/') {
        return parse(text);
    }
    let (mantissa, exp) = match text.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (int_part, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.trim_start_matches(['-', '+']).is_empty() && frac.is_empty() {
        return None;
    }
    if !frac.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int_part}{frac}").parse().ok()?;
    let shift = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    Some(if shift >= 0 {
        Rational::from_integer(digits * ten.pow(shift as u32))
    } else {
        Rational::new(digits, ten.pow(shift.unsigned_abs()))
    })
}

/// Nearest double; used only at the Monte Carlo boundary.
pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // Very large numerators/denominators: fall back to a scaled division.
        let n = q.numer().to_f64().unwrap_or(f64::NAN);
        let d = q.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

pub fn abs(q: &Rational) -> Rational {
    q.abs()
}

/// Doubles are written with 17 significant digits so they round-trip.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimals_parse_exactly() {
        assert_eq!(parse_decimal("1e-2"), Some(ratio(1, 100)));
        assert_eq!(parse_decimal("0.125"), Some(ratio(1, 8)));
        assert_eq!(parse_decimal("-2.5E2"), Some(ratio(-250, 1)));
        assert_eq!(parse_decimal("3/4"), Some(ratio(3, 4)));
        assert_eq!(parse_decimal("7"), Some(ratio(7, 1)));
        assert_eq!(parse_decimal("e3"), None);
        assert_eq!(parse_decimal("1.x"), None);
    }

    #[test]
    fn text_round_trip() {
        assert_eq!(to_string(&ratio(14, 25)), "14/25");
        assert_eq!(to_string(&ratio(2, 4)), "1/2");
        assert_eq!(to_string(&int(3)), "3/1");
        assert_eq!(parse("3"), Some(int(3)));
        assert_eq!(parse(" 6/9 "), Some(ratio(2, 3)));
        assert_eq!(parse("1/0"), None);
        assert_eq!(parse("x"), None);
    }

    #[test]
    fn doubles_keep_seventeen_digits() {
        let s = format_f64(0.1);
        assert_eq!(s, "1.0000000000000001e-1");
        assert_eq!(s.parse::<f64>().unwrap(), 0.1);
    }
}
