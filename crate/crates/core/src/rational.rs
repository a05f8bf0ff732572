//! Exact rational arithmetic used throughout the crate.
//!
//! All quantities (edge flows, expectations, bounds, coordinates) are
//! `Rational` values; no operation ever rounds. The representation is
//! always in lowest terms with a positive denominator.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = num_rational::BigRational;

/// Builds a rational from machine integers.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Builds a rational from an integer.
pub fn rint(num: i64) -> Rational {
    Rational::from_integer(BigInt::from(num))
}

/// Parses `p/q` or a plain integer, with an optional leading sign.
pub fn parse_rational(text: &str) -> Result<Rational, String> {
    let text = text.trim();
    if text.is_empty() {
        return Err("empty rational".to_string());
    }
    let (num_str, den_str) = match text.split_once('/') {
        Some((n, d)) => (n, d),
        None => (text, "1"),
    };
    let num: BigInt = num_str
        .parse()
        .map_err(|_| format!("bad numerator in `{text}`"))?;
    let den: BigInt = den_str
        .parse()
        .map_err(|_| format!("bad denominator in `{text}`"))?;
    if den.is_zero() {
        return Err(format!("zero denominator in `{text}`"));
    }
    Ok(Rational::new(num, den))
}

/// Formats as `p/q`, or `p` when the value is an integer.
pub fn format_rational(value: &Rational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Decimal expansion rounded to 15 fractional digits, trailing zeros
/// trimmed. Deterministic across platforms since it only uses integer
/// arithmetic.
pub fn format_decimal(value: &Rational) -> String {
    const DIGITS: u32 = 15;
    let sign = if value.is_negative() { "-" } else { "" };
    let abs = value.abs();
    let scale = BigInt::from(10u32).pow(DIGITS);
    // round half away from zero
    let scaled = (abs.numer() * &scale * 2 + abs.denom()) / (abs.denom() * 2);
    let int_part = &scaled / &scale;
    let frac_part: BigInt = &scaled % &scale;
    if frac_part.is_zero() {
        return format!("{sign}{int_part}");
    }
    let mut frac = format!("{:0width$}", frac_part, width = DIGITS as usize);
    while frac.ends_with('0') {
        frac.pop();
    }
    format!("{sign}{int_part}.{frac}")
}

/// `p/q` plus its decimal expansion, the standard presentation for CLI
/// output: `130/87 (≈1.494252873563218)`.
pub fn format_exact_and_decimal(value: &Rational) -> String {
    if value.denom().is_one() {
        return format_rational(value);
    }
    format!("{} (≈{})", format_rational(value), format_decimal(value))
}

/// Rational to nearest f64, for reporting only.
pub fn to_f64(value: &Rational) -> f64 {
    value
        .numer()
        .to_f64()
        .map(|n| n / value.denom().to_f64().unwrap_or(f64::NAN))
        .unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for text in ["3/4", "-7/2", "5", "0", "-12"] {
            let v = parse_rational(text).unwrap();
            assert_eq!(format_rational(&v), text);
        }
        assert_eq!(format_rational(&parse_rational("6/8").unwrap()), "3/4");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn decimal_formatting() {
        assert_eq!(format_decimal(&rat(130, 87)), "1.494252873563218");
        assert_eq!(format_decimal(&rat(11, 6)), "1.833333333333333");
        assert_eq!(format_decimal(&rat(1833, 64)), "28.640625");
        assert_eq!(format_decimal(&rint(-3)), "-3");
    }
}
