//! Exact rationals used for deviations, energy ratios and thresholds.

use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serializer;

use crate::error::{Error, Result};

pub type Rational = Ratio<i128>;

pub fn ratio(numer: i128, denom: i128) -> Rational {
    Rational::new(numer, denom)
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Parses `"3"`, `"3/8"`, `"-0.125"` or `"1e-3"` into an exact rational.
///
/// Decimal input is read exactly as written, so `"0.1"` is `1/10` rather than
/// the nearest double.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: i128 = n.trim().parse().map_err(|_| bad())?;
        let d: i128 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(pos) => (
            &s[..pos],
            s[pos + 1..].parse::<i32>().map_err(|_| bad())?,
        ),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let joined = format!("{int_part}{frac_part}");
    let numer: i128 = joined.parse().map_err(|_| bad())?;
    let scale = exp - frac_part.len() as i32;
    if scale.unsigned_abs() > 30 {
        return Err(bad());
    }
    let pow = 10i128.pow(scale.unsigned_abs());
    let mut r = if scale >= 0 {
        Rational::from_integer(numer.checked_mul(pow).ok_or_else(bad)?)
    } else {
        Rational::new(numer, pow)
    };
    if neg {
        r = -r;
    }
    Ok(r)
}

pub fn require_epsilon(eps: &Rational, max: Rational) -> Result<()> {
    if eps.is_zero() || eps.is_negative() || *eps > max {
        return Err(Error::InvalidParameter(format!(
            "epsilon {eps} must lie in (0, {max}]"
        )));
    }
    Ok(())
}

/// Serializes a rational as the string `"p/q"` (or `"p"` for integers).
pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

pub fn serialize_opt<S: Serializer>(
    r: &Option<Rational>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_str(&r.to_string()),
        None => s.serialize_none(),
    }
}
