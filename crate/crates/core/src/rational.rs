//! Exact rationals and their text form.
//!
//! Values are written as `"a/b"` (or `"a"` for integers). Parsing also accepts
//! terminating decimals such as `"0.25"`, converted exactly. Anything that
//! looks like a binary float (`"1e-3"`, `"inf"`, `"nan"`) is rejected.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = Ratio<i128>;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(n as i128)
}

pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(n as i128, d as i128)
}

/// `(x)^+`
pub fn pos(x: Rational) -> Rational {
    if x.is_negative() {
        Rational::zero()
    } else {
        x
    }
}

pub fn parse(s: &str) -> Result<Rational> {
    let err = || Error::Parse { what: "exact rational", input: s.to_string() };
    let t = s.trim();
    if t.is_empty() {
        return Err(err());
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: i128 = n.trim().parse().map_err(|_| err())?;
        let d: i128 = d.trim().parse().map_err(|_| err())?;
        if d == 0 {
            return Err(err());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, fraction)) = t.split_once('.') {
        let negative = whole.starts_with('-');
        let digits_ok = |x: &str| x.chars().all(|c| c.is_ascii_digit());
        let whole_digits = whole.trim_start_matches(['-', '+']);
        if !digits_ok(whole_digits) || !digits_ok(fraction) || (whole_digits.is_empty() && fraction.is_empty()) {
            return Err(err());
        }
        if fraction.len() > 30 {
            return Err(err());
        }
        let w: i128 = if whole_digits.is_empty() { 0 } else { whole_digits.parse().map_err(|_| err())? };
        let f: i128 = if fraction.is_empty() { 0 } else { fraction.parse().map_err(|_| err())? };
        let scale = 10i128.pow(fraction.len() as u32);
        let mag = Rational::new(w * scale + f, scale);
        return Ok(if negative { -mag } else { mag });
    }
    let n: i128 = t.parse().map_err(|_| err())?;
    Ok(Rational::from_integer(n))
}

pub fn format(x: &Rational) -> String {
    x.to_string()
}

pub fn to_f64(x: &Rational) -> f64 {
    x.numer().to_f64().unwrap_or(f64::NAN) / x.denom().to_f64().unwrap_or(f64::NAN)
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a, I: IntoIterator<Item = &'a Rational>>(xs: I) -> i128 {
    xs.into_iter().fold(1i128, |acc, x| acc.lcm(x.denom()))
}

/// Serde adapter for a single rational as an `"a/b"` string.
pub mod serde_str {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_integers() {
        assert_eq!(parse("1/2").unwrap(), frac(1, 2));
        assert_eq!(parse(" 6/4 ").unwrap(), frac(3, 2));
        assert_eq!(parse("-3").unwrap(), int(-3));
        assert_eq!(parse("0").unwrap(), int(0));
    }

    #[test]
    fn parses_decimals_exactly() {
        assert_eq!(parse("0.5").unwrap(), frac(1, 2));
        assert_eq!(parse("0.25").unwrap(), frac(1, 4));
        assert_eq!(parse("1.").unwrap(), int(1));
        assert_eq!(parse(".75").unwrap(), frac(3, 4));
        assert_eq!(parse("-0.1").unwrap(), frac(-1, 10));
    }

    #[test]
    fn rejects_float_syntax() {
        for bad in ["1e-3", "inf", "nan", "", "1/0", "0.5.1", "a/b", "."] {
            assert!(parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn formatting() {
        assert_eq!(format(&frac(4, 1)), "4");
        assert_eq!(format(&frac(6, 4)), "3/2");
        assert_eq!(format(&frac(-1, 3)), "-1/3");
        assert_eq!(pos(int(-2)), int(0));
        assert_eq!(pos(frac(1, 3)), frac(1, 3));
        assert_eq!(common_denominator(&[frac(1, 4), frac(1, 6)]), 12);
    }
}
