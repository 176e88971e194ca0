//! Exact rationals and their string form (`"p/q"`).

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::Ratio<i128>;

pub fn int(n: i128) -> Rational {
    Rational::from_integer(n)
}

pub fn ratio(n: i128, d: i128) -> Rational {
    Rational::new(n, d)
}

/// Formats as `"p/q"`, or `"p"` for integers.
pub fn format(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `"p/q"`, `"p"`, or a finite decimal such as `"0.7071"` (read exactly).
pub fn parse(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: `{s}`"));
    if let Some((n, d)) = s.split_once('/') {
        let n: i128 = n.trim().parse().map_err(|_| bad())?;
        let d: i128 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let negative = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        if frac.is_empty() || frac.len() > 30 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let w: i128 = if whole_digits.is_empty() {
            0
        } else {
            whole_digits.parse().map_err(|_| bad())?
        };
        let f: i128 = frac.parse().map_err(|_| bad())?;
        let scale = 10i128.pow(frac.len() as u32);
        let mag = Rational::new(w * scale + f, scale);
        return Ok(if negative { -mag } else { mag });
    }
    let n: i128 = s.parse().map_err(|_| bad())?;
    Ok(int(n))
}

/// Largest rational `g` with both inputs in `g * Z` (the generator of the
/// additive group they span). Zero inputs are ignored.
pub fn gcd(a: &Rational, b: &Rational) -> Rational {
    if a.is_zero() {
        return b.abs();
    }
    if b.is_zero() {
        return a.abs();
    }
    let den = a.denom().lcm(b.denom());
    let an = a.numer() * (den / a.denom());
    let bn = b.numer() * (den / b.denom());
    Rational::new(an.gcd(&bn), den)
}

pub fn to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Smallest integer strictly greater than `r`.
pub fn floor_plus_one(r: &Rational) -> i128 {
    r.floor().to_integer() + 1
}

pub mod serde_str {
    //! `serde(with = ...)` helper storing a rational as its `"p/q"` string.
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        super::parse(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse("5/11").unwrap(), ratio(5, 11));
        assert_eq!(parse("-3").unwrap(), int(-3));
        assert_eq!(parse("0.7071").unwrap(), ratio(7071, 10000));
        assert_eq!(parse("-0.5").unwrap(), ratio(-1, 2));
        assert!(parse("1/0").is_err());
        assert!(parse("abc").is_err());
    }

    #[test]
    fn format_roundtrip() {
        for r in [ratio(-9, 11), int(0), int(7), ratio(3, 4)] {
            assert_eq!(parse(&format(&r)).unwrap(), r);
        }
    }

    #[test]
    fn rational_gcd() {
        assert_eq!(gcd(&int(1), &ratio(2, 3)), ratio(1, 3));
        assert_eq!(gcd(&int(1), &ratio(5, 11)), ratio(1, 11));
        assert_eq!(gcd(&ratio(1, 2), &ratio(1, 3)), ratio(1, 6));
        assert_eq!(gcd(&int(0), &ratio(1, 3)), ratio(1, 3));
    }
}
