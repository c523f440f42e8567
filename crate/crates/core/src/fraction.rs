//! Exact fractions for coverages, confidences and thresholds.

use num_rational::Ratio;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};

pub type Fraction = Ratio<u64>;

/// `count / total`, reduced. `total` must be non-zero.
pub fn ratio(count: usize, total: usize) -> Result<Fraction> {
    if total == 0 {
        return Err(Error::Domain("fraction with zero denominator".into()));
    }
    Ok(Fraction::new(count as u64, total as u64))
}

/// Parses a decimal (`0.17`, `1`, `.5`) or an explicit fraction (`2/3`) exactly.
pub fn parse_fraction(text: &str) -> Result<Fraction> {
    let s = text.trim();
    let bad = || Error::Parameter(format!("cannot parse {text:?} as a non-negative decimal or fraction"));
    if let Some((num, den)) = s.split_once('/') {
        let num: u64 = num.trim().parse().map_err(|_| bad())?;
        let den: u64 = den.trim().parse().map_err(|_| bad())?;
        if den == 0 {
            return Err(bad());
        }
        return Ok(Fraction::new(num, den));
    }
    let (int_part, frac_part) = s.split_once('.').unwrap_or((s, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    let digits_only = |p: &str| p.bytes().all(|b| b.is_ascii_digit());
    if !digits_only(int_part) || !digits_only(frac_part) || frac_part.len() > 18 {
        return Err(bad());
    }
    let den = 10u64.pow(frac_part.len() as u32);
    let int: u64 = if int_part.is_empty() { 0 } else { int_part.parse().map_err(|_| bad())? };
    let frac: u64 = if frac_part.is_empty() { 0 } else { frac_part.parse().map_err(|_| bad())? };
    let num = int
        .checked_mul(den)
        .and_then(|v| v.checked_add(frac))
        .ok_or_else(bad)?;
    Ok(Fraction::new(num, den))
}

pub fn to_f64(f: &Fraction) -> f64 {
    f.to_f64().unwrap_or(f64::NAN)
}

/// `num/den` form, always with an explicit denominator.
pub fn exact_string(f: &Fraction) -> String {
    format!("{}/{}", f.numer(), f.denom())
}

/// Decimal form for humans and CLI arguments; exact for terminating decimals.
pub fn decimal_string(f: &Fraction) -> String {
    let mut den = *f.denom();
    let mut twos = 0u32;
    let mut fives = 0u32;
    while den % 2 == 0 {
        den /= 2;
        twos += 1;
    }
    while den % 5 == 0 {
        den /= 5;
        fives += 1;
    }
    if den != 1 {
        return exact_string(f);
    }
    let places = twos.max(fives);
    let scale = 10u128.pow(places);
    let scaled = *f.numer() as u128 * scale / *f.denom() as u128;
    if places == 0 {
        return scaled.to_string();
    }
    let int = scaled / scale;
    let rest = scaled % scale;
    format!("{int}.{rest:0width$}", width = places as usize)
}

/// `floor(f * n)` without leaving integer arithmetic.
pub fn floor_times(f: &Fraction, n: usize) -> usize {
    ((*f.numer() as u128 * n as u128) / *f.denom() as u128) as usize
}

/// `count / total >= threshold`, compared by cross-multiplication.
pub fn ratio_at_least(count: usize, total: usize, threshold: &Fraction) -> bool {
    count as u128 * *threshold.denom() as u128 >= *threshold.numer() as u128 * total as u128
}

pub mod serde_exact {
    //! Serializes a fraction as its `num/den` string.
    use serde::{Deserialize, Deserializer, Serializer};

    use super::{exact_string, parse_fraction, Fraction};

    pub fn serialize<S: Serializer>(f: &Fraction, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&exact_string(f))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Fraction, D::Error> {
        let text = String::deserialize(d)?;
        parse_fraction(&text).map_err(serde::de::Error::custom)
    }
}

pub mod serde_decimal {
    //! Serializes a fraction as a decimal when it terminates, else as `num/den`.
    use serde::{Deserialize, Deserializer, Serializer};

    use super::{decimal_string, parse_fraction, Fraction};

    pub fn serialize<S: Serializer>(f: &Fraction, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&decimal_string(f))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Fraction, D::Error> {
        let text = String::deserialize(d)?;
        parse_fraction(&text).map_err(serde::de::Error::custom)
    }
}
