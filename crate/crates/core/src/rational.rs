//! Exact rational scalars and their textual forms.
//!
//! Rationals travel as `"p/q"` strings (integers as plain `"n"`); parsing also
//! accepts finite decimals such as `"1.618"` which are converted exactly.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn parse_rational(text: &str) -> Result<Q> {
    let s = text.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational".into()));
    }
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
        let den: BigInt = den
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
        if den.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Q::new(num, den));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let negative = int.starts_with('-');
        let int_part: BigInt = match int.trim_start_matches(['-', '+']) {
            "" => BigInt::zero(),
            digits => digits
                .parse()
                .map_err(|_| Error::Parse(format!("bad decimal {s:?}")))?,
        };
        if frac.is_empty() || !frac.bytes().all(|c| c.is_ascii_digit()) {
            return Err(Error::Parse(format!("bad decimal {s:?}")));
        }
        let frac_part: BigInt = frac.parse().unwrap();
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let magnitude = Q::new(int_part * &scale + frac_part, scale);
        return Ok(if negative { -magnitude } else { magnitude });
    }
    let n: BigInt = s
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
    Ok(Q::from_integer(n))
}

pub fn parse_rational_list(text: &str) -> Result<Vec<Q>> {
    text.split(',').map(parse_rational).collect()
}

pub fn format_rational(x: &Q) -> String {
    x.to_string()
}

pub fn to_f64(x: &Q) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or_else(|| {
        // Huge numerators/denominators: scale through the bit lengths.
        let n = x.numer().bits() as i64;
        let d = x.denom().bits() as i64;
        let shift = n.max(d) - 60;
        let num = (x.numer() >> shift.max(0) as usize).to_f64().unwrap_or(0.0);
        let den = (x.denom() >> shift.max(0) as usize).to_f64().unwrap_or(1.0);
        num / den
    })
}

pub fn is_probability_vector(p: &[Q]) -> bool {
    !p.is_empty() && p.iter().all(|x| !x.is_negative()) && p.iter().sum::<Q>() == Q::one()
}

/// serde adapters storing rationals as `"p/q"` strings.
pub mod serde_q {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(xs: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(xs.len()))?;
            for x in xs {
                seq.serialize_element(&format_rational(x))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> std::result::Result<Vec<Q>, D::Error> {
            let texts = Vec::<String>::deserialize(d)?;
            texts
                .iter()
                .map(|t| parse_rational(t).map_err(serde::de::Error::custom))
                .collect()
        }
    }

    pub mod matrix {
        use super::*;

        pub fn serialize<S: Serializer>(
            rows: &[Vec<Q>],
            s: S,
        ) -> std::result::Result<S::Ok, S::Error> {
            let text: Vec<Vec<String>> = rows
                .iter()
                .map(|r| r.iter().map(format_rational).collect())
                .collect();
            serde::Serialize::serialize(&text, s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> std::result::Result<Vec<Vec<Q>>, D::Error> {
            let text = Vec::<Vec<String>>::deserialize(d)?;
            text.iter()
                .map(|r| {
                    r.iter()
                        .map(|t| parse_rational(t).map_err(serde::de::Error::custom))
                        .collect()
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_integers_and_decimals() {
        assert_eq!(parse_rational("3/6").unwrap(), q(1, 2));
        assert_eq!(parse_rational("-7").unwrap(), qi(-7));
        assert_eq!(parse_rational("1.5").unwrap(), q(3, 2));
        assert_eq!(parse_rational("-0.25").unwrap(), q(-1, 4));
        assert_eq!(parse_rational(".5").unwrap(), q(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("1.").is_err());
    }

    #[test]
    fn formats_as_p_over_q() {
        assert_eq!(format_rational(&q(2, 6)), "1/3");
        assert_eq!(format_rational(&qi(4)), "4");
    }
}
