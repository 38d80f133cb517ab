//! Exact rational scalars and their text forms.
//!
//! Every exact value in the crate is a [`Rational`] (an arbitrary-precision
//! `BigInt` ratio kept in lowest terms with a positive denominator). The text
//! form is `"num/den"`, or a bare integer when the denominator is one. Parsing
//! additionally accepts finite decimals such as `"-0.125"`.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn from_bigint(v: BigInt) -> Rational {
    Rational::from_integer(v)
}

pub fn from_biguint(v: BigUint) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Parses `"a/b"`, `"a"` or a finite decimal `"a.bcd"` exactly.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational".into()));
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_integer(num)?;
        let den = parse_integer(den)?;
        if den.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(num, den));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::Parse(format!("malformed decimal {s:?}")));
        }
        let negative = whole.starts_with('-');
        let digits = whole.trim_start_matches(['-', '+']);
        if !digits.bytes().all(|b| b.is_ascii_digit()) || whole.len() - digits.len() > 1 {
            return Err(Error::Parse(format!("malformed decimal {s:?}")));
        }
        let combined = format!("{digits}{frac}");
        let mag: BigInt = combined
            .parse()
            .map_err(|_| Error::Parse(format!("malformed decimal {s:?}")))?;
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let value = Rational::new(mag, scale);
        return Ok(if negative { -value } else { value });
    }
    Ok(Rational::from_integer(parse_integer(s)?))
}

fn parse_integer(text: &str) -> Result<BigInt> {
    let t = text.trim();
    let digits = t.strip_prefix(['-', '+']).unwrap_or(t);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Parse(format!("malformed integer {t:?}")));
    }
    t.parse::<BigInt>()
        .map_err(|_| Error::Parse(format!("malformed integer {t:?}")))
}

pub fn format_rational(value: &Rational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// `binom(n, k)`, zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for j in 0..k {
        acc *= n - j;
        acc /= j + 1;
    }
    acc
}

pub fn binomial_rational(n: u64, k: u64) -> Rational {
    from_biguint(binomial(n, k))
}

pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, j| acc * j)
}

pub fn floor_to_u64(value: &Rational) -> Option<u64> {
    value.floor().to_integer().to_u64()
}

pub fn ceil_to_u64(value: &Rational) -> Option<u64> {
    value.ceil().to_integer().to_u64()
}

/// Rough `floor(log2 |x|)`, exact to within one.
pub(crate) fn approx_log2(value: &Rational) -> i64 {
    value.numer().bits() as i64 - value.denom().bits() as i64
}

/// Multiplies by `2^shift` for a signed shift.
pub(crate) fn scale_pow2(value: &Rational, shift: i64) -> Rational {
    if shift >= 0 {
        Rational::new(value.numer() << shift as u64, value.denom().clone())
    } else {
        Rational::new(value.numer().clone(), value.denom() << (-shift) as u64)
    }
}

/// Largest dyadic `m / 2^s` not above `value`, with about `bits` significant bits.
pub fn round_down(value: &Rational, bits: u32) -> Rational {
    round_dyadic(value, bits, false)
}

/// Smallest dyadic `m / 2^s` not below `value`, with about `bits` significant bits.
pub fn round_up(value: &Rational, bits: u32) -> Rational {
    round_dyadic(value, bits, true)
}

fn round_dyadic(value: &Rational, bits: u32, up: bool) -> Rational {
    if value.is_zero() {
        return value.clone();
    }
    // already a short dyadic
    if value.denom().magnitude().count_ones() == 1 && value.numer().bits() <= bits as u64 + 1 {
        return value.clone();
    }
    let shift = bits as i64 - approx_log2(value);
    let scaled = scale_pow2(value, shift);
    let m = if up { scaled.ceil() } else { scaled.floor() }.to_integer();
    scale_pow2(&Rational::from_integer(m), -shift)
}

/// Decimal scientific notation rounded in the requested direction, so that the
/// printed number is a valid lower (`up == false`) or upper bound of `value`.
pub fn format_sci_directed(value: &Rational, digits: u32, up: bool) -> String {
    if value.is_zero() {
        return "0".to_string();
    }
    let digits = digits.max(1);
    let negative = value.is_negative();
    let mag = value.abs();
    // exponent e with 10^e <= mag < 10^(e+1)
    let mut e = (approx_log2(&mag) as f64 * std::f64::consts::LOG10_2).floor() as i64;
    let pow10 = |k: i64| -> Rational {
        if k >= 0 {
            Rational::from_integer(BigInt::from(10).pow(k as u32))
        } else {
            Rational::new(BigInt::one(), BigInt::from(10).pow((-k) as u32))
        }
    };
    while pow10(e) > mag {
        e -= 1;
    }
    while pow10(e + 1) <= mag {
        e += 1;
    }
    let scaled = &mag / pow10(e - digits as i64 + 1);
    // rounding the magnitude: toward larger magnitude for upper bounds of positives
    // and lower bounds of negatives
    let away = up != negative;
    let mut m = if away { scaled.ceil() } else { scaled.floor() }.to_integer();
    let mut exp10 = e;
    if m == BigInt::from(10).pow(digits) {
        m = BigInt::from(10).pow(digits - 1);
        exp10 += 1;
    }
    let s = m.to_string();
    let (head, tail) = s.split_at(1);
    let tail = tail.trim_end_matches('0');
    let sign = if negative { "-" } else { "" };
    if tail.is_empty() {
        format!("{sign}{head}e{exp10}")
    } else {
        format!("{sign}{head}.{tail}e{exp10}")
    }
}

pub fn format_sci(value: &Rational, digits: u32) -> String {
    match value.numer().sign() {
        Sign::NoSign => "0".into(),
        _ => format_sci_directed(value, digits, false),
    }
}

pub fn cmp_zero(value: &Rational) -> Ordering {
    if value.is_zero() {
        Ordering::Equal
    } else if value.is_positive() {
        Ordering::Greater
    } else {
        Ordering::Less
    }
}

/// `lcm` of the denominators, one for an empty slice.
pub fn common_denominator<'a, I: IntoIterator<Item = &'a Rational>>(values: I) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

/// Serde adapters writing rationals as `"num/den"` strings.
pub mod serde_str {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(
            values: &[Rational],
            s: S,
        ) -> std::result::Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(values.len()))?;
            for v in values {
                seq.serialize_element(&format_rational(v))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> std::result::Result<Vec<Rational>, D::Error> {
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
            rows: &[Vec<Rational>],
            s: S,
        ) -> std::result::Result<S::Ok, S::Error> {
            let texts: Vec<Vec<String>> = rows
                .iter()
                .map(|row| row.iter().map(format_rational).collect())
                .collect();
            serde::Serialize::serialize(&texts, s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> std::result::Result<Vec<Vec<Rational>>, D::Error> {
            let texts = Vec::<Vec<String>>::deserialize(d)?;
            texts
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|t| parse_rational(t).map_err(serde::de::Error::custom))
                        .collect()
                })
                .collect()
        }
    }

    pub mod opt {
        use super::*;

        pub fn serialize<S: Serializer>(
            value: &Option<Rational>,
            s: S,
        ) -> std::result::Result<S::Ok, S::Error> {
            serde::Serialize::serialize(&value.as_ref().map(format_rational), s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> std::result::Result<Option<Rational>, D::Error> {
            Option::<String>::deserialize(d)?
                .map(|t| parse_rational(&t).map_err(serde::de::Error::custom))
                .transpose()
        }
    }

    pub mod opt_vec {
        use super::*;

        pub fn serialize<S: Serializer>(
            values: &Option<Vec<Rational>>,
            s: S,
        ) -> std::result::Result<S::Ok, S::Error> {
            let texts: Option<Vec<String>> = values
                .as_ref()
                .map(|v| v.iter().map(format_rational).collect());
            serde::Serialize::serialize(&texts, s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> std::result::Result<Option<Vec<Rational>>, D::Error> {
            let texts = Option::<Vec<String>>::deserialize(d)?;
            texts
                .map(|v| {
                    v.iter()
                        .map(|t| parse_rational(t).map_err(serde::de::Error::custom))
                        .collect()
                })
                .transpose()
        }
    }
}
