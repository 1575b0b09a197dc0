//! Exact rational helpers shared by every module.
//!
//! Rationals travel through JSON as `"p/q"` strings in lowest terms with the
//! sign on the numerator. Square roots are never taken exactly; callers ask
//! for dyadic lower/upper bounds at a requested precision.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

/// `2^e` for any sign of `e`.
pub fn pow2(e: i64) -> Rational {
    let mag = BigInt::one() << e.unsigned_abs();
    if e >= 0 {
        Rational::from_integer(mag)
    } else {
        Rational::new(BigInt::one(), mag)
    }
}

pub fn format_rational(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::BadRational(s.to_string());
    let t = s.trim();
    let (p, q) = match t.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (t, "1"),
    };
    let p: BigInt = p.parse().map_err(|_| bad())?;
    let q: BigInt = q.parse().map_err(|_| bad())?;
    if q.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(p, q))
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // Huge numerators/denominators: fall back on bit lengths.
        let n = q.numer().bits() as i64;
        let d = q.denom().bits() as i64;
        let sign = if q.is_negative() { -1.0 } else { 1.0 };
        sign * 2f64.powi((n - d).clamp(-1070, 1023) as i32)
    })
}

/// Nearest multiple of `2^-bits` to `x`. `x` must be finite.
pub fn dyadic(x: f64, bits: u32) -> Rational {
    let scaled = (x * 2f64.powi(bits as i32)).round();
    let num = BigInt::from(scaled as i128);
    Rational::new(num, BigInt::one() << bits)
}

fn scaled_floor_sqrt(x: &Rational, bits: u32) -> (BigUint, bool) {
    // floor(sqrt(x * 4^bits)) and whether the root is exact.
    let num = x.numer().magnitude() << (2 * bits as usize);
    let den = x.denom().magnitude();
    let n = &num / den;
    let s = n.sqrt();
    let exact = (&num % den).is_zero() && &s * &s == n;
    (s, exact)
}

/// Largest multiple of `2^-bits` not exceeding `sqrt(x)`; `x >= 0`.
pub fn sqrt_lower(x: &Rational, bits: u32) -> Rational {
    assert!(!x.is_negative(), "sqrt of negative rational");
    let (s, _) = scaled_floor_sqrt(x, bits);
    Rational::new(BigInt::from_biguint(Sign::Plus, s), BigInt::one() << bits)
}

/// Smallest multiple of `2^-bits` not below `sqrt(x)`; `x >= 0`.
pub fn sqrt_upper(x: &Rational, bits: u32) -> Rational {
    assert!(!x.is_negative(), "sqrt of negative rational");
    let (s, exact) = scaled_floor_sqrt(x, bits);
    let s = if exact { s } else { s + 1u32 };
    Rational::new(BigInt::from_biguint(Sign::Plus, s), BigInt::one() << bits)
}

/// Sign of a quantity estimated in floating point, falling back on the exact
/// value when the estimate is within `err` of zero.
#[inline]
pub fn filtered_sign(approx: f64, err: f64, exact: impl FnOnce() -> Rational) -> Ordering {
    if approx.is_finite() {
        if approx > err {
            return Ordering::Greater;
        }
        if approx < -err {
            return Ordering::Less;
        }
    }
    exact().cmp(&Rational::zero())
}

/// Relative slack used by the float filters. Inputs are rounded once from
/// exact rationals and pass through a handful of operations, so `1e-12` of
/// the magnitude is far above the accumulated error.
pub const FILTER_REL: f64 = 1e-12;

pub mod serde_rational {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

pub mod serde_rational_vec {
    use super::*;
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for q in v {
            seq.serialize_element(&format_rational(q))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter().map(|s| parse_rational(s).map_err(serde::de::Error::custom)).collect()
    }
}
