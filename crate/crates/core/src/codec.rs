//! Natural-number codings.
//!
//! Everything downstream (ball codes, union codes, chain codes) is built on
//! one pinned pairing so that codes are reproducible:
//!
//! * pairing: Cantor, `pair(x, y) = (x + y)(x + y + 1)/2 + y`;
//! * sequences: `j = pair(len - 1, pair(a0, pair(a1, ... pair(a_{len-2}, a_{len-1}))))`,
//!   so every natural decodes to exactly one nonempty sequence;
//! * `[j]` is the set of entries of sequence `j`; all entries are `<= j`;
//! * grid families of dimension `n` and side `m`: `i = pair(t, m)` where `t`
//!   is a sequence code and entry `(j1, .., jn)` is element
//!   `inj(j1, .., jn)` of `t` (zero past the end), with
//!   `inj(j1, .., jn) = pair(j1, inj(j2, .., jn))` and `inj(j) = j`;
//! * positive rationals: `q_k = (a + 1)/(b + 1)` where `(a, b) = unpair(k)`,
//!   duplicates included.
//!
//! Codes grow doubly exponentially with sequence length; they exist to pin
//! down the enumeration order and are only materialized for small objects.

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Cantor pairing.
pub fn pair(x: &BigUint, y: &BigUint) -> BigUint {
    let s = x + y;
    let t = (&s * (&s + 1u32)) >> 1;
    t + y
}

/// Inverse of [`pair`].
pub fn unpair(z: &BigUint) -> (BigUint, BigUint) {
    let w = ((z * 8u32 + 1u32).sqrt() - 1u32) >> 1;
    let t = (&w * (&w + 1u32)) >> 1;
    let y = z - t;
    let x = &w - &y;
    (x, y)
}

pub fn pair_u64(x: u64, y: u64) -> u128 {
    let s = x as u128 + y as u128;
    s * (s + 1) / 2 + y as u128
}

pub fn unpair_u64(z: u128) -> (u64, u64) {
    let mut w = (((8 * z + 1) as f64).sqrt() as u128).saturating_sub(1) / 2;
    while (w + 1) * (w + 2) / 2 <= z {
        w += 1;
    }
    while w * (w + 1) / 2 > z {
        w -= 1;
    }
    let y = z - w * (w + 1) / 2;
    ((w - y) as u64, y as u64)
}

/// Code of a nonempty finite sequence.
pub fn seq_encode(s: &[BigUint]) -> Result<BigUint> {
    let (last, init) = s.split_last().ok_or(Error::EmptySequence)?;
    let mut rest = last.clone();
    for a in init.iter().rev() {
        rest = pair(a, &rest);
    }
    Ok(pair(&BigUint::from(s.len() - 1), &rest))
}

/// Length bar `j̄` (sequence length minus one).
pub fn seq_last_index(j: &BigUint) -> BigUint {
    unpair(j).0
}

pub fn seq_decode(j: &BigUint) -> Vec<BigUint> {
    let (bar, mut rest) = unpair(j);
    let bar = bar.to_usize().expect("sequence length exceeds memory");
    let mut out = Vec::with_capacity(bar.min(1 << 16) + 1);
    for _ in 0..bar {
        let (a, r) = unpair(&rest);
        out.push(a);
        rest = r;
    }
    out.push(rest);
    out
}

/// Entries of `j` up to the point where the remainder is zero; every later
/// entry is zero, so the returned prefix ends with a zero when cut short.
pub fn seq_prefix(j: &BigUint) -> Vec<BigUint> {
    let (mut left, mut rest) = unpair(j);
    let mut out = Vec::new();
    while !left.is_zero() && !rest.is_zero() {
        let (a, r) = unpair(&rest);
        out.push(a);
        rest = r;
        left -= 1u32;
    }
    out.push(rest);
    out
}

/// `(j)_i`; zero past the end of the sequence.
pub fn seq_entry(j: &BigUint, i: usize) -> BigUint {
    let (bar, mut rest) = unpair(j);
    let len = bar.to_usize().map(|b| b + 1).unwrap_or(usize::MAX);
    if i >= len {
        return BigUint::zero();
    }
    for _ in 0..i {
        rest = unpair(&rest).1;
    }
    if i + 1 == len {
        rest
    } else {
        unpair(&rest).0
    }
}

/// `[j]`, the set of entries of sequence `j`.
pub fn index_set(j: &BigUint) -> BTreeSet<BigUint> {
    seq_prefix(j).into_iter().collect()
}

/// Computable bound on `[j]`: every member is at most this value.
pub fn index_set_bound(j: &BigUint) -> BigUint {
    j.clone()
}

/// The injection `N^n -> N` used inside grid codes.
pub fn grid_injection(js: &[usize]) -> BigUint {
    let mut it = js.iter().rev();
    let mut acc = BigUint::from(*it.next().expect("grid index needs n >= 1"));
    for &j in it {
        acc = pair(&BigUint::from(j), &acc);
    }
    acc
}

/// Code of an `n`-dimensional family with side `m`, entries in row-major
/// order (last index fastest).
pub fn grid_encode(n: usize, m: usize, entries: &[BigUint]) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::Dimension { min: 1, got: 0 });
    }
    let side = m + 1;
    let count = side.pow(n as u32);
    if entries.len() != count {
        return Err(Error::Format(format!(
            "grid of side {side} in dimension {n} needs {count} entries, got {}",
            entries.len()
        )));
    }
    let mut slots: Vec<(usize, &BigUint)> = Vec::with_capacity(count);
    for (flat, e) in entries.iter().enumerate() {
        let idx = unflatten(flat, n, side);
        let pos = grid_injection(&idx).to_usize().ok_or_else(|| Error::Format("grid too large to encode".into()))?;
        slots.push((pos, e));
    }
    let len = slots.iter().map(|(p, _)| p + 1).max().unwrap_or(1);
    let mut seq = vec![BigUint::zero(); len];
    for (p, e) in slots {
        seq[p] = e.clone();
    }
    let t = seq_encode(&seq)?;
    Ok(pair(&t, &BigUint::from(m)))
}

/// Side `î` of grid code `i`.
pub fn grid_side(i: &BigUint) -> BigUint {
    unpair(i).1
}

/// `(i)_{j1, .., jn}`.
pub fn grid_entry(i: &BigUint, js: &[usize]) -> Result<BigUint> {
    let (t, m) = unpair(i);
    for &j in js {
        if BigUint::from(j) > m {
            let side = m.to_usize().unwrap_or(usize::MAX);
            return Err(Error::GridIndexOutOfRange { index: j, side });
        }
    }
    let pos = grid_injection(js).to_usize().ok_or_else(|| Error::Format("grid position overflow".into()))?;
    Ok(seq_entry(&t, pos))
}

/// All entries of grid code `i` in row-major order, with its side.
pub fn grid_decode(i: &BigUint, n: usize) -> Result<(usize, Vec<BigUint>)> {
    let (t, m) = unpair(i);
    let m = m
        .to_usize()
        .filter(|m| (m + 1).checked_pow(n as u32).is_some_and(|c| c <= 1 << 24))
        .ok_or_else(|| Error::Format("grid side too large to decode".into()))?;
    let seq = seq_decode(&t);
    let side = m + 1;
    let entries = (0..side.pow(n as u32))
        .map(|flat| {
            let idx = unflatten(flat, n, side);
            grid_injection(&idx).to_usize().and_then(|p| seq.get(p).cloned()).unwrap_or_default()
        })
        .collect();
    Ok((m, entries))
}

/// Row-major multi-index of `flat` in `{0..side-1}^n`.
pub fn unflatten(mut flat: usize, n: usize, side: usize) -> Vec<usize> {
    let mut idx = vec![0; n];
    for slot in idx.iter_mut().rev() {
        *slot = flat % side;
        flat /= side;
    }
    idx
}

pub fn flatten(idx: &[usize], side: usize) -> usize {
    idx.iter().fold(0, |acc, &j| acc * side + j)
}

/// `q_k`, the `k`-th positive rational.
pub fn rational_at(k: &BigUint) -> Rational {
    let (a, b) = unpair(k);
    Rational::new(BigInt::from_biguint(Sign::Plus, a + 1u32), BigInt::from_biguint(Sign::Plus, b + 1u32))
}

/// Index of the lowest-terms occurrence of `r` in the enumeration.
pub fn rational_index(r: &Rational) -> Result<BigUint> {
    if !r.is_positive() {
        return Err(Error::NonPositive(crate::rational::format_rational(r)));
    }
    let p = r.numer().magnitude() - 1u32;
    let q = r.denom().magnitude() - 1u32;
    Ok(pair(&p, &q))
}

/// Enumeration of all of Q: index 0 is zero, then signs alternate over `q`.
pub fn signed_rational_at(j: &BigUint) -> Rational {
    if j.is_zero() {
        return Rational::zero();
    }
    let j = j - 1u32;
    let neg = j.bit(0);
    let q = rational_at(&(j >> 1));
    if neg {
        -q
    } else {
        q
    }
}

pub fn signed_rational_index(r: &Rational) -> BigUint {
    if r.is_zero() {
        return BigUint::zero();
    }
    let k = rational_index(&r.abs()).expect("nonzero magnitude is positive");
    let sign = u32::from(r.is_negative());
    (k << 1) + sign + 1u32
}

/// Enumeration of `Q ∩ [0, 1]`: `(a, b) = unpair(e)` gives `a / (a + b)`,
/// with `(0, 0)` mapped to zero.
pub fn unit_rational_at(e: &BigUint) -> Rational {
    let (a, b) = unpair(e);
    let s = &a + &b;
    if s.is_zero() {
        return Rational::zero();
    }
    Rational::new(BigInt::from_biguint(Sign::Plus, a), BigInt::from_biguint(Sign::Plus, s))
}

pub fn unit_rational_index(r: &Rational) -> Result<BigUint> {
    if r.is_negative() || r > &Rational::one() {
        return Err(Error::OutsideSpace(format!("{} is not in [0, 1]", crate::rational::format_rational(r))));
    }
    if r.is_zero() {
        return Ok(BigUint::zero());
    }
    let p = r.numer().magnitude().clone();
    let q = r.denom().magnitude();
    Ok(pair(&p, &(q - &p)))
}
