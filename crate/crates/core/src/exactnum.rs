//! Exact scalar domains: arbitrary-precision rationals, tower integers of
//! the form 2^(2^e), and sparse integer combinations of formal basis
//! vectors.
//!
//! All three domains share the properties the counting modules rely on:
//! equality is decidable and cheap, hashing agrees with equality, and the
//! arithmetic that is actually needed (field operations on rationals,
//! power-of-two exponent shifts on towers, coordinatewise addition on
//! vectors) is exact.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Arbitrary-precision rational, always stored reduced with a positive
/// denominator. Equality and hashing agree on the reduced form.
pub type BigRat = BigRational;

/// Errors produced by exact scalar arithmetic and parsing.
#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum ExactError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid rational literal `{text}`: {reason}")]
    BadRational { text: String, reason: String },
    #[error("invalid tower literal `{0}`: expected the form T(e)")]
    BadTower(String),
    #[error("invalid basis-vector literal `{text}`: {reason}")]
    BadVector { text: String, reason: String },
    #[error("tower exponent {0} too large to expand into a big integer")]
    TowerTooLarge(u32),
    #[error("integer overflow in basis-vector coefficient arithmetic")]
    Overflow,
}

/// Shorthand for an integral rational.
pub fn rat_int(n: i64) -> BigRat {
    BigRat::from_integer(BigInt::from(n))
}

/// Shorthand for the rational n/d. Panics if `d == 0`; use [`rat_div`]
/// when the denominator is data rather than a literal.
pub fn rat(n: i64, d: i64) -> BigRat {
    BigRat::new(BigInt::from(n), BigInt::from(d))
}

/// Exact division with an explicit error instead of a panic on zero.
pub fn rat_div(a: &BigRat, b: &BigRat) -> Result<BigRat, ExactError> {
    if b.is_zero() {
        return Err(ExactError::DivisionByZero);
    }
    Ok(a / b)
}

/// Parses `p` or `p/q` (optionally signed) into a reduced rational.
pub fn parse_rat(text: &str) -> Result<BigRat, ExactError> {
    let bad = |reason: &str| ExactError::BadRational {
        text: text.to_owned(),
        reason: reason.to_owned(),
    };
    let t = text.trim();
    if t.is_empty() {
        return Err(bad("empty literal"));
    }
    match t.split_once('/') {
        None => {
            let n = BigInt::from_str(t).map_err(|e| bad(&e.to_string()))?;
            Ok(BigRat::from_integer(n))
        }
        Some((num, den)) => {
            let n = BigInt::from_str(num.trim()).map_err(|e| bad(&e.to_string()))?;
            let d = BigInt::from_str(den.trim()).map_err(|e| bad(&e.to_string()))?;
            if d.is_zero() {
                return Err(ExactError::DivisionByZero);
            }
            Ok(BigRat::new(n, d))
        }
    }
}

/// Renders a rational as `p/q`, or `p` when the denominator is one.
/// This is exactly the form [`parse_rat`] accepts.
pub fn format_rat(r: &BigRat) -> String {
    r.to_string()
}

/// The largest tower exponent [`TowerInt::value`] will expand. 2^(2^24)
/// already occupies two megabytes as a big integer.
pub const MAX_EXPANDED_TOWER_EXP: u32 = 24;

/// The integer 2^(2^e), represented by its double exponent alone so that
/// towers far beyond big-integer reach still compare in constant time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TowerInt {
    e: u32,
}

impl TowerInt {
    pub fn new(e: u32) -> Self {
        TowerInt { e }
    }

    /// The double exponent e of 2^(2^e).
    pub fn exponent(&self) -> u32 {
        self.e
    }

    /// Raises the tower to the power 2^j: (2^(2^e))^(2^j) = 2^(2^(e+j)).
    /// This is the only multiplication-like operation towers support, and
    /// it is exact by the power law alone.
    pub fn tower_pow(&self, j: u32) -> TowerInt {
        TowerInt { e: self.e + j }
    }

    /// Expands the represented value into a big integer, for cross-checks
    /// at small exponents. Fails above [`MAX_EXPANDED_TOWER_EXP`].
    pub fn value(&self) -> Result<BigInt, ExactError> {
        if self.e > MAX_EXPANDED_TOWER_EXP {
            return Err(ExactError::TowerTooLarge(self.e));
        }
        Ok(BigInt::one() << (1u64 << self.e))
    }
}

impl fmt::Display for TowerInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T({})", self.e)
    }
}

impl FromStr for TowerInt {
    type Err = ExactError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let inner = t
            .strip_prefix("T(")
            .and_then(|rest| rest.strip_suffix(')'))
            .ok_or_else(|| ExactError::BadTower(s.to_owned()))?;
        let e: u32 = inner
            .trim()
            .parse()
            .map_err(|_| ExactError::BadTower(s.to_owned()))?;
        Ok(TowerInt::new(e))
    }
}

/// A finite integer combination of formal, pairwise independent basis
/// vectors e_0, e_1, …. Stored as `(index, coefficient)` pairs sorted by
/// index with no zero coefficients, so equality and hashing are
/// structural.
///
/// Coefficients are machine integers with checked arithmetic: every
/// construction in this crate keeps them tiny, and an overflow is
/// reported rather than wrapped.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BasisVector {
    pairs: Vec<(u32, i64)>,
}

impl BasisVector {
    /// The zero vector.
    pub fn zero() -> Self {
        BasisVector { pairs: Vec::new() }
    }

    /// The single term m·e_i (zero when `m == 0`).
    pub fn unit(i: u32, m: i64) -> Self {
        if m == 0 {
            BasisVector::zero()
        } else {
            BasisVector {
                pairs: vec![(i, m)],
            }
        }
    }

    /// Builds a vector from arbitrary `(index, coefficient)` pairs,
    /// combining duplicates and dropping zeros.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u32, i64)>) -> Result<Self, ExactError> {
        let mut v: Vec<(u32, i64)> = pairs.into_iter().collect();
        v.sort_unstable_by_key(|&(i, _)| i);
        let mut out: Vec<(u32, i64)> = Vec::with_capacity(v.len());
        for (i, m) in v {
            match out.last_mut() {
                Some((j, acc)) if *j == i => {
                    *acc = acc.checked_add(m).ok_or(ExactError::Overflow)?;
                }
                _ => out.push((i, m)),
            }
        }
        out.retain(|&(_, m)| m != 0);
        Ok(BasisVector { pairs: out })
    }

    pub fn is_zero(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Sorted `(index, coefficient)` view.
    pub fn pairs(&self) -> &[(u32, i64)] {
        &self.pairs
    }

    /// Exact coordinatewise sum; the only vector operation counting needs.
    pub fn vec_add(&self, other: &BasisVector) -> Result<BasisVector, ExactError> {
        let mut out = Vec::with_capacity(self.pairs.len() + other.pairs.len());
        let (mut a, mut b) = (self.pairs.iter().peekable(), other.pairs.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some(&&(i, m)), Some(&&(j, n))) => {
                    if i < j {
                        out.push((i, m));
                        a.next();
                    } else if j < i {
                        out.push((j, n));
                        b.next();
                    } else {
                        let s = m.checked_add(n).ok_or(ExactError::Overflow)?;
                        if s != 0 {
                            out.push((i, s));
                        }
                        a.next();
                        b.next();
                    }
                }
                (Some(_), None) => {
                    out.extend(a.by_ref().copied());
                    break;
                }
                (None, Some(_)) => {
                    out.extend(b.by_ref().copied());
                    break;
                }
                (None, None) => break,
            }
        }
        Ok(BasisVector { pairs: out })
    }
}

impl fmt::Display for BasisVector {
    /// Comma-separated `i:m` pairs sorted by index; the zero vector is
    /// rendered as `0` so that set files never contain blank entries.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pairs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, m) in &self.pairs {
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{}:{}", i, m)?;
            first = false;
        }
        Ok(())
    }
}

impl FromStr for BasisVector {
    type Err = ExactError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |reason: &str| ExactError::BadVector {
            text: s.to_owned(),
            reason: reason.to_owned(),
        };
        let t = s.trim();
        if t == "0" {
            return Ok(BasisVector::zero());
        }
        let mut pairs = Vec::new();
        for part in t.split(',') {
            let (i, m) = part
                .trim()
                .split_once(':')
                .ok_or_else(|| bad("expected i:m pairs"))?;
            let i: u32 = i.trim().parse().map_err(|_| bad("bad index"))?;
            let m: i64 = m.trim().parse().map_err(|_| bad("bad coefficient"))?;
            pairs.push((i, m));
        }
        BasisVector::from_pairs(pairs)
    }
}

/// True when the rational is a (positive or negative) integer.
pub fn is_integer(r: &BigRat) -> bool {
    r.denom().is_one()
}

/// Exact sign as -1, 0, or 1.
pub fn sign(r: &BigRat) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}
