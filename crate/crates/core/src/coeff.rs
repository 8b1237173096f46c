//! Coefficient rings: the integers and their residue rings `Z/mZ`.
//!
//! A modulus of `0` denotes `Z` itself, so the family `Z/e Z` stays uniform
//! when an exponent map takes the value zero.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// `Z` (modulus 0) or `Z/mZ` (modulus m >= 1).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct RingSpec {
    modulus: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid ring `{text}`: expected `Z` or `Z/<m>` with m >= 1")]
pub struct RingParseError {
    pub text: String,
}

impl RingSpec {
    pub fn integers() -> Self {
        RingSpec { modulus: BigInt::zero() }
    }

    /// Panics on a negative modulus.
    pub fn modulo(modulus: impl Into<BigInt>) -> Self {
        let modulus = modulus.into();
        assert!(!modulus.is_negative(), "ring modulus must be non-negative");
        RingSpec { modulus }
    }

    pub fn modulus(&self) -> &BigInt {
        &self.modulus
    }

    pub fn is_integers(&self) -> bool {
        self.modulus.is_zero()
    }

    /// Canonical representative of `value`: identity over `Z`, residue in `[0, m)` otherwise.
    pub fn reduce(&self, value: &BigInt) -> BigInt {
        if self.modulus.is_zero() {
            value.clone()
        } else {
            value.mod_floor(&self.modulus)
        }
    }

    pub fn reduce_owned(&self, value: BigInt) -> BigInt {
        if self.modulus.is_zero() || (!value.is_negative() && value < self.modulus) {
            value
        } else {
            value.mod_floor(&self.modulus)
        }
    }

    pub fn is_zero(&self, value: &BigInt) -> bool {
        self.reduce(value).is_zero()
    }

    /// Multiplicative inverse of `value`, if it is a unit.
    pub fn unit_inverse(&self, value: &BigInt) -> Option<BigInt> {
        if self.modulus.is_zero() {
            return if value.abs().is_one() { Some(value.clone()) } else { None };
        }
        if self.modulus.is_one() {
            return Some(BigInt::zero());
        }
        let ext = self.reduce(value).extended_gcd(&self.modulus);
        if ext.gcd.is_one() {
            Some(self.reduce(&ext.x))
        } else {
            None
        }
    }
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.modulus.is_zero() {
            f.write_str("Z")
        } else {
            write!(f, "Z/{}", self.modulus)
        }
    }
}

impl FromStr for RingSpec {
    type Err = RingParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || RingParseError { text: s.to_string() };
        let t = s.trim();
        if t == "Z" {
            return Ok(RingSpec::integers());
        }
        let digits = t.strip_prefix("Z/").ok_or_else(err)?;
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let m: BigInt = digits.parse().map_err(|_| err())?;
        if m.is_zero() {
            return Err(err());
        }
        Ok(RingSpec { modulus: m })
    }
}

impl TryFrom<String> for RingSpec {
    type Error = RingParseError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<RingSpec> for String {
    fn from(r: RingSpec) -> String {
        r.to_string()
    }
}

/// `value` lies in `dZ`. For `d = 0` that means `value == 0`.
pub fn divisible(value: &BigInt, d: &BigInt) -> bool {
    if d.is_zero() {
        value.is_zero()
    } else {
        value.is_multiple_of(d)
    }
}

/// Rank over `Q` of an integer matrix, by fraction-free (Bareiss) elimination.
///
/// Rows may have differing lengths only if all are empty; otherwise every row
/// must have the same number of columns.
pub fn integer_rank(matrix: &[Vec<BigInt>]) -> usize {
    let mut m: Vec<Vec<BigInt>> = matrix.to_vec();
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    assert!(m.iter().all(|r| r.len() == cols), "ragged matrix");

    let mut rank = 0;
    let mut prev_pivot = BigInt::one();
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let pivot = m[rank][col].clone();
        let (top, below) = m.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        for row in below {
            let factor = row[col].clone();
            for (x, y) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                // Bareiss step: the division by the previous pivot is exact.
                *x = (&pivot * &*x - &factor * y) / &prev_pivot;
            }
        }
        prev_pivot = pivot;
        rank += 1;
    }
    rank
}
