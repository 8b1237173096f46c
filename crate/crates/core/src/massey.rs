//! The Massey pairing between `F^(n,0)` and integer weights on length-`n` words.
//!
//! For `g` in the `n`-th lower central term, `φ_w(g)` has zero off-diagonal
//! entries except the corner `(1, n+1)`, which equals the Magnus coefficient
//! `μ_{Z,w}(g)`. The pairing with weights `(r_w)` is `Σ r_w μ_{Z,w}(g)`; it only
//! depends on `g` modulo `F^(n+1,0)`. Dwyer's sign convention on defining systems
//! changes individual signs, never ranks, and is not modelled here.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::coeff::{integer_rank, RingSpec};
use crate::magnus::magnus;
use crate::words::{basic_commutator, enumerate_monomials, lyndon_words, GroupWord, Monomial};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MasseyError {
    #[error("{word} is not in the level-{level} lower central term (nonzero coefficient at {witness})")]
    NotInLevel { word: String, level: usize, witness: Monomial },
    #[error("weight on {0} is not supported on words of length {1}")]
    BadWeight(Monomial, usize),
    #[error("pairing needs level n >= 2, got {0}")]
    LevelTooSmall(usize),
}

/// Möbius function by trial division.
pub fn mobius(mut n: u64) -> i64 {
    assert!(n >= 1);
    let mut sign = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

/// Number of aperiodic necklaces: `(1/n) Σ_{d | n} μ(d) m^{n/d}`.
pub fn necklace(m: u64, n: u64) -> BigInt {
    assert!(n >= 1);
    let sum: BigInt = (1..=n)
        .filter(|d| n.is_multiple_of(*d))
        .map(|d| BigInt::from(mobius(d)) * num_traits::pow(BigInt::from(m), (n / d) as usize))
        .sum();
    let n = BigInt::from(n);
    assert!((&sum % &n).is_zero(), "necklace sum not divisible by n");
    sum / n
}

/// `Σ_w r_w μ_{Z,w}(g)` for `g ∈ F^(n,0)`.
pub fn pairing_value(g: &GroupWord, weights: &BTreeMap<Monomial, BigInt>, n: usize) -> Result<BigInt, MasseyError> {
    if let Some(w) = weights.keys().find(|w| w.len() != n || w.max_letter() > g.alphabet()) {
        return Err(MasseyError::BadWeight(w.clone(), n));
    }
    let s = magnus(g, &RingSpec::integers(), n);
    if let Some((w, _)) = s.terms().find(|(w, _)| !w.is_empty() && w.len() < n) {
        return Err(MasseyError::NotInLevel { word: g.to_string(), level: n, witness: w.clone() });
    }
    Ok(weights
        .iter()
        .map(|(w, r)| r * s.coefficient(w).expect("|w| = cap"))
        .sum())
}

/// Rows: realized basic commutators of weight `n`; columns: all words of length `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairingMatrix {
    pub level: usize,
    pub row_labels: Vec<GroupWord>,
    pub row_brackets: Vec<String>,
    pub column_labels: Vec<Monomial>,
    pub entries: Vec<Vec<BigInt>>,
}

#[derive(Serialize)]
pub struct PairingMatrixJson {
    pub level: usize,
    pub rows: Vec<String>,
    pub row_words: Vec<String>,
    pub cols: Vec<String>,
    pub entries: Vec<Vec<String>>,
}

impl PairingMatrix {
    pub fn num_rows(&self) -> usize {
        self.entries.len()
    }

    pub fn num_cols(&self) -> usize {
        self.column_labels.len()
    }

    pub fn rank(&self) -> usize {
        integer_rank(&self.entries)
    }

    pub fn to_json(&self) -> PairingMatrixJson {
        PairingMatrixJson {
            level: self.level,
            rows: self.row_brackets.clone(),
            row_words: self.row_labels.iter().map(GroupWord::to_string).collect(),
            cols: self.column_labels.iter().map(Monomial::to_string).collect(),
            entries: self.entries.iter().map(|r| r.iter().map(BigInt::to_string).collect()).collect(),
        }
    }
}

/// Degree-`n` Magnus coefficients of `g` against all length-`n` words.
pub fn pairing_row(g: &GroupWord, n: usize) -> Vec<BigInt> {
    let s = magnus(g, &RingSpec::integers(), n);
    enumerate_monomials(g.alphabet(), n)
        .map(|w| s.coefficient(&w).expect("|w| = cap"))
        .collect()
}

pub fn pairing_matrix(alphabet: u32, n: usize) -> Result<PairingMatrix, MasseyError> {
    if n < 2 {
        return Err(MasseyError::LevelTooSmall(n));
    }
    let brackets: Vec<_> = lyndon_words(alphabet, n)
        .iter()
        .map(|u| basic_commutator(u).expect("generated words are Lyndon"))
        .collect();
    let row_labels: Vec<GroupWord> = brackets.iter().map(|c| c.realize(alphabet)).collect();
    let entries = row_labels.iter().map(|g| pairing_row(g, n)).collect();
    Ok(PairingMatrix {
        level: n,
        row_brackets: brackets.iter().map(ToString::to_string).collect(),
        row_labels,
        column_labels: enumerate_monomials(alphabet, n).collect(),
        entries,
    })
}

/// Rank over `Z` (equivalently `Q`) of the pairing matrix.
pub fn massey_rank(alphabet: u32, n: usize) -> Result<usize, MasseyError> {
    Ok(pairing_matrix(alphabet, n)?.rank())
}
