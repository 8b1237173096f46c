//! Truncated non-commutative power series and the Magnus homomorphism.
//!
//! A [`TruncSeries`] lives in `R⟨⟨x1..xk⟩⟩ / (degree > N)`. Every value carries
//! its ring, alphabet size and degree cap; binary operations require all three
//! to match. Coefficients are stored sparsely and zeros are never kept.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::coeff::RingSpec;
use crate::words::{GroupWord, Monomial};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeriesError {
    #[error("series parameters differ: ({0}) vs ({1})")]
    Mismatch(String, String),
    #[error("constant term {0} is not a unit in {1}")]
    NonUnit(BigInt, RingSpec),
    #[error("monomial {word} of length {len} exceeds degree cap {cap}")]
    CapExceeded { word: Monomial, len: usize, cap: usize },
    #[error("letter x{letter} outside alphabet of size {alphabet}")]
    OutOfAlphabet { letter: u32, alphabet: u32 },
}

/// Element of `R⟨⟨X⟩⟩` truncated above degree `cap`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TruncSeries {
    ring: RingSpec,
    alphabet: u32,
    cap: usize,
    terms: BTreeMap<Monomial, BigInt>,
}

impl TruncSeries {
    pub fn zero(ring: RingSpec, alphabet: u32, cap: usize) -> Self {
        TruncSeries { ring, alphabet, cap, terms: BTreeMap::new() }
    }

    pub fn one(ring: RingSpec, alphabet: u32, cap: usize) -> Self {
        Self::zero(ring, alphabet, cap).with_term(Monomial::empty(), BigInt::one())
    }

    /// Builds a series from `(monomial, coefficient)` pairs; terms above the cap
    /// are dropped and repeated monomials are summed.
    pub fn from_terms<I>(ring: RingSpec, alphabet: u32, cap: usize, terms: I) -> Result<Self, SeriesError>
    where
        I: IntoIterator<Item = (Monomial, BigInt)>,
    {
        let mut s = Self::zero(ring, alphabet, cap);
        for (w, c) in terms {
            if let Some(&letter) = w.letters().iter().find(|&&l| l > alphabet) {
                return Err(SeriesError::OutOfAlphabet { letter, alphabet });
            }
            if w.len() <= cap {
                s.accumulate(w, c);
            }
        }
        Ok(s)
    }

    fn with_term(mut self, w: Monomial, c: BigInt) -> Self {
        self.accumulate(w, c);
        self
    }

    fn accumulate(&mut self, w: Monomial, c: BigInt) {
        let entry = self.terms.entry(w);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                let c = self.ring.reduce_owned(c);
                if !c.is_zero() {
                    v.insert(c);
                }
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let c = self.ring.reduce_owned(o.get() + c);
                if c.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = c;
                }
            }
        }
    }

    pub fn ring(&self) -> &RingSpec {
        &self.ring
    }

    pub fn alphabet(&self) -> u32 {
        self.alphabet
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// Nonzero terms in (length, lexicographic) order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Homogeneous component of degree `d`.
    pub fn degree_part(&self, d: usize) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter().filter(move |(w, _)| w.len() == d)
    }

    pub fn constant_term(&self) -> BigInt {
        self.terms.get(&Monomial::empty()).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        *self == Self::one(self.ring.clone(), self.alphabet, self.cap)
    }

    /// Coefficient at `w`; asking beyond the cap is an error rather than a silent zero.
    pub fn coefficient(&self, w: &Monomial) -> Result<BigInt, SeriesError> {
        if w.len() > self.cap {
            return Err(SeriesError::CapExceeded { word: w.clone(), len: w.len(), cap: self.cap });
        }
        Ok(self.terms.get(w).cloned().unwrap_or_default())
    }

    fn params(&self) -> String {
        format!("ring {}, alphabet {}, cap {}", self.ring, self.alphabet, self.cap)
    }

    fn check_compatible(&self, other: &TruncSeries) -> Result<(), SeriesError> {
        if self.ring != other.ring || self.alphabet != other.alphabet || self.cap != other.cap {
            return Err(SeriesError::Mismatch(self.params(), other.params()));
        }
        Ok(())
    }

    pub fn add(&self, other: &TruncSeries) -> Result<TruncSeries, SeriesError> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.accumulate(w.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &TruncSeries) -> Result<TruncSeries, SeriesError> {
        self.add(&other.scale(&BigInt::from(-1)))
    }

    pub fn scale(&self, c: &BigInt) -> TruncSeries {
        let mut out = Self::zero(self.ring.clone(), self.alphabet, self.cap);
        for (w, v) in &self.terms {
            out.accumulate(w.clone(), v * c);
        }
        out
    }

    /// Product with monomials multiplied by concatenation; degrees above the cap are discarded.
    pub fn mul(&self, other: &TruncSeries) -> Result<TruncSeries, SeriesError> {
        self.check_compatible(other)?;
        let mut out = Self::zero(self.ring.clone(), self.alphabet, self.cap);
        for (u, a) in &self.terms {
            let room = self.cap - u.len();
            for (v, b) in other.terms.iter().take_while(|(v, _)| v.len() <= room) {
                out.accumulate(u.concat(v), a * b);
            }
        }
        Ok(out)
    }

    /// Two-sided inverse. Writing `a = c(1 − β)` with `c` the constant term,
    /// the inverse is `(Σ_{k≤cap} β^k) c⁻¹`.
    pub fn inverse(&self) -> Result<TruncSeries, SeriesError> {
        let c = self.constant_term();
        let c_inv = self.ring.unit_inverse(&c).ok_or_else(|| SeriesError::NonUnit(c.clone(), self.ring.clone()))?;
        let one = Self::one(self.ring.clone(), self.alphabet, self.cap);
        let beta = one.sub(&self.scale(&c_inv))?;
        // Horner: 1 + β(1 + β(1 + …))
        let mut acc = one.clone();
        for _ in 0..self.cap {
            acc = one.add(&beta.mul(&acc)?)?;
        }
        Ok(acc.scale(&c_inv))
    }

    pub fn to_json(&self) -> SeriesJson {
        SeriesJson {
            ring: self.ring.to_string(),
            cap: self.cap,
            terms: self
                .terms
                .iter()
                .map(|(w, c)| TermJson { word: w.to_string(), coeff: c.to_string() })
                .collect(),
        }
    }
}

/// Serialized form: terms sorted by (length, lexicographic), coefficients as decimal strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub ring: String,
    pub cap: usize,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub word: String,
    pub coeff: String,
}

type FactorKey = (RingSpec, u32, usize);

/// `μ(x_i)` and `μ(x_i⁻¹)` for every generator, per (ring, alphabet, cap).
#[derive(Debug)]
struct LetterImages {
    positive: Vec<TruncSeries>,
    negative: Vec<TruncSeries>,
}

fn letter_images(ring: &RingSpec, alphabet: u32, cap: usize) -> Arc<LetterImages> {
    static CACHE: OnceLock<RwLock<HashMap<FactorKey, Arc<LetterImages>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (ring.clone(), alphabet, cap);
    if let Some(hit) = cache.read().unwrap().get(&key) {
        return hit.clone();
    }
    let mut positive = Vec::with_capacity(alphabet as usize);
    let mut negative = Vec::with_capacity(alphabet as usize);
    for g in 1..=alphabet {
        let one_plus_x = TruncSeries::one(ring.clone(), alphabet, cap).with_term(Monomial::new(vec![g]), BigInt::one());
        negative.push(one_plus_x.inverse().expect("1 + x is a unit"));
        positive.push(one_plus_x);
    }
    let images = Arc::new(LetterImages { positive, negative });
    // racing inserts compute identical values, so whichever lands is fine
    cache.write().unwrap().entry(key).or_insert(images).clone()
}

/// Dense index of monomials of length ≤ cap: all shorter lengths first, then
/// lexicographic rank within a length.
struct DenseLayout {
    alphabet: usize,
    offsets: Vec<usize>,
    powers: Vec<usize>,
}

impl DenseLayout {
    fn new(alphabet: u32, cap: usize) -> Self {
        let k = alphabet as usize;
        let mut powers = vec![1usize; cap + 1];
        for i in 1..=cap {
            powers[i] = powers[i - 1].checked_mul(k).expect("series too large to expand densely");
        }
        let mut offsets = vec![0usize; cap + 2];
        for l in 0..=cap {
            offsets[l + 1] = offsets[l] + powers[l];
        }
        DenseLayout { alphabet: k, offsets, powers }
    }

    fn size(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    fn rank(&self, w: &Monomial) -> usize {
        w.letters().iter().fold(0, |acc, &l| acc * self.alphabet + (l as usize - 1))
    }

    fn unrank(&self, len: usize, mut r: usize) -> Monomial {
        let mut v = vec![0u32; len];
        for slot in v.iter_mut().rev() {
            *slot = (r % self.alphabet) as u32 + 1;
            r /= self.alphabet;
        }
        Monomial::new(v)
    }
}

/// Right-multiplies the dense buffer by a sparse factor in place.
///
/// Sources are visited from the longest length down, so every target slot has
/// already emitted its own contributions before it is written to.
fn right_multiply(buf: &mut [BigInt], layout: &DenseLayout, cap: usize, factor: &[(usize, usize, BigInt)], ring: &RingSpec) {
    let c0 = factor.iter().find(|(len, _, _)| *len == 0).map(|(_, _, c)| c.clone()).unwrap_or_default();
    for len in (0..=cap).rev() {
        for r in 0..layout.powers[len] {
            let src = layout.offsets[len] + r;
            if buf[src].is_zero() {
                continue;
            }
            let v = std::mem::take(&mut buf[src]);
            for (flen, frank, c) in factor {
                if *flen == 0 || len + flen > cap {
                    continue;
                }
                let dst = layout.offsets[len + flen] + r * layout.powers[*flen] + frank;
                buf[dst] += &v * c;
            }
            buf[src] = v * &c0;
        }
    }
    if !ring.is_integers() {
        for x in buf.iter_mut() {
            if !x.is_zero() {
                *x = ring.reduce(x);
            }
        }
    }
}

/// Magnus expansion `μ_R(g)` truncated at degree `cap`: `x ↦ 1 + x`,
/// `x⁻¹ ↦ (1 + x)⁻¹`, letters multiplied left to right.
pub fn magnus(g: &GroupWord, ring: &RingSpec, cap: usize) -> TruncSeries {
    let alphabet = g.alphabet();
    let images = letter_images(ring, alphabet, cap);
    let layout = DenseLayout::new(alphabet, cap);
    let sparse = |s: &TruncSeries| -> Vec<(usize, usize, BigInt)> {
        s.terms().map(|(w, c)| (w.len(), layout.rank(w), c.clone())).collect()
    };
    let pos: Vec<_> = images.positive.iter().map(sparse).collect();
    let neg: Vec<_> = images.negative.iter().map(sparse).collect();

    let mut buf = vec![BigInt::zero(); layout.size()];
    buf[0] = ring.reduce(&BigInt::one());
    for &l in g.letters() {
        let idx = l.unsigned_abs() as usize - 1;
        let factor = if l > 0 { &pos[idx] } else { &neg[idx] };
        right_multiply(&mut buf, &layout, cap, factor, ring);
    }

    let mut out = TruncSeries::zero(ring.clone(), alphabet, cap);
    for len in 0..=cap {
        for r in 0..layout.powers[len] {
            let c = std::mem::take(&mut buf[layout.offsets[len] + r]);
            if !c.is_zero() {
                out.terms.insert(layout.unrank(len, r), c);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::parse_word;

    fn z() -> RingSpec {
        RingSpec::integers()
    }

    fn series(ring: RingSpec, alphabet: u32, cap: usize, terms: &[(&[u32], i64)]) -> TruncSeries {
        TruncSeries::from_terms(
            ring,
            alphabet,
            cap,
            terms.iter().map(|(w, c)| (Monomial::new(w.to_vec()), BigInt::from(*c))),
        )
        .unwrap()
    }

    #[test]
    fn mul_examples() {
        let x1 = series(z(), 2, 3, &[(&[1], 1)]);
        let x2 = series(z(), 2, 3, &[(&[2], 1)]);
        assert_eq!(x1.mul(&x2).unwrap(), series(z(), 2, 3, &[(&[1, 2], 1)]));
        assert_eq!(x2.mul(&x1).unwrap(), series(z(), 2, 3, &[(&[2, 1], 1)]));
        assert_ne!(x1.mul(&x2).unwrap(), x2.mul(&x1).unwrap());

        let a = series(z(), 2, 3, &[(&[], 1), (&[1], 1)]);
        let b = series(z(), 2, 3, &[(&[], 1), (&[2], 1)]);
        assert_eq!(
            a.mul(&b).unwrap(),
            series(z(), 2, 3, &[(&[], 1), (&[1], 1), (&[2], 1), (&[1, 2], 1)])
        );
        let a = series(z(), 2, 1, &[(&[], 1), (&[1], 1)]);
        let b = series(z(), 2, 1, &[(&[], 1), (&[2], 1)]);
        assert_eq!(a.mul(&b).unwrap(), series(z(), 2, 1, &[(&[], 1), (&[1], 1), (&[2], 1)]));
    }

    #[test]
    fn mismatched_parameters() {
        let a = TruncSeries::one(z(), 2, 3);
        let b = TruncSeries::one(z(), 2, 2);
        assert!(matches!(a.mul(&b), Err(SeriesError::Mismatch(..))));
        let c = TruncSeries::one(RingSpec::modulo(6), 2, 3);
        assert!(matches!(a.add(&c), Err(SeriesError::Mismatch(..))));
    }

    #[test]
    fn inverse_examples() {
        let a = series(z(), 2, 3, &[(&[], 1), (&[1], 1)]);
        assert_eq!(
            a.inverse().unwrap(),
            series(z(), 2, 3, &[(&[], 1), (&[1], -1), (&[1, 1], 1), (&[1, 1, 1], -1)])
        );
        assert!(TruncSeries::one(z(), 2, 3).inverse().unwrap().is_one());
        let b = series(z(), 2, 2, &[(&[], 1), (&[1], 1), (&[2], 1)]);
        let expect = series(
            z(),
            2,
            2,
            &[(&[], 1), (&[1], -1), (&[2], -1), (&[1, 1], 1), (&[1, 2], 1), (&[2, 1], 1), (&[2, 2], 1)],
        );
        assert_eq!(b.inverse().unwrap(), expect);
        assert!(b.mul(&expect).unwrap().is_one());
    }

    #[test]
    fn inverse_errors_and_units() {
        let two = series(z(), 2, 2, &[(&[], 2), (&[1], 1)]);
        assert!(matches!(two.inverse(), Err(SeriesError::NonUnit(..))));
        // 5 is a unit mod 6
        let s = series(RingSpec::modulo(6), 2, 3, &[(&[], 5), (&[1], 1), (&[2, 1], 3)]);
        let inv = s.inverse().unwrap();
        assert!(s.mul(&inv).unwrap().is_one());
        assert!(inv.mul(&s).unwrap().is_one());
        let s = series(RingSpec::modulo(6), 2, 3, &[(&[], 3)]);
        assert!(s.inverse().is_err());
    }

    #[test]
    fn magnus_examples() {
        let x1 = parse_word("x1", 2).unwrap();
        assert_eq!(magnus(&x1, &z(), 3), series(z(), 2, 3, &[(&[], 1), (&[1], 1)]));
        let x1i = parse_word("x1^-1", 2).unwrap();
        assert_eq!(magnus(&x1i, &z(), 2), series(z(), 2, 2, &[(&[], 1), (&[1], -1), (&[1, 1], 1)]));
        let c = parse_word("[x1,x2]", 2).unwrap();
        assert_eq!(magnus(&c, &z(), 2), series(z(), 2, 2, &[(&[], 1), (&[1, 2], 1), (&[2, 1], -1)]));
        assert!(magnus(&GroupWord::identity(3), &z(), 4).is_one());
    }

    #[test]
    fn coefficient_lookup() {
        let g = parse_word("x1*x2", 2).unwrap();
        let s = magnus(&g, &z(), 2);
        assert_eq!(s.coefficient(&Monomial::new(vec![1, 2])).unwrap(), BigInt::one());
        let c = magnus(&parse_word("[x1,x2]", 2).unwrap(), &z(), 2);
        assert_eq!(c.coefficient(&Monomial::new(vec![1])).unwrap(), BigInt::zero());
        assert_eq!(TruncSeries::one(z(), 2, 2).coefficient(&Monomial::empty()).unwrap(), BigInt::one());
        assert!(matches!(
            s.coefficient(&Monomial::new(vec![1, 1, 1])),
            Err(SeriesError::CapExceeded { len: 3, cap: 2, .. })
        ));
    }

    #[test]
    fn magnus_modular_and_zero_ring() {
        let g = parse_word("x1^6", 2).unwrap();
        let s = magnus(&g, &RingSpec::modulo(6), 3);
        // binomial(6, k) mod 6 = 0, 0, 3 for k = 1, 2, 3
        assert_eq!(s, series(RingSpec::modulo(6), 2, 3, &[(&[], 1), (&[1, 1], 3), (&[1, 1, 1], 2)]));
        let s = magnus(&g, &RingSpec::modulo(1), 3);
        assert!(s.is_zero());
    }

    #[test]
    fn json_layout() {
        let c = magnus(&parse_word("[x1,x2]", 2).unwrap(), &z(), 2);
        let j = serde_json::to_string(&c.to_json()).unwrap();
        assert_eq!(
            j,
            r#"{"ring":"Z","cap":2,"terms":[{"word":"e","coeff":"1"},{"word":"x1x2","coeff":"1"},{"word":"x2x1","coeff":"-1"}]}"#
        );
    }
}
