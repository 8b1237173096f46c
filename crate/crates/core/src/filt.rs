//! Filtration membership and samplers.
//!
//! For an exponent map `e` and level `n`, the subgroup `μ⁻¹(1 + Σ e(n,i)𝔡^i)` of
//! the free group can be decided in two independent ways:
//!
//! * **series**: expand `μ_Z(g)` up to degree `n − 1` and test the degree-`i`
//!   coefficients for divisibility by `e(n, i)`;
//! * **kernels**: for every `d < n` and every monomial `w` of length `d`, the
//!   unipotent representation `φ_w` over `Z/e(n,d)Z` must send `g` to the identity.
//!
//! The kernel route never touches power series: `φ_w` is evaluated letter by
//! letter from the images of the generators, so agreement of the two routes is
//! a real cross-check.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coeff::RingSpec;
use crate::emap::{self, EMap, EMapError, IdealWitness, Violation};
use crate::magnus::{magnus, TruncSeries};
use crate::words::{basic_commutator, enumerate_monomials, lyndon_words, GroupWord, Monomial};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FiltError {
    #[error(transparent)]
    EMap(#[from] EMapError),
    #[error("e-map is not multiplicatively descending up to level {level}: {violation}")]
    NotDescending { level: usize, violation: Violation },
    #[error("level must be at least 1")]
    ZeroLevel,
    #[error("monomial must be non-empty")]
    EmptyMonomial,
    #[error("monomial letter x{letter} outside alphabet of size {alphabet}")]
    OutOfAlphabet { letter: u32, alphabet: u32 },
    #[error("A-filtration level {level} needs a_1..a_{}, sequence has {have}", level - 1)]
    SequenceTooShort { level: usize, have: usize },
    #[error("exponent {0} is too large to expand as a word")]
    ExponentTooLarge(BigInt),
    #[error("route disagreement on {word}: series says {series}, kernels say {kernels}")]
    RouteDisagreement { word: String, series: bool, kernels: bool },
}

/// Upper unitriangular matrix over `Z` or `Z/mZ`, stored densely (row-major).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniMatrix {
    size: usize,
    ring: RingSpec,
    entries: Vec<BigInt>,
}

impl UniMatrix {
    pub fn identity(size: usize, ring: RingSpec) -> Self {
        let mut entries = vec![BigInt::zero(); size * size];
        let one = ring.reduce(&BigInt::one());
        for i in 0..size {
            entries[i * size + i] = one.clone();
        }
        UniMatrix { size, ring, entries }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn ring(&self) -> &RingSpec {
        &self.ring
    }

    /// Entry `(i, j)`, 1-based.
    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[(i - 1) * self.size + (j - 1)]
    }

    pub fn mul(&self, other: &UniMatrix) -> UniMatrix {
        assert_eq!(self.size, other.size);
        assert_eq!(self.ring, other.ring);
        let n = self.size;
        let mut out = vec![BigInt::zero(); n * n];
        for i in 0..n {
            for k in i..n {
                let a = &self.entries[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in k..n {
                    let b = &other.entries[k * n + j];
                    if !b.is_zero() {
                        out[i * n + j] += a * b;
                    }
                }
            }
        }
        for v in &mut out {
            *v = self.ring.reduce_owned(std::mem::take(v));
        }
        UniMatrix { size: n, ring: self.ring.clone(), entries: out }
    }

    pub fn is_identity(&self) -> bool {
        *self == UniMatrix::identity(self.size, self.ring.clone())
    }

    /// Identity in the quotient by the centre: every off-diagonal entry except
    /// `(1, size)` vanishes.
    pub fn is_identity_mod_center(&self) -> bool {
        let n = self.size;
        (1..=n).all(|i| {
            (i + 1..=n).all(|j| (i == 1 && j == n) || self.get(i, j).is_zero())
        })
    }

    pub fn rows(&self) -> Vec<Vec<String>> {
        self.entries.chunks(self.size.max(1)).map(|r| r.iter().map(BigInt::to_string).collect()).collect()
    }
}

impl fmt::Display for UniMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.rows() {
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Right-multiplies `m` by the image of one signed letter under `φ_w`, in place.
///
/// `x_k ↦ I + Σ_{w_i = k} E_{i,i+1}`; its inverse has `(i, j)` entry
/// `(−1)^{j−i}` when `w_i = … = w_{j−1} = k`. Both act as column operations;
/// columns are rewritten from the right so every source column is still old.
fn apply_letter(m: &mut UniMatrix, w: &Monomial, letter: i32) {
    let letters = w.letters();
    let k = letter.unsigned_abs();
    let n = m.size;
    for col in (1..n).rev() {
        // col (0-based) receives from columns col-1, col-2, ... while the letters match
        let mut src = col;
        while src > 0 && letters[src - 1] == k {
            src -= 1;
            let span = col - src;
            if letter > 0 && span > 1 {
                break;
            }
            let negate = letter < 0 && span % 2 == 1;
            for row in 0..=src {
                let v = &m.entries[row * n + src];
                if v.is_zero() {
                    continue;
                }
                let v = v.clone();
                let cell = &mut m.entries[row * n + col];
                if negate {
                    *cell -= v;
                } else {
                    *cell += v;
                }
            }
        }
        if !m.ring.is_integers() {
            for row in 0..col {
                let cell = &mut m.entries[row * n + col];
                *cell = m.ring.reduce_owned(std::mem::take(cell));
            }
        }
    }
}

/// `φ_{R,w}(g)`: the `(|w|+1)`-square unipotent matrix whose `(i, j)` entry is the
/// Magnus coefficient of `g` at the subword `w_i ⋯ w_{j−1}`.
pub fn phi(w: &Monomial, g: &GroupWord, ring: &RingSpec) -> Result<UniMatrix, FiltError> {
    if w.is_empty() {
        return Err(FiltError::EmptyMonomial);
    }
    if let Some(&letter) = w.letters().iter().find(|&&l| l > g.alphabet()) {
        return Err(FiltError::OutOfAlphabet { letter, alphabet: g.alphabet() });
    }
    Ok(phi_unchecked(w, g, ring))
}

fn phi_unchecked(w: &Monomial, g: &GroupWord, ring: &RingSpec) -> UniMatrix {
    let mut acc = UniMatrix::identity(w.len() + 1, ring.clone());
    for &l in g.letters() {
        apply_letter(&mut acc, w, l);
    }
    acc
}

/// Result of the series route, with the first offending coefficient on failure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesVerdict {
    pub member: bool,
    pub witness: Option<IdealWitness>,
}

/// Result of the kernel route, with the first `(d, w)` whose image is not the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelVerdict {
    pub member: bool,
    pub witness: Option<(usize, Monomial)>,
}

/// `g ∈ μ_Z⁻¹(1 + 𝔡^{(e,n)})`, decided on `μ_Z(g) − 1` up to degree `n − 1`.
pub fn member_series(g: &GroupWord, e: &EMap, n: usize) -> Result<SeriesVerdict, FiltError> {
    if n == 0 {
        return Err(FiltError::ZeroLevel);
    }
    let z = RingSpec::integers();
    let s = magnus(g, &z, n - 1);
    let minus_one = s
        .sub(&TruncSeries::one(z, g.alphabet(), n - 1))
        .expect("same parameters");
    let witness = emap::ideal_witness(&minus_one, e, n)?;
    Ok(SeriesVerdict { member: witness.is_none(), witness })
}

/// `g` lies in `Ker φ_{Z/e(n,d)Z, w}` for all `1 ≤ d < n` and `|w| = d`.
/// Stops at the first non-identity image.
pub fn member_kernels(g: &GroupWord, e: &EMap, n: usize) -> Result<KernelVerdict, FiltError> {
    if n == 0 {
        return Err(FiltError::ZeroLevel);
    }
    for d in 1..n {
        // e(n, d) = 0 selects Z itself
        let ring = RingSpec::modulo(e.evaluate(n, d)?);
        for w in enumerate_monomials(g.alphabet(), d) {
            if !phi_unchecked(&w, g, &ring).is_identity() {
                return Ok(KernelVerdict { member: false, witness: Some((d, w)) });
            }
        }
    }
    Ok(KernelVerdict { member: true, witness: None })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Series,
    Kernels,
    #[default]
    Both,
}

impl std::str::FromStr for Route {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "series" => Ok(Route::Series),
            "kernels" => Ok(Route::Kernels),
            "both" => Ok(Route::Both),
            other => Err(format!("unknown route `{other}` (series|kernels|both)")),
        }
    }
}

/// An exponent map, a level and the route(s) used to decide membership.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiltrationSpec {
    emap: EMap,
    level: usize,
    route: Route,
}

/// Outcome of [`FiltrationSpec::decide`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decision {
    pub member: bool,
    pub series: Option<SeriesVerdict>,
    pub kernels: Option<KernelVerdict>,
}

impl FiltrationSpec {
    pub fn new(emap: EMap, level: usize, route: Route) -> Result<Self, FiltError> {
        if level == 0 {
            return Err(FiltError::ZeroLevel);
        }
        emap.check_descending(level)
            .map_err(|violation| FiltError::NotDescending { level, violation })?;
        Ok(FiltrationSpec { emap, level, route })
    }

    pub fn emap(&self) -> &EMap {
        &self.emap
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn route(&self) -> Route {
        self.route
    }

    /// Runs the selected route(s). With [`Route::Both`], disagreement is an error:
    /// it is either a bug or a counterexample to the characterization theorems.
    pub fn decide(&self, g: &GroupWord) -> Result<Decision, FiltError> {
        let series = match self.route {
            Route::Series | Route::Both => Some(member_series(g, &self.emap, self.level)?),
            Route::Kernels => None,
        };
        let kernels = match self.route {
            Route::Kernels | Route::Both => Some(member_kernels(g, &self.emap, self.level)?),
            Route::Series => None,
        };
        if let (Some(s), Some(k)) = (&series, &kernels) {
            if s.member != k.member {
                return Err(FiltError::RouteDisagreement { word: g.to_string(), series: s.member, kernels: k.member });
            }
        }
        let member = series.as_ref().map(|s| s.member).or(kernels.as_ref().map(|k| k.member)).unwrap();
        Ok(Decision { member, series, kernels })
    }
}

/// Sampling parameters: number of samples, length of level-1 words, and the
/// maximum number of factors multiplied at each recursive level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleBudget {
    pub count: usize,
    pub max_word_len: usize,
    pub fanout: usize,
}

impl Default for SampleBudget {
    fn default() -> Self {
        SampleBudget { count: 30, max_word_len: 6, fanout: 2 }
    }
}

impl SampleBudget {
    pub fn with_count(count: usize) -> Self {
        SampleBudget { count, ..Default::default() }
    }
}

/// Uniformly random reduced word with `1..=max_len` letters.
pub fn random_word<R: Rng + ?Sized>(rng: &mut R, alphabet: u32, max_len: usize) -> GroupWord {
    let len = rng.gen_range(1..=max_len.max(1));
    let mut letters: Vec<i32> = Vec::with_capacity(len);
    while letters.len() < len {
        let g = rng.gen_range(1..=alphabet) as i32;
        let l = if rng.gen_bool(0.5) { g } else { -g };
        if letters.last() != Some(&-l) {
            letters.push(l);
        }
    }
    GroupWord::from_letters(alphabet, letters).expect("letters drawn from the alphabet")
}

/// Recursively defined filtrations `G_(1) = G`,
/// `G_(n) = G_(g(n))^{f(n)} Π_{(s,t)∈T, s+t=n} [G_(s), G_(t)]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RecursiveScheme {
    /// `G^(n,A) = (G^(n−1,A))^{a_{n−1}} [G^(n−1,A), G]`.
    AFiltration(Vec<u64>),
    /// `G_(n,q) = G_(⌈n/p⌉,q)^q Π_{s+t=n} [G_(s,q), G_(t,q)]` with `q = p^t`.
    QZassenhaus { p: u64, t: u32 },
}

impl RecursiveScheme {
    pub fn q_zassenhaus(p: u64, t: u32) -> Result<Self, FiltError> {
        EMap::zassenhaus(p, t)?;
        Ok(RecursiveScheme::QZassenhaus { p, t })
    }

    /// Exponent `f(n)` of the power factor.
    pub fn power_exponent(&self, n: usize) -> u64 {
        match self {
            RecursiveScheme::AFiltration(a) => a[n - 2],
            RecursiveScheme::QZassenhaus { p, t } => p.pow(*t),
        }
    }

    /// Level `g(n)` whose elements are raised to the power.
    pub fn power_level(&self, n: usize) -> usize {
        match self {
            RecursiveScheme::AFiltration(_) => n - 1,
            RecursiveScheme::QZassenhaus { p, .. } => n.div_ceil(*p as usize),
        }
    }

    /// Pairs `(s, t) ∈ T` with `s + t = n`.
    pub fn splits(&self, n: usize) -> Vec<(usize, usize)> {
        match self {
            RecursiveScheme::AFiltration(_) => vec![(n - 1, 1)],
            RecursiveScheme::QZassenhaus { .. } => (1..n).map(|s| (s, n - s)).collect(),
        }
    }

    /// The exponent map whose product filtration the scheme reproduces.
    pub fn emap(&self) -> EMap {
        match self {
            RecursiveScheme::AFiltration(a) => EMap::SequenceGcd(a.clone()),
            RecursiveScheme::QZassenhaus { p, t } => EMap::Zassenhaus { p: *p, t: *t },
        }
    }

    /// Conditions (1) and (2) relating the scheme to its exponent map, up to `n_max`.
    pub fn check_conditions(&self, n_max: usize) -> Result<(), String> {
        let e = self.emap();
        let pairs: Vec<(usize, usize)> = (2..=n_max).flat_map(|n| self.splits(n)).collect();
        emap::check_product_condition(&e, &pairs)?;
        emap::check_power_condition(&e, &|n| self.power_exponent(n), &|n| self.power_level(n), n_max)
    }

    fn validate(&self, n: usize) -> Result<(), FiltError> {
        if n == 0 {
            return Err(FiltError::ZeroLevel);
        }
        if let RecursiveScheme::AFiltration(a) = self {
            if a.len() + 1 < n {
                return Err(FiltError::SequenceTooShort { level: n, have: a.len() });
            }
        }
        Ok(())
    }

    fn sample_level(&self, n: usize, alphabet: u32, budget: &SampleBudget, rng: &mut ChaCha8Rng) -> GroupWord {
        if n == 1 {
            return random_word(rng, alphabet, budget.max_word_len);
        }
        let f = self.power_exponent(n);
        let splits = self.splits(n);
        let factors = rng.gen_range(1..=budget.fanout.max(1));
        let mut out = GroupWord::identity(alphabet);
        for _ in 0..factors {
            let use_power = f > 0 && rng.gen_bool(0.5);
            let mut factor = if use_power {
                self.sample_level(self.power_level(n), alphabet, budget, rng).power(f as i64)
            } else {
                let (s, t) = splits[rng.gen_range(0..splits.len())];
                let u = self.sample_level(s, alphabet, budget, rng);
                let v = self.sample_level(t, alphabet, budget, rng);
                u.commutator(&v)
            };
            if rng.gen_bool(0.5) {
                factor = factor.invert();
            }
            out = out.multiply(&factor);
        }
        out
    }
}

/// Random elements of the `n`-th term of a recursive filtration, built by
/// following the recursion; deterministic for a given seed.
pub fn sample_recursive(
    scheme: &RecursiveScheme,
    alphabet: u32,
    n: usize,
    budget: &SampleBudget,
    seed: u64,
) -> Result<Vec<GroupWord>, FiltError> {
    scheme.validate(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..budget.count).map(|_| scheme.sample_level(n, alphabet, budget, &mut rng)).collect())
}

/// Random elements of `Π_i (F^(i,0))^{e(n,i)}`: powers of basic commutators of
/// weight `i` whose leaves are substituted by random words. Factors with
/// `e(n,i) = 0` are skipped, except at `i = n` where `e(n,n) = 1`.
pub fn product_sampler(
    e: &EMap,
    alphabet: u32,
    n: usize,
    budget: &SampleBudget,
    seed: u64,
) -> Result<Vec<GroupWord>, FiltError> {
    if n == 0 {
        return Err(FiltError::ZeroLevel);
    }
    e.check_descending(n).map_err(|violation| FiltError::NotDescending { level: n, violation })?;
    let row = e.row(n)?;
    let mut levels = Vec::new();
    for i in 1..=n {
        let ex = &row[i - 1];
        if ex.is_zero() && i < n {
            continue;
        }
        let k = ex.to_i64().filter(|&k| k <= u32::MAX as i64).ok_or_else(|| FiltError::ExponentTooLarge(ex.clone()))?;
        let brackets: Vec<_> = lyndon_words(alphabet, i)
            .iter()
            .map(|u| basic_commutator(u).expect("generated words are Lyndon"))
            .collect();
        levels.push((k, brackets));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(budget.count);
    // short leaves keep high-weight brackets from exploding in length
    let leaf_len = budget.max_word_len.clamp(1, 2);
    for _ in 0..budget.count {
        let mut factors = Vec::new();
        for (k, brackets) in &levels {
            for _ in 0..rng.gen_range(0..=budget.fanout) {
                let c = &brackets[rng.gen_range(0..brackets.len())];
                let subs: Vec<GroupWord> = (0..alphabet).map(|_| random_word(&mut rng, alphabet, leaf_len)).collect();
                let base = c.realize_with(&|j| subs[j as usize - 1].clone());
                let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
                factors.push(base.power(sign * k));
            }
        }
        if factors.is_empty() {
            // the top level always survives, so fall back to one weight-n factor
            let (k, brackets) = levels.last().unwrap();
            let c = &brackets[rng.gen_range(0..brackets.len())];
            factors.push(c.realize(alphabet).power(*k));
        }
        factors.shuffle(&mut rng);
        samples.push(factors.iter().fold(GroupWord::identity(alphabet), |acc, f| acc.multiply(f)));
    }
    Ok(samples)
}
