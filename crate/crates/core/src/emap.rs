//! Multiplicatively descending exponent maps `e(n, i)`, `1 ≤ i ≤ n`.
//!
//! A map is multiplicatively descending when `e(n, n) = 1` and `e(n, i)` is a
//! multiple of `e(n, i + 1)`. Divisibility by `0` means equality to `0`, so the
//! trivial map gives exactly the powers of the augmentation ideal.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::coeff::divisible;
use crate::magnus::TruncSeries;
use crate::words::Monomial;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EMapError {
    #[error("e({n},{i}) is undefined: need 1 <= i <= n")]
    OutOfRange { n: usize, i: usize },
    #[error("no row for n = {0} in the explicit table")]
    MissingRow(usize),
    #[error("sequence has {have} entries but level {n} needs a_1..a_{}", n - 1)]
    SequenceTooShort { n: usize, have: usize },
    #[error("invalid e-map: {0}")]
    Invalid(String),
    #[error("invalid e-map spec `{0}`: expected trivial | const:<a> | gcdseq:<a1>,<a2>,... | zass:<p>,<t> | file:<path>")]
    Syntax(String),
    #[error("cannot read e-map table {path}: {message}")]
    File { path: String, message: String },
    #[error("ideal membership needs a series over Z, got {0}")]
    NotIntegers(String),
    #[error("series cap {cap} is below n - 1 = {}", n - 1)]
    CapTooSmall { cap: usize, n: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum EMap {
    /// `e(n, i) = 0` for `i < n`.
    Trivial,
    /// `e(n, i) = a^(n − i)`.
    Constant(u64),
    /// `e(n, i) = gcd { Π_{j∈J} a_j : J ⊆ {1..n−1}, |J| = n − i }`.
    SequenceGcd(Vec<u64>),
    /// `e(n, i) = p^(t·j)` with `j` minimal such that `i·p^j ≥ n`.
    Zassenhaus { p: u64, t: u32 },
    /// Row `n` holds `[e(n,1), …, e(n,n)]`.
    Explicit(BTreeMap<usize, Vec<BigInt>>),
}

/// First (n, i, …) at which an audit fails.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// `e(n, n) ≠ 1`.
    Diagonal { n: usize, value: String },
    /// `e(n, i) ∉ e(n, i+1)Z`.
    NotDescending { n: usize, i: usize },
    /// `binom(e(n,i), l) ∉ e(n, il)Z`.
    Binomial { n: usize, i: usize, l: usize },
    /// `v_p(e(n,i)) ≥ r` but `v_p(e(n,i)) − r < v_p(e(n, i p^r))`.
    ConditionIii { n: usize, i: usize, r: u32, p: u64 },
    /// A value needed by the audit could not be evaluated.
    Undefined { message: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Diagonal { n, value } => write!(f, "e({n},{n}) = {value} != 1"),
            Violation::NotDescending { n, i } => write!(f, "e({n},{i}) not divisible by e({n},{})", i + 1),
            Violation::Binomial { n, i, l } => {
                write!(f, "binom(e({n},{i}), {l}) not divisible by e({n},{})", i * l)
            }
            Violation::ConditionIii { n, i, r, p } => write!(f, "condition (iii) fails at n={n}, i={i}, r={r}, p={p}"),
            Violation::Undefined { message } => f.write_str(message),
        }
    }
}

impl From<EMapError> for Violation {
    fn from(e: EMapError) -> Self {
        Violation::Undefined { message: e.to_string() }
    }
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// Binomial coefficient `binom(top, l)` for a big `top` and small `l`.
pub(crate) fn binomial(top: &BigInt, l: usize) -> BigInt {
    if l == 0 {
        return BigInt::one();
    }
    if top < &BigInt::from(l) {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for k in 0..l {
        // acc = binom(top, k + 1) after this step; the division is exact
        acc = acc * (top - k) / (k + 1);
    }
    acc
}

/// `p`-adic valuation; `None` stands for `+∞` (value zero).
fn valuation(v: &BigInt, p: u64) -> Option<u32> {
    if v.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut v = v.abs();
    let mut k = 0;
    loop {
        let (q, r) = v.div_rem(&p);
        if !r.is_zero() {
            return Some(k);
        }
        v = q;
        k += 1;
    }
}

/// Calls `visit` on every `size`-subset of `0..n` (as sorted indices) until it returns false.
fn for_each_subset(n: usize, size: usize, mut visit: impl FnMut(&[usize]) -> bool) {
    if size > n {
        return;
    }
    let mut idx: Vec<usize> = (0..size).collect();
    loop {
        if !visit(&idx) {
            return;
        }
        let mut k = size;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            if idx[k] < n - size + k {
                break;
            }
            if k == 0 {
                return;
            }
        }
        idx[k] += 1;
        for m in k + 1..size {
            idx[m] = idx[m - 1] + 1;
        }
    }
}

impl EMap {
    pub fn constant(a: u64) -> Self {
        EMap::Constant(a)
    }

    pub fn sequence_gcd(a: Vec<u64>) -> Self {
        EMap::SequenceGcd(a)
    }

    pub fn zassenhaus(p: u64, t: u32) -> Result<Self, EMapError> {
        if !is_prime(p) {
            return Err(EMapError::Invalid(format!("{p} is not prime")));
        }
        if t == 0 {
            return Err(EMapError::Invalid("t must be positive".into()));
        }
        Ok(EMap::Zassenhaus { p, t })
    }

    /// Rows must list `e(n,1)..e(n,n)` with non-negative entries.
    pub fn explicit(rows: BTreeMap<usize, Vec<BigInt>>) -> Result<Self, EMapError> {
        for (&n, row) in &rows {
            if n == 0 || row.len() != n {
                return Err(EMapError::Invalid(format!("row n = {n} must have exactly n values, has {}", row.len())));
            }
            if row.iter().any(Signed::is_negative) {
                return Err(EMapError::Invalid(format!("row n = {n} has a negative value")));
            }
        }
        Ok(EMap::Explicit(rows))
    }

    pub fn explicit_from_rows(rows: &[&[i64]]) -> Result<Self, EMapError> {
        let map = rows
            .iter()
            .map(|r| (r.len(), r.iter().map(|&v| BigInt::from(v)).collect()))
            .collect();
        Self::explicit(map)
    }

    /// Parses `trivial | const:<a> | gcdseq:<a1>,… | zass:<p>,<t> | file:<path>`.
    pub fn from_spec(spec: &str) -> Result<Self, EMapError> {
        let spec = spec.trim();
        let syntax = || EMapError::Syntax(spec.to_string());
        let nums = |s: &str| -> Result<Vec<u64>, EMapError> {
            s.split(',').map(|t| t.trim().parse::<u64>().map_err(|_| syntax())).collect()
        };
        if spec == "trivial" {
            return Ok(EMap::Trivial);
        }
        if let Some(rest) = spec.strip_prefix("const:") {
            return Ok(EMap::Constant(rest.trim().parse().map_err(|_| syntax())?));
        }
        if let Some(rest) = spec.strip_prefix("gcdseq:") {
            return Ok(EMap::SequenceGcd(nums(rest)?));
        }
        if let Some(rest) = spec.strip_prefix("zass:") {
            let v = nums(rest)?;
            if v.len() != 2 {
                return Err(syntax());
            }
            let t = u32::try_from(v[1]).map_err(|_| syntax())?;
            return Self::zassenhaus(v[0], t);
        }
        if let Some(path) = spec.strip_prefix("file:") {
            let text = std::fs::read_to_string(path)
                .map_err(|e| EMapError::File { path: path.to_string(), message: e.to_string() })?;
            return Self::from_table_json(&text)
                .map_err(|e| EMapError::File { path: path.to_string(), message: e.to_string() });
        }
        Err(syntax())
    }

    /// JSON table: `[{"n": 3, "values": [4, 2, 1]}, …]`; values may be numbers or decimal strings.
    pub fn from_table_json(text: &str) -> Result<Self, EMapError> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Value {
            Num(u64),
            Str(String),
        }
        #[derive(Deserialize)]
        struct Row {
            n: usize,
            values: Vec<Value>,
        }
        let rows: Vec<Row> = serde_json::from_str(text).map_err(|e| EMapError::Invalid(e.to_string()))?;
        let mut map = BTreeMap::new();
        for row in rows {
            let values = row
                .values
                .into_iter()
                .map(|v| match v {
                    Value::Num(x) => Ok(BigInt::from(x)),
                    Value::Str(s) => s.trim().parse::<BigInt>().map_err(|_| EMapError::Invalid(format!("bad value `{s}`"))),
                })
                .collect::<Result<Vec<_>, _>>()?;
            if map.insert(row.n, values).is_some() {
                return Err(EMapError::Invalid(format!("duplicate row n = {}", row.n)));
            }
        }
        Self::explicit(map)
    }

    /// `e(n, i)`.
    pub fn evaluate(&self, n: usize, i: usize) -> Result<BigInt, EMapError> {
        if i == 0 || i > n {
            return Err(EMapError::OutOfRange { n, i });
        }
        if let EMap::Explicit(rows) = self {
            let row = rows.get(&n).ok_or(EMapError::MissingRow(n))?;
            return Ok(row[i - 1].clone());
        }
        if i == n {
            return Ok(BigInt::one());
        }
        match self {
            EMap::Trivial => Ok(BigInt::zero()),
            EMap::Constant(a) => Ok(Pow::pow(BigInt::from(*a), (n - i) as u32)),
            EMap::SequenceGcd(a) => {
                if a.len() < n - 1 {
                    return Err(EMapError::SequenceTooShort { n, have: a.len() });
                }
                let prefix: Vec<BigInt> = a[..n - 1].iter().map(|&v| BigInt::from(v)).collect();
                let mut g = BigInt::zero();
                for_each_subset(n - 1, n - i, |subset| {
                    let prod: BigInt = subset.iter().map(|&j| &prefix[j]).product();
                    g = g.gcd(&prod);
                    // the gcd can only shrink further; 1 is the floor
                    !g.is_one()
                });
                Ok(g)
            }
            EMap::Zassenhaus { p, t } => {
                let j = zassenhaus_exponent(n, i, *p);
                Ok(Pow::pow(BigInt::from(*p), t * j))
            }
            EMap::Explicit(_) => unreachable!(),
        }
    }

    /// Row `[e(n,1), …, e(n,n)]`.
    pub fn row(&self, n: usize) -> Result<Vec<BigInt>, EMapError> {
        (1..=n).map(|i| self.evaluate(n, i)).collect()
    }

    /// Levels `n ≤ n_max` the map is defined on.
    pub fn levels(&self, n_max: usize) -> Vec<usize> {
        match self {
            EMap::Explicit(rows) => rows.keys().copied().filter(|&n| n <= n_max).collect(),
            _ => (1..=n_max).collect(),
        }
    }

    /// Conditions (i) `e(n,n) = 1` and (ii) `e(n,i) ∈ e(n,i+1)Z` for all `n ≤ n_max`.
    pub fn check_descending(&self, n_max: usize) -> Result<(), Violation> {
        for n in self.levels(n_max) {
            let row = self.row(n)?;
            if !row[n - 1].is_one() {
                return Err(Violation::Diagonal { n, value: row[n - 1].to_string() });
            }
            for i in 1..n {
                if !divisible(&row[i - 1], &row[i]) {
                    return Err(Violation::NotDescending { n, i });
                }
            }
        }
        Ok(())
    }

    /// `binom(e(n,i), l) ∈ e(n, il)Z` whenever `1 ≤ l ≤ e(n,i)` and `il ≤ n`.
    pub fn check_binomial(&self, n_max: usize) -> Result<(), Violation> {
        for n in self.levels(n_max) {
            let row = self.row(n)?;
            for i in 1..=n {
                let e = &row[i - 1];
                // il ≤ n bounds l by n even when e(n,i) is huge
                let l_max = e.to_usize().map_or(n, |v| v.min(n));
                for l in (1..=l_max).take_while(|l| i * l <= n) {
                    if !divisible(&binomial(e, l), &row[i * l - 1]) {
                        return Err(Violation::Binomial { n, i, l });
                    }
                }
            }
        }
        Ok(())
    }

    /// For primes `p` and `r ≥ 1` with `i p^r ≤ n`: if `v_p(e(n,i)) ≥ r` then
    /// `v_p(e(n,i)) − r ≥ v_p(e(n, i p^r))`. Only primes `p ≤ n_max` can occur.
    pub fn check_condition_iii(&self, n_max: usize) -> Result<(), Violation> {
        let primes: Vec<u64> = (2..=n_max as u64).filter(|&p| is_prime(p)).collect();
        for n in self.levels(n_max) {
            let row = self.row(n)?;
            for i in 1..=n {
                for &p in &primes {
                    let vi = valuation(&row[i - 1], p);
                    let mut r = 1u32;
                    let mut ipr = i * p as usize;
                    while ipr <= n {
                        let enough = vi.is_none_or(|v| v >= r);
                        if enough {
                            let target = valuation(&row[ipr - 1], p);
                            let ok = match (vi, target) {
                                (None, _) => true,
                                (Some(_), None) => false,
                                (Some(v), Some(t)) => v - r >= t,
                            };
                            if !ok {
                                return Err(Violation::ConditionIii { n, i, r, p });
                            }
                        }
                        r += 1;
                        ipr *= p as usize;
                    }
                }
            }
        }
        Ok(())
    }

    /// `e'(n, i) = gcd_{j ≤ i} e(n, j)`: a descending map with the same ideals.
    pub fn normalize(&self, n_max: usize) -> Result<EMap, EMapError> {
        let mut rows = BTreeMap::new();
        for n in self.levels(n_max) {
            let row = self.row(n)?;
            if !row[n - 1].is_one() {
                return Err(EMapError::Invalid(format!("e({n},{n}) = {} != 1", row[n - 1])));
            }
            let mut g = BigInt::zero();
            let normalized = row
                .iter()
                .map(|v| {
                    g = g.gcd(v);
                    g.clone()
                })
                .collect();
            rows.insert(n, normalized);
        }
        EMap::explicit(rows)
    }
}

/// Least `j ≥ 0` with `i·p^j ≥ n`, i.e. `⌈log_p(n/i)⌉`.
pub fn zassenhaus_exponent(n: usize, i: usize, p: u64) -> u32 {
    let mut j = 0;
    let mut acc = i as u128;
    while acc < n as u128 {
        acc *= p as u128;
        j += 1;
    }
    j
}

impl fmt::Display for EMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EMap::Trivial => f.write_str("trivial"),
            EMap::Constant(a) => write!(f, "const:{a}"),
            EMap::SequenceGcd(a) => {
                let parts: Vec<String> = a.iter().map(u64::to_string).collect();
                write!(f, "gcdseq:{}", parts.join(","))
            }
            EMap::Zassenhaus { p, t } => write!(f, "zass:{p},{t}"),
            EMap::Explicit(rows) => write!(f, "explicit({} rows)", rows.len()),
        }
    }
}

/// Where a series leaves the ideal: its degree, monomial and coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealWitness {
    pub degree: usize,
    pub word: Monomial,
    pub coefficient: BigInt,
}

/// First coefficient that keeps `s` out of `Σ_i e(n,i) 𝔡^i`, scanning degrees
/// `0..n−1` in (length, lexicographic) order. Degrees `≥ n` are unconstrained.
pub fn ideal_witness(s: &TruncSeries, e: &EMap, n: usize) -> Result<Option<IdealWitness>, EMapError> {
    if !s.ring().is_integers() {
        return Err(EMapError::NotIntegers(s.ring().to_string()));
    }
    if n >= 1 && s.cap() < n - 1 {
        return Err(EMapError::CapTooSmall { cap: s.cap(), n });
    }
    // e(n,j)𝔡^j ⊇ e(n,j)𝔡^i for i ≥ j, so degree i sees the prefix gcd
    let mut row = if n >= 1 { e.row(n)? } else { Vec::new() };
    for i in 1..row.len() {
        row[i] = row[i].gcd(&row[i - 1]);
    }
    for (w, c) in s.terms().take_while(|(w, _)| w.len() < n) {
        let d = w.len();
        let ok = d > 0 && divisible(c, &row[d - 1]);
        if !ok {
            return Ok(Some(IdealWitness { degree: d, word: w.clone(), coefficient: c.clone() }));
        }
    }
    Ok(None)
}

/// Membership of `s` (over `Z`) in the ideal `Σ_i e(n,i) 𝔡^i`: zero constant
/// term and every degree-`i` coefficient, `i < n`, divisible by `e(n, i)`
/// (by `gcd_{j ≤ i} e(n, j)` when `e` is not descending).
pub fn ideal_member(s: &TruncSeries, e: &EMap, n: usize) -> Result<bool, EMapError> {
    Ok(ideal_witness(s, e, n)?.is_none())
}

/// Condition (1) of the recursive construction: `e(s,i)e(t,j) ∈ e(s+t, i+j)Z`
/// for every pair `(s, t)` produced by `pairs` and all `i ≤ s`, `j ≤ t`.
pub fn check_product_condition(e: &EMap, pairs: &[(usize, usize)]) -> Result<(), String> {
    for &(s, t) in pairs {
        let rs = e.row(s).map_err(|x| x.to_string())?;
        let rt = e.row(t).map_err(|x| x.to_string())?;
        let rn = e.row(s + t).map_err(|x| x.to_string())?;
        for i in 1..=s {
            for j in 1..=t {
                if !divisible(&(&rs[i - 1] * &rt[j - 1]), &rn[i + j - 1]) {
                    return Err(format!("(1) fails at s={s}, t={t}, i={i}, j={j}"));
                }
            }
        }
    }
    Ok(())
}

/// Condition (2): `binom(f(n), l) · e(g(n), j_1)⋯e(g(n), j_l) ∈ e(n, j_1+…+j_l)Z`
/// for `2 ≤ n ≤ n_max`, `1 ≤ l ≤ f(n)`, `1 ≤ j_k ≤ g(n)`, `Σ j_k ≤ n`.
pub fn check_power_condition(
    e: &EMap,
    f: &dyn Fn(usize) -> u64,
    g: &dyn Fn(usize) -> usize,
    n_max: usize,
) -> Result<(), String> {
    for n in 2..=n_max {
        let fv = f(n);
        let gn = g(n);
        let rg = e.row(gn).map_err(|x| x.to_string())?;
        let rn = e.row(n).map_err(|x| x.to_string())?;
        // every j_k ≥ 1, so l ≤ n; the product is symmetric, so nondecreasing j suffices
        let l_max = (fv as usize).min(n);
        for l in 1..=l_max {
            let coeff = binomial(&BigInt::from(fv), l);
            let mut js = vec![1usize; l];
            loop {
                let sum: usize = js.iter().sum();
                if sum <= n {
                    let prod: BigInt = js.iter().map(|&j| &rg[j - 1]).product::<BigInt>() * &coeff;
                    if !divisible(&prod, &rn[sum - 1]) {
                        return Err(format!("(2) fails at n={n}, l={l}, j={js:?}"));
                    }
                }
                // next nondecreasing tuple with entries ≤ g(n)
                let Some(k) = (0..l).rev().find(|&k| js[k] < gn) else { break };
                let v = js[k] + 1;
                for x in &mut js[k..] {
                    *x = v;
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::RingSpec;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn row(e: &EMap, n: usize) -> Vec<i64> {
        e.row(n).unwrap().iter().map(|v| v.to_i64().unwrap()).collect()
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(EMap::Constant(2).evaluate(4, 2).unwrap(), big(4));
        assert_eq!(EMap::zassenhaus(2, 1).unwrap().evaluate(4, 1).unwrap(), big(4));
        assert_eq!(EMap::SequenceGcd(vec![2, 3, 4]).evaluate(4, 2).unwrap(), big(2));
        assert_eq!(row(&EMap::Trivial, 3), vec![0, 0, 1]);
        assert_eq!(row(&EMap::Constant(0), 3), vec![0, 0, 1]);
        assert_eq!(row(&EMap::zassenhaus(3, 2).unwrap(), 9), vec![81, 81, 9, 9, 9, 9, 9, 9, 1]);
    }

    #[test]
    fn evaluate_errors() {
        assert_eq!(EMap::Trivial.evaluate(3, 0), Err(EMapError::OutOfRange { n: 3, i: 0 }));
        assert_eq!(EMap::Trivial.evaluate(3, 4), Err(EMapError::OutOfRange { n: 3, i: 4 }));
        assert!(matches!(EMap::SequenceGcd(vec![2]).evaluate(4, 1), Err(EMapError::SequenceTooShort { .. })));
        let e = EMap::explicit_from_rows(&[&[4, 6, 1]]).unwrap();
        assert_eq!(e.evaluate(2, 1), Err(EMapError::MissingRow(2)));
        assert!(EMap::zassenhaus(4, 1).is_err());
        assert!(EMap::zassenhaus(2, 0).is_err());
    }

    /// Brute-force gcd over all subsets, no early exit.
    #[test]
    fn sequence_gcd_matches_brute_force() {
        let a = vec![6u64, 10, 15, 4, 9, 0, 12];
        let e = EMap::SequenceGcd(a.clone());
        for n in 2..=8 {
            for i in 1..n {
                let mut g = BigInt::zero();
                for mask in 0u32..(1 << (n - 1)) {
                    if mask.count_ones() as usize == n - i {
                        let p: BigInt = (0..n - 1).filter(|b| mask >> b & 1 == 1).map(|b| BigInt::from(a[b])).product();
                        g = g.gcd(&p);
                    }
                }
                assert_eq!(e.evaluate(n, i).unwrap(), g, "n={n} i={i}");
            }
        }
    }

    #[test]
    fn descending_examples() {
        assert!(EMap::Trivial.check_descending(10).is_ok());
        let e = EMap::explicit_from_rows(&[&[3, 2, 1]]).unwrap();
        assert_eq!(e.check_descending(3), Err(Violation::NotDescending { n: 3, i: 1 }));
        assert!(EMap::zassenhaus(2, 1).unwrap().check_descending(12).is_ok());
        let e = EMap::explicit_from_rows(&[&[2, 2]]).unwrap();
        assert!(matches!(e.check_descending(2), Err(Violation::Diagonal { n: 2, .. })));
    }

    #[test]
    fn binomial_examples() {
        assert!(EMap::Trivial.check_binomial(10).is_ok());
        assert!(EMap::SequenceGcd(vec![2, 3, 4, 6, 5, 12, 8]).check_binomial(8).is_ok());
        for (p, t) in [(2, 1), (3, 2), (5, 3)] {
            assert!(EMap::zassenhaus(p, t).unwrap().check_binomial(8).is_ok());
        }
        // binom(e(4,1), 2) = 1 is not a multiple of e(4,2) = 2
        let e = EMap::explicit_from_rows(&[&[2, 2, 2, 1]]).unwrap();
        assert_eq!(e.check_binomial(4), Err(Violation::Binomial { n: 4, i: 1, l: 2 }));
    }

    #[test]
    fn condition_iii_examples() {
        assert!(EMap::zassenhaus(3, 2).unwrap().check_condition_iii(9).is_ok());
        assert!(EMap::Constant(4).check_condition_iii(8).is_ok());
        let e = EMap::explicit_from_rows(&[&[2, 2, 1, 1]]).unwrap();
        assert_eq!(e.check_condition_iii(4), Err(Violation::ConditionIii { n: 4, i: 1, r: 1, p: 2 }));
    }

    #[test]
    fn normalize_examples() {
        let e = EMap::explicit_from_rows(&[&[4, 6, 1]]).unwrap();
        assert_eq!(row(&e.normalize(3).unwrap(), 3), vec![4, 2, 1]);
        let e = EMap::explicit_from_rows(&[&[0, 1]]).unwrap();
        assert_eq!(row(&e.normalize(2).unwrap(), 2), vec![0, 1]);
        let z = EMap::zassenhaus(2, 1).unwrap();
        let nz = z.normalize(6).unwrap();
        for n in 1..=6 {
            assert_eq!(nz.row(n).unwrap(), z.row(n).unwrap());
        }
        let bad = EMap::explicit_from_rows(&[&[1, 2]]).unwrap();
        assert!(bad.normalize(2).is_err());
    }

    #[test]
    fn ideal_member_examples() {
        let z = RingSpec::integers();
        let x1 = |c: i64, cap| TruncSeries::from_terms(z.clone(), 2, cap, [(Monomial::new(vec![1]), big(c))]).unwrap();
        assert!(ideal_member(&x1(3, 1), &EMap::Constant(3), 2).unwrap());
        assert!(!ideal_member(&x1(1, 1), &EMap::Trivial, 2).unwrap());
        let bracket = TruncSeries::from_terms(
            z.clone(),
            2,
            2,
            [(Monomial::new(vec![1, 2]), big(1)), (Monomial::new(vec![2, 1]), big(-1))],
        )
        .unwrap();
        for e in [EMap::Trivial, EMap::Constant(5), EMap::zassenhaus(2, 1).unwrap()] {
            assert!(ideal_member(&bracket, &e, 2).unwrap());
        }
        let one = TruncSeries::one(z.clone(), 2, 2);
        assert_eq!(
            ideal_witness(&one, &EMap::Trivial, 2).unwrap().unwrap().degree,
            0,
            "constant term is never in the ideal"
        );
        assert!(matches!(ideal_member(&x1(1, 1), &EMap::Trivial, 3), Err(EMapError::CapTooSmall { .. })));
        let modular = TruncSeries::one(RingSpec::modulo(3), 2, 2);
        assert!(matches!(ideal_member(&modular, &EMap::Trivial, 2), Err(EMapError::NotIntegers(_))));

        // e(4,1) = 1 already puts all of 𝔡 in the ideal, whatever e(4,2) says
        let ragged = EMap::explicit_from_rows(&[&[1, 0, 0, 1]]).unwrap();
        let square = TruncSeries::from_terms(z.clone(), 2, 4, [(Monomial::new(vec![1, 1]), big(-1))]).unwrap();
        assert!(ideal_member(&square, &ragged, 4).unwrap());
    }

    #[test]
    fn emap_strings() {
        assert_eq!(EMap::from_spec("trivial").unwrap(), EMap::Trivial);
        assert_eq!(EMap::from_spec("const:3").unwrap(), EMap::Constant(3));
        assert_eq!(EMap::from_spec("gcdseq:2,3,4").unwrap(), EMap::SequenceGcd(vec![2, 3, 4]));
        assert_eq!(EMap::from_spec("zass:3,2").unwrap(), EMap::Zassenhaus { p: 3, t: 2 });
        for bad in ["", "const:", "const:-1", "zass:4,1", "zass:2", "gcdseq:", "foo"] {
            assert!(EMap::from_spec(bad).is_err(), "{bad}");
        }
        for e in [EMap::Trivial, EMap::Constant(7), EMap::SequenceGcd(vec![1, 2]), EMap::Zassenhaus { p: 5, t: 1 }] {
            assert_eq!(EMap::from_spec(&e.to_string()).unwrap(), e);
        }
    }

    #[test]
    fn table_file() {
        let dir = std::env::temp_dir().join(format!("filtrate-emap-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("table.json");
        std::fs::write(&path, r#"[{"n":1,"values":[1]},{"n":3,"values":[4,"6",1]}]"#).unwrap();
        let e = EMap::from_spec(&format!("file:{}", path.display())).unwrap();
        assert_eq!(row(&e, 3), vec![4, 6, 1]);
        assert_eq!(e.levels(10), vec![1, 3]);
        std::fs::write(&path, r#"[{"n":3,"values":[4,1]}]"#).unwrap();
        assert!(matches!(EMap::from_spec(&format!("file:{}", path.display())), Err(EMapError::File { .. })));
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn recursion_conditions_for_both_families() {
        for a in [0u64, 1, 2, 3, 4, 6] {
            let e = EMap::Constant(a);
            let pairs: Vec<_> = (1..10).map(|s| (s, 1)).collect();
            check_product_condition(&e, &pairs).unwrap();
            check_power_condition(&e, &|_| a, &|n| n - 1, 8).unwrap();
        }
        for (p, t) in [(2u64, 1u32), (2, 2), (3, 1), (3, 2), (5, 1)] {
            let e = EMap::zassenhaus(p, t).unwrap();
            let pairs: Vec<_> = (1..10).flat_map(|s| (1..=10 - s).map(move |t| (s, t))).collect();
            check_product_condition(&e, &pairs).unwrap();
            let q = p.pow(t);
            check_power_condition(&e, &|_| q, &|n| n.div_ceil(p as usize), 8).unwrap();
        }
    }

    #[test]
    fn recursion_conditions_detect_failure() {
        // powers with exponent 2 cannot land in level 3 of the trivial map
        let e = EMap::Trivial;
        assert!(check_power_condition(&e, &|_| 2, &|n| n - 1, 3).is_err());
    }
}
